from django.apps import AppConfig


class DcommutatorConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'dcommutator'
    verbose_name = 'Commutator trilinear form'
