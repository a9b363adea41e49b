from django.apps import AppConfig


class MixingConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'mixing'
    verbose_name = 'Mixing scales and certificates'
