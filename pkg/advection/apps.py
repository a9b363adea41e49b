from django.apps import AppConfig


class AdvectionConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'advection'
    verbose_name = 'Passive scalar advection'
