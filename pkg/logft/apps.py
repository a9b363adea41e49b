from django.apps import AppConfig


class LogftConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'logft'
    verbose_name = 'Log kernel Fourier constants'
