from django.apps import AppConfig


class ConceitosConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'conceitos'
    verbose_name = 'Conceitos'
