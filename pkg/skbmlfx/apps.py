from django.apps import AppConfig


class SkbmlfxConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'skbmlfx'
    verbose_name = 'SKB multi-level feature transmission'
