from django.apps import AppConfig


class GlobalnessConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'globalness'
    verbose_name = 'Globalness of bipartite unitaries'
