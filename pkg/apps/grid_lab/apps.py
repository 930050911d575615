from django.apps import AppConfig


class GridLabConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.grid_lab"
    verbose_name = "Grid Lab"
