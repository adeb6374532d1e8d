from django.apps import AppConfig


class EditTransferAppConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "edit_transfer"
