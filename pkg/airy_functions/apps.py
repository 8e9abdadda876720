from django.apps import AppConfig


class AiryFunctionsConfig(AppConfig):
    name = 'airy_functions'
