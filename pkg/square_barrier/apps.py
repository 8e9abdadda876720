from django.apps import AppConfig


class SquareBarrierConfig(AppConfig):
    name = 'square_barrier'
