from django.apps import AppConfig


class TriangularBarrierConfig(AppConfig):
    name = 'triangular_barrier'
