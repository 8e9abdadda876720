"""
URL configuration for tunnel_circuits project.

The mode endpoints mirror the management commands; Swagger and ReDoc pages
document them.
"""
from django.urls import include, path, re_path
from drf_yasg import openapi
from drf_yasg.views import get_schema_view
from rest_framework import permissions

from modes.views import ModeViewSet

schema_view = get_schema_view(
    openapi.Info(
        title="Tunnel Circuits API",
        default_version='v1',
        description="Modes of closed tunnelling loops with a square or triangular barrier",
    ),
    public=True,
    permission_classes=(permissions.AllowAny,),
)

urlpatterns = [
    path('api/modes/', include([ # Mode API
        path('solve/', ModeViewSet.as_view({'post': 'solve'}), name='mode-solve'),
        path('sweep/', ModeViewSet.as_view({'post': 'sweep'}), name='mode-sweep'),
        path('scan/', ModeViewSet.as_view({'post': 'scan'}), name='mode-scan'),
        path('wavefunction/', ModeViewSet.as_view({'post': 'wavefunction'}), name='mode-wavefunction'),
    ])),
    re_path(r'^swagger(?P<format>\.json|\.yaml)$', schema_view.without_ui(cache_timeout=0), name='schema-json'), ## OpenAPI urls
    path('swagger/', schema_view.with_ui('swagger', cache_timeout=0), name='schema-swagger-ui'), # Swagger UI page
    path('redoc/', schema_view.with_ui('redoc', cache_timeout=0), name='schema-redoc'), # ReDoc UI page
]
