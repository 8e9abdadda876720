"""
WSGI config for tunnel_circuits project.

It exposes the WSGI callable as a module-level variable named ``application``.
Serve it with ``gunicorn tunnel_circuits.wsgi``.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'tunnel_circuits.settings')

application = get_wsgi_application()
