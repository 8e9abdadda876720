"""
Django settings for tunnel_circuits project.

The project has no database: every app is a stateless solver service, exposed
through management commands (``manage.py solve|sweep|scan|wavefunction``) and
a small REST API.
"""

import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get(
    'DJANGO_SECRET_KEY', 'django-insecure-tunnel-circuits-local-development-key'
)

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = os.environ.get('DJANGO_DEBUG', 'true').lower() == 'true'

ALLOWED_HOSTS = os.environ.get('DJANGO_ALLOWED_HOSTS', 'localhost,127.0.0.1,testserver').split(',')


# Application definition

SYSTEM_APPS = [ # Django Default packages
    'django.contrib.contenttypes',
    'django.contrib.auth',
    'django.contrib.staticfiles',
]

THIRD_PARTY_APPS = [ ## Third party libraries and packages
    'rest_framework',
    'drf_yasg',
]

CUSTOM_APPS = [ # Application packages
    'calibration',
    'airy_functions',
    'square_barrier',
    'triangular_barrier',
    'oracles',
    'modes',
]

INSTALLED_APPS = SYSTEM_APPS + THIRD_PARTY_APPS + CUSTOM_APPS # All application packages


MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.middleware.common.CommonMiddleware',
]

ROOT_URLCONF = 'tunnel_circuits.urls'

STATIC_ROOT = os.path.join(BASE_DIR, 'static') # Collect static


TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.template.context_processors.debug',
                'django.template.context_processors.request',
            ],
        },
    },
]

WSGI_APPLICATION = 'tunnel_circuits.wsgi.application'


# No persistence: solver results are computed on request and never stored.
DATABASES = {}


REST_FRAMEWORK = {
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'DEFAULT_PERMISSION_CLASSES': ['rest_framework.permissions.AllowAny'],
    'UNAUTHENTICATED_USER': None,
    'COERCE_DECIMAL_TO_STRING': False,
}

SWAGGER_SETTINGS = {
    'USE_SESSION_AUTH': False,
    'SECURITY_DEFINITIONS': {},
}


# Solver defaults, overridable from the environment
TUNNEL_CIRCUITS = {
    'CONSTANTS_MODE': os.environ.get('TUNNEL_CONSTANTS_MODE', 'paper'),
    'SCAN_STEPS_PER_TURN': int(os.environ.get('TUNNEL_SCAN_STEPS_PER_TURN', '10000')),
    'RK4_STEPS': int(os.environ.get('TUNNEL_RK4_STEPS', '10000')),
    'MAX_BISECTIONS': int(os.environ.get('TUNNEL_MAX_BISECTIONS', '200')),
    'ROOT_TOL_X': float(os.environ.get('TUNNEL_ROOT_TOL_X', '1e-12')),
    'ROOT_TOL_F': float(os.environ.get('TUNNEL_ROOT_TOL_F', '0.0')),
    'WAVEFUNCTION_SAMPLES': int(os.environ.get('TUNNEL_WAVEFUNCTION_SAMPLES', '201')),
    'OUTPUT_FORMAT': os.environ.get('TUNNEL_OUTPUT_FORMAT', 'csv'),
}


# Diagnostics go to stderr only; command data stays on stdout
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s - %(levelname)s - %(name)s - %(message)s',
        },
    },
    'handlers': {
        'stderr': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'plain',
        },
    },
    'loggers': {
        app: {
            'handlers': ['stderr'],
            'level': os.environ.get('TUNNEL_LOG_LEVEL', 'WARNING'),
            'propagate': False,
        }
        for app in CUSTOM_APPS
    },
}


LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Static files (Swagger / ReDoc assets)
STATIC_URL = 'static/'
