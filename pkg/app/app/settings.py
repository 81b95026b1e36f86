"""
Django settings for the entropy markers project.

The project has no database and no web surface: Django hosts the analysis
application, its management commands, templates and test runner.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path
import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.getenv('DJANGO_SECRET_KEY', 'entropy-markers-offline-key')

DEBUG = os.getenv('DJANGO_DEBUG', 'false').lower() == 'true'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'rest_framework',
    'markers',
]

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {},
    },
]

# No database backend: every test is a SimpleTestCase.
DATABASES = {}

USE_TZ = True
TIME_ZONE = 'UTC'

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


def _env_bool(name, default):
    return os.getenv(name, default).lower() in ('1', 'true', 'yes', 'on')


# Analysis defaults (AnalysisConfig). Values follow the advertising-market
# protocol: L = 4, difference series, 350-week windows stepped by one year,
# words of length 12 compared by composition, 1% rare-word cutoff.
MARKERS = {
    'alphabet_size': int(os.getenv('MARKERS_ALPHABET_SIZE', '4')),
    'differencing': _env_bool('MARKERS_DIFFERENCING', 'true'),
    'window_kind': os.getenv('MARKERS_WINDOW_KIND', 'overlapping'),
    'window_length': int(os.getenv('MARKERS_WINDOW_LENGTH', '350')),
    'window_step': int(os.getenv('MARKERS_WINDOW_STEP', '52')),
    'window_count': int(os.getenv('MARKERS_WINDOW_COUNT', '4')),
    'window_seed': int(os.getenv('MARKERS_WINDOW_SEED', '0')),
    'word_length': int(os.getenv('MARKERS_WORD_LENGTH', '12')),
    'equivalence': os.getenv('MARKERS_EQUIVALENCE', 'composition'),
    'rare_threshold': float(os.getenv('MARKERS_RARE_THRESHOLD', '0.01')),
    'sparsity_delta': float(os.getenv('MARKERS_SPARSITY_DELTA', '0.25')),
    'symbolization_mode': os.getenv('MARKERS_SYMBOLIZATION_MODE', 'global'),
}

# Django REST Framework Configuration (serializers and renderers only)
REST_FRAMEWORK = {
    'DEFAULT_AUTHENTICATION_CLASSES': [],
    'DEFAULT_PERMISSION_CLASSES': [],
    'UNAUTHENTICATED_USER': None,
}

# Celery Configuration
CELERY_BROKER_URL = os.getenv('CELERY_BROKER_URL', 'redis://localhost:6379/0')
CELERY_RESULT_BACKEND = os.getenv('CELERY_RESULT_BACKEND', 'redis://localhost:6379/0')
CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_TIMEZONE = TIME_ZONE
CELERY_ENABLE_UTC = True
# Run entity tasks in-process unless a worker pool is explicitly requested.
CELERY_TASK_ALWAYS_EAGER = _env_bool('MARKERS_CELERY_EAGER', 'true')
CELERY_TASK_EAGER_PROPAGATES = True

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'markers': {
            'handlers': ['console'],
            'level': os.getenv('MARKERS_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}
