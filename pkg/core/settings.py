import os
from pathlib import Path

from dotenv import load_dotenv

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

load_dotenv(BASE_DIR / '.env')


def _env_bool(name, default=False):
    value = os.getenv(name)
    if value is None:
        return default
    return value.strip().lower() in ('1', 'true', 'yes', 'on')


# SECURITY WARNING: the fallback key is for local experiments only.
SECRET_KEY = os.getenv('SECRET_KEY', 'skbmlfx-local-experiments-only')

DEBUG = _env_bool('DEBUG', True)

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'skbmlfx',
]

# Database
# Only experiment records live here; the CSV/JSON outputs do not depend on it.

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': os.getenv('SKBMLFX_DB_PATH', str(BASE_DIR / 'db.sqlite3')),
    }
}


# Internationalization

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Logging

LOG_LEVEL = os.getenv('SKBMLFX_LOG_LEVEL', 'INFO').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'verbose': {
            'format': '{asctime} {levelname} {name} {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'verbose',
        },
    },
    'loggers': {
        'skbmlfx': {
            'handlers': ['console'],
            'level': LOG_LEVEL,
            'propagate': False,
        },
    },
}


# Experiments

_workers = os.getenv('SKBMLFX_WORKERS')

SKBMLFX = {
    # None means "use experiment.workers from the config file".
    'WORKERS': int(_workers) if _workers else None,
    'OUTPUT_DIR': Path(os.getenv('SKBMLFX_OUTPUT_DIR', BASE_DIR / 'out')),
    'BRUTE_FORCE_CAP': 10,
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'
