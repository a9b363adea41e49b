"""
Django settings for the mixlog_lab project.

Numerical defaults used by the apps live in the MIXLOG dict at the bottom and
are read through mixlog_lab.conf.mixlog_setting.
"""
import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get('MIXLOG_SECRET_KEY', 'django-insecure-mixlog-lab-local-only')

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = os.environ.get('MIXLOG_DEBUG', '1') == '1'

ALLOWED_HOSTS = [h for h in os.environ.get('ALLOWED_HOSTS', 'localhost,127.0.0.1').split(',') if h]


# Application definition

INSTALLED_APPS = [
    'django.contrib.admin',
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.sessions',
    'django.contrib.messages',
    'django.contrib.staticfiles',
    'rest_framework',
    'spectral',
    'functionals',
    'logft',
    'advection',
    'mixing',
    'dcommutator',
    'experiments',
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.contrib.sessions.middleware.SessionMiddleware',
    'django.middleware.common.CommonMiddleware',
    'django.middleware.csrf.CsrfViewMiddleware',
    'django.contrib.auth.middleware.AuthenticationMiddleware',
    'django.contrib.messages.middleware.MessageMiddleware',
    'django.middleware.clickjacking.XFrameOptionsMiddleware',
]

ROOT_URLCONF = 'mixlog_lab.urls'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.template.context_processors.debug',
                'django.template.context_processors.request',
                'django.contrib.auth.context_processors.auth',
                'django.contrib.messages.context_processors.messages',
            ],
        },
    },
]

WSGI_APPLICATION = 'mixlog_lab.wsgi.application'


# Database
# Run records and certificates only; trajectories stay on disk.

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}


LANGUAGE_CODE = 'en'

TIME_ZONE = 'UTC'

USE_I18N = True

USE_TZ = True


STATIC_URL = 'static/'

# Django Rest Framework
REST_FRAMEWORK = {
    'DEFAULT_PERMISSION_CLASSES': [
        'rest_framework.permissions.IsAuthenticated',
    ],
    'DEFAULT_AUTHENTICATION_CLASSES': [
        'rest_framework.authentication.SessionAuthentication',
    ],
}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Logging
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        app: {
            'handlers': ['console'],
            'level': os.environ.get('MIXLOG_LOG_LEVEL', 'INFO'),
            'propagate': False,
        }
        for app in (
            'mixlog_lab', 'spectral', 'functionals', 'logft',
            'advection', 'mixing', 'dcommutator', 'experiments',
        )
    },
}


# Numerical defaults
MIXLOG = {
    'CFL': 0.5,
    'PV_LADDER_BASE_CELLS': 4,
    'PV_LADDER_LEVELS': 4,
    'PV_IMAGE_SHELLS': 16,
    'PV_LADDER_REFINE': 4,
    'SCAN_POINTS': 256,
    'BISECTION_RTOL': 1e-4,
    'BOUNDARY_MASS_TOL': 1e-8,
    'ACTIVE_MODE_RTOL': 1e-12,
    'JENSEN_SLACK': 1e-9,
    'ZETA_SPLIT': 32.0,
    'CSV_DIGITS': 17,
    'RESULTS_DIR': BASE_DIR / 'results',
}
