"""
WSGI config for mixlog_lab: serves the admin and the read-only run API.
"""

import os

from django.core.wsgi import get_wsgi_application

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'mixlog_lab.settings')

application = get_wsgi_application()
