"""
URL configuration for mixlog_lab.

Only the admin and the read-only experiment API are exposed.
"""
from django.contrib import admin
from django.urls import include, path

urlpatterns = [
    path('admin/', admin.site.urls),
    path('api/', include('experiments.urls')),
]
