from django.urls import path

from . import views

app_name = 'experiments'

urlpatterns = [
    path('runs/', views.run_list_api, name='run_list_api'),
    path('runs/<int:pk>/', views.run_detail_api, name='run_detail_api'),
]
