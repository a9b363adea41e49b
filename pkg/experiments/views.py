from django.shortcuts import get_object_or_404
from rest_framework.decorators import api_view, permission_classes
from rest_framework.permissions import IsAuthenticated
from rest_framework.response import Response

from .models import ExperimentRun
from .serializers import ExperimentRunListSerializer, ExperimentRunSerializer


@api_view(['GET'])
@permission_classes([IsAuthenticated])
def run_list_api(request):
    runs = ExperimentRun.objects.all()
    command = request.query_params.get('command')
    if command:
        runs = runs.filter(command=command)
    serializer = ExperimentRunListSerializer(runs, many=True)
    return Response(serializer.data)


@api_view(['GET'])
@permission_classes([IsAuthenticated])
def run_detail_api(request, pk):
    run = get_object_or_404(ExperimentRun.objects.prefetch_related('certificates'), pk=pk)
    serializer = ExperimentRunSerializer(run)
    return Response(serializer.data)
