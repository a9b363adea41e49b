from rest_framework import serializers

from mixing.certificates import FUNCTIONAL, GEOMETRIC

from .models import CertificateRecord, ExperimentRun
from .utils import json_safe


class CertificateRecordSerializer(serializers.ModelSerializer):
    kind_display = serializers.CharField(source='get_kind_display', read_only=True)

    class Meta:
        model = CertificateRecord
        fields = ['id', 'kind', 'kind_display', 'bound', 'constant', 'constant_provenance',
                  'inputs', 'verdict', 'created_at']


class ExperimentRunSerializer(serializers.ModelSerializer):
    certificates = CertificateRecordSerializer(many=True, read_only=True)
    duration_seconds = serializers.ReadOnlyField()

    class Meta:
        model = ExperimentRun
        fields = ['id', 'command', 'status', 'seed', 'output_dir', 'parameters', 'summary',
                  'started_at', 'finished_at', 'duration_seconds', 'certificates']


class ExperimentRunListSerializer(serializers.ModelSerializer):
    certificate_count = serializers.IntegerField(source='certificates.count', read_only=True)

    class Meta:
        model = ExperimentRun
        fields = ['id', 'command', 'status', 'seed', 'output_dir', 'started_at', 'finished_at',
                  'certificate_count']


class DecayCertificateSerializer(serializers.Serializer):
    """A mixing.certificates.DecayCertificate as it appears in summary files and records."""

    kind = serializers.ChoiceField(choices=[FUNCTIONAL, GEOMETRIC])
    bound = serializers.FloatField()
    C = serializers.FloatField(allow_null=True, required=False)
    C_provenance = serializers.CharField(allow_null=True, required=False)
    inputs = serializers.DictField()
    verdict = serializers.CharField(allow_null=True, required=False)
    witness_count = serializers.SerializerMethodField()

    def get_witness_count(self, obj):
        return len(obj.witnesses)

    def to_representation(self, instance):
        return json_safe(super().to_representation(instance))

    def save_for(self, run):
        """Persist the certificate passed as `instance` against a run."""
        cert = self.instance
        return CertificateRecord.objects.create(
            run=run,
            kind=cert.kind,
            bound=cert.bound,
            constant=cert.C,
            constant_provenance=cert.C_provenance or '',
            inputs=json_safe(cert.inputs),
            verdict=cert.verdict or '',
        )


class SuiteCheckSerializer(serializers.Serializer):
    name = serializers.CharField()
    passed = serializers.BooleanField()
    value = serializers.FloatField(allow_null=True)
    tolerance = serializers.FloatField(allow_null=True)
    detail = serializers.CharField(allow_blank=True)


class SuiteResultSerializer(serializers.Serializer):
    name = serializers.CharField()
    passed = serializers.BooleanField()
    elapsed = serializers.FloatField()
    checks = SuiteCheckSerializer(many=True)
    details = serializers.DictField()

    def to_representation(self, instance):
        return json_safe(super().to_representation(instance))
