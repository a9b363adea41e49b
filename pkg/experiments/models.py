from django.db import models
from django.utils import timezone


class ExperimentRun(models.Model):
    SIMULATE = 'simulate'
    SHARPNESS = 'sharpness'
    VERIFY = 'verify'
    DIAGNOSTICS = 'diagnostics'
    PROBE = 'probe'
    COMMAND_CHOICES = [
        (SIMULATE, 'Simulate'),
        (SHARPNESS, 'Sharpness'),
        (VERIFY, 'Verify'),
        (DIAGNOSTICS, 'Diagnostics'),
        (PROBE, 'Holder probe'),
    ]

    RUNNING = 'running'
    COMPLETED = 'completed'
    FAILED = 'failed'
    STATUS_CHOICES = [
        (RUNNING, 'Running'),
        (COMPLETED, 'Completed'),
        (FAILED, 'Failed'),
    ]

    command = models.CharField(max_length=20, choices=COMMAND_CHOICES)
    parameters = models.JSONField(default=dict, blank=True)
    output_dir = models.CharField(max_length=500, blank=True)
    seed = models.BigIntegerField(null=True, blank=True)
    status = models.CharField(max_length=20, choices=STATUS_CHOICES, default=RUNNING)
    summary = models.JSONField(default=dict, blank=True)
    started_at = models.DateTimeField(auto_now_add=True)
    finished_at = models.DateTimeField(null=True, blank=True)

    class Meta:
        ordering = ['-started_at']

    def __str__(self):
        return f"{self.command} #{self.pk} ({self.status})"

    def finish(self, status, summary=None):
        self.status = status
        if summary is not None:
            self.summary = summary
        self.finished_at = timezone.now()
        self.save(update_fields=['status', 'summary', 'finished_at'])

    @property
    def duration_seconds(self):
        if self.finished_at:
            return (self.finished_at - self.started_at).total_seconds()
        return None


class CertificateRecord(models.Model):
    FUNCTIONAL = 'functional'
    GEOMETRIC = 'geometric'
    KIND_CHOICES = [
        (FUNCTIONAL, 'Functional decay'),
        (GEOMETRIC, 'Geometric scale'),
    ]

    run = models.ForeignKey(ExperimentRun, on_delete=models.CASCADE, related_name='certificates')
    kind = models.CharField(max_length=20, choices=KIND_CHOICES)
    bound = models.FloatField()
    constant = models.FloatField(null=True, blank=True)
    constant_provenance = models.CharField(max_length=100, blank=True)
    inputs = models.JSONField(default=dict, blank=True)
    verdict = models.CharField(max_length=10, blank=True)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['run', 'created_at']

    def __str__(self):
        return f"{self.get_kind_display()} bound {self.bound:.6g} for run #{self.run_id}"
