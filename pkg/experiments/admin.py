from django.contrib import admin

from .models import CertificateRecord, ExperimentRun


class CertificateInline(admin.TabularInline):
    model = CertificateRecord
    extra = 0
    readonly_fields = ['kind', 'bound', 'constant', 'constant_provenance', 'verdict', 'created_at']


@admin.register(ExperimentRun)
class ExperimentRunAdmin(admin.ModelAdmin):
    list_display = ['id', 'command', 'status', 'seed', 'started_at', 'finished_at']
    list_filter = ['command', 'status', 'started_at']
    search_fields = ['output_dir']
    readonly_fields = ['started_at', 'finished_at']
    inlines = [CertificateInline]

    fieldsets = (
        ('Run', {
            'fields': ('command', 'status', 'seed', 'output_dir')
        }),
        ('Parameters', {
            'fields': ('parameters',)
        }),
        ('Results', {
            'fields': ('summary', 'started_at', 'finished_at')
        }),
    )


@admin.register(CertificateRecord)
class CertificateRecordAdmin(admin.ModelAdmin):
    list_display = ['run', 'kind', 'bound', 'constant', 'constant_provenance', 'verdict']
    list_filter = ['kind', 'verdict']
