# Generated by Django 5.0.6 on 2026-10-19 09:12

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(choices=[('simulate', 'Simulate'), ('sharpness', 'Sharpness'), ('verify', 'Verify'), ('diagnostics', 'Diagnostics'), ('probe', 'Holder probe')], max_length=20)),
                ('parameters', models.JSONField(blank=True, default=dict)),
                ('output_dir', models.CharField(blank=True, max_length=500)),
                ('seed', models.BigIntegerField(blank=True, null=True)),
                ('status', models.CharField(choices=[('running', 'Running'), ('completed', 'Completed'), ('failed', 'Failed')], default='running', max_length=20)),
                ('summary', models.JSONField(blank=True, default=dict)),
                ('started_at', models.DateTimeField(auto_now_add=True)),
                ('finished_at', models.DateTimeField(blank=True, null=True)),
            ],
            options={
                'ordering': ['-started_at'],
            },
        ),
        migrations.CreateModel(
            name='CertificateRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('kind', models.CharField(choices=[('functional', 'Functional decay'), ('geometric', 'Geometric scale')], max_length=20)),
                ('bound', models.FloatField()),
                ('constant', models.FloatField(blank=True, null=True)),
                ('constant_provenance', models.CharField(blank=True, max_length=100)),
                ('inputs', models.JSONField(blank=True, default=dict)),
                ('verdict', models.CharField(blank=True, max_length=10)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='certificates', to='experiments.experimentrun')),
            ],
            options={
                'ordering': ['run', 'created_at'],
            },
        ),
    ]
