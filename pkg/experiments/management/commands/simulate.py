from django.core.management.base import BaseCommand, CommandError

from advection.selfsimilar import BandOverflow
from advection.solver import CFLViolation
from experiments.forms import ConfigError, load_config
from experiments.runner import simulate
from spectral.grid import GridError


class Command(BaseCommand):
    help = 'Run a transport simulation from an INI config and write series.csv and summary.json'

    def add_arguments(self, parser):
        parser.add_argument('--config', required=True, help='Experiment config (INI)')
        parser.add_argument('--out', help='Output directory (overrides [output] directory)')
        parser.add_argument('--seed', type=int, help='Seed for every randomized component')
        parser.add_argument('--no-record', action='store_true', help='Do not store the run in the database')

    def handle(self, *args, **options):
        try:
            config = load_config(options['config'])
        except ConfigError as exc:
            raise CommandError(f"{options['config']}: {exc}", returncode=2) from exc

        try:
            result = simulate(config, out=options.get('out'), seed=options.get('seed'),
                              record=not options['no_record'])
        except (CFLViolation, BandOverflow, GridError, ValueError) as exc:
            raise CommandError(f"Simulation failed: {exc}", returncode=1) from exc

        summary = result.summary
        self.stdout.write(f"{summary['samples']} samples on {summary['grid']} up to t={summary['horizon']:g}")
        slopes = summary['slopes']
        if slopes['v'] is not None:
            self.stdout.write(f"  slope of V:       {slopes['v']:.10g}")
        if slopes['sqrt_w'] is not None:
            self.stdout.write(f"  slope of sqrt(W): {slopes['sqrt_w']:.10g}")
        for name, monitor in summary['monitor'].items():
            style = self.style.SUCCESS if monitor['holds'] else self.style.WARNING
            self.stdout.write(style(
                f"  {name}: |delta| = {abs(monitor['delta']):.6g} <= {monitor['bound']:.6g} ({monitor['C_provenance']})"
            ))
        for cert in summary['certificates']:
            style = self.style.SUCCESS if cert['verdict'] == 'pass' else self.style.ERROR
            self.stdout.write(style(f"  {cert['kind']} certificate: {cert['verdict']}"))
        self.stdout.write(self.style.SUCCESS(f"Wrote {result.series_path} and {result.summary_path}"))
