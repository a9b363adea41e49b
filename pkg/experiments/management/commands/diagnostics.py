from django.core.management.base import BaseCommand, CommandError

from experiments.models import ExperimentRun
from experiments.runner import record_run, recompute_series
from experiments.utils import SeriesFormatError
from spectral.snapshots import SnapshotFormatError


class Command(BaseCommand):
    help = 'Recompute series.csv from the snapshots of a trajectory directory'

    def add_arguments(self, parser):
        parser.add_argument('directory', help='Trajectory directory or its snapshots/ subdirectory')
        parser.add_argument('--s', type=float, action='append', help='H^-s order (repeatable, default 1)')
        parser.add_argument('--kappa', type=float, help='Geometric mixing scale at this kappa')
        parser.add_argument('--out', help='Target series file or directory (default: the trajectory directory)')

    def handle(self, *args, **options):
        kappa = options.get('kappa')
        if kappa is not None and not 0 < kappa < 1:
            raise CommandError("--kappa must lie strictly between 0 and 1", returncode=2)
        s_values = options.get('s') or [1.0]
        if any(s <= 0 for s in s_values):
            raise CommandError("--s takes positive orders", returncode=2)
        diagnostics = {'v': True, 'w': True, 's': s_values, 'kappa': kappa}
        try:
            target, records = recompute_series(options['directory'], diagnostics, out=options.get('out'))
        except FileNotFoundError as exc:
            raise CommandError(str(exc), returncode=2) from exc
        except (SnapshotFormatError, SeriesFormatError) as exc:
            raise CommandError(f"Unreadable trajectory: {exc}", returncode=1) from exc

        record_run(ExperimentRun.DIAGNOSTICS, {'directory': options['directory'], **diagnostics},
                   target.parent, None, {'samples': len(records), 'series': str(target)})
        self.stdout.write(self.style.SUCCESS(f"Wrote {len(records)} rows to {target}"))
