from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from dcommutator.checks import PROBE_FAMILIES, RANDOM_TRIPLES
from experiments.models import ExperimentRun
from experiments.runner import PROBE_FILE, PROBE_SUMMARY_FILE, holder_probe, record_run, write_probe
from mixlog_lab.conf import mixlog_setting
from spectral.grid import GridError


class Command(BaseCommand):
    help = 'Tabulate |T(f, g, v)| / (||f||_inf ||g||_p\' ||grad v||_p) over seeded random triples'

    def add_arguments(self, parser):
        parser.add_argument('--p', type=float, action='append', help='Exponent p (repeatable, default 2)')
        parser.add_argument('--seeds', type=int, default=1000, help='Number of seeded triples per p')
        parser.add_argument('--first-seed', type=int, default=0)
        parser.add_argument('--N', type=int, default=64)
        parser.add_argument('--kmax', type=int, default=4)
        parser.add_argument('--family', default=RANDOM_TRIPLES, choices=PROBE_FAMILIES)
        parser.add_argument('--out', help=f'Directory for {PROBE_FILE} and {PROBE_SUMMARY_FILE}')

    def handle(self, *args, **options):
        p_values = options['p'] or [2.0]
        if options['seeds'] < 1:
            raise CommandError("--seeds must be at least 1", returncode=2)
        seeds = range(options['first_seed'], options['first_seed'] + options['seeds'])
        try:
            report = holder_probe(p_values, seeds, N=options['N'], kmax=options['kmax'], family=options['family'])
        except (GridError, ValueError) as exc:
            raise CommandError(str(exc), returncode=2) from exc

        out = Path(options['out'] or Path(mixlog_setting('RESULTS_DIR')) / 'probe')
        write_probe(out, report)
        for summary in report.as_dict()['by_p']:
            self.stdout.write(
                f"p={summary['p']:g}  count={summary['count']}  max={summary['max']:.6g}  mean={summary['mean']:.6g}"
            )
        self.stdout.write(self.style.WARNING(report.as_dict()['notice']))
        self.stdout.write(self.style.SUCCESS(f"Wrote {out}"))
        params = {k: options[k] for k in ('seeds', 'first_seed', 'N', 'kmax', 'family')}
        params['p'] = p_values
        record_run(ExperimentRun.PROBE, params, out, options['first_seed'], report.as_dict())
