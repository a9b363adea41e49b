from django.core.management.base import BaseCommand, CommandError

from advection.selfsimilar import BandOverflow
from experiments.models import ExperimentRun
from experiments.runner import record_run, sharpness, write_sharpness
from spectral.grid import GridError


class Command(BaseCommand):
    help = 'Tabulate V along the self-similar trajectory and fit its slope in n'

    def add_arguments(self, parser):
        parser.add_argument('--m', type=int, default=2, help='Integer rescaling factor 1/lambda')
        parser.add_argument('--n-max', type=int, default=8)
        parser.add_argument('--pattern', default='cosine')
        parser.add_argument('--N', type=int, default=1024)
        parser.add_argument('--d', type=int, default=2, choices=[1, 2])
        parser.add_argument('--seed', type=int, help='Seed for the random pattern')
        parser.add_argument('--out', help='Directory for sharpness.csv and sharpness.json')

    def handle(self, *args, **options):
        params = {}
        if options['pattern'] == 'random':
            if options['seed'] is None:
                raise CommandError("The random pattern needs --seed", returncode=2)
            params['seed'] = options['seed']
        try:
            report = sharpness(options['m'], options['n_max'], options['pattern'],
                               N=options['N'], d=options['d'], **params)
        except BandOverflow as exc:
            raise CommandError(str(exc), returncode=1) from exc
        except (GridError, ValueError) as exc:
            raise CommandError(str(exc), returncode=2) from exc

        self.stdout.write(report.table(), ending='')
        if report.notice:
            self.stdout.write(self.style.WARNING(report.notice))
        else:
            self.stdout.write(f"slope           {report.slope:.17g}")
            self.stdout.write(f"expected        {report.expected_slope:.17g}  (log m * ||theta0 - mean||^2)")
            self.stdout.write(f"uncentred       {report.uncentred_slope:.17g}  (log m * ||theta0||^2)")
            self.stdout.write(f"relative error  {report.relative_slope_error:.3e}")
        if options.get('out'):
            write_sharpness(options['out'], report)
            self.stdout.write(self.style.SUCCESS(f"Wrote {options['out']}"))
        record_run(ExperimentRun.SHARPNESS, {k: options[k] for k in ('m', 'n_max', 'pattern', 'N', 'd')},
                   options.get('out'), options.get('seed'), report.as_dict())
