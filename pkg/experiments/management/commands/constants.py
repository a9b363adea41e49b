from django.core.management.base import BaseCommand, CommandError

from experiments.utils import dumps
from logft.zeta import build_constants


class Command(BaseCommand):
    help = 'Print sigma_{d-1}, zeta_d, alpha_d, beta_d and c_d with the zeta error bound as JSON'

    def add_arguments(self, parser):
        parser.add_argument('--d', type=int, required=True)

    def handle(self, *args, **options):
        d = options['d']
        if d not in (1, 2):
            raise CommandError(f"Constants are computed for d in (1, 2), got {d}", returncode=2)
        self.stdout.write(dumps(build_constants(d).as_dict()), ending='')
