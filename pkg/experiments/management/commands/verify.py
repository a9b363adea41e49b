from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from experiments.models import ExperimentRun
from experiments.runner import record_run
from experiments.serializers import SuiteResultSerializer
from experiments.suites import SUITES, UnknownSuite, run_suite
from experiments.utils import write_json


class Command(BaseCommand):
    help = 'Run named verification suites; exits with 1 when any check fails'

    def add_arguments(self, parser):
        parser.add_argument('--suite', action='append', required=True,
                            help=f"Suite name or 'all' (repeatable); one of {', '.join(sorted(SUITES))}")
        parser.add_argument('--out', help='Results JSON file, or a directory for verify.json')

    def handle(self, *args, **options):
        names = []
        for name in options['suite']:
            names.extend(sorted(SUITES) if name == 'all' else [name])
        unknown = [name for name in names if name not in SUITES]
        if unknown:
            raise CommandError(f"Unknown suite {unknown[0]!r}; choose from {sorted(SUITES)}", returncode=2)

        results = []
        for name in names:
            try:
                result = run_suite(name)
            except UnknownSuite as exc:
                raise CommandError(str(exc), returncode=2) from exc
            results.append(result)
            style = self.style.SUCCESS if result.passed else self.style.ERROR
            self.stdout.write(style(f"{name}: {'PASS' if result.passed else 'FAIL'} ({result.elapsed:.2f}s)"))
            for check in result.checks:
                mark = 'ok' if check.passed else 'FAILED'
                self.stdout.write(f"  {check.name}: {check.value!r} vs {check.tolerance!r} {mark} {check.detail}".rstrip())

        data = {
            'passed': all(r.passed for r in results),
            'suites': SuiteResultSerializer(results, many=True).data,
        }
        target = None
        if options.get('out'):
            target = Path(options['out'])
            if target.suffix != '.json':
                target = target / 'verify.json'
            write_json(target, data)
            self.stdout.write(f"Wrote {target}")

        status = ExperimentRun.COMPLETED if data['passed'] else ExperimentRun.FAILED
        record_run(ExperimentRun.VERIFY, {'suites': names}, target, None, data, status=status)
        if not data['passed']:
            failed = [r.name for r in results if not r.passed]
            raise CommandError(f"Suite failure: {', '.join(failed)}", returncode=1)
