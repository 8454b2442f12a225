from django.core.management.base import CommandError

from ...selftest import run_checks
from ..base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Run the built-in invariant checks.'

    def run(self, **options):
        seed = options['seed'] if options['seed'] is not None else 0
        results = run_checks(seed)
        for result in results:
            status = self.style.SUCCESS('ok  ') if result.passed else self.style.ERROR('FAIL')
            self.stdout.write(f'{status} {result.name}: {result.detail}')
        failed = [result.name for result in results if not result.passed]
        if failed:
            raise CommandError(f'self-test failed: {", ".join(failed)}')
        self.stdout.write(self.style.SUCCESS(f'all {len(results)} checks passed'))
