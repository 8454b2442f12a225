from pathlib import Path

from ... import data, harness
from ...planner import BRUTE_FORCE_MAX_M
from ..base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Compare CCCP with exhaustive search on seeded random instances.'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--m', type=int, default=6, help=f'Samples per instance (at most {BRUTE_FORCE_MAX_M}).')
        parser.add_argument('--instances', type=int, default=50)

    def run(self, **options):
        cfg = self.load_config(options)
        seed = options['seed'] if options['seed'] is not None else cfg.base_seed
        result = harness.run_oracle(options['m'], options['instances'], seed, cfg.options)
        self.stdout.write(
            f'match rate {result.match_rate:.3f} ({result.matches}/{result.instances}), '
            f'worst ratio {result.worst_ratio:.4f}, infeasible {result.infeasible_outputs}, '
            f'bound violations {result.bound_violations}'
        )
        if options['out']:
            data.write_json(Path(options['out']) / 'oracle.json', result.as_dict())
