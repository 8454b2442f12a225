from django.core.management.base import CommandError

from ... import harness
from ...models import ExperimentRun
from ..base import ExperimentCommand


def _sizes(text):
    try:
        return [int(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise CommandError(f'--sizes expects comma-separated integers, got {text!r}') from None


class Command(ExperimentCommand):
    help = 'Accuracy against knowledge-base size on one side of the link.'
    record_option = True

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--side', choices=['tx', 'rx'], help='Override sweep.side.')
        parser.add_argument('--sizes', help='Override sweep.sizes, e.g. 2,4,6,8,10.')

    def run(self, **options):
        cfg = self.load_config(options)
        sizes = _sizes(options['sizes']) if options['sizes'] else None
        rows, aggregate, summary = harness.run_skb_sweep(cfg, side=options['side'], sizes=sizes)
        for entry in aggregate:
            self.stdout.write(f'{entry["skb_size"]:>4} {entry["planner"]:<12} accuracy {entry["mean_accuracy"]:.4f}')
        for planner, trend in summary['trend'].items():
            rho = 'n/a' if trend['rho'] is None else f'{trend["rho"]:.3f}'
            self.stdout.write(f'trend {planner:<12} spearman rho {rho}')
        if options['record']:
            run = ExperimentRun.record('sweep', cfg, rows, side=summary['side'])
            self.stdout.write(f'recorded as run {run.pk}')
