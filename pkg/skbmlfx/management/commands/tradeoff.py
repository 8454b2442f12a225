from ... import harness
from ...models import ExperimentRun
from ..base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Latency/accuracy table for every planner over seeded trials.'
    record_option = True

    def run(self, **options):
        cfg = self.load_config(options)
        rows, summary = harness.run_tradeoff(cfg)
        for planner, means in summary['planners'].items():
            self.stdout.write(
                f'{planner:<12} accuracy {means["mean_accuracy"]:.4f}  '
                f'latency {means["mean_avg_latency_s"]:.6e} s  feasible {means["feasible_fraction"]:.2f}'
            )
        if options['record']:
            run = ExperimentRun.record('tradeoff', cfg, rows)
            self.stdout.write(f'recorded as run {run.pk}')
        self.stdout.write(self.style.SUCCESS(f'wrote {cfg.out_dir}/tradeoff.csv and {cfg.out_dir}/summary.json'))
