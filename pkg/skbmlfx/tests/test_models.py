import json

from django.test import TestCase

from skbmlfx import config
from skbmlfx.harness import ExperimentRow
from skbmlfx.models import ExperimentResult, ExperimentRun


def make_row(trial, planner, accuracy, skb_size=None):
    return ExperimentRow(trial=trial, planner=planner, avg_loss=0.25, avg_latency_s=1e-5, accuracy=accuracy,
                         feasible=True, skb_size=skb_size, side='rx' if skb_size else None)


class ExperimentRunTests(TestCase):
    def setUp(self):
        self.cfg = config.load(config.DEFAULT).with_overrides(seed=3)

    def test_record(self):
        rows = [make_row(0, 'cccp', 0.5), make_row(0, 'level1', 0.25), make_row(1, 'cccp', 1.0)]
        run = ExperimentRun.objects.get(pk=ExperimentRun.record('tradeoff', self.cfg, rows).pk)
        self.assertEqual(run.results.count(), 3)
        self.assertEqual(run.base_seed, 3)
        self.assertEqual(run.trials, 10)
        self.assertEqual(json.loads(run.config)['experiment.base_seed'], '3')
        self.assertEqual(str(run), 'tradeoff seed=3 trials=10')

    def test_mean_accuracy(self):
        rows = [make_row(0, 'cccp', 0.5), make_row(1, 'cccp', 1.0), make_row(0, 'level4', 0.0)]
        run = ExperimentRun.record('tradeoff', self.cfg, rows)
        self.assertAlmostEqual(run.mean_accuracy('cccp'), 0.75)
        self.assertEqual(run.mean_accuracy('level4'), 0.0)
        self.assertIsNone(run.mean_accuracy('brute_force'))

    def test_sweep_rows_keep_sizes(self):
        rows = [make_row(0, 'cccp', 0.5, skb_size=4), make_row(0, 'cccp', 0.75, skb_size=2)]
        run = ExperimentRun.record('sweep', self.cfg, rows, side='rx')
        self.assertEqual(str(run), 'sweep (rx) seed=3 trials=10')
        self.assertEqual(list(run.results.values_list('skb_size', flat=True)), [2, 4])
        self.assertIsNone(ExperimentResult.objects.first().wall_time_s)

    def test_run_without_rows(self):
        run = ExperimentRun.record('sweep', self.cfg, [], side='tx')
        self.assertEqual(run.results.count(), 0)
        self.assertEqual(ExperimentRun.objects.get().side, 'tx')
