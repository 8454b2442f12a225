import tempfile
from pathlib import Path

from django.test import SimpleTestCase, override_settings

from skbmlfx import config
from skbmlfx.exceptions import ConfigInvalid, IoFailure
from skbmlfx.planner import PLANNER_NAMES
from skbmlfx.skb import FULL, random_k


class DefaultConfigTests(SimpleTestCase):
    def test_defaults(self):
        cfg = config.load(config.DEFAULT)
        self.assertEqual((cfg.synth.c_total, cfg.synth.c_seen_tx, cfg.synth.d_v, cfg.synth.d_s), (20, 10, 64, 16))
        self.assertEqual(cfg.k, 8)
        self.assertEqual(cfg.synth.k_hint, 8)
        self.assertEqual(cfg.skb_tx, FULL)
        self.assertEqual(cfg.planners, PLANNER_NAMES)
        self.assertIsNone(cfg.tau)
        self.assertEqual(cfg.options.gamma0, 0.05)
        self.assertEqual(cfg.options.restarts, 16)
        self.assertFalse(cfg.options.polish)
        self.assertEqual(cfg.trials, 10)
        self.assertTrue(cfg.shared)
        self.assertFalse(cfg.timing)
        self.assertEqual(cfg.sweep_sizes, (2, 4, 6, 8, 10))

    def test_none_means_defaults(self):
        self.assertEqual(config.load(None), config.load(config.DEFAULT))

    def test_overrides(self):
        cfg = config.load(config.DEFAULT).with_overrides(seed=7, out_dir='/tmp/run', workers=3)
        self.assertEqual((cfg.base_seed, cfg.out_dir, cfg.workers), (7, Path('/tmp/run'), 3))
        self.assertEqual(cfg.as_dict()['experiment.base_seed'], '7')

    @override_settings(SKBMLFX={'WORKERS': 4, 'OUTPUT_DIR': Path('out'), 'BRUTE_FORCE_CAP': 10})
    def test_environment_worker_override(self):
        self.assertEqual(config.load(config.DEFAULT).effective_workers(), 4)

    @override_settings(SKBMLFX={'WORKERS': None, 'OUTPUT_DIR': Path('out'), 'BRUTE_FORCE_CAP': 10})
    def test_configured_workers(self):
        self.assertEqual(config.load(config.DEFAULT).with_overrides(workers=2).effective_workers(), 2)


class ConfigFileTests(SimpleTestCase):
    def write(self, text):
        tmp = tempfile.TemporaryDirectory()
        self.addCleanup(tmp.cleanup)
        path = Path(tmp.name) / 'experiment.cfg'
        path.write_text(text)
        return path

    def test_file_values(self):
        path = self.write(
            '# small run\n'
            'synth.c_total = 14\n'
            'synth.d_v = 24   # visual width\n'
            'extractor.k = 4\n'
            'extractor.shared = no\n'
            'skb.rx = random:3:9\n'
            'planner.names = cccp, level2, cccp\n'
            'planner.tau = 0.002\n'
            'cccp.polish = On\n'
            'sweep.sizes = 1,2\n'
        )
        cfg = config.load(path)
        self.assertEqual((cfg.synth.c_total, cfg.synth.d_v, cfg.k), (14, 24, 4))
        self.assertFalse(cfg.shared)
        self.assertEqual(cfg.skb_rx, random_k(3, 9))
        self.assertEqual(cfg.planners, ('cccp', 'level2'))
        self.assertEqual(cfg.tau, 0.002)
        self.assertTrue(cfg.options.polish)
        self.assertEqual(cfg.sweep_sizes, (1, 2))
        self.assertEqual(cfg.as_dict()['synth.d_v'], '24')

    def test_unknown_key(self):
        with self.assertRaises(ConfigInvalid) as ctx:
            config.load(self.write('synth.colours = 3\n'))
        self.assertIn('line 1', ctx.exception.errors)

    def test_unknown_section_and_bad_line(self):
        with self.assertRaises(ConfigInvalid) as ctx:
            config.load(self.write('radio.power = 3\nnot a setting\n'))
        self.assertEqual(set(ctx.exception.errors), {'line 1', 'line 2'})

    def test_invalid_values(self):
        cases = {
            'synth.c_seen_tx = 20': 'synth',
            'channel.d_m = 0': 'channel.d_m',
            'extractor.lambda_rx = -1': 'extractor.lambda_rx',
            'skb.tx = some': 'skb.tx',
            'planner.names = simplex': 'planner.names',
            'planner.tau = -1': 'planner.tau',
            'cccp.gamma_growth = 1': 'cccp.gamma_growth',
            'cccp.polish = maybe': 'cccp.polish',
            'experiment.workers = 0': 'experiment.workers',
            'sweep.sizes = 2,x': 'sweep.sizes',
        }
        for line, key in cases.items():
            with self.subTest(line=line), self.assertRaises(ConfigInvalid) as ctx:
                config.load(self.write(line + '\n'))
            self.assertIn(key, ctx.exception.errors)

    def test_cross_section_checks(self):
        with self.assertRaises(ConfigInvalid) as ctx:
            config.load(self.write('extractor.k = 20\nsweep.sizes = 2,11\n'))
        self.assertEqual(set(ctx.exception.errors), {'extractor.k', 'sweep.sizes'})

    def test_missing_file(self):
        with self.assertRaises(IoFailure):
            config.load('/nonexistent/experiment.cfg')
