import json
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from skbmlfx.data import (
    SynthConfig,
    generate,
    load_features,
    load_instance,
    load_model,
    load_prototypes,
    report_to_json,
    save_features,
    save_instance,
    save_model,
    save_prototypes,
    write_json,
)
from skbmlfx.exceptions import ConfigInvalid, DimensionMismatch, IoFailure, MalformedHeader
from skbmlfx.extractor import SemanticPrototypes, train_extractor
from skbmlfx.planner import random_instance, solve_lagrangian

SMALL = SynthConfig(c_total=10, c_seen_tx=6, c_seen_rx=5, d_v=12, d_s=6, n_per_class=3, n_test=7, seed=5)


class GenerateTests(SimpleTestCase):
    def test_same_seed_same_world(self):
        first, second = generate(SMALL), generate(SMALL)
        np.testing.assert_array_equal(first.prototypes.vectors, second.prototypes.vectors)
        np.testing.assert_array_equal(first.mapping, second.mapping)
        np.testing.assert_array_equal(first.tx_train.visual, second.tx_train.visual)
        np.testing.assert_array_equal(first.test_visual, second.test_visual)

    def test_other_seed_other_world(self):
        other = generate(SynthConfig(**{**SMALL.as_dict(), 'seed': 6}))
        self.assertFalse(np.array_equal(generate(SMALL).prototypes.vectors, other.prototypes.vectors))

    def test_class_split(self):
        world = generate(SMALL)
        self.assertEqual(set(world.tx_train.labels.tolist()), set(range(6)))
        self.assertEqual(set(world.rx_train.labels.tolist()), set(range(1, 6)))
        self.assertEqual(world.unseen_classes, (6, 7, 8, 9))
        self.assertEqual(world.test_labels.tolist(), [6, 7, 8, 9, 6, 7, 8])
        self.assertEqual(world.tx_train.n, 6 * 3)

    def test_prototypes_are_unit_and_spread(self):
        vectors = generate(SMALL).prototypes.vectors
        np.testing.assert_allclose(np.linalg.norm(vectors, axis=0), 1.0, atol=1e-12)
        gaps = [np.linalg.norm(vectors[:, i] - vectors[:, j]) for i in range(10) for j in range(i + 1, 10)]
        self.assertGreaterEqual(min(gaps), 0.1)

    def test_noise_free_orthonormal_map(self):
        cfg = SynthConfig(**{**SMALL.as_dict(), 'noise_sigma': 0.0, 'orthonormal_map': True})
        world = generate(cfg)
        scaled = world.mapping.T @ world.mapping
        np.testing.assert_allclose(scaled, (cfg.d_v / cfg.d_s) * np.eye(cfg.d_s), atol=1e-10)
        np.testing.assert_allclose(world.test_visual, world.mapping @ world.prototypes.columns(world.test_labels.tolist()))

    def test_invalid_configurations(self):
        for change in ({'c_seen_tx': 10}, {'c_seen_rx': 11}, {'noise_sigma': -1.0}, {'d_s': 0},
                       {'orthonormal_map': True, 'd_s': 13}):
            with self.subTest(change=change), self.assertRaises(ConfigInvalid) as ctx:
                generate(SynthConfig(**{**SMALL.as_dict(), **change}))
            self.assertTrue(ctx.exception.errors)


class FileFormatTests(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)
        self.dir = Path(self.tmp.name)
        self.world = generate(SMALL)

    def test_prototypes_file(self):
        path = self.dir / 'prototypes.csv'
        save_prototypes(path, self.world.prototypes)
        self.assertTrue(path.read_text().startswith('# ds=6 n=10\n0,'))
        loaded = load_prototypes(path)
        self.assertEqual(loaded.class_ids, self.world.prototypes.class_ids)
        np.testing.assert_array_equal(loaded.vectors, self.world.prototypes.vectors)

    def test_features_file(self):
        path = self.dir / 'nested' / 'tx_train.csv'
        save_features(path, self.world.tx_train)
        loaded = load_features(path, self.world.prototypes)
        np.testing.assert_array_equal(loaded.visual, self.world.tx_train.visual)
        np.testing.assert_array_equal(loaded.labels, self.world.tx_train.labels)
        np.testing.assert_array_equal(loaded.semantic, self.world.tx_train.semantic)

    def test_features_against_other_prototypes(self):
        path = self.dir / 'tx_train.csv'
        save_features(path, self.world.tx_train)
        with self.assertRaises(DimensionMismatch):
            load_features(path, SemanticPrototypes(class_ids=(0, 1), vectors=np.eye(2)))

    def test_instance_file(self):
        inst = random_instance(5, np.random.default_rng(1))
        path = self.dir / 'instance.csv'
        save_instance(path, inst)
        lines = path.read_text().splitlines()
        self.assertEqual(lines[0], f'# tau={inst.tau!r} m=5')
        self.assertTrue(lines[1].startswith('0,'))
        loaded = load_instance(path)
        self.assertEqual(loaded.tau, inst.tau)
        np.testing.assert_array_equal(loaded.losses, inst.losses)
        np.testing.assert_array_equal(loaded.latencies, inst.latencies)

    def test_instance_header_with_tau_only(self):
        path = self.dir / 'instance.csv'
        path.write_text('# tau=2.0\n1,0.5,0.25,0,1,4,1,2,3\n2,1,1,1,1,1,1,1,1\n')
        loaded = load_instance(path)
        self.assertEqual((loaded.m, loaded.tau), (2, 2.0))
        np.testing.assert_array_equal(loaded.losses[0], [0.5, 0.25, 0.0, 1.0])
        np.testing.assert_array_equal(loaded.latencies[0], [4.0, 1.0, 2.0, 3.0])

    def test_instance_row_count_checked_against_header(self):
        path = self.dir / 'instance.csv'
        for text in ('# tau=2.0 m=3\n0,0,0,0,0,1,1,1,1\n0,0,0,0,0,1,1,1,1\n', '# tau=2.0\n'):
            with self.subTest(text=text):
                path.write_text(text)
                with self.assertRaises(MalformedHeader):
                    load_instance(path)

    def test_instance_rows_out_of_order(self):
        path = self.dir / 'instance.csv'
        path.write_text('# tau=1.0 m=2\n1,0,0,0,0,1,1,1,1\n0,0,0,0,0,1,1,1,1\n')
        with self.assertRaises(MalformedHeader):
            load_instance(path)

    def test_malformed_header(self):
        path = self.dir / 'bad.csv'
        for text in ('0,1,2\n', '# ds=2\n0,1,2\n', '# ds=two n=1\n0,1,2\n', '# ds=2 n=2\n0,1,2\n', ''):
            with self.subTest(text=text):
                path.write_text(text)
                with self.assertRaises(MalformedHeader):
                    load_prototypes(path)

    def test_missing_file(self):
        with self.assertRaises(IoFailure):
            load_prototypes(self.dir / 'absent.csv')

    def test_json_writes_report_io_failure(self):
        blocker = self.dir / 'blocker'
        blocker.write_text('')
        write_json(self.dir / 'nested' / 'out.json', {'b': 1, 'a': 2})
        self.assertEqual((self.dir / 'nested' / 'out.json').read_text(), '{\n  "a": 2,\n  "b": 1\n}\n')
        with self.assertRaises(IoFailure):
            write_json(blocker / 'out.json', {})

    def test_model_archive(self):
        model = train_extractor(self.world.tx_train, 4, lam=0.5)
        path = self.dir / 'model_tx.npz'
        save_model(path, model)
        loaded = load_model(path)
        self.assertEqual((loaded.k, loaded.d_v, loaded.d_s, loaded.lam), (4, 12, 6, 0.5))
        for name in ('w_s', 'w_v', 'p_v', 'p_s'):
            np.testing.assert_array_equal(getattr(loaded, name), getattr(model, name))

    def test_report_json(self):
        inst = random_instance(4, np.random.default_rng(2))
        report = solve_lagrangian(inst)
        path = self.dir / 'plan.json'
        text = report_to_json(report, path)
        self.assertEqual(json.loads(path.read_text()), json.loads(text))
        self.assertEqual(json.loads(text)['planner'], 'lagrangian')
