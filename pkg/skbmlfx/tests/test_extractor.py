import numpy as np
from django.test import SimpleTestCase

from skbmlfx import numkernel
from skbmlfx.data import SynthConfig, generate
from skbmlfx.exceptions import DimensionMismatch, EmptyAllowedSet, InvalidArgument, UnknownClass
from skbmlfx.extractor import (
    ExtractorModel,
    SemanticPrototypes,
    TrainingSet,
    autoencoder_residual,
    classify,
    extract,
    intermediate_objective,
    train_extractor,
    train_intermediate,
    train_semantic_ae,
    train_visual_ae,
)


def synthetic_train(seed, d_v=20, d_s=8):
    cfg = SynthConfig(c_total=12, c_seen_tx=8, c_seen_rx=8, d_v=d_v, d_s=d_s, n_per_class=6, n_test=4, seed=seed)
    return generate(cfg).tx_train


def random_orthonormal_rows(rng, k, n):
    q, _ = np.linalg.qr(rng.standard_normal((n, k)))
    return q.T


class SemanticPrototypesTests(SimpleTestCase):
    def setUp(self):
        self.prototypes = SemanticPrototypes(class_ids=(3, 7), vectors=[[1.0, 0.0], [0.0, 1.0]])

    def test_lookup(self):
        np.testing.assert_array_equal(self.prototypes.vector(7), [0.0, 1.0])
        self.assertIn(3, self.prototypes)
        self.assertNotIn(4, self.prototypes)

    def test_unknown_class(self):
        with self.assertRaises(UnknownClass):
            self.prototypes.vector(4)

    def test_duplicate_ids(self):
        with self.assertRaises(InvalidArgument):
            SemanticPrototypes(class_ids=(1, 1), vectors=np.eye(2))

    def test_training_set_semantic_columns_match_prototypes(self):
        train = TrainingSet.from_labels(np.ones((3, 3)), [7, 3, 7], self.prototypes)
        np.testing.assert_array_equal(train.semantic, [[0.0, 1.0, 0.0], [1.0, 0.0, 1.0]])

    def test_training_set_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            TrainingSet(visual=np.ones((3, 2)), labels=[3, 7, 7], semantic=np.ones((2, 3)))


class IntermediateMapTests(SimpleTestCase):
    def test_diagonal_energy_picks_first_axis(self):
        prototypes = SemanticPrototypes(class_ids=(0, 1), vectors=[[2.0, 0.0], [0.0, 1.0]])
        train = TrainingSet.from_labels(np.eye(2), [0, 1], prototypes)
        inter = train_intermediate(train, 1)
        np.testing.assert_allclose(inter.w_s, [[1.0, 0.0]], atol=1e-12)

    def test_full_basis_captures_all_energy(self):
        train = synthetic_train(seed=1)
        h = numkernel.row_space_projection(train.visual)
        m = train.semantic @ h @ train.semantic.T
        inter = train_intermediate(train, train.d_s)
        self.assertAlmostEqual(intermediate_objective(inter.w_s, train.semantic, h), np.trace(m), places=8)

    def test_objective_equals_top_eigenvalues_and_beats_random_maps(self):
        rng = np.random.default_rng(0)
        for seed in range(20):
            train = synthetic_train(seed=seed)
            k = 3
            inter = train_intermediate(train, k)
            h = numkernel.row_space_projection(train.visual)
            m = train.semantic @ h @ train.semantic.T
            objective = intermediate_objective(inter.w_s, train.semantic, h)
            self.assertAlmostEqual(objective, numkernel.eigh_sym(m).values[:k].sum(), delta=1e-8 * max(objective, 1.0))
            np.testing.assert_allclose(inter.w_s @ inter.w_s.T, np.eye(k), atol=1e-8)
            for _ in range(100):
                u = random_orthonormal_rows(rng, k, train.d_s)
                self.assertLessEqual(np.trace(u @ m @ u.T), objective + 1e-8)

    def test_visual_map_is_least_squares_fit(self):
        rng = np.random.default_rng(1)
        train = synthetic_train(seed=2)
        inter = train_intermediate(train, 3)
        target = inter.w_s @ train.semantic
        base = np.linalg.norm(inter.w_v @ train.visual - target)
        for _ in range(10):
            delta = rng.standard_normal(inter.w_v.shape)
            delta *= 1e-4 / np.linalg.norm(delta)
            self.assertGreaterEqual(np.linalg.norm((inter.w_v + delta) @ train.visual - target), base - 1e-10)

    def test_k_too_large(self):
        train = synthetic_train(seed=2)
        with self.assertRaises(DimensionMismatch):
            train_intermediate(train, train.d_s + 1)


class AutoencoderTests(SimpleTestCase):
    def test_self_encoding_is_identity(self):
        v = np.eye(3)
        for lam in (0.1, 1.0, 10.0):
            np.testing.assert_allclose(train_visual_ae(v, v, lam), np.eye(3), atol=1e-12)
            np.testing.assert_allclose(train_semantic_ae(v, v, lam), np.eye(3), atol=1e-12)

    def test_scalar_closed_form(self):
        np.testing.assert_allclose(numkernel.sylvester_spd([[1.0]], [[1.0]], [[(1.0 + 1.0) * 2.0]]), [[2.0]])

    def test_residuals_across_lambda_sweep(self):
        for seed in (3, 4):
            train = synthetic_train(seed=seed)
            inter = train_intermediate(train, 4)
            for lam in (0.1, 1.0, 10.0):
                p_v = train_visual_ae(train.visual, inter.f, lam)
                p_s = train_semantic_ae(train.semantic, inter.f, lam)
                self.assertLessEqual(autoencoder_residual(p_v, train.visual, inter.f, lam), 1e-8)
                self.assertLessEqual(autoencoder_residual(p_s, train.semantic, inter.f, lam), 1e-8)

    def test_non_positive_lambda(self):
        with self.assertRaises(InvalidArgument):
            train_visual_ae(np.eye(2), np.eye(2), 0.0)


class TrainExtractorTests(SimpleTestCase):
    def test_deterministic(self):
        first = train_extractor(synthetic_train(seed=2), 3)
        second = train_extractor(synthetic_train(seed=2), 3)
        for name in ('w_s', 'w_v', 'p_v', 'p_s'):
            self.assertEqual(getattr(first, name).tobytes(), getattr(second, name).tobytes())

    def test_orthonormal_intermediate_rows(self):
        model = train_extractor(synthetic_train(seed=5), 4, lam=0.5)
        np.testing.assert_allclose(model.w_s @ model.w_s.T, np.eye(4), atol=1e-8)
        self.assertEqual(model.lam, 0.5)

    def test_model_shapes_are_checked(self):
        with self.assertRaises(DimensionMismatch):
            ExtractorModel(w_s=np.ones((2, 3)), w_v=np.ones((2, 4)), p_v=np.ones((2, 4)), p_s=np.ones((2, 2)),
                           k=2, d_v=4, d_s=3, lam=1.0)


class ExtractTests(SimpleTestCase):
    def setUp(self):
        self.model = train_extractor(synthetic_train(seed=2), 3)
        self.v = np.random.default_rng(6).standard_normal(self.model.d_v)

    def test_level_one_is_identity(self):
        np.testing.assert_array_equal(extract(self.model, self.v, 1), self.v)

    def test_level_three_is_chained_projection(self):
        expected = self.model.p_s.T @ (self.model.p_v @ self.v)
        np.testing.assert_allclose(extract(self.model, self.v, 3), expected, atol=1e-12)

    def test_identity_encoder(self):
        model = ExtractorModel(w_s=np.eye(2), w_v=np.eye(2), p_v=np.eye(2), p_s=np.eye(2), k=2, d_v=2, d_s=2, lam=1.0)
        np.testing.assert_array_equal(extract(model, [0.5, -1.0], 2), [0.5, -1.0])

    def test_wrong_length(self):
        with self.assertRaises(DimensionMismatch):
            extract(self.model, np.ones(self.model.d_v + 1), 2)

    def test_invalid_level(self):
        with self.assertRaises(InvalidArgument):
            extract(self.model, self.v, 4)


class ClassifyTests(SimpleTestCase):
    def setUp(self):
        self.prototypes = SemanticPrototypes(class_ids=(1, 2), vectors=np.eye(2))

    def test_exact_match(self):
        self.assertEqual(classify([0.0, 1.0], self.prototypes, {1, 2}), (2, 0.0))

    def test_hand_distance(self):
        result = classify([0.9, 0.0], self.prototypes, {1, 2})
        self.assertEqual(result.class_id, 1)
        self.assertAlmostEqual(result.loss, 0.01, places=12)

    def test_tie_goes_to_lower_id(self):
        self.assertEqual(classify([0.5, 0.5], self.prototypes, {2, 1}).class_id, 1)

    def test_restricted_candidates(self):
        self.assertEqual(classify([1.0, 0.0], self.prototypes, {2}).class_id, 2)

    def test_empty_candidates(self):
        with self.assertRaises(EmptyAllowedSet):
            classify([1.0, 0.0], self.prototypes, set())

    def test_matches_expanded_distance(self):
        rng = np.random.default_rng(7)
        vectors = rng.standard_normal((5, 6))
        prototypes = SemanticPrototypes(class_ids=tuple(range(6)), vectors=vectors)
        for _ in range(20):
            s = rng.standard_normal(5)
            result = classify(s, prototypes, range(6))
            expanded = np.sum(vectors ** 2, axis=0) - 2.0 * vectors.T @ s + s @ s
            self.assertEqual(result.class_id, int(np.argmin(expanded)))
            self.assertAlmostEqual(result.loss, expanded.min(), delta=1e-10)
