"""SKB-enabled multi-level feature extractor.

Training happens in three closed-form steps:

1. intermediate map: ``W_s`` holds the top-k eigenvectors of ``S H S^T`` with
   ``H`` the row-space projector of ``V``; ``W_v = W_s S pinv(V)`` and the
   shared intermediate feature is ``F = W_s S``;
2. visual autoencoder ``P_v`` from ``F F^T P_v + lam P_v V V^T = (1 + lam) F V^T``;
3. semantic autoencoder ``P_s`` from the same equation with ``S`` for ``V``.

A visual feature ``v`` then yields the level-2 feature ``P_v v``, the level-3
feature ``P_s^T P_v v`` and, through ``classify``, the level-4 class label.
"""
import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import numkernel
from .exceptions import DimensionMismatch, EmptyAllowedSet, InvalidArgument, UnknownClass

logger = logging.getLogger(__name__)

DEFAULT_LAMBDA = 1.0
LEVELS = (1, 2, 3)


def _freeze(a):
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SemanticPrototypes:
    class_ids: tuple
    vectors: np.ndarray

    def __post_init__(self):
        ids = tuple(int(c) for c in self.class_ids)
        if len(set(ids)) != len(ids):
            raise InvalidArgument('prototype class ids must be unique')
        vectors = numkernel.as_matrix(self.vectors, 'prototype vectors')
        if vectors.shape[1] != len(ids):
            raise DimensionMismatch(f'{len(ids)} class ids but {vectors.shape[1]} prototype columns')
        object.__setattr__(self, 'class_ids', ids)
        object.__setattr__(self, 'vectors', _freeze(vectors))
        object.__setattr__(self, '_index', {c: i for i, c in enumerate(ids)})

    @property
    def d_s(self):
        return self.vectors.shape[0]

    def __len__(self):
        return len(self.class_ids)

    def __contains__(self, class_id):
        return int(class_id) in self._index

    def index_of(self, class_id):
        try:
            return self._index[int(class_id)]
        except KeyError:
            raise UnknownClass(f'class {class_id} has no semantic prototype') from None

    def vector(self, class_id):
        return self.vectors[:, self.index_of(class_id)]

    def columns(self, class_ids):
        return self.vectors[:, [self.index_of(c) for c in class_ids]]

    def subset(self, class_ids):
        ids = [int(c) for c in class_ids]
        return SemanticPrototypes(class_ids=tuple(ids), vectors=self.columns(ids))


@dataclass(frozen=True, eq=False)
class TrainingSet:
    visual: np.ndarray
    labels: np.ndarray
    semantic: np.ndarray

    def __post_init__(self):
        visual = numkernel.as_matrix(self.visual, 'visual features')
        semantic = numkernel.as_matrix(self.semantic, 'semantic features')
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.ndim != 1 or labels.shape[0] != visual.shape[1] or semantic.shape[1] != visual.shape[1]:
            raise DimensionMismatch(
                f'visual has {visual.shape[1]} samples, labels {labels.shape}, semantic {semantic.shape[1]}'
            )
        labels = labels.copy()
        labels.setflags(write=False)
        object.__setattr__(self, 'visual', _freeze(visual))
        object.__setattr__(self, 'semantic', _freeze(semantic))
        object.__setattr__(self, 'labels', labels)

    @classmethod
    def from_labels(cls, visual, labels, prototypes):
        """Build the semantic matrix column by column from the class prototypes."""
        labels = np.asarray(labels, dtype=np.int64)
        return cls(visual=visual, labels=labels, semantic=prototypes.columns(labels.tolist()))

    @property
    def n(self):
        return self.visual.shape[1]

    @property
    def d_v(self):
        return self.visual.shape[0]

    @property
    def d_s(self):
        return self.semantic.shape[0]


class IntermediateMap(NamedTuple):
    w_s: np.ndarray
    w_v: np.ndarray
    f: np.ndarray


@dataclass(frozen=True, eq=False)
class ExtractorModel:
    w_s: np.ndarray
    w_v: np.ndarray
    p_v: np.ndarray
    p_s: np.ndarray
    k: int
    d_v: int
    d_s: int
    lam: float

    def __post_init__(self):
        for name, shape in (
            ('w_s', (self.k, self.d_s)),
            ('w_v', (self.k, self.d_v)),
            ('p_v', (self.k, self.d_v)),
            ('p_s', (self.k, self.d_s)),
        ):
            value = numkernel.as_matrix(getattr(self, name), name)
            if value.shape != shape:
                raise DimensionMismatch(f'{name} has shape {value.shape}, expected {shape}')
            object.__setattr__(self, name, _freeze(value))
        if not self.lam > 0:
            raise InvalidArgument(f'lambda must be positive, got {self.lam}')


def intermediate_objective(w_s, semantic, h):
    """``tr(W_s S H S^T W_s^T)``, the quantity the intermediate map maximises."""
    m = semantic @ h @ semantic.T
    return float(np.trace(w_s @ m @ w_s.T))


def train_intermediate(train, k):
    if not 1 <= k <= min(train.d_v, train.d_s):
        raise DimensionMismatch(f'k={k} must lie in [1, min(D_v={train.d_v}, D_s={train.d_s})]')
    if train.n < k:
        raise DimensionMismatch(f'need at least k={k} training samples, got {train.n}')

    s = train.semantic
    h = numkernel.row_space_projection(train.visual)
    m = s @ h @ s.T
    eig = numkernel.eigh_sym(0.5 * (m + m.T))
    w_s = eig.top(k)
    w_v = w_s @ s @ numkernel.pinv(train.visual)
    f = w_s @ s
    logger.debug('intermediate map k=%d captures %.6g of %.6g spectral energy',
                 k, eig.values[:k].sum(), eig.values.sum())
    return IntermediateMap(w_s=w_s, w_v=w_v, f=f)


def _train_autoencoder(x, f, lam, name):
    x = numkernel.as_matrix(x, name)
    f = numkernel.as_matrix(f, 'f')
    if x.shape[1] != f.shape[1]:
        raise DimensionMismatch(f'{name} has {x.shape[1]} columns but f has {f.shape[1]}')
    if not lam > 0:
        raise InvalidArgument(f'lambda must be positive, got {lam}')
    return numkernel.sylvester_spd(f @ f.T, lam * (x @ x.T), (1.0 + lam) * (f @ x.T))


def train_visual_ae(v, f, lam=DEFAULT_LAMBDA):
    return _train_autoencoder(v, f, lam, 'v')


def train_semantic_ae(s, f, lam=DEFAULT_LAMBDA):
    return _train_autoencoder(s, f, lam, 's')


def autoencoder_residual(p, x, f, lam):
    """Relative residual of ``F F^T P + lam P X X^T = (1 + lam) F X^T``."""
    rhs = (1.0 + lam) * (f @ x.T)
    lhs = f @ f.T @ p + lam * (p @ x @ x.T)
    return numkernel.relative_residual(lhs - rhs, rhs)


def train_extractor(train, k, lam=DEFAULT_LAMBDA):
    inter = train_intermediate(train, k)
    p_v = train_visual_ae(train.visual, inter.f, lam)
    p_s = train_semantic_ae(train.semantic, inter.f, lam)
    logger.info('trained extractor k=%d lambda=%g on %d samples (D_v=%d, D_s=%d)',
                k, lam, train.n, train.d_v, train.d_s)
    return ExtractorModel(
        w_s=inter.w_s, w_v=inter.w_v, p_v=p_v, p_s=p_s,
        k=k, d_v=train.d_v, d_s=train.d_s, lam=float(lam),
    )


def extract(model, v, level):
    if level not in LEVELS:
        raise InvalidArgument(f'extraction level must be one of {LEVELS}, got {level}')
    v = numkernel.as_vector(v, model.d_v, 'v')
    if level == 1:
        return v
    f = model.p_v @ v
    if level == 2:
        return f
    return model.p_s.T @ f


class Classification(NamedTuple):
    class_id: int
    loss: float


def classify(s, prototypes, allowed):
    """Nearest prototype among ``allowed`` by squared distance; lowest id wins ties."""
    ids = sorted({int(c) for c in allowed})
    if not ids:
        raise EmptyAllowedSet('no candidate classes to choose from')
    s = numkernel.as_vector(s, prototypes.d_s, 's')
    diff = prototypes.columns(ids) - s[:, None]
    distances = np.sum(diff * diff, axis=0)
    best = int(np.argmin(distances))
    return Classification(class_id=ids[best], loss=float(distances[best]))
