"""Synthetic zero-shot worlds and the plain-text file formats.

A world draws unit-norm class prototypes ``s_c`` and a ground-truth linear
map ``G``; a visual feature of class ``c`` is ``G s_c + noise``. The first
classes are seen in training (the transmitter and the receiver may see
different subsets), the remaining ones only appear at test time.
"""
import json
import logging
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .exceptions import ConfigInvalid, DimensionMismatch, IoFailure, MalformedHeader, RejectionExhausted
from .extractor import ExtractorModel, SemanticPrototypes, TrainingSet
from .planner import Instance, N_LEVELS

logger = logging.getLogger(__name__)

MIN_PROTOTYPE_DISTANCE = 0.1
MAX_REJECTIONS = 1000
FLOAT_FORMAT = '%.17g'


@dataclass(frozen=True)
class SynthConfig:
    c_total: int = 20
    c_seen_tx: int = 10
    c_seen_rx: int = 10
    d_v: int = 64
    d_s: int = 16
    k_hint: int = 8
    n_per_class: int = 40
    n_test: int = 64
    noise_sigma: float = 0.05
    orthonormal_map: bool = False
    seed: int = 0

    @property
    def c_seen(self):
        """Size of the pool both training subsets are drawn from."""
        return max(self.c_seen_tx, self.c_seen_rx)

    def validate(self):
        errors = {}
        for name in ('c_total', 'c_seen_tx', 'c_seen_rx', 'd_v', 'd_s', 'k_hint', 'n_per_class', 'n_test'):
            if getattr(self, name) < 1:
                errors[name] = ['must be at least 1']
        if self.c_seen_tx > self.c_total or self.c_seen_rx > self.c_total:
            errors['c_seen'] = ['seen classes cannot outnumber all classes']
        elif self.c_seen >= self.c_total:
            errors['c_seen'] = ['no unseen classes would be left for testing']
        if not (self.noise_sigma >= 0 and math.isfinite(self.noise_sigma)):
            errors['noise_sigma'] = ['must be a finite non-negative number']
        if self.orthonormal_map and self.d_s > self.d_v:
            errors['orthonormal_map'] = ['needs d_s <= d_v']
        if errors:
            raise ConfigInvalid('invalid synthetic world configuration', errors)

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True, eq=False)
class GeneratedWorld:
    config: SynthConfig
    prototypes: SemanticPrototypes
    test_prototypes: SemanticPrototypes
    mapping: np.ndarray
    tx_train: TrainingSet
    rx_train: TrainingSet
    test_visual: np.ndarray
    test_labels: np.ndarray

    @property
    def test(self):
        return [(self.test_visual[:, i], int(c)) for i, c in enumerate(self.test_labels)]

    @property
    def seen_classes(self):
        return tuple(self.prototypes.class_ids[:self.config.c_seen])

    @property
    def unseen_classes(self):
        return self.test_prototypes.class_ids


def _draw_prototypes(cfg, rng):
    for attempt in range(1, MAX_REJECTIONS + 1):
        vectors = rng.standard_normal((cfg.d_s, cfg.c_total))
        vectors /= np.linalg.norm(vectors, axis=0, keepdims=True)
        gram = vectors.T @ vectors
        distances = np.sqrt(np.maximum(2.0 - 2.0 * gram[np.triu_indices(cfg.c_total, 1)], 0.0))
        if distances.size == 0 or distances.min() >= MIN_PROTOTYPE_DISTANCE:
            logger.debug('prototypes accepted after %d draws', attempt)
            return vectors
    raise RejectionExhausted(
        f'no {cfg.c_total} prototypes in {cfg.d_s} dimensions at distance >= {MIN_PROTOTYPE_DISTANCE} '
        f'after {MAX_REJECTIONS} draws'
    )


def _draw_mapping(cfg, rng):
    if cfg.orthonormal_map:
        q, _ = np.linalg.qr(rng.standard_normal((cfg.d_v, cfg.d_s)))
        return q * math.sqrt(cfg.d_v / cfg.d_s)
    return rng.standard_normal((cfg.d_v, cfg.d_s)) / math.sqrt(cfg.d_s)


def _observe(mapping, semantic, sigma, rng):
    return mapping @ semantic + sigma * rng.standard_normal((mapping.shape[0], semantic.shape[1]))


def generate(cfg):
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    prototypes = SemanticPrototypes(class_ids=tuple(range(cfg.c_total)), vectors=_draw_prototypes(cfg, rng))
    mapping = _draw_mapping(cfg, rng)

    pool = list(range(cfg.c_seen))
    parties = {'tx': pool[:cfg.c_seen_tx], 'rx': pool[cfg.c_seen - cfg.c_seen_rx:]}
    train = {}
    for party, classes in parties.items():
        labels = np.repeat(np.array(classes, dtype=np.int64), cfg.n_per_class)
        semantic = prototypes.columns(labels.tolist())
        train[party] = TrainingSet(
            visual=_observe(mapping, semantic, cfg.noise_sigma, rng), labels=labels, semantic=semantic,
        )

    unseen = list(range(cfg.c_seen, cfg.c_total))
    test_labels = np.array([unseen[i % len(unseen)] for i in range(cfg.n_test)], dtype=np.int64)
    test_visual = _observe(mapping, prototypes.columns(test_labels.tolist()), cfg.noise_sigma, rng)
    test_labels.setflags(write=False)
    test_visual.setflags(write=False)
    mapping.setflags(write=False)

    logger.debug('generated world seed=%d: tx classes %s, rx classes %s, %d unseen classes',
                 cfg.seed, parties['tx'], parties['rx'], len(unseen))
    return GeneratedWorld(
        config=cfg,
        prototypes=prototypes,
        test_prototypes=prototypes.subset(unseen),
        mapping=mapping,
        tx_train=train['tx'],
        rx_train=train['rx'],
        test_visual=test_visual,
        test_labels=test_labels,
    )


# plain-text files

def _write(path, header, rows):
    path = Path(path)
    lines = [header]
    for row in rows:
        head, rest = row[0], row[1:]
        cells = [str(int(head))]
        cells.extend(FLOAT_FORMAT % value for value in rest)
        lines.append(','.join(cells))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
    except OSError as exc:
        raise IoFailure(f'cannot write {path}: {exc}') from exc


def _read(path, required):
    """Return ``(header fields, rows)`` for a file written by ``_write``."""
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise IoFailure(f'cannot read {path}: {exc}') from exc
    lines = [line for line in text.splitlines() if line.strip()]
    if not lines or not lines[0].startswith('#'):
        raise MalformedHeader(f'{path}: missing "# key=value" header line')

    header = {}
    for token in lines[0][1:].split():
        key, sep, value = token.partition('=')
        if not sep:
            raise MalformedHeader(f'{path}: cannot parse header token {token!r}')
        header[key] = value
    missing = [key for key in required if key not in header]
    if missing:
        raise MalformedHeader(f'{path}: header lacks {missing}')

    try:
        rows = [[float(cell) for cell in line.split(',')] for line in lines[1:]]
    except ValueError as exc:
        raise MalformedHeader(f'{path}: non-numeric cell ({exc})') from exc
    return header, rows


def _header_int(path, header, key):
    try:
        return int(header[key])
    except ValueError:
        raise MalformedHeader(f'{path}: header field {key}={header[key]!r} is not an integer') from None


def _matrix(path, rows, n, width):
    if len(rows) != n:
        raise MalformedHeader(f'{path}: header announces n={n} rows, found {len(rows)}')
    if any(len(row) != width for row in rows):
        raise MalformedHeader(f'{path}: every row must have {width} cells')
    return np.array(rows, dtype=np.float64).reshape(n, width)


def save_features(path, train):
    """One sample per row: ``label,v_1..v_Dv``."""
    rows = np.column_stack([train.labels, train.visual.T])
    _write(path, f'# dv={train.d_v} ds={train.d_s} n={train.n}', rows)


def load_features(path, prototypes):
    header, rows = _read(path, ('dv', 'ds', 'n'))
    d_v, d_s, n = (_header_int(path, header, key) for key in ('dv', 'ds', 'n'))
    if d_s != prototypes.d_s:
        raise DimensionMismatch(f'{path}: features were built with ds={d_s}, prototypes have {prototypes.d_s}')
    table = _matrix(path, rows, n, d_v + 1)
    return TrainingSet.from_labels(table[:, 1:].T, table[:, 0].astype(np.int64), prototypes)


def save_prototypes(path, prototypes):
    """One class per row: ``class_id,s_1..s_Ds``."""
    rows = np.column_stack([np.array(prototypes.class_ids, dtype=np.float64), prototypes.vectors.T])
    _write(path, f'# ds={prototypes.d_s} n={len(prototypes)}', rows)


def load_prototypes(path):
    header, rows = _read(path, ('ds', 'n'))
    d_s, n = _header_int(path, header, 'ds'), _header_int(path, header, 'n')
    table = _matrix(path, rows, n, d_s + 1)
    return SemanticPrototypes(class_ids=tuple(int(c) for c in table[:, 0]), vectors=table[:, 1:].T)


def save_instance(path, inst):
    """One sample per row: ``m,L_1..L_4,T_1..T_4``."""
    rows = np.column_stack([np.arange(inst.m, dtype=np.float64), inst.losses, inst.latencies])
    _write(path, f'# tau={inst.tau!r} m={inst.m}', rows)


def load_instance(path):
    """Read an instance file; ``m=`` in the header is optional and checked when present."""
    header, rows = _read(path, ('tau',))
    try:
        tau = float(header['tau'])
    except ValueError:
        raise MalformedHeader(f'{path}: tau={header["tau"]!r} is not a number') from None
    m = _header_int(path, header, 'm') if 'm' in header else len(rows)
    if m < 1:
        raise MalformedHeader(f'{path}: no sample rows')
    table = _matrix(path, rows, m, 1 + 2 * N_LEVELS)
    index = table[:, 0]
    if not (np.array_equal(index, np.arange(m)) or np.array_equal(index, np.arange(1, m + 1))):
        raise MalformedHeader(f'{path}: rows must be numbered 0..{m - 1} (or 1..{m}) in order')
    return Instance(losses=table[:, 1:1 + N_LEVELS], latencies=table[:, 1 + N_LEVELS:], tau=tau)


def write_json(path, payload):
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + '\n', encoding='utf-8')
    except OSError as exc:
        raise IoFailure(f'cannot write {path}: {exc}') from exc


def report_to_json(report, path=None):
    text = json.dumps(report.as_dict(), indent=2, sort_keys=True)
    if path is not None:
        try:
            Path(path).write_text(text + '\n', encoding='utf-8')
        except OSError as exc:
            raise IoFailure(f'cannot write {path}: {exc}') from exc
    return text


def save_model(path, model):
    try:
        np.savez(
            path, w_s=model.w_s, w_v=model.w_v, p_v=model.p_v, p_s=model.p_s,
            shape=np.array([model.k, model.d_v, model.d_s], dtype=np.int64), lam=np.array(model.lam),
        )
    except OSError as exc:
        raise IoFailure(f'cannot write {path}: {exc}') from exc


def load_model(path):
    try:
        with np.load(path) as archive:
            k, d_v, d_s = (int(value) for value in archive['shape'])
            return ExtractorModel(
                w_s=archive['w_s'], w_v=archive['w_v'], p_v=archive['p_v'], p_s=archive['p_s'],
                k=k, d_v=d_v, d_s=d_s, lam=float(archive['lam']),
            )
    except OSError as exc:
        raise IoFailure(f'cannot read {path}: {exc}') from exc
    except KeyError as exc:
        raise MalformedHeader(f'{path}: model archive lacks {exc}') from None
