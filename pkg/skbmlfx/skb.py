"""Semantic knowledge bases held by the transmitter and the receiver."""
import logging
from dataclasses import dataclass

import numpy as np

from .exceptions import DuplicateIds, EmptySkb, InvalidArgument, SizeExceedsPrototypes, UnknownClass

logger = logging.getLogger(__name__)

SELECTION_KINDS = ('full', 'first', 'random', 'ids')


@dataclass(frozen=True, eq=False)
class Skb:
    class_ids: frozenset
    prototypes: object

    def __post_init__(self):
        ids = frozenset(int(c) for c in self.class_ids)
        if not ids:
            raise EmptySkb('a semantic knowledge base needs at least one class')
        unknown = sorted(c for c in ids if c not in self.prototypes)
        if unknown:
            raise UnknownClass(f'classes {unknown} have no semantic prototype')
        object.__setattr__(self, 'class_ids', ids)

    def __len__(self):
        return len(self.class_ids)

    def __contains__(self, class_id):
        return int(class_id) in self.class_ids

    def lookup(self, class_id):
        """Prototype of ``class_id`` if this knowledge base stores it."""
        if class_id not in self:
            raise UnknownClass(f'class {class_id} is not stored in this knowledge base')
        return self.prototypes.vector(class_id)


def indicator(skb, class_id):
    if class_id not in skb.prototypes:
        raise UnknownClass(f'class {class_id} is not a known class')
    return 1 if class_id in skb else 0


@dataclass(frozen=True)
class Selection:
    """How the members of a knowledge base are chosen.

    Written in configuration files as ``full``, ``first:<k>``,
    ``random:<k>:<seed>`` or ``ids:<id>,<id>,...``.
    """

    kind: str
    k: int = 0
    seed: int = 0
    ids: tuple = ()

    def __post_init__(self):
        if self.kind not in SELECTION_KINDS:
            raise InvalidArgument(f'unknown selection {self.kind!r}; expected one of {SELECTION_KINDS}')

    @classmethod
    def parse(cls, text):
        text = text.strip()
        kind, _, rest = text.partition(':')
        try:
            if kind == 'full' and not rest:
                return cls('full')
            if kind == 'first':
                return cls('first', k=int(rest))
            if kind == 'random':
                k, _, seed = rest.partition(':')
                return cls('random', k=int(k), seed=int(seed) if seed else 0)
            if kind == 'ids':
                return cls('ids', ids=tuple(int(c) for c in rest.split(',') if c.strip()))
        except ValueError:
            pass
        raise InvalidArgument(f'cannot parse knowledge-base selection {text!r}')

    def __str__(self):
        if self.kind == 'full':
            return 'full'
        if self.kind == 'first':
            return f'first:{self.k}'
        if self.kind == 'random':
            return f'random:{self.k}:{self.seed}'
        return 'ids:' + ','.join(str(c) for c in self.ids)

    def with_seed(self, seed):
        return Selection(self.kind, k=self.k, seed=seed, ids=self.ids)


def first_k(k):
    return Selection('first', k=k)


def random_k(k, seed):
    return Selection('random', k=k, seed=seed)


def explicit(ids):
    return Selection('ids', ids=tuple(ids))


FULL = Selection('full')


def build_skb(prototypes, selection):
    """Select knowledge-base members from ``prototypes``.

    ``random`` draws one seeded permutation of the class ids and keeps its
    first ``k`` entries, so for a fixed seed the sets are nested in ``k``.
    """
    ids = list(prototypes.class_ids)
    kind = selection.kind
    if kind == 'full':
        chosen = ids
    elif kind == 'ids':
        if len(set(selection.ids)) != len(selection.ids):
            raise DuplicateIds(f'duplicate class ids in {list(selection.ids)}')
        chosen = list(selection.ids)
    else:
        k = selection.k
        if k > len(ids):
            raise SizeExceedsPrototypes(f'cannot select {k} of {len(ids)} classes')
        if k < 1:
            raise EmptySkb(f'knowledge base size must be at least 1, got {k}')
        if kind == 'first':
            chosen = ids[:k]
        else:
            order = np.random.default_rng(selection.seed).permutation(len(ids))
            chosen = [ids[i] for i in order[:k]]
    skb = Skb(class_ids=frozenset(chosen), prototypes=prototypes)
    logger.debug('built knowledge base %s -> %s', selection, sorted(skb.class_ids))
    return skb
