"""Per-sample menu of semantic losses, latencies and receiver decisions.

For a test sample ``v`` the transmitter may send

1. the visual feature (receiver runs its own extractor, decides over B_R),
2. the transmitter's intermediate feature (receiver decodes, decides over B_R),
3. the transmitter's semantic feature (receiver decides over B_R),
4. its own class estimate over B_T: the index when the receiver stores that
   class, otherwise the class prototype.
"""
import logging
from dataclasses import dataclass

import numpy as np

from . import numkernel
from .channel import latency
from .exceptions import DimensionMismatch, InvalidArgument
from .extractor import classify
from .skb import indicator

logger = logging.getLogger(__name__)

N_LEVELS = 4


@dataclass(frozen=True, eq=False)
class PartyContext:
    model: object
    skb: object

    def __post_init__(self):
        if self.model.d_s != self.skb.prototypes.d_s:
            raise DimensionMismatch(
                f'model semantic dimension {self.model.d_s} != prototype dimension {self.skb.prototypes.d_s}'
            )


@dataclass(frozen=True)
class SampleMenu:
    losses: tuple
    latencies: tuple
    decisions: tuple
    tx_estimate: int
    rx_hit: int


def compute_menu(v, tx, rx, ch, rate):
    if tx.model.d_v != rx.model.d_v or tx.model.k != rx.model.k or tx.model.d_s != rx.model.d_s:
        raise DimensionMismatch('transmitter and receiver extractors have different dimensions')
    v = numkernel.as_vector(v, tx.model.d_v, 'v')
    receiver_ids = rx.skb.class_ids
    prototypes = rx.skb.prototypes

    f_rx = rx.model.p_v @ v
    level1 = classify(rx.model.p_s.T @ f_rx, prototypes, receiver_ids)

    f_tx = tx.model.p_v @ v
    level2 = classify(rx.model.p_s.T @ f_tx, prototypes, receiver_ids)

    s_tx = tx.model.p_s.T @ f_tx
    level3 = classify(s_tx, prototypes, receiver_ids)
    level4 = classify(s_tx, tx.skb.prototypes, tx.skb.class_ids)
    hit = indicator(rx.skb, level4.class_id)

    d_v, k, d_s = tx.model.d_v, tx.model.k, tx.model.d_s
    payload4 = hit * 1 + (1 - hit) * d_s
    return SampleMenu(
        losses=(level1.loss, level2.loss, level3.loss, level4.loss),
        latencies=tuple(latency(n, ch, rate) for n in (d_v, k, d_s, payload4)),
        decisions=(level1.class_id, level2.class_id, level3.class_id, level4.class_id),
        tx_estimate=level4.class_id,
        rx_hit=hit,
    )


def compute_menus(visual, tx, rx, ch, rate):
    """Menus for every column of ``visual`` (D_v x M)."""
    visual = numkernel.as_matrix(visual, 'visual')
    menus = [compute_menu(visual[:, m], tx, rx, ch, rate) for m in range(visual.shape[1])]
    hits = sum(menu.rx_hit for menu in menus)
    logger.debug('computed %d menus, receiver holds the transmitter estimate for %d', len(menus), hits)
    return menus


def effective_decision(menu, level):
    """Class the receiver ends up with when ``level`` is transmitted.

    At level 4 this is the transmitter's estimate whether the index or the
    prototype itself was sent.
    """
    if level not in range(1, N_LEVELS + 1):
        raise InvalidArgument(f'level must be in 1..{N_LEVELS}, got {level}')
    return menu.decisions[level - 1]


def menu_matrices(menus):
    """Stack menus into the ``M x 4`` loss and latency matrices of a planning instance."""
    losses = np.array([menu.losses for menu in menus], dtype=np.float64)
    latencies = np.array([menu.latencies for menu in menus], dtype=np.float64)
    return losses, latencies
