"""Scalar link budget: path loss, achievable rate and payload latency."""
import math
from dataclasses import asdict, dataclass

from .exceptions import InvalidArgument, NonPositiveDistance, ZeroRate


def db_to_linear(db):
    return 10.0 ** (db / 10.0)


def dbm_to_watts(dbm):
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class ChannelParams:
    beta0_db: float = -30.0
    d0_m: float = 10.0
    d_m: float = 500.0
    zeta: float = 3.0
    bandwidth_hz: float = 1e6
    noise_dbm_per_hz: float = -174.0
    power_dbm: float = 10.0
    q_bits: int = 32

    def __post_init__(self):
        if not self.bandwidth_hz > 0:
            raise InvalidArgument(f'bandwidth must be positive, got {self.bandwidth_hz}')
        if self.q_bits < 1:
            raise InvalidArgument(f'quantization must use at least one bit, got {self.q_bits}')
        if self.zeta < 0:
            raise InvalidArgument(f'path-loss exponent must be non-negative, got {self.zeta}')

    def as_dict(self):
        return asdict(self)


def path_loss(params):
    """Linear power gain ``beta0 * (d / d0) ** -zeta``."""
    if params.d0_m <= 0 or params.d_m <= 0:
        raise NonPositiveDistance(f'distances must be positive (d0={params.d0_m}, d={params.d_m})')
    return db_to_linear(params.beta0_db) * (params.d_m / params.d0_m) ** (-params.zeta)


def snr(params):
    noise_w = dbm_to_watts(params.noise_dbm_per_hz) * params.bandwidth_hz
    return dbm_to_watts(params.power_dbm) * path_loss(params) / noise_w


def achievable_rate(params):
    """Shannon rate ``B log2(1 + p g / (B N0))`` in bits per second."""
    return params.bandwidth_hz * math.log2(1.0 + snr(params))


def latency(elements, params, rate):
    """Seconds needed to send ``elements`` values quantized to ``q_bits`` each."""
    if not rate > 0:
        raise ZeroRate(f'transmission rate must be positive, got {rate}')
    if elements < 0:
        raise InvalidArgument(f'element count must be non-negative, got {elements}')
    return elements * params.q_bits / rate
