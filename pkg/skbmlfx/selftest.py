"""Quick invariant checks over every layer, run by the ``selftest`` command."""
import logging
from dataclasses import dataclass

import numpy as np

from . import numkernel
from .channel import ChannelParams, achievable_rate, latency, path_loss
from .data import SynthConfig, generate
from .extractor import (
    autoencoder_residual,
    classify,
    intermediate_objective,
    train_extractor,
    train_intermediate,
)
from .planner import (
    evaluate,
    random_instance,
    solve_brute_force,
    solve_cccp,
    solve_fixed_level,
    solve_lagrangian,
    solve_linear_relaxation,
    solve_lp_mck,
)

logger = logging.getLogger(__name__)

CHECKS = []


def check(func):
    CHECKS.append(func)
    return func


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _random_symmetric(rng, n):
    a = rng.standard_normal((n, n))
    return a + a.T


@check
def eigendecomposition(rng):
    worst = 0.0
    for _ in range(20):
        a = _random_symmetric(rng, int(rng.integers(2, 9)))
        eig = numkernel.eigh_sym(a)
        residual = a @ eig.vectors - eig.vectors * eig.values
        worst = max(worst, numkernel.relative_residual(residual, a))
        jacobi = numkernel.eigh_sym(a, method='jacobi')
        worst = max(worst, float(np.max(np.abs(jacobi.values - eig.values))) / np.linalg.norm(a))
    return worst <= 1e-9, f'worst relative residual {worst:.2e}'


@check
def pseudo_inverse(rng):
    worst = 0.0
    for _ in range(20):
        a = rng.standard_normal((int(rng.integers(2, 7)), 3)) @ rng.standard_normal((3, int(rng.integers(2, 7))))
        p = numkernel.pinv(a)
        worst = max(worst, numkernel.relative_residual(a @ p @ a - a, a), numkernel.relative_residual(p @ a @ p - p, p))
    return worst <= 1e-9, f'worst Penrose residual {worst:.2e}'


@check
def sylvester_against_kronecker(rng):
    worst = 0.0
    for _ in range(20):
        p, q = int(rng.integers(1, 7)), int(rng.integers(1, 7))
        ga, gb = rng.standard_normal((p, p)), rng.standard_normal((q, q))
        a, b = ga @ ga.T + 0.1 * np.eye(p), gb @ gb.T + 0.1 * np.eye(q)
        c = rng.standard_normal((p, q))
        x = numkernel.sylvester_spd(a, b, c)
        dense = np.kron(np.eye(q), a) + np.kron(b.T, np.eye(p))
        reference = np.linalg.solve(dense, c.reshape(-1, order='F')).reshape((p, q), order='F')
        worst = max(worst, numkernel.relative_residual(x - reference, reference))
    return worst <= 1e-8, f'worst deviation {worst:.2e}'


@check
def extractor_certificates(rng):
    world = generate(SynthConfig(c_total=12, c_seen_tx=8, c_seen_rx=8, d_v=24, d_s=8,
                                 n_per_class=10, n_test=8, seed=int(rng.integers(2 ** 31))))
    train = world.tx_train
    k = 4
    inter = train_intermediate(train, k)
    h = numkernel.row_space_projection(train.visual)
    eig = numkernel.eigh_sym(train.semantic @ h @ train.semantic.T)
    gap = abs(intermediate_objective(inter.w_s, train.semantic, h) - eig.values[:k].sum())
    residuals = []
    for lam in (0.1, 1.0, 10.0):
        model = train_extractor(train, k, lam)
        residuals.append(autoencoder_residual(model.p_v, train.visual, inter.f, lam))
        residuals.append(autoencoder_residual(model.p_s, train.semantic, inter.f, lam))
    worst = max(residuals)
    return gap <= 1e-8 and worst <= 1e-8, f'objective gap {gap:.2e}, worst autoencoder residual {worst:.2e}'


@check
def noise_free_zero_shot(rng):
    world = generate(SynthConfig(c_total=16, c_seen_tx=10, c_seen_rx=10, d_v=32, d_s=8, k_hint=8,
                                 n_per_class=5, n_test=24, noise_sigma=0.0, orthonormal_map=True,
                                 seed=int(rng.integers(2 ** 31))))
    model = train_extractor(world.tx_train, 8, 1.0)
    universe = world.test_prototypes
    hits = [
        classify(model.p_s.T @ (model.p_v @ v), universe, universe.class_ids).class_id == label
        for v, label in world.test
    ]
    accuracy = float(np.mean(hits))
    return accuracy == 1.0, f'accuracy {accuracy:.3f}'


@check
def link_budget(rng):
    params = ChannelParams()
    gain, rate = path_loss(params), achievable_rate(params)
    ratio = latency(1024, params, rate) / latency(15, params, rate)
    ok = abs(gain - 8e-9) <= 8e-12 and abs(rate - 1.4294e7) <= 1.43e4 and abs(ratio - 68.27) <= 0.01
    return ok, f'path loss {gain:.4g}, rate {rate:.6g} bit/s, T1/T2 {ratio:.2f}'


@check
def planner_bounds(rng):
    failures = 0
    for _ in range(20):
        inst = random_instance(6, rng)
        exact = solve_brute_force(inst)
        _, relaxed = solve_lp_mck(inst, inst.losses)
        upper = [solve_linear_relaxation(inst), solve_lagrangian(inst)]
        upper += [r for r in (solve_fixed_level(inst, level) for level in range(1, 5)) if r.feasible]
        found = solve_cccp(inst, seed=int(rng.integers(2 ** 31)))
        consistent = abs(evaluate(inst, found.assignment).avg_loss - found.avg_loss) <= 1e-12
        if (relaxed / inst.m > exact.avg_loss + 1e-9
                or any(r.avg_loss < exact.avg_loss - 1e-9 for r in upper)
                or not found.feasible or not consistent):
            failures += 1
    return failures == 0, f'{failures} of 20 instances broke the bound chain'


def run_checks(seed=0):
    rng = np.random.default_rng(seed)
    results = []
    for func in CHECKS:
        try:
            passed, detail = func(rng)
        except Exception as exc:
            logger.exception('self-test %s raised', func.__name__)
            passed, detail = False, f'{type(exc).__name__}: {exc}'
        results.append(CheckResult(name=func.__name__, passed=bool(passed), detail=detail))
    return results
