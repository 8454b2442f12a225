"""Transmission-level planning as a multi-choice knapsack with one budget.

Every sample ``m`` picks exactly one level ``l``; the average loss
``(1/M) sum x L`` is minimised subject to ``(1/M) sum x T <= tau``.

Solvers:

* ``solve_lp_mck``: exact LP relaxation by a parametric sweep over the
  budget multiplier (per-row lower convex hulls, merged by slope);
* ``solve_cccp``: the penalised relaxation ``sum x L + gamma sum x (1 - x)``
  minimised by the convex-concave procedure, with gamma escalation and
  several restarts;
* baselines: fixed level, LP rounding with repair, Lagrangian bisection,
  and exhaustive search for small ``M``.

Latencies are divided by their maximum before solving so that every solver
is invariant to the time unit; losses are likewise handled relative to their
largest entry.
"""
import itertools
import logging
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DegenerateDenominator,
    Infeasible,
    InvalidArgument,
    MalformedAssignment,
    NonConvergence,
    TooLarge,
)

logger = logging.getLogger(__name__)

N_LEVELS = 4
FEASIBILITY_TOL = 1e-9
ROW_SUM_TOL = 1e-9
BUDGET_TOL = 1e-12
SNAP_TOL = 1e-12
BRUTE_FORCE_MAX_M = 12
MAX_ESCALATIONS = 20

PLANNER_NAMES = (
    'level1', 'level2', 'level3', 'level4',
    'lp_relax', 'lagrangian', 'cccp', 'brute_force',
)


@dataclass(frozen=True, eq=False)
class Instance:
    losses: np.ndarray
    latencies: np.ndarray
    tau: float

    def __post_init__(self):
        losses = np.array(self.losses, dtype=np.float64)
        latencies = np.array(self.latencies, dtype=np.float64)
        if losses.ndim != 2 or losses.shape[1] != N_LEVELS or losses.shape[0] < 1:
            raise InvalidArgument(f'losses must be an M x {N_LEVELS} matrix, got shape {losses.shape}')
        if latencies.shape != losses.shape:
            raise InvalidArgument(f'latencies have shape {latencies.shape}, losses {losses.shape}')
        if not (np.all(np.isfinite(losses)) and np.all(np.isfinite(latencies)) and np.isfinite(self.tau)):
            raise InvalidArgument('instance entries must be finite')
        if np.any(losses < 0):
            raise InvalidArgument('losses must be non-negative')
        if np.any(latencies <= 0):
            raise InvalidArgument('latencies must be strictly positive')
        losses.setflags(write=False)
        latencies.setflags(write=False)
        object.__setattr__(self, 'losses', losses)
        object.__setattr__(self, 'latencies', latencies)
        object.__setattr__(self, 'tau', float(self.tau))

    @property
    def m(self):
        return self.losses.shape[0]

    def min_average_latency(self):
        return float(self.latencies.min(axis=1).mean())

    def is_feasible(self):
        return self.min_average_latency() <= self.tau + FEASIBILITY_TOL

    def require_feasible(self):
        if not self.is_feasible():
            raise Infeasible(
                f'average of the per-sample minimum latencies {self.min_average_latency():.6g} s '
                f'exceeds the budget tau={self.tau:.6g} s'
            )

    def normalized(self):
        """``(weights, budget)`` with latencies divided by their maximum and by M."""
        scale = float(self.latencies.max())
        return self.latencies / scale / self.m, self.tau / scale


@dataclass(frozen=True, eq=False)
class Assignment:
    x: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=np.int8)
        if x.ndim != 2 or x.shape[1] != N_LEVELS:
            raise MalformedAssignment(f'assignment must be M x {N_LEVELS}, got shape {x.shape}')
        if not np.array_equal(np.asarray(self.x, dtype=np.float64), x.astype(np.float64)) or np.any((x != 0) & (x != 1)):
            raise MalformedAssignment('assignment entries must be 0 or 1')
        if np.any(x.sum(axis=1) != 1):
            raise MalformedAssignment('every sample needs exactly one level')
        x.setflags(write=False)
        object.__setattr__(self, 'x', x)

    @classmethod
    def from_choice(cls, choice):
        """From 0-based level indices."""
        choice = np.asarray(choice, dtype=np.int64)
        if choice.ndim != 1 or np.any((choice < 0) | (choice >= N_LEVELS)):
            raise MalformedAssignment(f'level indices must lie in 0..{N_LEVELS - 1}')
        x = np.zeros((choice.shape[0], N_LEVELS), dtype=np.int8)
        x[np.arange(choice.shape[0]), choice] = 1
        return cls(x)

    @classmethod
    def from_levels(cls, levels):
        """From 1-based level numbers."""
        return cls.from_choice(np.asarray(levels, dtype=np.int64) - 1)

    @property
    def choice(self):
        return np.argmax(self.x, axis=1)

    @property
    def levels(self):
        return self.choice + 1


@dataclass(frozen=True, eq=False)
class FractionalPoint:
    x: np.ndarray

    def __post_init__(self):
        x = np.array(self.x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != N_LEVELS:
            raise InvalidArgument(f'point must be M x {N_LEVELS}, got shape {x.shape}')
        if np.any(x < -ROW_SUM_TOL) or np.any(x > 1 + ROW_SUM_TOL):
            raise InvalidArgument('point entries must lie in [0, 1]')
        if np.any(np.abs(x.sum(axis=1) - 1.0) > ROW_SUM_TOL):
            raise InvalidArgument('point rows must sum to one')
        x.setflags(write=False)
        object.__setattr__(self, 'x', x)

    def fractional_rows(self, tol=SNAP_TOL):
        frac = (self.x > tol) & (self.x < 1 - tol)
        return np.flatnonzero(frac.any(axis=1))


@dataclass(frozen=True, eq=False)
class PlannerReport:
    planner: str
    assignment: Assignment
    avg_loss: float
    avg_latency: float
    feasible: bool
    iterations: int = 0
    restarts_used: int = 0
    gamma_final: float = 0.0
    repaired: bool = False
    converged: bool = True

    def as_dict(self):
        return {
            'planner': self.planner,
            'levels': [int(level) for level in self.assignment.levels],
            'avg_loss': self.avg_loss,
            'avg_latency': self.avg_latency,
            'feasible': self.feasible,
            'iterations': self.iterations,
            'restarts_used': self.restarts_used,
            'gamma_final': self.gamma_final,
            'repaired': self.repaired,
            'converged': self.converged,
        }


@dataclass(frozen=True)
class PlannerOptions:
    gamma0: float = 0.05
    gamma_growth: float = 2.0
    restarts: int = 16
    tol: float = 1e-9
    max_iters: int = 100
    seed: int = 0
    polish: bool = False
    bisect_tol: float = 1e-9
    max_steps: int = 200


def evaluate(inst, assignment, planner='evaluate', **details):
    if not isinstance(assignment, Assignment):
        assignment = Assignment(assignment)
    if assignment.x.shape != inst.losses.shape:
        raise MalformedAssignment(f'assignment has shape {assignment.x.shape}, instance {inst.losses.shape}')
    x = assignment.x.astype(np.float64)
    avg_loss = float(np.sum(inst.losses * x) / inst.m)
    avg_latency = float(np.sum(inst.latencies * x) / inst.m)
    return PlannerReport(
        planner=planner,
        assignment=assignment,
        avg_loss=avg_loss,
        avg_latency=avg_latency,
        feasible=avg_latency <= inst.tau + FEASIBILITY_TOL,
        **details,
    )


def _argmin_tiebreak(primary, secondary):
    """Row-wise argmin of ``primary``; ties go to the smaller ``secondary``, then the lower index."""
    best = primary.min(axis=1, keepdims=True)
    return np.argmin(np.where(primary == best, secondary, np.inf), axis=1)


def _lp_vertex(costs, weights, budget):
    """Optimal vertex of ``min <costs, x>`` over the rows-sum-to-one polytope
    with ``<weights, x> <= budget``.

    Each row starts at its cheapest level and walks down its lower convex
    hull towards lighter levels; all hull segments are then taken in order of
    increasing cost per unit of weight saved until the budget is met, the
    last one possibly in part.
    """
    m = costs.shape[0]
    rows = np.arange(m)
    start = _argmin_tiebreak(costs, weights)

    seg_to = np.full((m, N_LEVELS - 1), -1, dtype=np.int64)
    seg_slope = np.full((m, N_LEVELS - 1), np.inf)
    seg_saved = np.zeros((m, N_LEVELS - 1))
    current = start.copy()
    active = np.ones(m, dtype=bool)
    for step in range(N_LEVELS - 1):
        c_cur = costs[rows, current]
        w_cur = weights[rows, current]
        saved = w_cur[:, None] - weights
        valid = (saved > 0) & active[:, None]
        slope = np.where(valid, (costs - c_cur[:, None]) / np.where(valid, saved, 1.0), np.inf)
        best = slope.min(axis=1)
        active = np.isfinite(best)
        if not active.any():
            break
        # Farthest point on the steepest-descent ray keeps hull slopes strictly increasing.
        nxt = np.argmin(np.where(valid & (slope == best[:, None]), weights, np.inf), axis=1)
        seg_to[active, step] = nxt[active]
        seg_slope[active, step] = best[active]
        seg_saved[active, step] = (w_cur - weights[rows, nxt])[active]
        current = np.where(active, nxt, current)

    x = np.zeros((m, N_LEVELS))
    x[rows, start] = 1.0
    need = weights[rows, start].sum() - budget
    if need <= BUDGET_TOL:
        return x, float(np.sum(costs * x))

    seg_row, seg_step = np.nonzero(seg_to >= 0)
    if seg_row.size == 0:
        raise Infeasible('budget cannot be met by any level choice')
    order = np.lexsort((seg_step, seg_row, seg_slope[seg_row, seg_step]))
    seg_row, seg_step = seg_row[order], seg_step[order]
    cumulative = np.cumsum(seg_saved[seg_row, seg_step])
    if cumulative[-1] < need - BUDGET_TOL:
        raise Infeasible('budget cannot be met even with the lightest level everywhere')

    split = min(int(np.searchsorted(cumulative, need, side='left')), seg_row.size - 1)
    last_step = np.full(m, -1, dtype=np.int64)
    np.maximum.at(last_step, seg_row[:split], seg_step[:split])
    final = np.where(last_step >= 0, seg_to[rows, np.maximum(last_step, 0)], start)

    x = np.zeros((m, N_LEVELS))
    x[rows, final] = 1.0
    row, step = seg_row[split], seg_step[split]
    before = cumulative[split - 1] if split > 0 else 0.0
    theta = min(max((need - before) / seg_saved[row, step], 0.0), 1.0)
    if theta > SNAP_TOL:
        src, dst = final[row], seg_to[row, step]
        if theta >= 1.0 - SNAP_TOL:
            x[row, src], x[row, dst] = 0.0, 1.0
        else:
            x[row, src], x[row, dst] = 1.0 - theta, theta
    return x, float(np.sum(costs * x))


def solve_lp_mck(inst, costs):
    inst.require_feasible()
    costs = np.asarray(costs, dtype=np.float64)
    if costs.shape != inst.losses.shape or not np.all(np.isfinite(costs)):
        raise InvalidArgument(f'costs must be a finite {inst.losses.shape} matrix')
    weights, budget = inst.normalized()
    x, objective = _lp_vertex(costs, weights, budget)
    return FractionalPoint(x), objective


def repair_choice(losses, weights, budget, choice):
    """Move rows to their lightest level, cheapest loss increase per weight saved
    first, until the budget holds. Returns ``(choice, moves)``."""
    choice = np.array(choice, dtype=np.int64)
    rows = np.arange(choice.shape[0])
    lightest = _argmin_tiebreak(weights, losses)
    moves = 0
    while weights[rows, choice].sum() > budget + BUDGET_TOL:
        saved = weights[rows, choice] - weights[rows, lightest]
        extra = losses[rows, lightest] - losses[rows, choice]
        movable = saved > 0
        if not movable.any():
            raise Infeasible('no row can move to a lighter level')
        ratio = np.where(movable, extra / np.where(movable, saved, 1.0), np.inf)
        row = int(np.argmin(ratio))
        choice[row] = lightest[row]
        moves += 1
    return choice, moves


def repair_assignment(inst, assignment):
    """Feasible assignment obtained from ``assignment`` by the greedy repair; returns ``(assignment, moves)``."""
    inst.require_feasible()
    if assignment.x.shape != inst.losses.shape:
        raise MalformedAssignment(f'assignment has shape {assignment.x.shape}, instance {inst.losses.shape}')
    weights, budget = inst.normalized()
    choice, moves = repair_choice(inst.losses, weights, budget, assignment.choice)
    return Assignment.from_choice(choice), moves


def _exchange_polish(losses, weights, budget, choice):
    """Apply the best single-row or two-row level change that lowers the loss
    and keeps the budget, until none is left."""
    choice = np.array(choice, dtype=np.int64)
    m = choice.shape[0]
    rows = np.arange(m)
    flat_row = np.repeat(rows, N_LEVELS)
    flat_level = np.tile(np.arange(N_LEVELS), m)
    distinct = flat_row[:, None] < flat_row[None, :]
    gain_tol = 1e-12 * max(float(losses.max()), 1e-300)
    moves = 0
    while True:
        slack = budget - weights[rows, choice].sum()
        d_loss = (losses - losses[rows, choice][:, None]).ravel()
        d_weight = (weights - weights[rows, choice][:, None]).ravel()

        single = np.where((d_weight <= slack + BUDGET_TOL) & (d_loss < -gain_tol), d_loss, np.inf)
        pair_loss = d_loss[:, None] + d_loss[None, :]
        pair_ok = distinct & (d_weight[:, None] + d_weight[None, :] <= slack + BUDGET_TOL) & (pair_loss < -gain_tol)
        pair = np.where(pair_ok, pair_loss, np.inf)

        i = int(np.argmin(single))
        j = int(np.argmin(pair))
        if not np.isfinite(single[i]) and not np.isfinite(pair.flat[j]):
            break
        if single[i] <= pair.flat[j]:
            choice[flat_row[i]] = flat_level[i]
        else:
            a, b = np.unravel_index(j, pair.shape)
            choice[flat_row[a]] = flat_level[a]
            choice[flat_row[b]] = flat_level[b]
        moves += 1
    if moves:
        logger.debug('exchange polish applied %d moves', moves)
    return choice


def solve_fixed_level(inst, level):
    if level not in range(1, N_LEVELS + 1):
        raise InvalidArgument(f'level must be in 1..{N_LEVELS}, got {level}')
    choice = np.full(inst.m, level - 1, dtype=np.int64)
    return evaluate(inst, Assignment.from_choice(choice), planner=f'level{level}')


def _round_rows(x):
    return np.argmax(x, axis=1)


def solve_linear_relaxation(inst):
    inst.require_feasible()
    weights, budget = inst.normalized()
    x, _ = _lp_vertex(inst.losses, weights, budget)
    choice, moves = repair_choice(inst.losses, weights, budget, _round_rows(x))
    if moves:
        logger.info('LP rounding exceeded the budget; repair moved %d samples', moves)
    return evaluate(inst, Assignment.from_choice(choice), planner='lp_relax', iterations=1, repaired=moves > 0)


def _lagrangian_choice(losses, weights, mu):
    return _argmin_tiebreak(losses + mu * weights, weights)


def lagrangian_pick(inst, mu):
    """Per-sample level minimising ``L + mu T / M``; lower latency, then lower level on ties."""
    if mu < 0:
        raise InvalidArgument(f'multiplier must be non-negative, got {mu}')
    return Assignment.from_choice(_lagrangian_choice(inst.losses, inst.latencies / inst.m, mu))


def solve_lagrangian(inst, bisect_tol=1e-9, max_steps=200):
    inst.require_feasible()
    weights, budget = inst.normalized()
    losses = inst.losses / max(float(inst.losses.max()), 1e-300)
    rows = np.arange(inst.m)
    best = {'loss': np.inf, 'choice': None}

    def feasible(choice):
        ok = weights[rows, choice].sum() <= budget + BUDGET_TOL
        if ok:
            loss = losses[rows, choice].sum()
            if loss < best['loss']:
                best['loss'], best['choice'] = loss, choice
        return ok

    steps = 1
    if not feasible(_lagrangian_choice(losses, weights, 0.0)):
        lo, hi = 0.0, 1.0
        while not feasible(_lagrangian_choice(losses, weights, hi)):
            lo, hi = hi, 2.0 * hi
            steps += 1
            if steps > max_steps:
                raise Infeasible('no multiplier produced a feasible pick')
        while hi - lo > bisect_tol and steps < max_steps:
            mid = 0.5 * (lo + hi)
            steps += 1
            if feasible(_lagrangian_choice(losses, weights, mid)):
                hi = mid
            else:
                lo = mid
        logger.debug('lagrangian bisection stopped at mu in [%.6g, %.6g] after %d steps', lo, hi, steps)
    return evaluate(inst, Assignment.from_choice(best['choice']), planner='lagrangian', iterations=steps)


def solve_brute_force(inst):
    """Exact optimum by enumeration; lexicographically smallest level vector on ties."""
    if inst.m > BRUTE_FORCE_MAX_M:
        raise TooLarge(f'exhaustive search is capped at M={BRUTE_FORCE_MAX_M}, got M={inst.m}')
    weights, budget = inst.normalized()
    losses = inst.losses
    tail = min(inst.m, 8)
    head = inst.m - tail
    tail_choices = np.indices((N_LEVELS,) * tail).reshape(tail, -1).T
    tail_rows = np.arange(head, inst.m)
    tail_loss = losses[tail_rows, tail_choices].sum(axis=1)
    tail_weight = weights[tail_rows, tail_choices].sum(axis=1)

    best_loss, best_choice = np.inf, None
    for prefix in itertools.product(range(N_LEVELS), repeat=head):
        head_loss = sum(losses[i, level] for i, level in enumerate(prefix))
        head_weight = sum(weights[i, level] for i, level in enumerate(prefix))
        total = np.where(head_weight + tail_weight <= budget + BUDGET_TOL, head_loss + tail_loss, np.inf)
        j = int(np.argmin(total))
        if total[j] < best_loss:
            best_loss, best_choice = total[j], np.concatenate([np.array(prefix, dtype=np.int64), tail_choices[j]])
    if best_choice is None:
        raise Infeasible('no level assignment meets the latency budget')
    return evaluate(inst, Assignment.from_choice(best_choice), planner='brute_force', iterations=N_LEVELS ** inst.m)


def penalized_objective(losses, x, gamma):
    """Penalised objective ``sum x L + gamma sum x (1 - x)``."""
    return float(np.sum(losses * x) + gamma * np.sum(x * (1.0 - x)))


def _is_binary(x, tol):
    return bool(np.all(np.minimum(np.abs(x), np.abs(1.0 - x)) <= tol))


@dataclass(frozen=True, eq=False)
class CccpRun:
    x: np.ndarray
    objectives: tuple
    iterations: int
    converged: bool

    @property
    def binary(self):
        return _is_binary(self.x, 1e-9)


def _descent(losses, weights, budget, x, gamma, tol, max_iters):
    objectives = [penalized_objective(losses, x, gamma)]
    converged = False
    iterations = 0
    for iterations in range(1, max_iters + 1):
        # Linearise the concave penalty at x: its gradient is gamma (1 - 2x).
        x_new, _ = _lp_vertex(losses - gamma * (2.0 * x - 1.0), weights, budget)
        objectives.append(penalized_objective(losses, x_new, gamma))
        step = float(np.max(np.abs(x_new - x)))
        x = x_new
        if step <= tol:
            converged = True
            break
    return CccpRun(x=x, objectives=tuple(objectives), iterations=iterations, converged=converged)


def run_cccp(inst, x0, gamma, tol=1e-9, max_iters=100):
    """One convex-concave descent at a fixed penalty ``gamma`` from ``x0``."""
    inst.require_feasible()
    start = x0 if isinstance(x0, FractionalPoint) else FractionalPoint(x0)
    if start.x.shape != inst.losses.shape:
        raise InvalidArgument(f'start point has shape {start.x.shape}, instance {inst.losses.shape}')
    weights, budget = inst.normalized()
    return _descent(inst.losses, weights, budget, np.array(start.x), float(gamma), tol, max_iters)


def random_feasible_point(inst, rng):
    """A random level per sample, repaired into the budget."""
    inst.require_feasible()
    weights, budget = inst.normalized()
    choice, _ = repair_choice(inst.losses, weights, budget, rng.integers(0, N_LEVELS, size=inst.m))
    return FractionalPoint(Assignment.from_choice(choice).x)


def solve_cccp(inst, gamma0=0.05, gamma_growth=2.0, restarts=16, tol=1e-9, max_iters=100, seed=0,
               polish=False, strict=False):
    """Convex-concave procedure on the exact-penalty relaxation.

    The starting penalty is the larger of ``gamma0`` times the largest loss
    and the exact-penalty bound measured from the rounded LP optimum. The
    first restart starts from the LP relaxation optimum, the others from
    random feasible vertices; the penalty is reset for every restart and
    multiplied by ``gamma_growth`` while the limit point is still fractional.
    ``polish`` adds an exchange local search to every rounded restart.
    """
    inst.require_feasible()
    if not gamma0 > 0 or not gamma_growth > 1 or restarts < 1 or max_iters < 1:
        raise InvalidArgument('need gamma0 > 0, gamma_growth > 1, restarts >= 1 and max_iters >= 1')
    losses = inst.losses
    weights, budget = inst.normalized()
    rows = np.arange(inst.m)
    rng = np.random.default_rng(seed)
    lp_x, relaxed = _lp_vertex(losses, weights, budget)
    gamma_start = _starting_penalty(losses, weights, budget, lp_x, relaxed, gamma0)

    best = None
    total_iterations = 0
    capped = stalled = 0
    for restart in range(restarts):
        x = lp_x if restart == 0 else random_feasible_point(inst, rng).x.copy()
        gamma = gamma_start
        escalations = 0
        previous = None
        while True:
            run = _descent(losses, weights, budget, x, gamma, tol, max_iters)
            total_iterations += run.iterations
            x = run.x
            if _is_binary(x, tol):
                converged = True
                break
            # A fractional vertex of the relaxed polytope stays put for every gamma.
            if previous is not None and np.array_equal(x, previous):
                converged = False
                stalled += 1
                break
            if escalations >= MAX_ESCALATIONS:
                converged = False
                capped += 1
                break
            previous = x
            gamma *= gamma_growth
            escalations += 1
        logger.debug('cccp restart %d: %d escalations, gamma=%.6g, binary=%s', restart, escalations, gamma, converged)

        choice, moves = repair_choice(losses, weights, budget, _round_rows(x))
        if polish:
            choice = _exchange_polish(losses, weights, budget, choice)
        loss = float(losses[rows, choice].sum())
        if best is None or loss < best['loss']:
            best = {'loss': loss, 'choice': choice, 'gamma': gamma, 'converged': converged, 'repaired': moves > 0}

    if stalled:
        logger.debug('cccp: %d of %d restarts stopped at a fractional vertex and were rounded', stalled, restarts)
    if capped:
        logger.warning('cccp: %d of %d restarts were still fractional after %d penalty doublings',
                       capped, restarts, MAX_ESCALATIONS)
    if strict and (capped or stalled):
        raise NonConvergence(f'{capped + stalled} restarts did not reach a binary point')
    return evaluate(
        inst,
        Assignment.from_choice(best['choice']),
        planner='cccp',
        iterations=total_iterations,
        restarts_used=restarts,
        gamma_final=best['gamma'],
        repaired=best['repaired'],
        converged=best['converged'],
    )


def _project_rows_to_simplex(y):
    n = y.shape[1]
    u = -np.sort(-y, axis=1)
    css = np.cumsum(u, axis=1) - 1.0
    positive = u - css / np.arange(1, n + 1) > 0
    rho = n - 1 - np.argmax(positive[:, ::-1], axis=1)
    theta = css[np.arange(y.shape[0]), rho] / (rho + 1)
    return np.maximum(y - theta[:, None], 0.0)


def _max_fractionality(weights, budget, iterations=200):
    """``max sum x (1 - x)`` over the relaxed feasible set.

    The unconstrained maximiser is the uniform point (3/4 per row). Otherwise
    the budget multiplier ``nu`` is found by bisection; for a given ``nu`` the
    maximiser is the row-wise simplex projection of ``(1 - nu w) / 2``.
    """
    m = weights.shape[0]
    if weights.mean(axis=1).sum() <= budget + BUDGET_TOL:
        return 0.75 * m

    def point(nu):
        return _project_rows_to_simplex(0.5 * (1.0 - nu * weights))

    def load(nu):
        return float(np.sum(weights * point(nu)))

    lo, hi = 0.0, 1.0
    while load(hi) > budget + BUDGET_TOL:
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            return 0.0
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if load(mid) > budget:
            lo = mid
        else:
            hi = mid
    x = point(hi)
    return float(np.sum(x * (1.0 - x)))


def _exact_penalty_bound(losses, weights, budget, x0, relaxed):
    denominator = _max_fractionality(weights, budget)
    if denominator <= 1e-12:
        raise DegenerateDenominator('every feasible point is already binary; the bound is undefined')
    return max(float(np.sum(losses * x0)) - relaxed, 0.0) / denominator


def _starting_penalty(losses, weights, budget, lp_x, relaxed, gamma0):
    gamma = gamma0 * max(float(losses.max()), 1e-300)
    incumbent, _ = repair_choice(losses, weights, budget, _round_rows(lp_x))
    try:
        bound = _exact_penalty_bound(losses, weights, budget, Assignment.from_choice(incumbent).x, relaxed)
    except DegenerateDenominator:
        return gamma
    logger.debug('cccp penalty start: %.6g (scale) vs %.6g (exact-penalty bound)', gamma, bound)
    return max(gamma, bound)


def penalty_lower_bound(inst, x0):
    """Penalty above which the penalised relaxation is exact, measured from ``x0``.

    The denominator is the largest total fractionality ``sum x (1 - x)`` the
    relaxed feasible set admits.
    """
    inst.require_feasible()
    start = x0 if isinstance(x0, FractionalPoint) else FractionalPoint(x0)
    weights, budget = inst.normalized()
    if float(np.sum(weights * start.x)) > budget + FEASIBILITY_TOL:
        raise InvalidArgument('x0 violates the latency budget')
    _, relaxed = _lp_vertex(inst.losses, weights, budget)
    return _exact_penalty_bound(inst.losses, weights, budget, start.x, relaxed)


def run_planner(name, inst, options=None):
    options = options or PlannerOptions()
    if name.startswith('level') and name[5:].isdigit():
        return solve_fixed_level(inst, int(name[5:]))
    if name == 'lp_relax':
        return solve_linear_relaxation(inst)
    if name == 'lagrangian':
        return solve_lagrangian(inst, options.bisect_tol, options.max_steps)
    if name == 'cccp':
        return solve_cccp(
            inst, options.gamma0, options.gamma_growth, options.restarts,
            options.tol, options.max_iters, options.seed, polish=options.polish,
        )
    if name == 'brute_force':
        return solve_brute_force(inst)
    raise InvalidArgument(f'unknown planner {name!r}; expected one of {PLANNER_NAMES}')


def random_instance(m, rng, slack=None):
    """Seeded test instance: uniform losses and latencies, a budget strictly
    between the all-fastest and all-slowest averages."""
    losses = rng.uniform(0.0, 1.0, size=(m, N_LEVELS))
    latencies = rng.uniform(0.1, 1.0, size=(m, N_LEVELS))
    lo = latencies.min(axis=1).mean()
    hi = latencies.max(axis=1).mean()
    fraction = rng.uniform(0.2, 0.8) if slack is None else slack
    return Instance(losses=losses, latencies=latencies, tau=lo + fraction * (hi - lo))
