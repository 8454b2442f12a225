"""Experiment orchestration: tradeoff tables, knowledge-base sweeps, solver oracle.

Every trial draws its own world from ``SeedSequence([base_seed, trial])``,
trains the extractors, computes the per-sample menus once and runs all
requested planners on the resulting instance. Rows are written as soon as a
trial finishes, in trial order, so a failing trial leaves the finished ones
on disk.
"""
import csv
import dataclasses
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import stats

from . import data
from .channel import achievable_rate
from .config import ExperimentConfig
from .exceptions import IoFailure
from .extractor import train_extractor
from .lossmodel import PartyContext, compute_menus, effective_decision, menu_matrices
from .planner import (
    Instance,
    random_instance,
    run_planner,
    solve_brute_force,
    solve_cccp,
    solve_lp_mck,
)
from .skb import build_skb, random_k

logger = logging.getLogger(__name__)

__all__ = ['ExperimentConfig', 'ExperimentRow', 'run_trial', 'run_tradeoff', 'run_skb_sweep', 'run_oracle']

FIXED_LEVELS = ('level1', 'level2', 'level3', 'level4')
DOMINANCE_BASELINES = ('lp_relax', 'lagrangian')
SWEEP_BASELINES = FIXED_LEVELS + DOMINANCE_BASELINES
ACCURACY_SLACK = 0.02
SWEEP_SLACK = 0.01
LOSS_TOL = 1e-9

TRADEOFF_COLUMNS = ('trial', 'planner', 'avg_loss', 'avg_latency_s', 'accuracy', 'feasible', 'wall_time_s')
SWEEP_TRIAL_COLUMNS = ('side', 'skb_size') + TRADEOFF_COLUMNS
SWEEP_COLUMNS = ('side', 'skb_size', 'planner', 'trials', 'mean_accuracy', 'mean_avg_latency_s',
                 'mean_avg_loss', 'feasible_fraction')


def _cell(value):
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass(frozen=True)
class ExperimentRow:
    trial: int
    planner: str
    avg_loss: float
    avg_latency_s: float
    accuracy: float
    feasible: bool
    wall_time_s: float = None
    skb_size: int = None
    side: str = None

    def cells(self, columns):
        return [_cell(getattr(self, column)) for column in columns]


def trial_seed(base_seed, trial):
    return int(np.random.SeedSequence([base_seed, trial]).generate_state(1)[0])


@dataclass(frozen=True, eq=False)
class TrialWorld:
    trial: int
    seed: int
    world: object
    tx_model: object
    rx_model: object
    rate: float


@dataclass(frozen=True, eq=False)
class TrialSetup:
    world: TrialWorld
    menus: list
    instance: Instance


def prepare_world(cfg, trial):
    seed = trial_seed(cfg.base_seed, trial)
    world = data.generate(dataclasses.replace(cfg.synth, seed=seed))
    tx_model = train_extractor(world.tx_train, cfg.k, cfg.lambda_tx)
    rx_model = tx_model if cfg.shared else train_extractor(world.rx_train, cfg.k, cfg.lambda_rx)
    return TrialWorld(trial=trial, seed=seed, world=world, tx_model=tx_model, rx_model=rx_model,
                      rate=achievable_rate(cfg.channel))


def auto_tau(latencies):
    """Midway between the all-level-2 and all-level-4 average latencies."""
    return 0.5 * (float(latencies[:, 1].mean()) + float(latencies[:, 3].mean()))


def trial_selection(selection, trial):
    """Random selections are redrawn for every trial from the configured seed."""
    if selection.kind != 'random':
        return selection
    return selection.with_seed(trial_seed(selection.seed, trial))


def prepare_instance(cfg, base, skb_tx=None, skb_rx=None):
    universe = base.world.test_prototypes
    tx = PartyContext(base.tx_model, build_skb(universe, skb_tx or trial_selection(cfg.skb_tx, base.trial)))
    rx = PartyContext(base.rx_model, build_skb(universe, skb_rx or trial_selection(cfg.skb_rx, base.trial)))
    menus = compute_menus(base.world.test_visual, tx, rx, cfg.channel, base.rate)
    losses, latencies = menu_matrices(menus)
    tau = auto_tau(latencies) if cfg.tau is None else cfg.tau
    return TrialSetup(world=base, menus=menus, instance=Instance(losses=losses, latencies=latencies, tau=tau))


def accuracy(menus, assignment, labels):
    decisions = [effective_decision(menu, int(level)) for menu, level in zip(menus, assignment.levels)]
    return float(np.mean(np.asarray(decisions) == np.asarray(labels)))


def solve_setup(cfg, setup, planners=None, skb_size=None, side=None):
    rows = []
    inst = setup.instance
    options = dataclasses.replace(cfg.options, seed=setup.world.seed)
    for name in planners or cfg.planners:
        if name == 'brute_force' and inst.m > cfg.brute_force_cap:
            logger.info('trial %d: skipping brute_force, M=%d exceeds the cap of %d',
                        setup.world.trial, inst.m, cfg.brute_force_cap)
            continue
        started = time.perf_counter()
        report = run_planner(name, inst, options)
        elapsed = time.perf_counter() - started
        rows.append(ExperimentRow(
            trial=setup.world.trial,
            planner=name,
            avg_loss=report.avg_loss,
            avg_latency_s=report.avg_latency,
            accuracy=accuracy(setup.menus, report.assignment, setup.world.world.test_labels),
            feasible=report.feasible,
            wall_time_s=elapsed if cfg.timing else None,
            skb_size=skb_size,
            side=side,
        ))
    return rows


def run_trial(cfg, trial):
    setup = prepare_instance(cfg, prepare_world(cfg, trial))
    rows = solve_setup(cfg, setup)
    logger.info('trial %d done: M=%d tau=%.6g s', trial, setup.instance.m, setup.instance.tau)
    return rows


def _sweep_trial(cfg, trial, side, sizes):
    base = prepare_world(cfg, trial)
    rows = []
    for size in sizes:
        selection = random_k(size, base.seed)
        if side == 'tx':
            setup = prepare_instance(cfg, base, skb_tx=selection)
        else:
            setup = prepare_instance(cfg, base, skb_rx=selection)
        rows.extend(solve_setup(cfg, setup, skb_size=size, side=side))
    logger.info('sweep trial %d done (%s sizes %s)', trial, side, list(sizes))
    return rows


def _map_trials(cfg, func, *args):
    """Yield each trial's rows in trial order, in worker processes when configured."""
    workers = cfg.effective_workers()
    trials = range(cfg.trials)
    if workers == 1:
        for trial in trials:
            yield func(cfg, trial, *args)
        return
    logger.info('running %d trials on %d worker processes', cfg.trials, workers)
    with ProcessPoolExecutor(max_workers=workers) as executor:
        futures = [executor.submit(func, cfg, trial, *args) for trial in trials]
        for future in futures:
            yield future.result()


def _open_csv(path, columns):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        handle = path.open('w', encoding='utf-8', newline='')
    except OSError as exc:
        raise IoFailure(f'cannot write {path}: {exc}') from exc
    writer = csv.writer(handle, lineterminator='\n')
    writer.writerow(columns)
    return handle, writer


def _collect(cfg, path, columns, func, *args):
    rows = []
    handle, writer = _open_csv(path, columns)
    with handle:
        try:
            for trial_rows in _map_trials(cfg, func, *args):
                for row in trial_rows:
                    writer.writerow(row.cells(columns))
                handle.flush()
                rows.extend(trial_rows)
        except Exception:
            logger.error('experiment aborted after %d rows; partial results kept in %s', len(rows), path)
            raise
    return rows


def _mean(values):
    return float(np.mean(values)) if values else None


def planner_means(rows):
    by_planner = {}
    for row in rows:
        by_planner.setdefault(row.planner, []).append(row)
    return {
        planner: {
            'rows': len(group),
            'mean_accuracy': _mean([row.accuracy for row in group]),
            'mean_avg_latency_s': _mean([row.avg_latency_s for row in group]),
            'mean_avg_loss': _mean([row.avg_loss for row in group]),
            'feasible_fraction': _mean([1.0 if row.feasible else 0.0 for row in group]),
        }
        for planner, group in sorted(by_planner.items())
    }


def tradeoff_checks(rows):
    """Per-trial comparisons of CCCP against the fixed levels and the relaxation baselines."""
    by_trial = {}
    for row in rows:
        by_trial.setdefault(row.trial, {})[row.planner] = row
    dominance, baselines = [], {name: [] for name in DOMINANCE_BASELINES}
    for trial in sorted(by_trial):
        table = by_trial[trial]
        cccp = table.get('cccp')
        if cccp is None:
            continue
        fixed = [table[name] for name in FIXED_LEVELS if name in table]
        if fixed:
            fastest = all(cccp.avg_latency_s <= row.avg_latency_s + LOSS_TOL for row in fixed)
            best = max(row.accuracy for row in fixed)
            dominance.append(fastest and cccp.accuracy >= best - ACCURACY_SLACK)
        for name in DOMINANCE_BASELINES:
            if name in table:
                baselines[name].append(cccp.avg_loss <= table[name].avg_loss + LOSS_TOL)
    return {
        'cccp_dominates_fixed_levels': _mean([float(flag) for flag in dominance]),
        'cccp_loss_not_worse_than': {name: _mean([float(flag) for flag in flags]) for name, flags in baselines.items()},
        'trials_compared': len(dominance),
    }


def run_tradeoff(cfg):
    out_dir = Path(cfg.out_dir)
    csv_path = out_dir / 'tradeoff.csv'
    rows = _collect(cfg, csv_path, TRADEOFF_COLUMNS, run_trial)
    summary = {
        'kind': 'tradeoff',
        'config': cfg.as_dict(),
        'trials': cfg.trials,
        'planners': planner_means(rows),
        'checks': tradeoff_checks(rows),
    }
    summary_path = out_dir / 'summary.json'
    data.write_json(summary_path, summary)
    logger.info('tradeoff written to %s and %s', csv_path, summary_path)
    return rows, summary


def _finite_or_none(value):
    value = float(value)
    return value if math.isfinite(value) else None


def sweep_aggregate(rows):
    groups = {}
    for row in rows:
        groups.setdefault((row.skb_size, row.planner), []).append(row)
    return [
        {
            'side': group[0].side,
            'skb_size': size,
            'planner': planner,
            'trials': len(group),
            'mean_accuracy': _mean([row.accuracy for row in group]),
            'mean_avg_latency_s': _mean([row.avg_latency_s for row in group]),
            'mean_avg_loss': _mean([row.avg_loss for row in group]),
            'feasible_fraction': _mean([1.0 if row.feasible else 0.0 for row in group]),
        }
        for (size, planner), group in sorted(groups.items())
    ]


def sweep_trends(rows):
    """Spearman rank correlation of accuracy against knowledge-base size, per planner."""
    trends = {}
    for planner in sorted({row.planner for row in rows}):
        group = [row for row in rows if row.planner == planner]
        sizes = [row.skb_size for row in group]
        if len(set(sizes)) < 2:
            trends[planner] = {'rho': None, 'p_value': None, 'points': len(group)}
            continue
        result = stats.spearmanr(sizes, [row.accuracy for row in group])
        trends[planner] = {
            'rho': _finite_or_none(result.statistic),
            'p_value': _finite_or_none(result.pvalue),
            'points': len(group),
        }
    return trends


def sweep_dominance(aggregate):
    """Sizes at which CCCP's mean accuracy is within one point of every baseline
    that met the latency budget in all trials."""
    by_size = {}
    for entry in aggregate:
        by_size.setdefault(entry['skb_size'], {})[entry['planner']] = entry
    result = {}
    for size, table in sorted(by_size.items()):
        if 'cccp' not in table:
            continue
        others = [entry['mean_accuracy'] for name, entry in table.items()
                  if name in SWEEP_BASELINES and entry['feasible_fraction'] == 1.0]
        result[str(size)] = all(table['cccp']['mean_accuracy'] >= value - SWEEP_SLACK for value in others)
    return result


def run_skb_sweep(cfg, side=None, sizes=None):
    side = side or cfg.sweep_side
    sizes = tuple(sizes or cfg.sweep_sizes)
    out_dir = Path(cfg.out_dir)
    trials_path = out_dir / f'sweep_{side}_trials.csv'
    rows = _collect(cfg, trials_path, SWEEP_TRIAL_COLUMNS, _sweep_trial, side, sizes)

    aggregate = sweep_aggregate(rows)
    sweep_path = out_dir / f'sweep_{side}.csv'
    handle, writer = _open_csv(sweep_path, SWEEP_COLUMNS)
    with handle:
        for entry in aggregate:
            writer.writerow([_cell(entry[column]) for column in SWEEP_COLUMNS])

    summary = {
        'kind': 'sweep',
        'side': side,
        'sizes': list(sizes),
        'config': cfg.as_dict(),
        'trials': cfg.trials,
        'trend': sweep_trends(rows),
        'cccp_within_one_point': sweep_dominance(aggregate),
    }
    data.write_json(out_dir / f'sweep_{side}_summary.json', summary)
    logger.info('sweep over %s sizes %s written to %s', side, list(sizes), sweep_path)
    return rows, aggregate, summary


@dataclass(frozen=True)
class OracleResult:
    m: int
    instances: int
    matches: int
    worst_ratio: float
    infeasible_outputs: int
    bound_violations: int

    @property
    def match_rate(self):
        return self.matches / self.instances

    def as_dict(self):
        return {**dataclasses.asdict(self), 'match_rate': self.match_rate}


def run_oracle(m, instances, seed, options=None):
    """CCCP against exhaustive search on seeded random instances."""
    rng = np.random.default_rng(seed)
    options = options or ExperimentConfig().options
    matches = infeasible = violations = 0
    worst = 1.0
    for index in range(instances):
        inst = random_instance(m, rng)
        exact = solve_brute_force(inst)
        found = solve_cccp(inst, options.gamma0, options.gamma_growth, options.restarts,
                           options.tol, options.max_iters, seed=index, polish=options.polish)
        _, relaxed = solve_lp_mck(inst, inst.losses)
        if relaxed / inst.m > exact.avg_loss + LOSS_TOL:
            violations += 1
        if not found.feasible:
            infeasible += 1
        if found.avg_loss <= exact.avg_loss + LOSS_TOL:
            matches += 1
        if exact.avg_loss > 0:
            worst = max(worst, found.avg_loss / exact.avg_loss)
        logger.debug('oracle instance %d: cccp %.12g vs exact %.12g', index, found.avg_loss, exact.avg_loss)
    return OracleResult(m=m, instances=instances, matches=matches, worst_ratio=worst,
                        infeasible_outputs=infeasible, bound_violations=violations)
