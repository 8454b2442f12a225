"""Experiment configuration files.

The format is flat text, one ``section.key = value`` per line; ``#`` starts
a comment. Every section is validated by its form in ``forms.py`` after the
file's values are laid over the form defaults. ``default`` in place of a path
selects the defaults alone.
"""
import dataclasses
import logging
from dataclasses import dataclass, field
from pathlib import Path

from django.conf import settings

from .channel import ChannelParams
from .data import SynthConfig
from .exceptions import ConfigInvalid, IoFailure
from .forms import SECTION_FORMS
from .planner import PlannerOptions
from .skb import Selection

logger = logging.getLogger(__name__)

DEFAULT = 'default'


def default_values():
    """``{section: {key: text}}`` holding every form's initial value."""
    return {
        section: {name: str(form_field.initial) for name, form_field in form.base_fields.items()}
        for section, form in SECTION_FORMS.items()
    }


def parse_text(text, source='<config>'):
    values = {}
    errors = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        name, sep, value = line.partition('=')
        section, dot, key = name.strip().partition('.')
        if not sep or not dot or not section or not key:
            errors[f'line {number}'] = [f'expected "section.key = value", got {raw.strip()!r}']
            continue
        if section not in SECTION_FORMS:
            errors[f'line {number}'] = [f'unknown section {section!r}']
            continue
        if key not in SECTION_FORMS[section].base_fields:
            errors[f'line {number}'] = [f'unknown key {section}.{key}']
            continue
        values.setdefault(section, {})[key] = value.strip()
    if errors:
        raise ConfigInvalid(f'{source}: malformed configuration', errors)
    return values


def validate(values):
    """Run every section form; returns ``{section: cleaned_data}``."""
    merged = default_values()
    for section, overrides in values.items():
        merged[section].update(overrides)
    cleaned = {}
    errors = {}
    for section, form_class in SECTION_FORMS.items():
        form = form_class(data=merged[section])
        if form.is_valid():
            cleaned[section] = form.cleaned_data
            continue
        for name, messages in form.errors.items():
            key = section if name == '__all__' else f'{section}.{name}'
            errors[key] = list(messages)
    if errors:
        raise ConfigInvalid('invalid configuration: ' + '; '.join(f'{k}: {" ".join(v)}' for k, v in errors.items()),
                            errors)
    return merged, cleaned


@dataclass(frozen=True)
class ExperimentConfig:
    synth: SynthConfig = field(default_factory=SynthConfig)
    channel: ChannelParams = field(default_factory=ChannelParams)
    k: int = 8
    lambda_tx: float = 1.0
    lambda_rx: float = 1.0
    shared: bool = True
    skb_tx: Selection = Selection('full')
    skb_rx: Selection = Selection('full')
    planners: tuple = ('level1', 'level2', 'level3', 'level4', 'lp_relax', 'lagrangian', 'cccp', 'brute_force')
    tau: float = None
    brute_force_cap: int = 10
    options: PlannerOptions = field(default_factory=PlannerOptions)
    trials: int = 10
    base_seed: int = 0
    out_dir: Path = Path('out')
    workers: int = 1
    timing: bool = False
    sweep_side: str = 'rx'
    sweep_sizes: tuple = (2, 4, 6, 8, 10)
    source: dict = field(default_factory=dict, compare=False)

    def with_overrides(self, seed=None, out_dir=None, workers=None):
        changes = {}
        if seed is not None:
            changes['base_seed'] = int(seed)
        if out_dir is not None:
            changes['out_dir'] = Path(out_dir)
        if workers is not None:
            changes['workers'] = int(workers)
        return dataclasses.replace(self, **changes) if changes else self

    def effective_workers(self):
        override = settings.SKBMLFX.get('WORKERS')
        return max(1, override if override else self.workers)

    def as_dict(self):
        """Effective settings as ``section.key`` strings, as they would appear in a file."""
        values = {f'{section}.{key}': value for section, keys in self.source.items() for key, value in keys.items()}
        values['experiment.base_seed'] = str(self.base_seed)
        values['experiment.out_dir'] = str(self.out_dir)
        values['experiment.workers'] = str(self.workers)
        return dict(sorted(values.items()))


def build(values):
    merged, cleaned = validate(values)
    synth, channel = cleaned['synth'], cleaned['channel']
    extractor, skb, planner = cleaned['extractor'], cleaned['skb'], cleaned['planner']
    cccp, lagrangian = cleaned['cccp'], cleaned['lagrangian']
    experiment, sweep = cleaned['experiment'], cleaned['sweep']

    synth_config = SynthConfig(k_hint=extractor['k'], **synth)
    errors = {}
    if extractor['k'] > min(synth['d_v'], synth['d_s']):
        errors['extractor.k'] = [f'k must not exceed min(d_v, d_s) = {min(synth["d_v"], synth["d_s"])}']
    if max(sweep['sizes']) > synth['c_total'] - max(synth['c_seen_tx'], synth['c_seen_rx']):
        errors['sweep.sizes'] = ['sizes cannot exceed the number of unseen classes']
    if errors:
        raise ConfigInvalid('invalid configuration', errors)

    return ExperimentConfig(
        synth=synth_config,
        channel=ChannelParams(**channel),
        k=extractor['k'],
        lambda_tx=extractor['lambda_tx'],
        lambda_rx=extractor['lambda_rx'],
        shared=extractor['shared'],
        skb_tx=skb['tx'],
        skb_rx=skb['rx'],
        planners=planner['names'],
        tau=planner['tau'],
        brute_force_cap=planner['brute_force_cap'],
        options=PlannerOptions(
            gamma0=cccp['gamma0'],
            gamma_growth=cccp['gamma_growth'],
            restarts=cccp['restarts'],
            tol=cccp['tol'],
            max_iters=cccp['max_iters'],
            polish=cccp['polish'],
            bisect_tol=lagrangian['bisect_tol'],
            max_steps=lagrangian['max_steps'],
        ),
        trials=experiment['trials'],
        base_seed=experiment['base_seed'],
        out_dir=Path(experiment['out_dir']),
        workers=experiment['workers'],
        timing=experiment['timing'],
        sweep_side=sweep['side'],
        sweep_sizes=tuple(sweep['sizes']),
        source=merged,
    )


def load(path):
    if path is None or str(path) == DEFAULT:
        return build({})
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as exc:
        raise IoFailure(f'cannot read configuration {path}: {exc}') from exc
    logger.debug('loading configuration from %s', path)
    return build(parse_text(text, str(path)))
