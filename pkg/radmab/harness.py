#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Experiment orchestration.

An `ExperimentConfig` fully determines a run. Every trial derives its own
seed from ``(seed, trial)``; inside a trial all random draws come from
named substreams of that seed:

- ``"scene"``: scatterer placement when the scene is drawn at random.
- ``"radar", beam``: radar noise of each beam (shared by both gates).
- ``"fading"``: the slots x beams fading table, shared by all algorithms.
- ``"policy", name``: internal randomness of a policy.

so results do not depend on the number of workers nor on the order in
which trials, beams or algorithms are processed.
"""

# Stdlib
import logging
import math
from collections import namedtuple
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
# 3rd party
import numpy as np
# Own
from .bandit import GATE, cumulative_regret, get_algorithm
from .comm_link import LinkConfig, expected_reward, link_report, mean_downlink_snr, throughput
from .radar_rx import RadarSettings, amplitude_gate, doppler_gate
from .scene import (ArrayConfig, Target, TargetKind, WaveformConfig, build_scene, comm_path_gain,
                    make_beam_grid, place_scatterers)
from .utils import ConfigurationError, derive_rng, derive_seed

logger = logging.getLogger(__name__)

SWEEP_PARAMETERS = ('num_scs', 'angular_resolution', 'velocity_resolution', 'radar_snr_db',
                    'num_scs1')
GATED_ALGORITHMS = ('ucb-ag', 'ucb-dg')
DEFAULT_ALGORITHMS = ('dbf', 'lucb', 'random', 'ucb', 'ucb-ag', 'ucb-dg')


def _default_mobile_user():
    return Target(TargetKind.MOBILE_USER, (50.0, 20.0, 0.0), radial_velocity=3.0)


@dataclass(frozen=True)
class SweepSpec(object):

    parameter: str
    values: tuple

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMETERS:
            raise ConfigurationError('Unknown sweep parameter "{}". Choose from: {}'.format(
                self.parameter, ', '.join(SWEEP_PARAMETERS)))
        if not self.values:
            raise ConfigurationError('Sweep over "{}" has no values'.format(self.parameter))
        object.__setattr__(self, 'values', tuple(self.values))


@dataclass(frozen=True)
class ExperimentConfig(object):

    """
    Everything needed to reproduce a run. Defaults describe the baseline
    scene: 41 beams of 4 degrees over [-80, 80], a mobile user at
    (50, 20, 0) m moving at 3 m/s, one SCS1 and one SCS2 placed at random
    per trial, radar SNR 10 dB, velocity resolution 1 m/s, 2000 slots and
    15 trials.

    ``scatterers`` pins an explicit list of SCS targets instead of drawing
    ``num_scs1`` + ``num_scs2`` of them.
    """

    waveform: WaveformConfig = field(default_factory=WaveformConfig)
    arrays: ArrayConfig = None
    grid_min_deg: float = -80.0
    grid_max_deg: float = 80.0
    angular_resolution_deg: float = 4.0
    mobile_user: Target = field(default_factory=_default_mobile_user)
    scatterers: tuple = None
    num_scs1: int = 1
    num_scs2: int = 1
    scs_min_range: float = 20.0
    scs_max_range: float = 80.0
    radar_snr_db: float = 10.0
    velocity_resolution: float = 1.0
    radar: RadarSettings = field(default_factory=RadarSettings)
    link: LinkConfig = field(default_factory=LinkConfig)
    algorithms: tuple = DEFAULT_ALGORITHMS
    horizon: int = 2000
    trials: int = 15
    seed: int = 0
    workers: int = 1
    timeseries_every: int = None
    sweep: SweepSpec = None
    report: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.arrays is None:
            object.__setattr__(self, 'arrays', ArrayConfig.half_wavelength(self.waveform.wavelength))
        if self.scatterers is not None:
            object.__setattr__(self, 'scatterers', tuple(self.scatterers))
        object.__setattr__(self, 'algorithms', tuple(sorted(set(self.algorithms))))
        for name in self.algorithms:
            get_algorithm(name)
        if not self.algorithms:
            raise ConfigurationError('No algorithm selected')
        if self.trials < 1:
            raise ConfigurationError('trials must be >= 1, got {}'.format(self.trials))
        if self.workers < 1:
            raise ConfigurationError('workers must be >= 1, got {}'.format(self.workers))
        if not self.velocity_resolution > 0:
            raise ConfigurationError('velocity_resolution must be > 0, got {}'.format(
                self.velocity_resolution))
        if self.timeseries_every is not None and self.timeseries_every < 1:
            raise ConfigurationError('timeseries_every must be >= 1, got {}'.format(
                self.timeseries_every))

    def beam_grid(self):
        return make_beam_grid(math.radians(self.grid_min_deg), math.radians(self.grid_max_deg),
                              math.radians(self.angular_resolution_deg))

    @property
    def gate_cost(self):
        cost = 0
        if 'ucb-ag' in self.algorithms:
            cost = self.radar.gate_slots
        if 'ucb-dg' in self.algorithms:
            cost = max(cost, self.radar.doppler_cost)
        return cost

    def with_value(self, parameter, value):
        """Copy of the config with a sweep parameter set to `value`."""
        if parameter in ('num_scs', 'num_scs1') and self.scatterers is not None:
            raise ConfigurationError('Cannot sweep "{}" over an explicit scatterer '
                                     'list'.format(parameter))
        if parameter == 'num_scs':
            num_scs1 = int(value) - self.num_scs2
            if num_scs1 < 0:
                raise ConfigurationError('num_scs = {} is below the {} SCS2 of the scene'.format(
                    value, self.num_scs2))
            return replace(self, num_scs1=num_scs1)
        if parameter == 'num_scs1':
            return replace(self, num_scs1=int(value))
        if parameter == 'angular_resolution':
            return replace(self, angular_resolution_deg=float(value))
        if parameter == 'velocity_resolution':
            return replace(self, velocity_resolution=float(value))
        if parameter == 'radar_snr_db':
            return replace(self, radar_snr_db=None if value is None else float(value))
        raise ConfigurationError('Unknown sweep parameter "{}"'.format(parameter))


class TrialEnvironment(object):

    """
    Bandit environment of one trial: a fixed scene, its fading table and the
    radar gates, computed lazily once and shared by the gated algorithms.
    """

    def __init__(self, scene, config, trial_seed):
        self.scene = scene
        self.config = config
        self.seed = trial_seed
        self.num_arms = scene.grid.count
        link = config.link
        self.mean_snr = np.array([mean_downlink_snr(scene, b, config.arrays, config.waveform, link)
                                  for b in range(self.num_arms)])
        self.connected = np.array([comm_path_gain(scene, b) > 0 for b in range(self.num_arms)])
        if link.fading:
            self.fading = derive_rng(trial_seed, 'fading').exponential(
                1.0, size=(config.horizon, self.num_arms))
        else:
            self.fading = np.ones((config.horizon, self.num_arms))
        self.true_means = expected_reward(self.mean_snr, link.reward_lo_db, link.reward_hi_db,
                                          link.fading)
        self.optimal_arm = scene.mu_beam
        self.min_gate_reward = link.min_gate_reward
        self._gates = {}

    def observe(self, arm, slot):
        snr = self.mean_snr[arm] * self.fading[slot - 1, arm]
        return link_report(slot, arm, snr, self.connected[arm], self.config.link)

    def gate(self, kind):
        if kind not in ('amplitude', 'doppler'):
            raise ConfigurationError('Unknown gate "{}"'.format(kind))
        if not self._gates:
            c = self.config
            radar = c.radar.resolved(c.waveform)
            doppler = doppler_gate(self.scene, c.velocity_resolution, c.waveform, c.arrays,
                                   radar, self.seed)
            self._gates['doppler'] = doppler
            self._gates['amplitude'] = amplitude_gate(self.scene, c.waveform, c.arrays, radar,
                                                      self.seed, reports=doppler.reports)
            logger.info('Gates: amplitude kept beams %s, Doppler kept %s (MU in beam %d)',
                        list(self._gates['amplitude'].arms), list(doppler.arms),
                        self.scene.mu_beam)
        return self._gates[kind]


TrialTrace = namedtuple('TrialTrace', 'trial algorithm records cum_regret throughput_bps')
AggregateRow = namedtuple('AggregateRow', 'sweep_value algorithm mean_throughput_bps '
                                          'se_throughput mean_regret se_regret slot')


@dataclass
class ExperimentResult(object):

    config: ExperimentConfig
    traces: list
    rows: list
    timeseries: list = field(default_factory=list)
    sweep_value: object = ''
    mu_beams: list = field(default_factory=list)

    def traces_of(self, algorithm):
        return [t for t in self.traces if t.algorithm == algorithm]


@dataclass
class SweepResult(object):

    parameter: str
    experiments: list

    @property
    def values(self):
        return [e.sweep_value for e in self.experiments]

    @property
    def rows(self):
        return [row for e in self.experiments for row in e.rows]

    @property
    def timeseries(self):
        return [row for e in self.experiments for row in e.timeseries]


def trial_scene(config, trial_seed):
    """Scene of one trial, scatterers drawn from the ``"scene"`` substream if needed."""
    grid = config.beam_grid()
    if config.scatterers is not None:
        scatterers = list(config.scatterers)
    else:
        scatterers = place_scatterers(grid, config.mobile_user, config.num_scs1, config.num_scs2,
                                      config.scs_min_range, config.scs_max_range,
                                      derive_rng(trial_seed, 'scene'))
    return build_scene([config.mobile_user] + scatterers, grid, config.waveform, config.arrays,
                       radar_snr_db=config.radar_snr_db, comm_snr_db=config.link.comm_snr_db)


def trace_throughput(records, link, upto=None):
    """Throughput of the first `upto` slots of a trace."""
    records = records if upto is None else records[:upto]
    if not link.charge_gate_slots:
        records = [r for r in records if r.arm != GATE]
    if not records:
        return 0.0
    return throughput([r.ber for r in records], link.bits_per_slot, link.slot_duration)


def validate(config):
    """
    Check a config before any trial runs: the grid, the horizon and, for
    explicit scenes, the scene itself.

    Raises
    ------
    ConfigurationError
    """
    grid = config.beam_grid()
    needed = grid.count + config.gate_cost
    if config.horizon < needed:
        raise ConfigurationError('Horizon {} is shorter than {} beams plus {} gate slots'.format(
            config.horizon, grid.count, config.gate_cost))
    if 'lucb' in config.algorithms and config.horizon < 2 * grid.count:
        raise ConfigurationError('LUCB needs a horizon of at least {} slots'.format(2 * grid.count))
    if config.scatterers is not None:
        trial_scene(config, derive_seed(config.seed, 0))
    elif config.num_scs1 + config.num_scs2 > grid.count - 1:
        raise ConfigurationError('Cannot place {} scatterers on {} free beams'.format(
            config.num_scs1 + config.num_scs2, grid.count - 1))
    return grid


def run_trial(config, trial):
    """All algorithms of one trial, in algorithm name order."""
    trial_seed = derive_seed(config.seed, trial)
    scene = trial_scene(config, trial_seed)
    env = TrialEnvironment(scene, config, trial_seed)
    traces = []
    for name in config.algorithms:
        records = get_algorithm(name)(env, config.horizon, rng=derive_rng(trial_seed, 'policy', name))
        cum = cumulative_regret(records, env.true_means)
        traces.append(TrialTrace(trial, name, records, cum, trace_throughput(records, config.link)))
        logger.debug('Trial %d %s: %.1f bit/s, regret %.3f', trial, name, traces[-1].throughput_bps,
                     cum[-1])
    return scene.mu_beam, traces


def _mean_se(values):
    values = np.asarray(values, dtype=float)
    se = values.std(ddof=1) / math.sqrt(len(values)) if len(values) > 1 else 0.0
    return float(values.mean()), float(se)


def aggregate(traces, algorithms, link, sweep_value='', slot=None):
    """One row per algorithm, means and standard errors taken over trials."""
    rows = []
    for name in algorithms:
        mine = [t for t in traces if t.algorithm == name]
        if slot is None:
            tput = [t.throughput_bps for t in mine]
            reg = [t.cum_regret[-1] for t in mine]
        else:
            tput = [trace_throughput(t.records, link, upto=slot) for t in mine]
            reg = [t.cum_regret[slot - 1] for t in mine]
        rows.append(AggregateRow(sweep_value, name, *_mean_se(tput), *_mean_se(reg), slot=slot))
    return rows


def timeseries_slots(horizon, every):
    slots = list(range(every, horizon + 1, every))
    if not slots or slots[-1] != horizon:
        slots.append(horizon)
    return slots


def run_experiment(config, sweep_value=''):
    """
    Run every trial of `config` and aggregate them.

    Trials are spread over ``config.workers`` processes; the result is the
    same for any worker count.
    """
    validate(config)
    logger.info('Running %d trial(s) of %s over %d slots', config.trials,
                ', '.join(config.algorithms), config.horizon)
    trials = range(config.trials)
    if config.workers > 1 and config.trials > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            outcomes = list(pool.map(run_trial, [config] * config.trials, trials))
    else:
        outcomes = [run_trial(config, trial) for trial in trials]
    traces = [trace for _, per_trial in outcomes for trace in per_trial]
    traces.sort(key=lambda t: (t.algorithm, t.trial))
    rows = aggregate(traces, config.algorithms, config.link, sweep_value)
    series = []
    if config.timeseries_every:
        for slot in timeseries_slots(config.horizon, config.timeseries_every):
            series.extend(aggregate(traces, config.algorithms, config.link, sweep_value, slot))
        series.sort(key=lambda r: (r.algorithm, r.slot))
    return ExperimentResult(config=config, traces=traces, rows=rows, timeseries=series,
                            sweep_value=sweep_value, mu_beams=[mu for mu, _ in outcomes])


def run_sweep(config):
    """One `run_experiment` per value of ``config.sweep``, same base seed."""
    if config.sweep is None:
        raise ConfigurationError('Config has no sweep section')
    parameter = config.sweep.parameter
    experiments = []
    for value in config.sweep.values:
        logger.info('Sweep %s = %s', parameter, value)
        experiments.append(run_experiment(config.with_value(parameter, value), sweep_value=value))
    return SweepResult(parameter=parameter, experiments=experiments)
