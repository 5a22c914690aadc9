#!/usr/bin/env python
# -*- coding: utf-8 -*-

# Stdlib
import math
from dataclasses import replace
# 3rd party
import numpy as np
import pytest
# Own
from conftest import radians
from radmab.bandit import GATE, run_ucb_gated
from radmab.comm_link import LinkConfig, ber_16qam
from radmab.harness import (ExperimentConfig, SweepSpec, TrialEnvironment, run_experiment,
                            run_sweep, run_trial, timeseries_slots, trace_throughput, trial_scene,
                            validate)
from radmab.radar_rx import GateResult
from radmab.scene import Target, TargetKind
from radmab.utils import ConfigurationError, derive_seed


def _polar(kind, angle, r):
    az = math.radians(angle)
    return Target(kind, (r * math.cos(az), r * math.sin(az), 0.0))


SCATTERERS = (_polar(TargetKind.SCS1, -40, 40), _polar(TargetKind.SCS2, -64, 40))


def small_config(**kwargs):
    base = dict(angular_resolution_deg=8.0, horizon=200, trials=2, seed=11)
    base.update(kwargs)
    return ExperimentConfig(**base)


@pytest.fixture(scope='module')
def small_result():
    return run_experiment(small_config(timeseries_every=50))


def test_default_config():
    config = ExperimentConfig()
    assert config.beam_grid().count == 41
    assert config.algorithms == ('dbf', 'lucb', 'random', 'ucb', 'ucb-ag', 'ucb-dg')
    assert config.gate_cost == 9
    assert config.arrays.num_elements_bs == 32


def test_traces(small_result):
    config = small_result.config
    assert len(small_result.traces) == config.trials * len(config.algorithms)
    for trace in small_result.traces:
        assert len(trace.records) == config.horizon
        assert len(trace.cum_regret) == config.horizon
        assert [r.slot for r in trace.records] == list(range(1, config.horizon + 1))
        assert np.all(np.diff(trace.cum_regret) >= -1e-12)
        assert trace.throughput_bps == pytest.approx(trace_throughput(trace.records, config.link))
    gated = small_result.traces_of('ucb-ag')
    assert all(sum(r.arm == GATE for r in t.records) == 9 for t in gated)


def test_summary_rows(small_result):
    config = small_result.config
    assert [r.algorithm for r in small_result.rows] == list(config.algorithms)
    for row in small_result.rows:
        mine = small_result.traces_of(row.algorithm)
        assert row.mean_throughput_bps == pytest.approx(np.mean([t.throughput_bps for t in mine]))
        assert row.mean_regret == pytest.approx(np.mean([t.cum_regret[-1] for t in mine]))
        assert row.se_throughput >= 0
    assert len(small_result.mu_beams) == config.trials


def test_timeseries(small_result):
    config = small_result.config
    assert len(small_result.timeseries) == 4 * len(config.algorithms)
    assert sorted({r.slot for r in small_result.timeseries}) == [50, 100, 150, 200]
    last = {r.algorithm: r for r in small_result.timeseries if r.slot == 200}
    for row in small_result.rows:
        assert last[row.algorithm].mean_throughput_bps == pytest.approx(row.mean_throughput_bps)
        assert last[row.algorithm].mean_regret == pytest.approx(row.mean_regret)


def test_timeseries_slots():
    assert timeseries_slots(200, 50) == [50, 100, 150, 200]
    assert timeseries_slots(210, 50) == [50, 100, 150, 200, 210]
    assert timeseries_slots(10, 50) == [10]


def _same(a, b):
    assert a.rows == b.rows
    assert a.mu_beams == b.mu_beams
    for ta, tb in zip(a.traces, b.traces):
        assert ta.records == tb.records
        assert np.array_equal(ta.cum_regret, tb.cum_regret)


def test_determinism(small_result):
    _same(small_result, run_experiment(small_config(timeseries_every=50)))


def test_workers_do_not_change_results(small_result):
    _same(small_result, run_experiment(small_config(timeseries_every=50, workers=2)))


def test_seed_changes_results(small_result):
    other = run_experiment(small_config(timeseries_every=50, seed=12))
    assert other.rows != small_result.rows


def test_trial_is_reproducible():
    config = small_config()
    mu_a, traces_a = run_trial(config, 1)
    mu_b, traces_b = run_trial(config, 1)
    assert mu_a == mu_b
    assert [t.records for t in traces_a] == [t.records for t in traces_b]


def test_dbf_throughput_without_fading():
    config = small_config(algorithms=['dbf'], link=LinkConfig(fading=False))
    result = run_experiment(config)
    expected = (1 - ber_16qam(10 ** 2.5)) * 4096 / 4e-3
    for trace in result.traces:
        assert trace.throughput_bps == pytest.approx(expected)
        assert trace.cum_regret[-1] == 0
    assert result.rows[0].se_throughput == 0


def test_gate_slots_not_charged():
    link = LinkConfig(fading=False, charge_gate_slots=False)
    result = run_experiment(small_config(algorithms=['ucb-ag'], link=link))
    for trace in result.traces:
        played = [r for r in trace.records if r.arm != GATE]
        assert len(played) == 191
        assert trace.throughput_bps == pytest.approx(
            (1 - np.mean([r.ber for r in played])) * 4096 / 4e-3)


def test_explicit_scene():
    config = small_config(scatterers=SCATTERERS)
    scene = trial_scene(config, derive_seed(config.seed, 0))
    assert scene.targets[1:] == SCATTERERS
    assert scene.mu_beam == config.beam_grid().index_of(math.radians(24))


def test_random_scene_depends_on_trial():
    config = small_config(num_scs1=3, num_scs2=2)
    scenes = [trial_scene(config, derive_seed(config.seed, t)) for t in range(5)]
    assert len({s.targets for s in scenes}) > 1
    assert all(len(s.targets) == 6 for s in scenes)


def test_noiseless_gates():
    config = small_config(scatterers=SCATTERERS, radar_snr_db=None)
    seed = derive_seed(config.seed, 0)
    env = TrialEnvironment(trial_scene(config, seed), config, seed)
    grid = config.beam_grid()
    mu, scs1, scs2 = (grid.index_of(a) for a in radians(24, -40, -64))
    assert env.gate('amplitude').arms == tuple(sorted((mu, scs1, scs2)))
    assert env.gate('doppler').arms == tuple(sorted((mu, scs2)))
    assert env.gate('amplitude').cost == 9
    with pytest.raises(ConfigurationError):
        env.gate('angle')


def test_doppler_gate_within_amplitude_gate():
    config = small_config(num_scs1=3, num_scs2=2)
    for trial in range(3):
        seed = derive_seed(config.seed, trial)
        env = TrialEnvironment(trial_scene(config, seed), config, seed)
        assert set(env.gate('doppler').arms) <= set(env.gate('amplitude').arms)


def test_environment_means():
    config = small_config(scatterers=SCATTERERS)
    seed = derive_seed(config.seed, 0)
    env = TrialEnvironment(trial_scene(config, seed), config, seed)
    assert int(np.argmax(env.true_means)) == env.optimal_arm
    assert env.fading.shape == (config.horizon, env.num_arms)
    obs = env.observe(env.optimal_arm, 1)
    assert 0 <= obs.reward <= 1
    assert env.observe(0, 1).ber == 0.5
    assert env.min_gate_reward == pytest.approx(0.1)


@pytest.mark.parametrize('kwargs', [
    dict(horizon=25),
    dict(algorithms=['lucb'], horizon=30),
    dict(num_scs1=30),
])
def test_validation(kwargs):
    with pytest.raises(ConfigurationError):
        validate(small_config(**kwargs))


@pytest.mark.parametrize('kwargs', [
    dict(trials=0),
    dict(workers=0),
    dict(algorithms=['thompson']),
    dict(algorithms=[]),
    dict(velocity_resolution=0.0),
    dict(timeseries_every=0),
])
def test_config_errors(kwargs):
    with pytest.raises(ConfigurationError):
        small_config(**kwargs)


def test_with_value():
    config = small_config()
    assert config.with_value('num_scs', 4).num_scs1 == 3
    assert config.with_value('num_scs1', 2).num_scs1 == 2
    assert config.with_value('angular_resolution', 2).beam_grid().count == 81
    assert config.with_value('velocity_resolution', 3).velocity_resolution == 3.0
    assert config.with_value('radar_snr_db', None).radar_snr_db is None
    with pytest.raises(ConfigurationError):
        config.with_value('num_scs', 0)
    with pytest.raises(ConfigurationError):
        replace(config, scatterers=SCATTERERS).with_value('num_scs1', 2)
    with pytest.raises(ConfigurationError):
        SweepSpec('horizon', (1, 2))


def test_sweep_rows():
    config = small_config(algorithms=['random', 'ucb', 'ucb-ag'],
                          sweep=SweepSpec('radar_snr_db', (0.0, 10.0)))
    result = run_sweep(config)
    assert result.values == [0.0, 10.0]
    assert len(result.rows) == 2 * 3
    by_value = {v: {r.algorithm: r for r in result.rows if r.sweep_value == v}
                for v in result.values}
    # radar noise never reaches the ungated policies
    for name in ('random', 'ucb'):
        low, high = by_value[0.0][name], by_value[10.0][name]
        assert low._replace(sweep_value=None) == high._replace(sweep_value=None)


def test_sweep_needs_section():
    with pytest.raises(ConfigurationError):
        run_sweep(small_config())


def test_gate_without_user_path_falls_back():
    config = small_config(scatterers=SCATTERERS, radar_snr_db=None, link=LinkConfig(fading=False))
    seed = derive_seed(config.seed, 0)
    env = TrialEnvironment(trial_scene(config, seed), config, seed)
    scs1 = config.beam_grid().index_of(math.radians(-40))
    env._gates = {'amplitude': GateResult(arms=(scs1,), cost=9, reports=())}
    records = run_ucb_gated(env, config.horizon, gate='amplitude')
    assert records[0].note == 'gate-fallback'
    assert records[9].arm == scs1 and records[9].reward == 0
    pulls = np.bincount([r.arm for r in records[10:]], minlength=env.num_arms)
    assert int(np.argmax(pulls)) == env.optimal_arm
