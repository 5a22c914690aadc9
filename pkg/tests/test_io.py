#!/usr/bin/env python
# -*- coding: utf-8 -*-

# Stdlib
import csv
import os
# 3rd party
import pytest
# Own
from conftest import configpath, datapath
from radmab.harness import ExperimentConfig, SweepSpec, run_experiment, run_sweep
from radmab.io import (SUMMARY_HEADER, TIMESERIES_HEADER, TRACE_HEADER, emit_csv, load_config,
                       parse_config, write_trace)
from radmab.scene import TargetKind
from radmab.utils import ConfigurationError


def _read(path):
    with open(path) as f:
        return list(csv.reader(f))


def test_empty_config_is_baseline():
    assert parse_config({}) == ExperimentConfig()
    assert parse_config(None) == ExperimentConfig()


def test_baseline_file():
    config = load_config(configpath('baseline.yaml'))
    assert config == ExperimentConfig(seed=2019)


@pytest.mark.parametrize('name', ['sweep_num_scs.yaml', 'sweep_angular_resolution.yaml',
                                  'sweep_velocity_resolution.yaml', 'sweep_radar_snr.yaml',
                                  'sweep_num_scs1.yaml'])
def test_shipped_sweeps_load(name):
    config = load_config(configpath(name))
    assert isinstance(config.sweep, SweepSpec)
    for value in config.sweep.values:
        config.with_value(config.sweep.parameter, value)


def test_overrides():
    config = parse_config({'experiment': {'seed': 1, 'trials': 4}}, seed=9, trials=None,
                          algorithms=['ucb', 'dbf'])
    assert config.seed == 9
    assert config.trials == 4
    assert config.algorithms == ('dbf', 'ucb')


def test_sections():
    config = parse_config({
        'grid': {'resolution_deg': 2},
        'cfar': {'num_training': 8, 'num_guard': 1, 'os_rank': 6, 'pfa': 1e-4},
        'music': {'model_order': 2, 'velocity_resolution': 2.5},
        'link': {'fading': False},
        'experiment': {'algorithms': 'ucb,ucb-ag', 'gate_slots': 4, 'doppler_gate_slots': 6},
        'report': {'html': True},
    })
    assert config.beam_grid().count == 81
    assert config.radar.cfar.num_training == 8
    assert config.radar.pfa == 1e-4
    assert config.radar.model_order == 2
    assert config.velocity_resolution == 2.5
    assert config.link.fading is False
    assert config.algorithms == ('ucb', 'ucb-ag')
    assert config.radar.gate_slots == 4
    assert config.radar.doppler_cost == 6
    assert config.report == {'html': True}


def test_explicit_scene():
    config = load_config(datapath('explicit_scene.yaml'))
    kinds = [s.kind for s in config.scatterers]
    assert kinds == [TargetKind.SCS1, TargetKind.SCS2]
    assert config.mobile_user.radial_velocity == 3.0


@pytest.mark.parametrize('data', [
    {'grid': {'resolution': 4}},
    {'scenery': {}},
    {'grid': [4]},
    {'scene': {'scatterers': [{'kind': 'wall', 'position': [1, 2, 0]}]}},
    {'scene': {'scatterers': [{'kind': 'scs1'}]}},
    {'scene': {'mobile_user': {'kind': 'scs1', 'position': [50, 20, 0]}}},
    {'sweep': {'parameter': 'num_scs'}},
    {'sweep': {'parameter': 'horizon', 'values': [1]}},
    {'waveform': {'carrier_freq': -1.0}},
])
def test_bad_configs(data):
    with pytest.raises(ConfigurationError):
        parse_config(data)


def test_bad_key_file():
    with pytest.raises(ConfigurationError) as excinfo:
        load_config(datapath('bad_key.yaml'))
    assert 'resolution' in str(excinfo.value)


def test_missing_file():
    with pytest.raises(OSError):
        load_config(datapath('does_not_exist.yaml'))


def test_broken_yaml(tmpdir):
    path = tmpdir.join('broken.yaml')
    path.write('grid: [1, 2\n')
    with pytest.raises(ConfigurationError):
        load_config(str(path))


@pytest.fixture(scope='module')
def tiny_result():
    return run_experiment(load_config(datapath('tiny.yaml')))


def test_emit_csv(tiny_result, tmpdir):
    paths = emit_csv(tiny_result, str(tmpdir))
    assert [os.path.basename(p) for p in paths] == ['trace.csv', 'summary.csv', 'timeseries.csv']
    trace = _read(paths[0])
    config = tiny_result.config
    assert tuple(trace[0]) == TRACE_HEADER
    assert len(trace) == 1 + config.trials * len(config.algorithms) * config.horizon
    summary = _read(paths[1])
    assert tuple(summary[0]) == SUMMARY_HEADER
    assert len(summary) == 1 + len(config.algorithms)
    assert float(summary[1][2]) == tiny_result.rows[0].mean_throughput_bps
    timeseries = _read(paths[2])
    assert tuple(timeseries[0]) == TIMESERIES_HEADER
    assert len(timeseries) == 1 + 3 * len(config.algorithms)


def test_trace_rows(tiny_result, tmpdir):
    (path, _, _) = emit_csv(tiny_result, str(tmpdir))
    rows = _read(path)[1:]
    first = tiny_result.traces[0]
    assert rows[0][:3] == [str(first.trial), '1', first.algorithm]
    gated = [row for row in rows if row[2] == 'ucb-ag']
    assert gated[0][3] == '-1' and gated[0][5] == '0.5'


def test_emit_csv_is_reproducible(tiny_result, tmpdir):
    first = emit_csv(tiny_result, str(tmpdir.mkdir('a')))
    again = emit_csv(run_experiment(load_config(datapath('tiny.yaml'))), str(tmpdir.mkdir('b')))
    for a, b in zip(first, again):
        with open(a, 'rb') as fa, open(b, 'rb') as fb:
            assert fa.read() == fb.read()


def test_emit_sweep(tmpdir):
    result = run_sweep(load_config(datapath('sweep_tiny.yaml')))
    paths = emit_csv(result, str(tmpdir))
    assert os.path.isfile(str(tmpdir.join('num_scs=2', 'trace.csv')))
    assert os.path.isfile(str(tmpdir.join('num_scs=3', 'trace.csv')))
    summary = _read(str(tmpdir.join('summary.csv')))
    assert [row[0] for row in summary[1:]] == ['2', '2', '3', '3']
    assert len(paths) == 3


def test_empty_trace_is_header_only(tmpdir):
    path = write_trace(str(tmpdir.join('trace.csv')), [])
    assert _read(path) == [list(TRACE_HEADER)]


def test_trace_row_count(tmpdir):
    config = ExperimentConfig(grid_min_deg=-8.0, grid_max_deg=24.0, angular_resolution_deg=8.0,
                              num_scs2=0, algorithms=['dbf', 'random'], horizon=10, trials=2)
    result = run_experiment(config)
    (path, summary) = emit_csv(result, str(tmpdir))
    assert len(_read(path)) == 1 + 40
    assert len(_read(summary)) == 1 + 2


def test_unwritable_output(tiny_result, tmpdir):
    blocker = tmpdir.join('blocker')
    blocker.write('')
    with pytest.raises(OSError) as excinfo:
        emit_csv(tiny_result, str(blocker.join('out')))
    assert 'blocker' in str(excinfo.value)
