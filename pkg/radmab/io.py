#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Input and output of experiments.

Configurations are YAML files with the sections ``scene``, ``grid``,
``waveform``, ``arrays``, ``cfar``, ``music``, ``link``, ``experiment`` and
the optional ``sweep`` and ``report``. Every key has a default, so an empty
file runs the baseline scene. Angles are given in degrees. Unknown sections
or keys are rejected, which catches typos before hours of simulation.

Results are written as CSV files: ``trace.csv`` (one row per slot),
``summary.csv`` (one row per sweep value and algorithm) and, on request,
``timeseries.csv``. Floats are written in their shortest round-trip form,
so identical runs give byte-identical files.
"""

# Stdlib
import csv
import logging
import os
# 3rd party
import yaml
# Own
from .harness import ExperimentConfig, SweepSpec
from .radar_rx import CfarParams, RadarSettings
from .comm_link import LinkConfig
from .scene import ArrayConfig, Target, TargetKind, WaveformConfig
from .utils import ConfigurationError

logger = logging.getLogger(__name__)

TRACE_HEADER = ('trial', 'slot', 'algorithm', 'beam', 'reward', 'ber', 'cum_regret')
SUMMARY_HEADER = ('sweep_value', 'algorithm', 'mean_throughput_bps', 'se_throughput',
                  'mean_regret', 'se_regret')
TIMESERIES_HEADER = ('sweep_value', 'algorithm', 'slot', 'mean_throughput_bps', 'se_throughput',
                     'mean_regret', 'se_regret')

SECTIONS = {
    'scene': ('mobile_user', 'scatterers', 'num_scs1', 'num_scs2', 'scs_min_range',
              'scs_max_range', 'radar_snr_db'),
    'grid': ('min_deg', 'max_deg', 'resolution_deg'),
    'waveform': ('carrier_freq', 'bandwidth', 'samples_per_packet', 'pulse_rep_interval',
                 'num_packets', 'tx_energy', 'max_range', 'complementary'),
    'arrays': ('num_elements_bs', 'num_elements_mu', 'element_spacing_bs', 'element_spacing_mu'),
    'cfar': ('num_training', 'num_guard', 'os_rank', 'scale', 'pfa'),
    'music': ('model_order', 'grid_oversample', 'velocity_resolution'),
    'link': ('reward_lo_db', 'reward_hi_db', 'bits_per_slot', 'slot_duration', 'fading',
             'snr_floor_db', 'comm_snr_db', 'charge_gate_slots', 'gate_min_snr_db'),
    'experiment': ('algorithms', 'horizon', 'trials', 'seed', 'workers', 'timeseries_every',
                   'gate_slots', 'doppler_gate_slots'),
    'sweep': ('parameter', 'values'),
    'report': ('template', 'html'),
}
TARGET_KEYS = ('kind', 'position', 'radial_velocity', 'reflectivity')


def _section(data, name):
    section = data.get(name) or {}
    if not isinstance(section, dict):
        raise ConfigurationError('Section "{}" must be a mapping, got {!r}'.format(name, section))
    unknown = set(section) - set(SECTIONS[name])
    if unknown:
        raise ConfigurationError('Unknown key(s) in section "{}": {}. Allowed: {}'.format(
            name, ', '.join(sorted(unknown)), ', '.join(SECTIONS[name])))
    return section


def _target(entry, default_kind):
    if not isinstance(entry, dict):
        raise ConfigurationError('Targets must be mappings, got {!r}'.format(entry))
    unknown = set(entry) - set(TARGET_KEYS)
    if unknown:
        raise ConfigurationError('Unknown target key(s): {}'.format(', '.join(sorted(unknown))))
    if 'position' not in entry:
        raise ConfigurationError('Target {!r} has no position'.format(entry))
    kind = entry.get('kind', default_kind)
    try:
        kind = TargetKind(kind)
    except ValueError:
        raise ConfigurationError('Unknown target kind "{}". Choose from: {}'.format(
            kind, ', '.join(k.value for k in TargetKind)))
    return Target(kind, entry['position'], radial_velocity=entry.get('radial_velocity', 0.0),
                  reflectivity=entry.get('reflectivity', 1.0))


def parse_config(data, **overrides):
    """
    Build an `ExperimentConfig` out of a parsed YAML mapping.

    Parameters
    ----------
    data : dict or None
    overrides : dict
        Top-level `ExperimentConfig` fields (``seed``, ``trials``,
        ``algorithms``, ``workers``, ``timeseries_every``). None values
        are ignored.
    """
    data = data or {}
    if not isinstance(data, dict):
        raise ConfigurationError('Configuration must be a mapping of sections')
    unknown = set(data) - set(SECTIONS)
    if unknown:
        raise ConfigurationError('Unknown section(s): {}. Allowed: {}'.format(
            ', '.join(sorted(unknown)), ', '.join(SECTIONS)))
    scene, grid, music = _section(data, 'scene'), _section(data, 'grid'), _section(data, 'music')
    experiment, cfar = _section(data, 'experiment'), _section(data, 'cfar')
    kwargs = {}

    waveform = WaveformConfig(**_section(data, 'waveform'))
    kwargs['waveform'] = waveform
    arrays = _section(data, 'arrays')
    if arrays:
        half = waveform.wavelength / 2
        kwargs['arrays'] = ArrayConfig(arrays.get('num_elements_bs', 32),
                                       arrays.get('num_elements_mu', 32),
                                       arrays.get('element_spacing_bs', half),
                                       arrays.get('element_spacing_mu', half))

    if 'mobile_user' in scene:
        mu = dict(scene['mobile_user'])
        if mu.setdefault('kind', 'mu') != 'mu':
            raise ConfigurationError('scene.mobile_user must be of kind "mu"')
        kwargs['mobile_user'] = _target(mu, 'mu')
    if scene.get('scatterers') is not None:
        kwargs['scatterers'] = tuple(_target(s, 'scs1') for s in scene['scatterers'])
    for key in ('num_scs1', 'num_scs2', 'scs_min_range', 'scs_max_range', 'radar_snr_db'):
        if key in scene:
            kwargs[key] = scene[key]

    for key, field_name in (('min_deg', 'grid_min_deg'), ('max_deg', 'grid_max_deg'),
                            ('resolution_deg', 'angular_resolution_deg')):
        if key in grid:
            kwargs[field_name] = float(grid[key])

    radar = {k: v for k, v in (('pfa', cfar.get('pfa')),
                               ('model_order', music.get('model_order')),
                               ('grid_oversample', music.get('grid_oversample')),
                               ('gate_slots', experiment.get('gate_slots')),
                               ('doppler_gate_slots', experiment.get('doppler_gate_slots')))
             if v is not None}
    radar['cfar'] = CfarParams(**{k: v for k, v in cfar.items() if k != 'pfa'})
    kwargs['radar'] = RadarSettings(**radar)
    if 'velocity_resolution' in music:
        kwargs['velocity_resolution'] = float(music['velocity_resolution'])

    kwargs['link'] = LinkConfig(**_section(data, 'link'))

    for key in ('algorithms', 'horizon', 'trials', 'seed', 'workers', 'timeseries_every'):
        if key in experiment:
            kwargs[key] = experiment[key]
    if isinstance(kwargs.get('algorithms'), str):
        kwargs['algorithms'] = kwargs['algorithms'].split(',')

    sweep = _section(data, 'sweep')
    if sweep:
        if 'parameter' not in sweep or 'values' not in sweep:
            raise ConfigurationError('Section "sweep" needs both "parameter" and "values"')
        kwargs['sweep'] = SweepSpec(sweep['parameter'], tuple(sweep['values']))
    kwargs['report'] = dict(_section(data, 'report'))

    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return ExperimentConfig(**kwargs)
    except TypeError as e:
        raise ConfigurationError('Invalid configuration: {}'.format(e))


def load_config(path, **overrides):
    """Read a YAML configuration file. See `parse_config`."""
    if not os.path.isfile(path):
        raise OSError('Configuration file "{}" is not available'.format(path))
    with open(path) as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigurationError('Could not parse {}: {}'.format(path, e))
    logger.info('Loaded configuration from %s', path)
    return parse_config(data, **overrides)


def _fmt(value):
    if value is None:
        return ''
    if isinstance(value, float):
        return repr(value)
    if hasattr(value, 'item'):
        return _fmt(value.item())
    return str(value)


def _write(path, header, rows):
    directory = os.path.dirname(os.path.abspath(path))
    try:
        os.makedirs(directory, exist_ok=True)
        with open(path, 'w', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(header)
            n = 0
            for row in rows:
                writer.writerow([_fmt(v) for v in row])
                n += 1
    except OSError as e:
        raise OSError('Could not write {}: {}'.format(path, e.strerror or e))
    logger.info('Wrote %d row(s) to %s', n, path)
    return path


def write_trace(path, traces):
    """`trace.csv` of `radmab.harness.TrialTrace` objects, by algorithm, trial and slot."""
    def rows():
        for trace in sorted(traces, key=lambda t: (t.algorithm, t.trial)):
            for record, cum in zip(trace.records, trace.cum_regret):
                yield (trace.trial, record.slot, trace.algorithm, record.arm, float(record.reward),
                       float(record.ber), float(cum))
    return _write(path, TRACE_HEADER, rows())


def write_summary(path, rows):
    """`summary.csv` of end-of-horizon `radmab.harness.AggregateRow` objects."""
    return _write(path, SUMMARY_HEADER,
                  ((r.sweep_value, r.algorithm, r.mean_throughput_bps, r.se_throughput,
                    r.mean_regret, r.se_regret) for r in rows))


def write_timeseries(path, rows):
    return _write(path, TIMESERIES_HEADER,
                  ((r.sweep_value, r.algorithm, r.slot, r.mean_throughput_bps, r.se_throughput,
                    r.mean_regret, r.se_regret) for r in rows))


def emit_csv(result, out):
    """
    Write the CSV files of an experiment or a sweep under directory `out`.

    A single experiment writes ``trace.csv`` and ``summary.csv`` in `out`. A
    sweep writes one ``<parameter>=<value>/trace.csv`` per value and a
    single ``summary.csv``. ``timeseries.csv`` is added when the run
    collected time series.

    Returns
    -------
    paths : list of str
    """
    paths = []
    experiments = getattr(result, 'experiments', None)
    if experiments is None:
        paths.append(write_trace(os.path.join(out, 'trace.csv'), result.traces))
    else:
        for e in experiments:
            folder = os.path.join(out, '{}={}'.format(result.parameter, _fmt(e.sweep_value)))
            paths.append(write_trace(os.path.join(folder, 'trace.csv'), e.traces))
    paths.append(write_summary(os.path.join(out, 'summary.csv'), result.rows))
    if result.timeseries:
        paths.append(write_timeseries(os.path.join(out, 'timeseries.csv'), result.timeseries))
    return paths
