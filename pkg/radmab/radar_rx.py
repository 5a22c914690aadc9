#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Radar receive chain of the base station.

For every beam of the grid the BS transmits `Q` Golay packets and collects
the echoes in a fast-time x slow-time `RadarCube`. The cube is matched
filtered packet by packet, the range profiles are integrated non-coherently
and an ordered-statistics CFAR detector flags the range cells holding a
target. Detected peaks can then be given a Doppler estimate with a 1D MUSIC
search over the slow-time samples of their range cell.

Two beam gates are built on top of that chain:

- `amplitude_gate` keeps the beams with at least one detection.
- `doppler_gate` keeps the beams with at least one detection whose Doppler
  is at least one velocity-resolution step away from zero.

Notes
-----
OS-CFAR compares each cell against ``scale`` times the `os_rank`-th
smallest of its `num_training` neighbours (guard cells excluded). Cells
near the profile edges borrow the missing training cells from the other
side, so every cell always has `num_training` references. The scale can be
solved analytically for a target false-alarm probability with
`os_cfar_scale` or calibrated by Monte Carlo with `calibrate_cfar`.
"""

# Stdlib
import logging
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from collections import namedtuple
# 3rd party
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import integrate, linalg, optimize, signal, special, stats
# Own
from .scene import doppler_shift, path_params, steering_vector
from .utils import ParameterError, ConfigurationError, derive_rng
from .waveform import Packet, beamform_weights, golay_pair, packet_train

logger = logging.getLogger(__name__)

# Cells below this fraction of the profile peak are numerically zero
_ZERO_FLOOR = 1e-12
_PFA_SPLITS = (1e-6, 0.05, 0.5, 0.95, 1 - 1e-6)


@dataclass(frozen=True)
class CfarParams(object):

    num_training: int = 16
    num_guard: int = 2
    os_rank: int = 12
    scale: float = None

    def __post_init__(self):
        if self.num_training < 2 or self.num_training % 2:
            raise ConfigurationError('num_training must be even and >= 2, '
                                     'got {}'.format(self.num_training))
        if self.num_guard < 0:
            raise ConfigurationError('num_guard must be >= 0, got {}'.format(self.num_guard))
        if not 1 <= self.os_rank <= self.num_training:
            raise ConfigurationError('os_rank must be in 1..{}, got {}'.format(
                self.num_training, self.os_rank))
        if self.scale is not None and not self.scale > 0:
            raise ConfigurationError('CFAR scale must be > 0, got {}'.format(self.scale))

    @property
    def min_profile_length(self):
        return self.num_training + 2 * self.num_guard + 2


@dataclass(frozen=True)
class RadarSettings(object):

    """
    Processing parameters of the radar chain.

    Parameters
    ----------
    cfar : CfarParams
    pfa : float
        Per-cell false-alarm probability used to solve ``cfar.scale`` when
        it is not given explicitly.
    model_order : int
        MUSIC signal subspace dimension per range cell.
    grid_oversample : int
        MUSIC search points per velocity-resolution step.
    gate_slots : int
        Slots charged for radar processing before the bandit loop.
    doppler_gate_slots : int, optional
        Override of `gate_slots` for the Doppler gate.
    """

    cfar: CfarParams = field(default_factory=CfarParams)
    pfa: float = 1e-6
    model_order: int = 1
    grid_oversample: int = 8
    gate_slots: int = 9
    doppler_gate_slots: int = None

    def __post_init__(self):
        if not 0 < self.pfa < 1:
            raise ConfigurationError('pfa must be in (0, 1), got {}'.format(self.pfa))
        if self.model_order < 1 or self.grid_oversample < 1 or self.gate_slots < 0:
            raise ConfigurationError('model_order and grid_oversample must be >= 1, '
                                     'gate_slots >= 0')

    def resolved(self, config):
        """Copy with ``cfar.scale`` solved for `pfa` if it was left empty."""
        if self.cfar.scale is not None:
            return self
        scale = os_cfar_scale(self.pfa, self.cfar, integration_count(config))
        logger.info('OS-CFAR scale %.6f for per-cell pfa %.1e (%d looks)', scale, self.pfa,
                    integration_count(config))
        return replace(self, cfar=replace(self.cfar, scale=scale))

    @property
    def doppler_cost(self):
        return self.gate_slots if self.doppler_gate_slots is None else self.doppler_gate_slots


@dataclass(frozen=True)
class RadarCube(object):

    data: np.ndarray
    beam_index: int


Peak = namedtuple('Peak', 'range_bin range_m amplitude doppler_hz')


@dataclass(frozen=True)
class DetectionReport(object):

    beam_index: int
    peaks: tuple = ()

    @property
    def detected(self):
        return bool(self.peaks)

    def has_doppler(self, threshold_hz):
        return any(p.doppler_hz is not None and abs(p.doppler_hz) >= threshold_hz
                   for p in self.peaks)


GateResult = namedtuple('GateResult', 'arms cost reports')


def integration_count(config):
    return config.num_packets // 2 if config.complementary else config.num_packets


def simulate_radar_return(scene, theta, packets, config, arrays, rng=None):
    """
    Fast-time x slow-time echo of beam `theta` over the Q packets.

    Parameters
    ----------
    scene : radmab.scene.Scene
    theta : float
        Beam angle, on the scene grid.
    packets : Packet or list of Packet
        A single packet is repeated over the Q slots.
    config : WaveformConfig
    arrays : ArrayConfig
    rng : numpy.random.Generator, optional
        Noise stream. Only needed when the scene radar noise is nonzero.
    """
    if isinstance(packets, Packet):
        packets = [packets] * config.num_packets
    m = config.samples_per_packet
    nq = config.num_packets
    data = np.zeros((config.fast_time_length, nq), dtype=complex)
    w = beamform_weights(theta, arrays, config)
    u = steering_vector(theta, arrays.num_elements_bs, arrays.element_spacing_bs,
                        config.propagation_const)
    array_gain = np.dot(w, u)
    tx = np.stack([p.samples for p in packets], axis=1)
    q = np.arange(1, nq + 1)
    for path in path_params(scene, theta, config):
        rotation = np.exp(-2j * np.pi * path.doppler * q * config.pulse_rep_interval)
        data[path.sample_index:path.sample_index + m, :] += (
            path.two_way_gain * array_gain ** 2 * tx * rotation[None, :])
    if scene.noise_power_radar > 0:
        if rng is None:
            raise ParameterError('A noisy radar scene needs a random stream')
        std = math.sqrt(scene.noise_power_radar / 2)
        data += std * (rng.standard_normal(data.shape) + 1j * rng.standard_normal(data.shape))
    return RadarCube(data=data, beam_index=scene.grid.index_of(theta))


def matched_filter(cube, reference):
    """
    Range profiles, one column per packet: correlation of each received
    column with its reference packet (conjugated, time reversed). Bin ``l``
    holds the echo delayed by ``l`` samples.
    """
    data = cube.data
    refs = reference if isinstance(reference, (list, tuple)) else [reference]
    m = len(refs[0].samples)
    if m > data.shape[0]:
        raise ParameterError('Reference of {} samples is longer than the {} fast-time '
                             'samples'.format(m, data.shape[0]))
    if all(np.array_equal(r.samples, refs[0].samples) for r in refs[1:]):
        kernel = np.conj(refs[0].samples[::-1])[:, None]
        return signal.fftconvolve(data, kernel, mode='valid', axes=0)
    out = np.empty((data.shape[0] - m + 1, data.shape[1]), dtype=complex)
    for col, ref in enumerate(refs):
        out[:, col] = signal.fftconvolve(data[:, col], np.conj(ref.samples[::-1]), mode='valid')
    return out


def detection_profile(profiles, config):
    """Non-coherent integration of the range profiles across packets."""
    if config.complementary:
        profiles = profiles[:, 0::2] + profiles[:, 1::2]
    return np.sqrt(np.mean(np.abs(profiles) ** 2, axis=1))


@lru_cache(maxsize=32)
def _training_indices(length, num_training, num_guard):
    half = num_training // 2
    cells = np.arange(length)
    left_avail = np.maximum(cells - num_guard, 0)
    right_avail = np.maximum(length - 1 - cells - num_guard, 0)
    n_left = np.full(length, half)
    n_left = np.where(right_avail < half, num_training - right_avail, n_left)
    n_left = np.where(left_avail < half, left_avail, n_left)
    k = np.arange(num_training)[None, :]
    cells = cells[:, None]
    n_left = n_left[:, None]
    idx = np.where(k < n_left, cells - num_guard - n_left + k, cells + num_guard + 1 + k - n_left)
    idx.setflags(write=False)
    return idx


def order_statistic(profile, params):
    """`os_rank`-th smallest training cell of every cell of `profile`."""
    profile = np.asarray(profile, dtype=float)
    if len(profile) < params.min_profile_length:
        raise ParameterError('Profile of {} cells is too short for {} training and {} guard '
                             'cells'.format(len(profile), params.num_training, params.num_guard))
    window = profile[_training_indices(len(profile), params.num_training, params.num_guard)]
    return np.partition(window, params.os_rank - 1, axis=1)[:, params.os_rank - 1]


def os_cfar(profile, params):
    """
    Ordered-statistics CFAR on a magnitude profile.

    Returns
    -------
    detections : list of (bin, amplitude)
        Every cell with a nonzero magnitude at or above ``scale`` times its
        order statistic.
    """
    if params.scale is None:
        raise ParameterError('OS-CFAR needs a scale; solve it with os_cfar_scale')
    profile = np.asarray(profile, dtype=float)
    floor = _ZERO_FLOOR * profile.max() if len(profile) else 0.0
    hits = ((profile >= params.scale * order_statistic(profile, params))
            & (profile > floor) & (profile > 0))
    return [(int(i), float(profile[i])) for i in np.flatnonzero(hits)]


def os_cfar_pfa(scale, params, num_integrated=1):
    """
    False-alarm probability of a magnitude scale on complex Gaussian noise
    integrated non-coherently over `num_integrated` looks.

    In power, a noise cell is Gamma(n) distributed and the order statistic
    ``Z`` of N such cells has ``F(Z) ~ Beta(k, N - k + 1)``, so
    ``P(X >= a^2 Z) = E_Z[sf(a^2 Z)]``. The expectation is integrated over
    the noise power, split at quantiles of ``Z``.
    """
    k, n = params.os_rank, params.num_training
    noise = stats.gamma(num_integrated)
    log_norm = -special.betaln(k, n - k + 1)
    power_scale = scale ** 2

    def integrand(z):
        # density of Z in log form, accurate where cdf(z) rounds to 1
        log_value = log_norm + noise.logpdf(z) + noise.logsf(power_scale * z)
        if k > 1:
            log_value += (k - 1) * noise.logcdf(z)
        if n > k:
            log_value += (n - k) * noise.logsf(z)
        return math.exp(log_value)

    quantiles = stats.beta(k, n - k + 1).ppf(_PFA_SPLITS)
    edges = np.concatenate([[0.0], noise.ppf(quantiles), [noise.isf(1e-30)]])
    # far tails underflow to log(0) = -inf, which is exact here
    with np.errstate(divide='ignore', under='ignore'):
        return sum(integrate.quad(integrand, lo, hi, epsabs=1e-16, epsrel=1e-10, limit=200)[0]
                   for lo, hi in zip(edges[:-1], edges[1:]))


@lru_cache(maxsize=64)
def os_cfar_scale(pfa, params, num_integrated=1):
    """Magnitude scale of `params` giving a per-cell false-alarm rate `pfa`."""
    if not 0 < pfa < 1:
        raise ParameterError('pfa must be in (0, 1), got {}'.format(pfa))
    target = math.log(pfa)

    def gap(scale):
        return math.log(max(os_cfar_pfa(scale, params, num_integrated), 1e-300)) - target

    return optimize.brentq(gap, 1e-3, 1e3, xtol=1e-12)


def _noise_ratios(num_cells, params, num_integrated, rng, chunk=4096):
    chunk = max(chunk, params.min_profile_length)
    ratios = []
    remaining = int(num_cells)
    while remaining > 0:
        n = max(min(chunk, remaining), params.min_profile_length)
        noise = (rng.standard_normal((n, num_integrated))
                 + 1j * rng.standard_normal((n, num_integrated))) / math.sqrt(2)
        profile = np.sqrt(np.mean(np.abs(noise) ** 2, axis=1))
        ratios.append(profile / order_statistic(profile, params))
        remaining -= n
    return np.concatenate(ratios)[:int(num_cells)]


def calibrate_cfar(pfa, params, num_cells, rng, num_integrated=1):
    """
    Monte Carlo OS-CFAR scale: the ``1 - pfa`` quantile of cell-to-order-
    statistic ratios over `num_cells` unit-power complex Gaussian cells.
    """
    if not 0 < pfa < 1:
        raise ParameterError('pfa must be in (0, 1), got {}'.format(pfa))
    if num_cells * pfa < 10:
        raise ParameterError('{} cells are too few to calibrate pfa = {}'.format(num_cells, pfa))
    return float(np.quantile(_noise_ratios(num_cells, params, num_integrated, rng), 1 - pfa))


def false_alarm_rate(params, num_cells, rng, num_integrated=1):
    """Empirical OS-CFAR false-alarm rate of `params` on pure noise."""
    ratios = _noise_ratios(num_cells, params, num_integrated, rng)
    return float(np.mean(ratios >= params.scale))


def music_doppler(slow_time, config, grid_resolution_hz, model_order=1):
    """
    1D MUSIC Doppler estimate of a slow-time snapshot.

    The covariance is estimated with forward-backward smoothing over
    subarrays of ``ceil(Q/2) + 1`` packets. The pseudospectrum is searched
    on a grid of step `grid_resolution_hz` spanning the unambiguous band
    ``+-1/(2 T_P)``; the grid always contains 0 Hz.
    """
    x = np.asarray(slow_time, dtype=complex)
    nq = len(x)
    if nq < model_order + 2:
        raise ParameterError('MUSIC with model order {} needs at least {} packets, '
                             'got {}'.format(model_order, model_order + 2, nq))
    if not grid_resolution_hz > 0:
        raise ParameterError('Grid resolution must be > 0, got {}'.format(grid_resolution_hz))
    sub = min(int(math.ceil(nq / 2)) + 1, nq)
    snapshots = sliding_window_view(x, sub)
    forward = snapshots.T @ snapshots.conj() / len(snapshots)
    exchange = np.eye(sub)[::-1]
    cov = (forward + exchange @ forward.conj() @ exchange) / 2
    _, vectors = linalg.eigh(cov)
    noise_space = vectors[:, :sub - model_order]

    t_p = config.pulse_rep_interval
    half_band = 1.0 / (2 * t_p)
    n = int(math.floor(half_band / grid_resolution_hz + 1e-9))
    freqs = grid_resolution_hz * np.arange(-n, n + 1)
    modes = np.exp(-2j * np.pi * np.outer(np.arange(sub), freqs) * t_p)
    denominator = np.sum(np.abs(noise_space.conj().T @ modes) ** 2, axis=0)
    spectrum = 1.0 / np.maximum(denominator, np.finfo(float).tiny)
    return float(freqs[int(np.argmax(spectrum))])


def _local_peaks(profile, detections):
    peaks = []
    last = len(profile) - 1
    for i, amplitude in detections:
        if (i == 0 or profile[i] >= profile[i - 1]) and (i == last or profile[i] >= profile[i + 1]):
            peaks.append((i, amplitude))
    return peaks


def scan_beam(scene, beam, config, arrays, settings, seed, doppler_grid_hz=None):
    """
    Detection report of one beam. The noise stream is derived from
    ``(seed, "radar", beam)``, so beams can be processed in any order.
    """
    if settings.cfar.scale is None:
        settings = settings.resolved(config)
    theta = scene.grid.angles[beam]
    packets = packet_train(golay_pair(config.samples_per_packet), config)
    cube = simulate_radar_return(scene, theta, packets, config, arrays,
                                 rng=derive_rng(seed, 'radar', beam))
    profiles = matched_filter(cube, packets)
    profile = detection_profile(profiles, config)
    peaks = []
    for i, amplitude in _local_peaks(profile, os_cfar(profile, settings.cfar)):
        doppler = None
        if doppler_grid_hz is not None:
            doppler = music_doppler(profiles[i, :], config, doppler_grid_hz, settings.model_order)
        peaks.append(Peak(i, i * config.range_bin_size, amplitude, doppler))
    if peaks:
        logger.debug('Beam %d: %d peak(s) at %s m', beam, len(peaks),
                     ', '.join('{:.2f}'.format(p.range_m) for p in peaks))
    return DetectionReport(beam_index=beam, peaks=tuple(peaks))


def radar_scan(scene, config, arrays, settings, seed, doppler_grid_hz=None):
    """Detection reports of every beam of the scene grid."""
    settings = settings.resolved(config)
    return [scan_beam(scene, beam, config, arrays, settings, seed, doppler_grid_hz)
            for beam in range(scene.grid.count)]


def doppler_threshold(velocity_resolution, config):
    return doppler_shift(velocity_resolution, config.wavelength)


def amplitude_gate(scene, config, arrays, settings, seed, reports=None):
    """
    Beams with at least one OS-CFAR detection.

    Returns
    -------
    GateResult
        ``arms`` (sorted beam indices, possibly empty), ``cost`` in slots and
        the per-beam ``reports``.
    """
    if reports is None:
        reports = radar_scan(scene, config, arrays, settings, seed)
    arms = tuple(r.beam_index for r in reports if r.detected)
    return GateResult(arms=arms, cost=settings.gate_slots, reports=reports)


def doppler_gate(scene, velocity_resolution, config, arrays, settings, seed, reports=None):
    """
    Beams with at least one detection whose MUSIC Doppler is at least one
    velocity-resolution step (``2 v_res / lambda``) away from zero.
    """
    if not velocity_resolution > 0:
        raise ParameterError('Velocity resolution must be > 0, got {}'.format(velocity_resolution))
    threshold = doppler_threshold(velocity_resolution, config)
    if reports is None:
        reports = radar_scan(scene, config, arrays, settings, seed,
                             doppler_grid_hz=threshold / settings.grid_oversample)
    arms = tuple(r.beam_index for r in reports if r.has_doppler(threshold))
    return GateResult(arms=arms, cost=settings.doppler_cost, reports=reports)
