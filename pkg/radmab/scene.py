#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Scene geometry for the joint radar-communication base station.

The base station (BS) sits at the origin with a uniform linear array and
sweeps a one-dimensional grid of azimuth beams. The scene holds a single
mobile user (MU) and a number of static clutter scatterers (SCS), each
confined to a single beam:

- SCS₁ scatter the radar signal straight back (zero Doppler).
- SCS₂ also open a multipath towards the MU, so their beam carries a radar
  return with the MU Doppler and a (weak) downlink path to the MU.

Channels are geometric ray channels with normalized gains: every one-way
leg contributes an amplitude ``1/r`` and every reflection multiplies by the
scatterer reflectivity. The absolute scale is fixed afterwards by the radar
and downlink reference SNRs, from which the noise powers are back-computed
(see `build_scene`).
"""

# Stdlib
import enum
import logging
import math
from collections import namedtuple
from dataclasses import dataclass, field
# 3rd party
import numpy as np
# Own
from .utils import (SPEED_OF_LIGHT, ConfigurationError, ParameterError,
                    SceneValidationError, db_to_linear)

logger = logging.getLogger(__name__)

# Relative tolerance when checking that a span is a multiple of the resolution
_GRID_RTOL = 1e-9


class TargetKind(enum.Enum):
    MOBILE_USER = 'mu'
    SCS1 = 'scs1'
    SCS2 = 'scs2'


@dataclass(frozen=True)
class ArrayConfig(object):

    """
    Uniform linear arrays at both ends of the link.

    Parameters
    ----------
    num_elements_bs, num_elements_mu : int
        Number of elements at the base station and at the mobile user.
    element_spacing_bs, element_spacing_mu : float
        Element spacing in meters. Use `ArrayConfig.half_wavelength` for the
        usual λ/2 arrays.
    """

    num_elements_bs: int
    num_elements_mu: int
    element_spacing_bs: float
    element_spacing_mu: float

    def __post_init__(self):
        for name in ('num_elements_bs', 'num_elements_mu'):
            if int(getattr(self, name)) < 1:
                raise ConfigurationError('{} must be >= 1, got {}'.format(name, getattr(self, name)))
        for name in ('element_spacing_bs', 'element_spacing_mu'):
            if not getattr(self, name) > 0:
                raise ConfigurationError('{} must be > 0, got {}'.format(name, getattr(self, name)))

    @classmethod
    def half_wavelength(cls, wavelength, num_elements_bs=32, num_elements_mu=32):
        return cls(num_elements_bs, num_elements_mu, wavelength / 2, wavelength / 2)


@dataclass(frozen=True)
class WaveformConfig(object):

    """
    Radar/communication waveform at complex baseband.

    The sampling period is the inverse of the signal bandwidth. The radar
    fast-time window is long enough to hold an echo from `max_range` meters
    (two-way) plus one full packet.
    """

    carrier_freq: float = 60e9
    bandwidth: float = 1.76e9
    samples_per_packet: int = 128
    pulse_rep_interval: float = 200e-6
    num_packets: int = 10
    tx_energy: float = 1.0
    max_range: float = 150.0
    complementary: bool = False

    def __post_init__(self):
        if not self.carrier_freq > 0 or not self.bandwidth > 0:
            raise ConfigurationError('carrier_freq and bandwidth must be positive')
        if int(self.samples_per_packet) < 1 or int(self.num_packets) < 1:
            raise ConfigurationError('samples_per_packet and num_packets must be >= 1')
        if not self.tx_energy > 0:
            raise ConfigurationError('tx_energy must be > 0, got {}'.format(self.tx_energy))
        if self.pulse_rep_interval < self.samples_per_packet * self.sample_period:
            raise ConfigurationError(
                'Packet of {} samples ({:.3e} s) does not fit in a pulse repetition '
                'interval of {:.3e} s'.format(self.samples_per_packet,
                                              self.samples_per_packet * self.sample_period,
                                              self.pulse_rep_interval))
        if self.complementary and self.num_packets % 2:
            raise ConfigurationError('Complementary processing needs an even number '
                                     'of packets, got {}'.format(self.num_packets))

    @property
    def wavelength(self):
        return SPEED_OF_LIGHT / self.carrier_freq

    @property
    def propagation_const(self):
        return 2 * math.pi / self.wavelength

    @property
    def sample_period(self):
        return 1.0 / self.bandwidth

    @property
    def max_delay_bins(self):
        return int(math.ceil(2 * self.max_range / (SPEED_OF_LIGHT * self.sample_period)))

    @property
    def fast_time_length(self):
        """Rows of a radar cube: one packet plus the delay headroom."""
        return self.samples_per_packet + self.max_delay_bins

    @property
    def range_bin_size(self):
        return self.sample_period * SPEED_OF_LIGHT / 2


@dataclass(frozen=True)
class Target(object):

    kind: TargetKind
    position: tuple
    radial_velocity: float = 0.0
    reflectivity: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, 'kind', TargetKind(self.kind))
        object.__setattr__(self, 'position', tuple(float(p) for p in self.position))
        if len(self.position) != 3:
            raise SceneValidationError('Target position must have 3 coordinates, '
                                       'got {}'.format(self.position))
        if self.kind is TargetKind.MOBILE_USER and self.radial_velocity == 0:
            raise SceneValidationError('A mobile user needs a nonzero radial velocity')
        if self.kind is not TargetKind.MOBILE_USER and self.radial_velocity != 0:
            raise SceneValidationError('Static scatterer at {} has radial velocity '
                                       '{}'.format(self.position, self.radial_velocity))
        if not self.reflectivity > 0:
            raise SceneValidationError('Reflectivity must be > 0, got {}'.format(self.reflectivity))
        if self.range == 0:
            raise SceneValidationError('Target cannot sit on the base station')

    @property
    def range(self):
        return math.sqrt(sum(p * p for p in self.position))

    @property
    def azimuth(self):
        # elevation is ignored: the grid is azimuth-only
        return math.atan2(self.position[1], self.position[0])

    def distance_to(self, other):
        return math.sqrt(sum((a - b) ** 2 for a, b in zip(self.position, other.position)))


@dataclass(frozen=True)
class BeamGrid(object):

    angles: tuple
    angular_resolution: float

    @property
    def count(self):
        return len(self.angles)

    @property
    def span(self):
        return self.angles[0], self.angles[-1]

    def index_of(self, theta):
        idx = int(np.argmin(np.abs(np.asarray(self.angles) - theta)))
        if not math.isclose(self.angles[idx], theta, abs_tol=1e-9):
            raise ParameterError('Angle {:.6f} rad is not on the beam grid'.format(theta))
        return idx


PathParams = namedtuple('PathParams', 'delay sample_index two_way_gain doppler')


@dataclass(frozen=True)
class Scene(object):

    """
    Immutable scene: targets, beam grid and the noise powers implied by the
    reference SNRs. Build it with `build_scene`, which validates it.
    """

    targets: tuple
    grid: BeamGrid
    noise_power_radar: float
    noise_power_comm: float
    radar_snr_db: float = None
    bs_position: tuple = (0.0, 0.0, 0.0)
    beams: tuple = field(default=(), compare=False)

    @property
    def mobile_user(self):
        return next(t for t in self.targets if t.kind is TargetKind.MOBILE_USER)

    @property
    def mu_beam(self):
        return self.beams[self.targets.index(self.mobile_user)]

    def targets_in_beam(self, beam):
        return [t for t, b in zip(self.targets, self.beams) if b == beam]

    def occupied_beams(self, kind=None):
        return sorted(b for t, b in zip(self.targets, self.beams)
                      if kind is None or t.kind is kind)


def steering_vector(theta, n, spacing, k_c):
    """
    ULA steering vector, element ``p`` equal to ``exp(+j k_c d p sin(theta))``.
    """
    if n < 1:
        raise ParameterError('Steering vector needs n >= 1, got {}'.format(n))
    return np.exp(1j * k_c * spacing * np.arange(n) * math.sin(theta))


def make_beam_grid(min_angle, max_angle, resolution):
    """
    Uniform azimuth grid from `min_angle` to `max_angle` (radians, both
    included) every `resolution` radians.
    """
    if not resolution > 0:
        raise ConfigurationError('Angular resolution must be > 0, got {}'.format(resolution))
    span = max_angle - min_angle
    steps = span / resolution
    if span < resolution * (1 - _GRID_RTOL) or abs(steps - round(steps)) > _GRID_RTOL * max(1.0, steps):
        raise ConfigurationError(
            'Beam span [{:.4f}, {:.4f}] deg is not a positive multiple of the '
            'resolution {:.4f} deg'.format(math.degrees(min_angle), math.degrees(max_angle),
                                          math.degrees(resolution)))
    count = int(round(steps)) + 1
    angles = tuple(float(a) for a in min_angle + resolution * np.arange(count))
    return BeamGrid(angles=angles, angular_resolution=float(resolution))


def doppler_shift(v, wavelength):
    """Two-way Doppler shift ``2 v / wavelength`` in Hz, sign preserving."""
    if not wavelength > 0:
        raise ParameterError('Wavelength must be > 0, got {}'.format(wavelength))
    return 2.0 * v / wavelength


def target_beam(target, grid):
    """
    Index of the beam whose angle is nearest to the target azimuth. Exact
    ties go to the lower index.
    """
    az = target.azimuth
    lo, hi = grid.span
    if az < lo - 1e-12 or az > hi + 1e-12:
        raise SceneValidationError(
            'Target at {} (azimuth {:.2f} deg) lies outside the beam span '
            '[{:.1f}, {:.1f}] deg'.format(target.position, math.degrees(az),
                                         math.degrees(lo), math.degrees(hi)))
    distance = np.abs(np.asarray(grid.angles) - az)
    return int(np.flatnonzero(distance <= distance.min() + 1e-12)[0])


def _mu_doppler(scene, config):
    return doppler_shift(scene.mobile_user.radial_velocity, config.wavelength)


def path_params(scene, theta, config):
    """
    Radar echo paths seen through beam `theta`.

    Returns
    -------
    paths : list of PathParams
        One direct echo per target in the beam and, for an SCS₂ beam, the
        multipath echo BS → SCS₂ → MU → BS carrying the MU Doppler. Empty
        for a noise-only beam. ``delay`` is the one-way equivalent delay,
        so ``sample_index = round(2 delay / T_s)``.
    """
    beam = scene.grid.index_of(theta)
    paths = []
    for target in scene.targets_in_beam(beam):
        r = target.range
        delay = r / SPEED_OF_LIGHT
        doppler = doppler_shift(target.radial_velocity, config.wavelength)
        paths.append(PathParams(delay, int(round(2 * delay / config.sample_period)),
                                target.reflectivity / r ** 2, doppler))
        if target.kind is TargetKind.SCS2:
            mu = scene.mobile_user
            length = r + target.distance_to(mu) + mu.range
            delay = length / (2 * SPEED_OF_LIGHT)
            gain = target.reflectivity * mu.reflectivity / (r * mu.range)
            paths.append(PathParams(delay, int(round(2 * delay / config.sample_period)),
                                    gain, _mu_doppler(scene, config)))
    return paths


def comm_path_gain(scene, beam):
    """
    Downlink amplitude gain (normalized, arrays excluded) from the BS to the
    MU when transmitting on `beam`: direct ``1/r_mu`` on the MU beam,
    ``σ/(r_scs |scs - mu|)`` on an SCS₂ beam, zero elsewhere.
    """
    mu = scene.mobile_user
    gain = 0.0
    for target in scene.targets_in_beam(beam):
        if target is mu:
            gain += 1.0 / mu.range
        elif target.kind is TargetKind.SCS2:
            gain += target.reflectivity / (target.range * target.distance_to(mu))
    return gain


def build_scene(targets, grid, config, arrays, radar_snr_db=10.0, comm_snr_db=25.0):
    """
    Validate the targets against the grid and back-compute noise powers.

    Parameters
    ----------
    targets : list of Target
    grid : BeamGrid
    config : WaveformConfig
    arrays : ArrayConfig
    radar_snr_db : float or None
        Post-matched-filter SNR of the MU echo in one packet. None builds a
        noiseless radar.
    comm_snr_db : float
        Mean downlink SNR on the MU beam.

    Raises
    ------
    SceneValidationError
    """
    targets = tuple(targets)
    mus = [t for t in targets if t.kind is TargetKind.MOBILE_USER]
    if len(mus) != 1:
        raise SceneValidationError('Scene needs exactly one mobile user, got {}'.format(len(mus)))
    beams = tuple(target_beam(t, grid) for t in targets)
    seen = {}
    for t, b in zip(targets, beams):
        if b in seen:
            raise SceneValidationError(
                'Targets at {} and {} fall in the same beam ({:.1f} deg)'.format(
                    seen[b].position, t.position, math.degrees(grid.angles[b])))
        seen[b] = t

    pbs, pmu = arrays.num_elements_bs, arrays.num_elements_mu
    mu = mus[0]
    if radar_snr_db is None:
        noise_radar = 0.0
    else:
        peak = (mu.reflectivity / mu.range ** 2) * pbs ** 2
        noise_radar = (peak ** 2 * config.samples_per_packet * config.tx_energy
                       / db_to_linear(radar_snr_db))
    noise_comm = ((pbs * pmu / mu.range) ** 2 * config.tx_energy / db_to_linear(comm_snr_db))
    scene = Scene(targets=targets, grid=grid, noise_power_radar=float(noise_radar),
                  noise_power_comm=float(noise_comm), radar_snr_db=radar_snr_db, beams=beams)

    best = comm_path_gain(scene, scene.mu_beam)
    for b in scene.occupied_beams(TargetKind.SCS2):
        if comm_path_gain(scene, b) >= best:
            raise SceneValidationError(
                'Beam {:.1f} deg reaches the MU at least as strongly as the MU beam; '
                'move the SCS2 away from the user'.format(math.degrees(grid.angles[b])))
    for b in sorted(set(beams)):
        for path in path_params(scene, grid.angles[b], config):
            if path.sample_index > config.max_delay_bins:
                raise SceneValidationError(
                    'Echo at {:.1f} m in beam {:.1f} deg exceeds max_range = {} m'.format(
                        path.delay * SPEED_OF_LIGHT, math.degrees(grid.angles[b]),
                        config.max_range))
    logger.debug('Scene with %d targets, MU in beam %d, radar noise %.3e, comm noise %.3e',
                 len(targets), scene.mu_beam, noise_radar, noise_comm)
    return scene


def place_scatterers(grid, mobile_user, num_scs1, num_scs2, min_range, max_range, rng,
                     max_attempts=100):
    """
    Draw SCS positions at random, one per free beam (never the MU beam), at
    z = 0, with an azimuth inside the beam (and inside the grid span) and a
    range uniform in ``[min_range, max_range]``. SCS₂ placements that would
    reach the MU as strongly as its own beam are redrawn.

    Returns
    -------
    scatterers : list of Target
        SCS₁ first, then SCS₂.
    """
    total = num_scs1 + num_scs2
    if num_scs1 < 0 or num_scs2 < 0:
        raise ConfigurationError('SCS counts must be >= 0')
    if total > grid.count - 1:
        raise ConfigurationError('Cannot place {} scatterers on {} free beams'.format(
            total, grid.count - 1))
    if not 0 < min_range <= max_range:
        raise ConfigurationError('Invalid SCS range span [{}, {}]'.format(min_range, max_range))
    mu_beam = target_beam(mobile_user, grid)
    free = [b for b in range(grid.count) if b != mu_beam]
    beams = rng.choice(free, size=total, replace=False)
    kinds = [TargetKind.SCS1] * num_scs1 + [TargetKind.SCS2] * num_scs2
    scatterers = []
    for beam, kind in zip(beams, kinds):
        for _ in range(max_attempts):
            az = grid.angles[beam] + rng.uniform(-0.4, 0.4) * grid.angular_resolution
            az = min(max(az, grid.span[0]), grid.span[1])
            r = rng.uniform(min_range, max_range)
            target = Target(kind, (r * math.cos(az), r * math.sin(az), 0.0))
            if kind is TargetKind.SCS1:
                break
            multipath = 1.0 / (target.range * target.distance_to(mobile_user))
            if multipath < 1.0 / mobile_user.range:
                break
        else:
            raise SceneValidationError('Could not place an SCS2 in beam {} weaker than the MU '
                                       'after {} attempts'.format(beam, max_attempts))
        scatterers.append(target)
    return scatterers
