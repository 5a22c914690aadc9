#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Downlink model: per-slot SNR of the selected beam, its normalized reward and
the 16-QAM bit error rate, plus the throughput figure of merit.
"""

# Stdlib
import math
from dataclasses import dataclass
# 3rd party
import numpy as np
from scipy import special, stats
# Own
from .scene import comm_path_gain
from .utils import ConfigurationError, ParameterError, db_to_linear, linear_to_db


@dataclass(frozen=True)
class LinkConfig(object):

    """
    Downlink and reward parameters.

    Parameters
    ----------
    reward_lo_db, reward_hi_db : float
        SNR window mapped onto rewards [0, 1].
    bits_per_slot : int
        D, bits carried by one slot (512 subcarriers x 16-QAM x 2 symbols).
    slot_duration : float
        T_d in seconds.
    fading : bool
        Multiply the SNR by a unit-mean Rayleigh power draw every slot.
    snr_floor_db : float
        SNR reported for beams with no path to the mobile user.
    comm_snr_db : float
        Mean SNR of the mobile user direct beam.
    charge_gate_slots : bool
        Count radar gate slots (at BER 0.5) in the throughput.
    gate_min_snr_db : float
        A gated policy keeps its radar-gated beams only if one of them reaches
        this SNR on its first pull; otherwise it widens to the full grid.
    """

    reward_lo_db: float = -10.0
    reward_hi_db: float = 40.0
    bits_per_slot: int = 4096
    slot_duration: float = 4e-3
    fading: bool = True
    snr_floor_db: float = -30.0
    comm_snr_db: float = 25.0
    charge_gate_slots: bool = True
    gate_min_snr_db: float = -5.0

    def __post_init__(self):
        if not self.reward_lo_db < self.reward_hi_db:
            raise ConfigurationError('Reward window needs lo < hi, got [{}, {}]'.format(
                self.reward_lo_db, self.reward_hi_db))
        if self.bits_per_slot <= 0 or not self.slot_duration > 0:
            raise ConfigurationError('bits_per_slot and slot_duration must be positive')

    @property
    def min_gate_reward(self):
        return snr_to_reward(self.gate_min_snr_db, self.reward_lo_db, self.reward_hi_db)


@dataclass(frozen=True)
class LinkReport(object):

    slot: int
    beam_index: int
    snr_linear: float
    snr_db: float
    reward: float
    ber: float


def mean_downlink_snr(scene, beam, arrays, config, link=LinkConfig()):
    """
    Fading-free downlink SNR when the BS transmits on `beam`:
    ``(P_MU |g| P_BS)^2 E_s / noise_power_comm``, with the MU receive array
    matched to the arrival direction. Beams with no path to the MU sit at
    ``link.snr_floor_db``.
    """
    floor = float(db_to_linear(link.snr_floor_db))
    gain = comm_path_gain(scene, beam)
    if gain == 0:
        return floor
    array_gain = arrays.num_elements_bs * arrays.num_elements_mu
    snr = (array_gain * gain) ** 2 * config.tx_energy / scene.noise_power_comm
    return max(snr, floor)


def downlink_snr(scene, theta, arrays, config, rng=None, link=LinkConfig()):
    """
    Instantaneous downlink SNR of beam `theta`. With ``link.fading`` a
    unit-mean exponential power draw from `rng` scales the mean SNR.
    """
    snr = mean_downlink_snr(scene, scene.grid.index_of(theta), arrays, config, link)
    if link.fading:
        if rng is None:
            raise ParameterError('A fading link needs a random stream')
        snr *= rng.exponential(1.0)
    return snr


def snr_to_reward(snr_db, lo=-10.0, hi=40.0):
    if not lo < hi:
        raise ParameterError('Reward window needs lo < hi, got [{}, {}]'.format(lo, hi))
    reward = (np.clip(snr_db, lo, hi) - lo) / (hi - lo)
    return float(reward) if np.ndim(reward) == 0 else reward


def expected_reward(mean_snr, lo=-10.0, hi=40.0, fading=True):
    """
    Mean reward of a beam with mean linear SNR `mean_snr`.

    Under unit-mean Rayleigh power fading ``X ~ Exp(1)`` the clipped dB value
    has the closed form (``a``, ``b`` the fading powers hitting lo and hi)::

        E[clip] = lo (1 - e^-a) + hi e^-b + 10 log10(m) (e^-a - e^-b)
                  + 10/ln10 (e^-a ln a - e^-b ln b + E1(a) - E1(b))
    """
    m = np.asarray(mean_snr, dtype=float)
    if not fading:
        return snr_to_reward(linear_to_db(m), lo, hi)
    a = db_to_linear(lo) / m
    b = db_to_linear(hi) / m
    ea, eb = np.exp(-a), np.exp(-b)
    log_part = (ea * np.log(a) - eb * np.log(b) + special.exp1(a) - special.exp1(b))
    clipped = (lo * (1 - ea) + hi * eb + 10 * np.log10(m) * (ea - eb)
               + 10 / math.log(10) * log_part)
    reward = np.clip((clipped - lo) / (hi - lo), 0.0, 1.0)
    return float(reward) if reward.ndim == 0 else reward


def ber_16qam(snr_linear):
    """
    Gray-coded 16-QAM bit error rate on AWGN, ``3/4 Q(sqrt(snr/5))``, clamped
    to [0, 0.5]. A flat channel gives the same value on every subcarrier.
    """
    snr = np.asarray(snr_linear, dtype=float)
    if np.any(snr < 0):
        raise ParameterError('SNR must be >= 0, got {}'.format(snr_linear))
    ber = np.clip(0.75 * stats.norm.sf(np.sqrt(snr / 5.0)), 0.0, 0.5)
    return float(ber) if ber.ndim == 0 else ber


def simulate_ber_16qam(snr_linear, num_symbols, rng):
    """
    Monte Carlo bit error rate of Gray-coded 16-QAM (levels -3, -1, 1, 3 per
    axis, mean symbol energy 10) at symbol SNR `snr_linear`.
    """
    if not snr_linear > 0:
        raise ParameterError('SNR must be > 0, got {}'.format(snr_linear))
    num_symbols = int(num_symbols)
    bits = rng.integers(0, 2, size=(num_symbols, 4))
    # first bit picks the sign, second whether the level is inner
    levels = np.where(bits[:, 0::2] == 1, 1, -1) * np.where(bits[:, 1::2] == 1, 1, 3)
    sigma = math.sqrt(10.0 / (2 * snr_linear))
    received = levels + sigma * rng.standard_normal(levels.shape)
    decided = np.empty_like(bits)
    decided[:, 0::2] = received > 0
    decided[:, 1::2] = np.abs(received) < 2
    return float(np.mean(decided != bits))


def link_report(slot, beam, snr_linear, connected, link=LinkConfig()):
    """Slot outcome; disconnected beams carry BER 0.5 whatever their SNR."""
    snr_db = float(linear_to_db(snr_linear))
    return LinkReport(slot=slot, beam_index=beam, snr_linear=float(snr_linear), snr_db=snr_db,
                      reward=snr_to_reward(snr_db, link.reward_lo_db, link.reward_hi_db),
                      ber=ber_16qam(snr_linear) if connected else 0.5)


def throughput(bers, bits_per_slot=4096, slot_duration=4e-3):
    """``(1 - mean(BER)) D / T_d`` in bits per second."""
    bers = np.asarray(bers, dtype=float)
    if bers.size == 0:
        raise ParameterError('Throughput needs at least one BER value')
    if bits_per_slot <= 0 or not slot_duration > 0:
        raise ParameterError('bits_per_slot and slot_duration must be positive')
    return float((1.0 - bers.mean()) * bits_per_slot / slot_duration)
