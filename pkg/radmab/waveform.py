#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Golay complementary sequences and the per-packet transmit waveform.
"""

# Stdlib
import math
from dataclasses import dataclass
# 3rd party
import numpy as np
# Own
from .scene import steering_vector
from .utils import ParameterError


@dataclass(frozen=True)
class GolayPair(object):

    seq_a: np.ndarray
    seq_b: np.ndarray

    @property
    def length(self):
        return len(self.seq_a)


@dataclass(frozen=True)
class Packet(object):

    samples: np.ndarray
    packet_index: int
    amplitude: float


def golay_pair(length):
    """
    Golay complementary pair of the given power-of-two length, built by
    recursive doubling ``a' = a|b, b' = a|-b`` from ``a = [1, 1], b = [1, -1]``.

    Sequences are integer arrays, so complementarity can be checked exactly.
    """
    length = int(length)
    if length < 2 or length & (length - 1):
        raise ParameterError('Golay length must be a power of two >= 2, got {}'.format(length))
    a = np.array([1, 1], dtype=np.int64)
    b = np.array([1, -1], dtype=np.int64)
    while len(a) < length:
        a, b = np.concatenate([a, b]), np.concatenate([a, -b])
    return GolayPair(seq_a=a, seq_b=b)


def build_packet(pair, q, config, use_a=True):
    """
    Transmit samples ``sqrt(E_s) * seq`` of packet `q` (1-based). Every packet
    carries the same samples; the Doppler rotation is applied by the channel.
    """
    if not 1 <= q <= config.num_packets:
        raise ParameterError('Packet index {} outside 1..{}'.format(q, config.num_packets))
    amplitude = math.sqrt(config.tx_energy)
    seq = pair.seq_a if use_a else pair.seq_b
    return Packet(samples=amplitude * seq.astype(complex), packet_index=q, amplitude=amplitude)


def packet_train(pair, config):
    """
    The Q packets of one radar dwell. With complementary processing the
    packets alternate Ga, Gb, Ga, ...; otherwise all carry Ga.
    """
    return [build_packet(pair, q, config, use_a=not (config.complementary and q % 2 == 0))
            for q in range(1, config.num_packets + 1)]


def beamform_weights(theta, arrays, config):
    """
    Analog BS beamformer pointing at `theta`, the conjugate of the steering
    vector, so that ``w . u_theta = P_BS``.
    """
    return np.conj(steering_vector(theta, arrays.num_elements_bs, arrays.element_spacing_bs,
                                   config.propagation_const))
