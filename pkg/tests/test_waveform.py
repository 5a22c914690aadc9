#!/usr/bin/env python
# -*- coding: utf-8 -*-

# Stdlib
import math
# 3rd party
import numpy as np
import pytest
# Own
from radmab.scene import ArrayConfig, WaveformConfig, steering_vector
from radmab.utils import ParameterError
from radmab.waveform import beamform_weights, build_packet, golay_pair, packet_train


def test_golay_base_pair():
    pair = golay_pair(2)
    assert pair.seq_a.tolist() == [1, 1]
    assert pair.seq_b.tolist() == [1, -1]
    total = np.correlate(pair.seq_a, pair.seq_a, 'full') + np.correlate(pair.seq_b, pair.seq_b, 'full')
    assert total.tolist() == [0, 4, 0]


@pytest.mark.parametrize('length', [2 ** k for k in range(1, 11)])
def test_golay_complementarity_is_exact(length):
    pair = golay_pair(length)
    assert pair.length == length
    assert set(np.unique(pair.seq_a)) <= {-1, 1}
    total = (np.correlate(pair.seq_a, pair.seq_a, 'full')
             + np.correlate(pair.seq_b, pair.seq_b, 'full'))
    expected = np.zeros(2 * length - 1, dtype=np.int64)
    expected[length - 1] = 2 * length
    assert np.array_equal(total, expected)


@pytest.mark.parametrize('length', [0, 1, 3, 6, 100])
def test_golay_rejects_non_powers_of_two(length):
    with pytest.raises(ParameterError):
        golay_pair(length)


def test_build_packet():
    pair = golay_pair(2)
    config = WaveformConfig()
    packet = build_packet(pair, 1, config)
    assert packet.samples.tolist() == [1 + 0j, 1 + 0j]
    assert packet.packet_index == 1
    loud = build_packet(pair, 1, WaveformConfig(tx_energy=4.0), use_a=False)
    assert loud.samples.tolist() == [2, -2]
    assert np.allclose(np.abs(loud.samples), 2)


@pytest.mark.parametrize('q', [0, 11])
def test_build_packet_index_range(q):
    with pytest.raises(ParameterError):
        build_packet(golay_pair(128), q, WaveformConfig())


def test_packet_train():
    pair = golay_pair(128)
    train = packet_train(pair, WaveformConfig())
    assert [p.packet_index for p in train] == list(range(1, 11))
    assert all(np.array_equal(p.samples, train[0].samples) for p in train)

    alternating = packet_train(pair, WaveformConfig(complementary=True))
    assert np.array_equal(alternating[0].samples, pair.seq_a)
    assert np.array_equal(alternating[1].samples, pair.seq_b)
    assert np.array_equal(alternating[2].samples, pair.seq_a)


def test_beamform_weights():
    config = WaveformConfig()
    arrays = ArrayConfig.half_wavelength(config.wavelength)
    assert np.allclose(beamform_weights(0.0, arrays, config), np.ones(32))
    for theta in np.radians([-80, -13, 0, 44, 80]):
        u = steering_vector(theta, 32, arrays.element_spacing_bs, config.propagation_const)
        assert np.dot(beamform_weights(theta, arrays, config), u) == pytest.approx(32)


def test_beamform_weights_30deg():
    config = WaveformConfig()
    arrays = ArrayConfig(2, 2, config.wavelength / 2, config.wavelength / 2)
    assert np.allclose(beamform_weights(math.radians(30), arrays, config), [1, -1j], atol=1e-12)
