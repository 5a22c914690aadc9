#!/usr/bin/env python
# -*- coding: utf-8 -*-

# Stdlib
import math
import os
from collections import namedtuple
# 3rd party
import numpy as np
import pytest


TESTPATH = os.path.dirname(os.path.abspath(__file__))
REPOPATH = os.path.dirname(TESTPATH)


def datapath(path):
    return os.path.join(TESTPATH, 'data', path)


def configpath(path):
    return os.path.join(REPOPATH, 'configs', path)


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False,
                     help='Run the slow statistical experiments too.')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


Observation = namedtuple('Observation', 'reward ber')
Gate = namedtuple('Gate', 'arms cost')


class BernoulliEnv(object):

    """
    Bandit environment with fixed per-arm means. Rewards are Bernoulli draws,
    or the means themselves when `deterministic`.
    """

    def __init__(self, means, seed=0, deterministic=False, gate_arms=None, gate_cost=9):
        self.means = np.asarray(means, dtype=float)
        self.num_arms = len(self.means)
        self.rng = np.random.default_rng(seed)
        self.deterministic = deterministic
        self.gates = {'amplitude': Gate(tuple(gate_arms or ()), gate_cost),
                      'doppler': Gate(tuple(gate_arms or ()), gate_cost)}
        self.optimal_arm = int(np.argmax(self.means))
        self.observed = []

    def observe(self, arm, slot):
        self.observed.append((slot, arm))
        mean = self.means[arm]
        reward = mean if self.deterministic else float(self.rng.random() < mean)
        return Observation(reward, 0.5 * (1 - reward))

    def gate(self, kind):
        return self.gates[kind]


def radians(*values):
    return tuple(math.radians(v) for v in values)
