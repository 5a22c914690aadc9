#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Simulate radar-gated multi-armed bandit beam selection at a mmWave joint
radar-communication base station.
"""

__version__ = '0.1.0'

from .harness import ExperimentConfig, run_experiment, run_sweep
from .core import ExperimentReport
