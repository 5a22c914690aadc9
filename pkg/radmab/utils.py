#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Shared helpers: physical constants, error types, deterministic seed
derivation and decibel conversions.
"""

# Stdlib
import hashlib
import struct
from textwrap import dedent
# 3rd party
import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT


class ConfigurationError(ValueError):
    """Invalid configuration value or file."""


class SceneValidationError(ConfigurationError):
    """Scene geometry inconsistent with the beam grid or the link model."""


class ParameterError(ValueError):
    """Invalid argument to a numerical operation."""


class ContractViolation(ValueError):
    """A bandit routine was called outside its contract."""


def derive_seed(*keys):
    """
    Stable 64-bit seed out of any sequence of ints and strings.

    The same keys always give the same seed, on any platform and Python
    version, so adding trials (or beams, or algorithms) never perturbs the
    streams of the existing ones.
    """
    h = hashlib.blake2b(digest_size=8)
    for key in keys:
        if isinstance(key, str):
            h.update(b's' + key.encode('utf-8'))
        else:
            h.update(b'i' + struct.pack('<Q', int(key) % 2 ** 64))
        h.update(b'|')
    return int.from_bytes(h.digest(), 'little')


def derive_rng(*keys):
    """`numpy.random.Generator` seeded with `derive_seed(*keys)`."""
    return np.random.default_rng(derive_seed(*keys))


def db_to_linear(value_db):
    return 10.0 ** (np.asarray(value_db, dtype=float) / 10.0)


def linear_to_db(value):
    with np.errstate(divide='ignore'):
        return 10.0 * np.log10(np.asarray(value, dtype=float))


def greeting():
    from radmab import __version__
    s = """    Created using radmab v{version}
    {ruler}

    Radar-gated bandit beam selection at a joint radar-communication
    base station. Every run is reproducible from its config and seed.

    ***

    """.format(version=__version__, ruler='=' * (22 + len(__version__)))
    return dedent(s)


__all__ = ['SPEED_OF_LIGHT', 'ConfigurationError', 'SceneValidationError',
           'ParameterError', 'ContractViolation', 'derive_seed', 'derive_rng',
           'db_to_linear', 'linear_to_db', 'greeting']
