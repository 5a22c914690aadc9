#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
Beam selection policies and regret accounting.

All runners share the same environment protocol. An environment exposes

- ``num_arms``: number of beams K.
- ``observe(arm, slot)``: a `radmab.comm_link.LinkReport`-like object with
  ``reward`` in [0, 1] and ``ber``.
- ``gate(kind)``: for the gated policies, an object with ``arms`` (sorted
  beam indices) and ``cost`` (slots), ``kind`` being ``'amplitude'`` or
  ``'doppler'``.
- ``optimal_arm``: for the genie baseline.
- ``min_gate_reward`` (optional): smallest first-pull reward that lets a
  gated policy trust its gate.

Each runner returns one `SlotRecord` per slot of the horizon. Slots spent
on radar processing carry the arm marker `GATE`.
"""

# Stdlib
import logging
import math
from collections import namedtuple
from functools import partial
# 3rd party
import numpy as np
# Own
from .utils import ConfigurationError, ContractViolation

logger = logging.getLogger(__name__)

GATE = -1

SlotRecord = namedtuple('SlotRecord', 'slot arm reward ber algorithm note')
SlotRecord.__new__.__defaults__ = ('',)


class BanditState(object):

    """
    UCB bookkeeping: per-arm pull counts ``N_k`` and cumulative rewards
    ``S_k``, plus the slot clock. The clock starts at the gate cost, so
    ``sum(N_k) + gate_cost == clock`` always holds.

    Parameters
    ----------
    num_arms : int
    horizon : int
    active_arms : iterable of int, optional
        Arms the loop is restricted to. Defaults to all of them.
    gate_cost : int, optional
        Slots already spent before the loop.
    """

    def __init__(self, num_arms, horizon, active_arms=None, gate_cost=0):
        if num_arms < 1:
            raise ConfigurationError('A bandit needs at least one arm')
        self.pulls = np.zeros(num_arms, dtype=int)
        self.reward_sums = np.zeros(num_arms, dtype=float)
        self.horizon = int(horizon)
        self.gate_cost = int(gate_cost)
        self.clock = self.gate_cost
        arms = range(num_arms) if active_arms is None else active_arms
        self.active_arms = tuple(sorted(set(int(a) for a in arms)))
        if not self.active_arms:
            raise ConfigurationError('The UCB loop needs at least one active arm')
        if self.active_arms[0] < 0 or self.active_arms[-1] >= num_arms:
            raise ConfigurationError('Active arms {} outside 0..{}'.format(
                self.active_arms, num_arms - 1))

    @property
    def num_arms(self):
        return len(self.pulls)

    @property
    def exhausted(self):
        return self.clock >= self.horizon

    def means(self):
        return self.reward_sums / np.maximum(self.pulls, 1)

    def ucb_index(self, k, t):
        """``S_k / N_k + sqrt(2 ln t / N_k)``."""
        if self.pulls[k] == 0:
            raise ContractViolation('UCB index of arm {} requested before its first pull'.format(k))
        if t < 1:
            raise ContractViolation('UCB index needs t >= 1, got {}'.format(t))
        n = self.pulls[k]
        return self.reward_sums[k] / n + math.sqrt(2 * math.log(t) / n)

    def select_arm(self):
        """
        Lowest-index unpulled active arm, then the UCB argmax evaluated at the
        current slot ``t = clock + 1``. Ties go to the lowest arm index.
        """
        arms = np.asarray(self.active_arms)
        pulls = self.pulls[arms]
        fresh = np.flatnonzero(pulls == 0)
        if len(fresh):
            return int(arms[fresh[0]])
        t = self.clock + 1
        scores = self.reward_sums[arms] / pulls + np.sqrt(2 * math.log(t) / pulls)
        return int(arms[np.argmax(scores)])

    def update(self, arm, reward):
        if not 0.0 <= reward <= 1.0:
            raise ContractViolation('Reward {} outside [0, 1]'.format(reward))
        self.pulls[arm] += 1
        self.reward_sums[arm] += reward
        self.clock += 1
        return self

    def play(self, env, arm, algorithm, records):
        obs = env.observe(arm, self.clock + 1)
        self.update(arm, obs.reward)
        records.append(SlotRecord(self.clock, arm, obs.reward, obs.ber, algorithm))
        return obs


def _ucb_loop(env, state, algorithm, records):
    while not state.exhausted:
        state.play(env, state.select_arm(), algorithm, records)
    return records


def run_ucb_snr(env, horizon, rng=None, algorithm='ucb'):
    """UCB over the full beam grid, no radar overhead."""
    if horizon < env.num_arms:
        raise ConfigurationError('Horizon {} is shorter than the {} beams to initialize'.format(
            horizon, env.num_arms))
    return _ucb_loop(env, BanditState(env.num_arms, horizon), algorithm, [])


def run_ucb_gated(env, horizon, gate='amplitude', rng=None, algorithm=None):
    """
    Radar-gated UCB: ``cost`` gate slots (reward 0, BER 0.5), then UCB over
    the gated beams for the rest of the horizon.

    The loop falls back to the full grid when the gated set is empty, or
    when no gated beam earns a reward of at least ``env.min_gate_reward``
    (default: any reward above zero) on its first pull, which is what a
    gate that missed the user looks like. Either way the gate slots are
    tagged ``gate-fallback``.
    """
    if algorithm is None:
        algorithm = 'ucb-ag' if gate == 'amplitude' else 'ucb-dg'
    result = env.gate(gate)
    arms, note = tuple(result.arms), 'gate'
    if not arms:
        logger.warning('%s: %s gate kept no beam, falling back to all %d beams',
                       algorithm, gate, env.num_arms)
        arms, note = tuple(range(env.num_arms)), 'gate-fallback'
    if horizon <= result.cost + len(arms):
        raise ConfigurationError('Horizon {} leaves no room after {} gate slots and {} arms'.format(
            horizon, result.cost, len(arms)))
    records = [SlotRecord(t, GATE, 0.0, 0.5, algorithm, note) for t in range(1, result.cost + 1)]
    state = BanditState(env.num_arms, horizon, active_arms=arms, gate_cost=result.cost)
    for arm in state.active_arms:
        state.play(env, arm, algorithm, records)
    best = state.means()[list(arms)].max()
    if note == 'gate' and (not best > 0 or best < getattr(env, 'min_gate_reward', 0.0)):
        logger.warning('%s: best reward %.3f of the %s-gated beams is too low, falling back '
                       'to all %d beams', algorithm, best, gate, env.num_arms)
        state.active_arms = tuple(range(env.num_arms))
        records[:result.cost] = [r._replace(note='gate-fallback') for r in records[:result.cost]]
    return _ucb_loop(env, state, algorithm, records)


def run_random(env, horizon, rng=None, algorithm='random'):
    if rng is None:
        raise ConfigurationError('Random beam selection needs a random stream')
    state = BanditState(env.num_arms, horizon)
    records = []
    for arm in rng.integers(0, env.num_arms, size=horizon):
        state.play(env, int(arm), algorithm, records)
    return records


def run_dbf(env, horizon, rng=None, algorithm='dbf'):
    """Genie digital beamforming: the optimal beam from the first slot."""
    state = BanditState(env.num_arms, horizon)
    records = []
    while not state.exhausted:
        state.play(env, env.optimal_arm, algorithm, records)
    return records


def lucb_radius(pulls, t, num_arms, delta):
    return np.sqrt(np.log(1.25 * num_arms * float(t) ** 4 / delta) / (2 * pulls))


def run_lucb(env, horizon, rng=None, delta=0.1, algorithm='lucb'):
    """
    LUCB best-arm identification, then commitment.

    Every arm is pulled once; each round then pulls the empirical leader and
    the challenger with the highest upper bound among the others, until the
    leader lower bound clears the challenger upper bound. The identified arm
    is played for the rest of the horizon.
    """
    k = env.num_arms
    if horizon < 2 * k:
        raise ConfigurationError('LUCB needs a horizon of at least {} slots, got {}'.format(
            2 * k, horizon))
    state = BanditState(k, horizon)
    records = []
    for arm in range(k):
        state.play(env, arm, algorithm, records)
    committed = 0 if k == 1 else None
    while not state.exhausted:
        if committed is not None:
            state.play(env, committed, algorithm, records)
            continue
        means = state.means()
        radius = lucb_radius(state.pulls, state.clock, k, delta)
        leader = int(np.argmax(means))
        upper = means + radius
        upper[leader] = -np.inf
        challenger = int(np.argmax(upper))
        if means[leader] - radius[leader] >= upper[challenger]:
            committed = leader
            logger.debug('LUCB identified beam %d after %d slots', leader, state.clock)
            continue
        state.play(env, leader, algorithm, records)
        if not state.exhausted:
            state.play(env, challenger, algorithm, records)
    return records


def _arm_values(records, true_means):
    means = np.asarray(true_means, dtype=float)
    arms = np.fromiter((r.arm for r in records), dtype=int, count=len(records))
    return np.where(arms == GATE, 0.0, means[np.maximum(arms, 0)])


def cumulative_regret(records, true_means):
    """
    Regret after every slot of the trace, ``t max_k S_k - sum of the means
    of the arms played``. Gate slots play a zero-mean arm.
    """
    best = float(np.max(true_means))
    return np.cumsum(best - _arm_values(records, true_means))


def regret(records, true_means):
    """``T S_k' - sum_k S_k N_k`` over the whole trace."""
    if not records:
        return 0.0
    return float(len(records) * np.max(true_means) - _arm_values(records, true_means).sum())


ALGORITHMS = {
    'ucb': run_ucb_snr,
    'ucb-ag': partial(run_ucb_gated, gate='amplitude', algorithm='ucb-ag'),
    'ucb-dg': partial(run_ucb_gated, gate='doppler', algorithm='ucb-dg'),
    'random': run_random,
    'lucb': run_lucb,
    'dbf': run_dbf,
}


def get_algorithm(name):
    try:
        return ALGORITHMS[name]
    except KeyError:
        raise ConfigurationError('Unknown algorithm "{}". Choose from: {}'.format(
            name, ', '.join(sorted(ALGORITHMS))))
