"""Domain types for the alignment bandit: actions, observations, beliefs.

An episode has N environment arms, each paired with a human query sharing
the same index.  Pulling arm i yields a binary outcome governed by the
environment parameter phi[i]; querying i yields a binary response governed
by the preference parameter theta[i].  Agents only ever see observations,
so their entire knowledge is a pair of per-index beta posterior vectors
plus a step counter.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class ActionKind(Enum):
    ENV_ARM = "env"
    HUMAN_QUERY = "query"


@dataclass(frozen=True)
class Action:
    """One of the 2N actions: environment arm i or its paired human query."""

    kind: ActionKind
    index: int

    def flat(self, n_arms: int) -> int:
        """Position in the canonical length-2N action vector (arms first)."""
        if not 0 <= self.index < n_arms:
            raise ValueError(f"action index {self.index} out of range for {n_arms} arms")
        if self.kind is ActionKind.ENV_ARM:
            return self.index
        return n_arms + self.index

    @staticmethod
    def from_flat(flat: int, n_arms: int) -> "Action":
        if not 0 <= flat < 2 * n_arms:
            raise ValueError(f"flat action {flat} out of range for {n_arms} arms")
        if flat < n_arms:
            return Action(ActionKind.ENV_ARM, flat)
        return Action(ActionKind.HUMAN_QUERY, flat - n_arms)


def env_arm(index: int) -> Action:
    return Action(ActionKind.ENV_ARM, index)


def human_query(index: int) -> Action:
    return Action(ActionKind.HUMAN_QUERY, index)


def _check_observation(o: int) -> None:
    if o not in (0, 1):
        raise ValueError(f"observation must be 0 or 1, got {o!r}")


@dataclass(frozen=True)
class BetaPosterior:
    """Conjugate sufficient statistics for one unknown probability.

    The flat prior is (1, 1); alpha counts observed ones, beta observed
    zeros, each offset by the prior pseudo-count.
    """

    alpha: float = 1.0
    beta: float = 1.0

    def __post_init__(self) -> None:
        if self.alpha < 1.0 or self.beta < 1.0:
            raise ValueError("pseudo-counts never drop below the flat prior (1, 1)")

    @property
    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)


def update(p: BetaPosterior, o: int) -> BetaPosterior:
    """Fold one binary observation into the posterior."""
    _check_observation(o)
    if o == 1:
        return BetaPosterior(p.alpha + 1.0, p.beta)
    return BetaPosterior(p.alpha, p.beta + 1.0)


def mean(p: BetaPosterior) -> float:
    return p.mean


@dataclass(frozen=True, eq=False)
class BeliefState:
    """Per-index beta posteriors for the environment and the human.

    Arrays are treated as immutable; `apply` returns a fresh state.  The
    step counter t equals the total pseudo-count accumulated above the
    prior, because exactly one posterior absorbs each observation.
    """

    env_alpha: np.ndarray
    env_beta: np.ndarray
    pref_alpha: np.ndarray
    pref_beta: np.ndarray
    t: int = 0

    @classmethod
    def prior(cls, n_arms: int) -> "BeliefState":
        if n_arms < 1:
            raise ValueError("need at least one arm")
        return cls(
            np.ones(n_arms),
            np.ones(n_arms),
            np.ones(n_arms),
            np.ones(n_arms),
            0,
        )

    @property
    def n_arms(self) -> int:
        return self.env_alpha.shape[0]

    def env(self, index: int) -> BetaPosterior:
        return BetaPosterior(float(self.env_alpha[index]), float(self.env_beta[index]))

    def pref(self, index: int) -> BetaPosterior:
        return BetaPosterior(float(self.pref_alpha[index]), float(self.pref_beta[index]))

    def observation_count(self) -> float:
        """Total pseudo-count above the prior; equals t by construction."""
        total = (
            self.env_alpha.sum()
            + self.env_beta.sum()
            + self.pref_alpha.sum()
            + self.pref_beta.sum()
        )
        return float(total - 4.0 * self.n_arms)


def expected_rewards(b: BeliefState) -> np.ndarray:
    """Posterior-mean reward of every environment arm.

    The environment outcome and the preference are independent under the
    belief, so the mean of phi*theta + (1-phi)*(1-theta) factorizes into
    the product of posterior means.
    """
    m_phi = b.env_alpha / (b.env_alpha + b.env_beta)
    m_theta = b.pref_alpha / (b.pref_alpha + b.pref_beta)
    return m_phi * m_theta + (1.0 - m_phi) * (1.0 - m_theta)


def expected_reward(b: BeliefState, arm: int) -> float:
    if not 0 <= arm < b.n_arms:
        raise ValueError(f"arm {arm} out of range for {b.n_arms} arms")
    m_phi = b.env(arm).mean
    m_theta = b.pref(arm).mean
    return m_phi * m_theta + (1.0 - m_phi) * (1.0 - m_theta)


def apply(b: BeliefState, a: Action, o: int) -> BeliefState:
    """Advance the belief by one (action, observation) pair."""
    _check_observation(o)
    if not 0 <= a.index < b.n_arms:
        raise ValueError(f"action index {a.index} out of range for {b.n_arms} arms")
    env_alpha = b.env_alpha.copy()
    env_beta = b.env_beta.copy()
    pref_alpha = b.pref_alpha.copy()
    pref_beta = b.pref_beta.copy()
    if a.kind is ActionKind.ENV_ARM:
        env_alpha[a.index] += o
        env_beta[a.index] += 1 - o
    else:
        pref_alpha[a.index] += o
        pref_beta[a.index] += 1 - o
    return BeliefState(env_alpha, env_beta, pref_alpha, pref_beta, b.t + 1)
