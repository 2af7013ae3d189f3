"""Decision policies behind one uniform contract: act(belief, rng) -> Action.

Agents never see the instance or any reward; their only inputs are the
belief state, their own parameters, and a caller-owned random stream.
Tie-breaking is deterministic everywhere: lowest index wins, environment
arms before queries.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import Action, ActionKind, BeliefState, expected_rewards
from .ids_solver import minimize_info_ratio
from .infotheory import estimate_optimal_reward, expected_shortfalls, info_gains


class AgentKind(Enum):
    REWARD_GREEDY = "reward_greedy"
    INFO_GREEDY = "info_greedy"
    EXPLORE_THEN_EXPLOIT = "ete"
    EPSILON_GREEDY = "epsilon_greedy"
    THOMPSON = "ts"
    MIXED_TS = "mixed_ts"
    IDS = "ids"


_NEEDS_TAU = {AgentKind.EXPLORE_THEN_EXPLOIT}
_NEEDS_EPSILON = {AgentKind.EPSILON_GREEDY, AgentKind.MIXED_TS}
_NEEDS_MC = {AgentKind.IDS}


@dataclass(frozen=True)
class AgentSpec:
    """Agent kind plus exactly the parameters that kind requires."""

    kind: AgentKind
    tau: int | None = None
    epsilon: float | None = None
    mc_samples: int | None = None

    def __post_init__(self) -> None:
        if (self.tau is not None) != (self.kind in _NEEDS_TAU):
            raise ValueError(f"tau is required by ete only, got {self}")
        if (self.epsilon is not None) != (self.kind in _NEEDS_EPSILON):
            raise ValueError(f"epsilon is required by epsilon_greedy/mixed_ts only, got {self}")
        if (self.mc_samples is not None) != (self.kind in _NEEDS_MC):
            raise ValueError(f"mc_samples is required by ids only, got {self}")
        if self.tau is not None and self.tau < 0:
            raise ValueError("tau must be non-negative")
        if self.epsilon is not None and not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        if self.mc_samples is not None and self.mc_samples < 1:
            raise ValueError("mc_samples must be at least 1")

    @property
    def label(self) -> str:
        parts = [self.kind.value]
        if self.tau is not None:
            parts.append(f"tau{self.tau}")
        if self.epsilon is not None:
            parts.append(f"eps{self.epsilon:g}")
        if self.mc_samples is not None:
            parts.append(f"m{self.mc_samples}")
        return "_".join(parts)


def reward_greedy_act(b: BeliefState) -> Action:
    """Highest posterior-mean reward over all 2N actions.

    Queries have mean reward -1 against arm rewards in [0, 1], so a query
    can never win.
    """
    values = np.concatenate([expected_rewards(b), np.full(b.n_arms, -1.0)])
    return Action.from_flat(int(np.argmax(values)), b.n_arms)


def info_greedy_act(b: BeliefState, gains: np.ndarray | None = None) -> Action:
    """Highest one-step information gain over all 2N actions.

    Every selection strictly lowers the played coordinate's gain, so from
    the prior this cycles through all 2N actions.
    """
    if gains is None:
        gains = info_gains(b)
    return Action.from_flat(int(np.argmax(gains)), b.n_arms)


def explore_then_exploit_act(
    b: BeliefState, t: int, tau: int, gains: np.ndarray | None = None
) -> Action:
    """Information-greedy through step tau inclusive, reward-greedy after."""
    if tau < 0:
        raise ValueError("tau must be non-negative")
    if t <= tau:
        return info_greedy_act(b, gains)
    return reward_greedy_act(b)


def epsilon_greedy_act(
    b: BeliefState, epsilon: float, rng: np.random.Generator
) -> Action:
    """Uniform over all 2N actions with probability epsilon, else greedy."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    if rng.random() < epsilon:
        return Action.from_flat(int(rng.integers(2 * b.n_arms)), b.n_arms)
    return reward_greedy_act(b)


def thompson_act(b: BeliefState, rng: np.random.Generator) -> Action:
    """Posterior-sample every coordinate and play the best sampled arm.

    Queries score the flat -1 under any sample, so the argmax over all 2N
    actions always lands on an environment arm.
    """
    phi = rng.beta(b.env_alpha, b.env_beta)
    theta = rng.beta(b.pref_alpha, b.pref_beta)
    sampled = phi * theta + (1.0 - phi) * (1.0 - theta)
    return Action(ActionKind.ENV_ARM, int(np.argmax(sampled)))


def mixed_ts_act(
    b: BeliefState, epsilon: float, rng: np.random.Generator
) -> Action:
    """Thompson arm, played directly w.p. 1-epsilon or queried w.p. epsilon."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    arm = thompson_act(b, rng).index
    if rng.random() < epsilon:
        return Action(ActionKind.HUMAN_QUERY, arm)
    return Action(ActionKind.ENV_ARM, arm)


def ids_act(
    b: BeliefState,
    mc_samples: int,
    rng: np.random.Generator,
    gains: np.ndarray | None = None,
) -> Action:
    """Sample from the distribution minimizing the information ratio.

    Estimates the posterior optimal reward by Monte Carlo, forms per-action
    shortfalls and gains, and delegates to the exact two-support solver.
    """
    if mc_samples < 1:
        raise ValueError("mc_samples must be at least 1")
    if gains is None:
        gains = info_gains(b)
    r_star_hat = estimate_optimal_reward(b, mc_samples, rng)
    dist = minimize_info_ratio(expected_shortfalls(b, r_star_hat), gains)
    return Action.from_flat(dist.sample(rng), b.n_arms)


class _GainCache:
    """Incremental info_gains: one coordinate changes per belief update."""

    def __init__(self) -> None:
        self._alpha: np.ndarray | None = None
        self._beta: np.ndarray | None = None
        self._gains: np.ndarray | None = None

    def gains(self, b: BeliefState) -> np.ndarray:
        alpha = np.concatenate([b.env_alpha, b.pref_alpha])
        beta = np.concatenate([b.env_beta, b.pref_beta])
        if self._alpha is None or self._alpha.shape != alpha.shape:
            self._gains = info_gains(b)
        else:
            changed = (alpha != self._alpha) | (beta != self._beta)
            if changed.any():
                from .infotheory import beta_bernoulli_mi

                self._gains = self._gains.copy()
                self._gains[changed] = beta_bernoulli_mi(alpha[changed], beta[changed])
        self._alpha, self._beta = alpha, beta
        return self._gains


class Agent:
    """Uniform act() facade over the policy functions.

    A per-instance gain cache makes repeated info_gains lookups cheap; the
    cached values are bit-identical to direct recomputation.
    """

    def __init__(self, spec: AgentSpec):
        self.spec = spec
        self._gain_cache = _GainCache()

    def act(self, belief: BeliefState, rng: np.random.Generator) -> Action:
        kind = self.spec.kind
        if kind is AgentKind.REWARD_GREEDY:
            return reward_greedy_act(belief)
        if kind is AgentKind.INFO_GREEDY:
            return info_greedy_act(belief, self._gain_cache.gains(belief))
        if kind is AgentKind.EXPLORE_THEN_EXPLOIT:
            if belief.t <= self.spec.tau:
                return info_greedy_act(belief, self._gain_cache.gains(belief))
            return reward_greedy_act(belief)
        if kind is AgentKind.EPSILON_GREEDY:
            return epsilon_greedy_act(belief, self.spec.epsilon, rng)
        if kind is AgentKind.THOMPSON:
            return thompson_act(belief, rng)
        if kind is AgentKind.MIXED_TS:
            return mixed_ts_act(belief, self.spec.epsilon, rng)
        if kind is AgentKind.IDS:
            return ids_act(belief, self.spec.mc_samples, rng, self._gain_cache.gains(belief))
        raise ValueError(f"unknown agent kind {kind}")


def make_agent(spec: AgentSpec) -> Agent:
    return Agent(spec)
