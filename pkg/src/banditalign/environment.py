"""Ground truth: instance sampling, observation generation, regret accounting.

Everything in this module is hidden from agents.  An instance is a pair of
parameter vectors (phi for arm outcomes, theta for preferences) drawn from
the flat prior at episode start.  Regret is charged against the expected
reward of the chosen action conditioned on the instance, so a trace is an
exact function of the action sequence rather than of observation noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import Action, ActionKind

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

# Per-episode child stream ids.
INSTANCE_STREAM = 1
OBSERVATION_STREAM = 2
AGENT_STREAM = 3


def mix_seed(root: int, stream_id: int) -> int:
    """Derive a decorrelated 64-bit child seed from a root seed.

    The stream id is XOR-folded into the root (scaled by the golden-ratio
    constant so that small ids touch high bits), then passed through the
    SplitMix64 finalizer.  Distinct stream ids give independent streams
    for any fixed root.
    """
    z = (root ^ (stream_id * _GOLDEN)) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def episode_streams(seed: int) -> tuple[np.random.Generator, ...]:
    """Independent generators for instance draw, observations, agent randomness."""
    return tuple(
        np.random.default_rng(mix_seed(seed, sid))
        for sid in (INSTANCE_STREAM, OBSERVATION_STREAM, AGENT_STREAM)
    )


@dataclass(frozen=True, eq=False)
class ProblemInstance:
    """Hidden parameters of one episode."""

    phi: np.ndarray
    theta: np.ndarray

    def __post_init__(self) -> None:
        if self.phi.shape != self.theta.shape or self.phi.ndim != 1:
            raise ValueError("phi and theta must be 1-d vectors of equal length")
        if self.phi.shape[0] < 1:
            raise ValueError("need at least one arm")
        for name, vec in (("phi", self.phi), ("theta", self.theta)):
            if np.any(vec < 0.0) or np.any(vec > 1.0):
                raise ValueError(f"{name} entries must lie in [0, 1]")

    @property
    def n_arms(self) -> int:
        return self.phi.shape[0]


def sample_instance(rng: np.random.Generator, n_arms: int) -> ProblemInstance:
    """Draw 2N independent uniforms (the flat beta prior) for one episode."""
    if n_arms < 1:
        raise ValueError("need at least one arm")
    return ProblemInstance(rng.random(n_arms), rng.random(n_arms))


def step(inst: ProblemInstance, a: Action, rng: np.random.Generator) -> int:
    """Sample the binary observation produced by one action."""
    if a.kind is ActionKind.ENV_ARM:
        p = inst.phi[a.index]
    else:
        p = inst.theta[a.index]
    return int(rng.random() < p)


def arm_rewards(inst: ProblemInstance) -> np.ndarray:
    """Expected reward of every environment arm under the instance."""
    return inst.phi * inst.theta + (1.0 - inst.phi) * (1.0 - inst.theta)


def true_expected_reward(inst: ProblemInstance, a: Action) -> float:
    """Expected reward of an action conditioned on the instance.

    Queries cost a flat -1; an arm pays off when the environment outcome
    lands on the preferred side.
    """
    if a.kind is ActionKind.HUMAN_QUERY:
        return -1.0
    p, q = inst.phi[a.index], inst.theta[a.index]
    return float(p * q + (1.0 - p) * (1.0 - q))


def optimal_reward(inst: ProblemInstance) -> float:
    """Best achievable expected per-step reward (queries are never optimal)."""
    return float(arm_rewards(inst).max())


def step_regret(inst: ProblemInstance, a: Action) -> float:
    """Expected one-step shortfall of an action against the optimum."""
    return optimal_reward(inst) - true_expected_reward(inst, a)


class TraceRecord(NamedTuple):
    t: int
    action: Action
    observation: int
    instant_regret: float
    cum_regret: float


@dataclass
class RegretTrace:
    """Checkpointed regret ledger of one episode.

    cum_regret is accumulated over every step, so recorded rows are exact
    even when only a subset of steps is kept.
    """

    records: list[TraceRecord]
    r_star: float
    seed: int

    @property
    def final_cum_regret(self) -> float:
        return self.records[-1].cum_regret
