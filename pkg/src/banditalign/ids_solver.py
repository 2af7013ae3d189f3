"""Exact minimization of the information ratio over action distributions.

The ratio of a distribution p over actions with shortfalls d and gains g is

    (sum_i p_i d_i)^2 / (sum_i p_i g_i).

An optimal distribution supported on at most two actions always exists, so
the solver enumerates all singletons and ordered pairs and solves each pair
restriction in closed form.  A brute-force grid oracle lives alongside for
verification.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# Ratios closer than this are considered tied before deterministic tie-breaking.
RATIO_TOL = 1e-12

_PROB_TOL = 1e-12


@dataclass(frozen=True)
class ActionDistribution:
    """Sparse probability mass over flat action indices."""

    support: tuple[tuple[int, float], ...]

    def __post_init__(self) -> None:
        if not self.support:
            raise ValueError("empty support")
        total = 0.0
        for index, prob in self.support:
            if prob <= 0.0:
                raise ValueError(f"non-positive probability {prob} on action {index}")
            total += prob
        if abs(total - 1.0) > _PROB_TOL:
            raise ValueError(f"probabilities sum to {total}, not 1")

    def probability(self, index: int) -> float:
        for i, prob in self.support:
            if i == index:
                return prob
        return 0.0

    def sample(self, rng: np.random.Generator) -> int:
        if len(self.support) == 1:
            return self.support[0][0]
        (i, q), (j, _) = self.support
        return i if rng.random() < q else j


def point_mass(index: int) -> ActionDistribution:
    return ActionDistribution(((index, 1.0),))


def distribution_ratio(
    dist: ActionDistribution, deltas: np.ndarray, gains: np.ndarray
) -> float:
    """Information ratio achieved by an explicit distribution."""
    shortfall = sum(p * deltas[i] for i, p in dist.support)
    gain = sum(p * gains[i] for i, p in dist.support)
    return shortfall * shortfall / gain


def _pair_ratio(q, d1, g1, d2, g2):
    return (q * d1 + (1 - q) * d2) ** 2 / (q * g1 + (1 - q) * g2)


def minimize_pair(d1: float, g1: float, d2: float, g2: float) -> tuple[float, float]:
    """Best weight q on the first action of a two-action support.

    f(q) = (q d1 + (1-q) d2)^2 / (q g1 + (1-q) g2) is convex on [0, 1], so
    the minimum lies at an endpoint or where f'(q) = 0.  Writing
    D(q) = q d1 + (1-q) d2 and G(q) = q g1 + (1-q) g2, the derivative
    vanishes when D = 0 or when 2 (d1-d2) G = D (g1-g2), giving the
    candidates

        q0 = -d2 / (d1 - d2)                  (numerator root)
        q* = d2/(d1 - d2) - 2 g2/(g1 - g2)    (stationary point)

    whenever the denominators are nonzero.  Ties between candidate values
    prefer the largest q, so flat objectives collapse to a singleton.
    """
    if g1 <= 0.0 or g2 <= 0.0:
        raise ValueError("gains must be positive")
    if d1 < 0.0 or d2 < 0.0:
        raise ValueError("shortfalls must be non-negative")
    candidates = [0.0, 1.0]
    dd = d1 - d2
    dg = g1 - g2
    if dd != 0.0:
        if dg != 0.0:
            q_st = d2 / dd - 2.0 * g2 / dg
            if 0.0 < q_st < 1.0:
                candidates.append(q_st)
        q_root = -d2 / dd
        if 0.0 < q_root < 1.0:
            candidates.append(q_root)
    values = [_pair_ratio(q, d1, g1, d2, g2) for q in candidates]
    best = min(values)
    q_best = max(q for q, v in zip(candidates, values) if v <= best + RATIO_TOL)
    return q_best, _pair_ratio(q_best, d1, g1, d2, g2)


@lru_cache(maxsize=None)
def _ordered_pairs(n: int) -> tuple[np.ndarray, np.ndarray]:
    i_idx, j_idx = np.nonzero(~np.eye(n, dtype=bool))
    return i_idx, j_idx


def _validate_inputs(deltas, gains) -> tuple[np.ndarray, np.ndarray]:
    d = np.asarray(deltas, dtype=float)
    g = np.asarray(gains, dtype=float)
    if d.ndim != 1 or g.ndim != 1 or d.shape != g.shape:
        raise ValueError("deltas and gains must be 1-d vectors of equal length")
    if d.size < 1:
        raise ValueError("need at least one action")
    if np.any(g <= 0.0):
        raise ValueError("gains must be positive")
    if np.any(d < 0.0):
        raise ValueError("shortfalls must be non-negative")
    return d, g


def minimize_info_ratio(deltas, gains) -> ActionDistribution:
    """Globally optimal action distribution for the information ratio.

    A zero-shortfall action gives ratio 0, so the lowest-index one wins
    outright.  Otherwise all singletons and ordered pairs are scored (the
    pair inner problem in closed form, mirroring `minimize_pair`) and ties
    within RATIO_TOL break by lower first index, lower second index, then
    larger weight on the first action.
    """
    d, g = _validate_inputs(deltas, gains)
    zero = np.flatnonzero(d == 0.0)
    if zero.size:
        return point_mass(int(zero[0]))
    n = d.size
    if n == 1:
        return point_mass(0)

    i_idx, j_idx = _ordered_pairs(n)
    d1, d2 = d[i_idx], d[j_idx]
    g1, g2 = g[i_idx], g[j_idx]
    dd = d1 - d2
    dg = g1 - g2
    with np.errstate(divide="ignore", invalid="ignore"):
        q_st = d2 / dd - 2.0 * g2 / dg
        q_root = -d2 / dd
    cand = np.stack(
        [np.zeros_like(d1), np.ones_like(d1), q_st, q_root],
        axis=1,
    )
    # Out-of-range or undefined candidates degrade to the q=0 endpoint,
    # which is already present, so they never affect the minimum.
    cand[~np.isfinite(cand) | (cand < 0.0) | (cand > 1.0)] = 0.0
    f = _pair_ratio(cand, d1[:, None], g1[:, None], d2[:, None], g2[:, None])
    f_min = f.min(axis=1)
    q_pair = np.where(f <= f_min[:, None] + RATIO_TOL, cand, -1.0).max(axis=1)
    ratio_pair = _pair_ratio(q_pair, d1, g1, d2, g2)

    first = np.concatenate([np.arange(n), i_idx])
    second = np.concatenate([np.arange(n), j_idx])
    weight = np.concatenate([np.ones(n), q_pair])
    ratio = np.concatenate([d * d / g, ratio_pair])

    tied = np.flatnonzero(ratio <= ratio.min() + RATIO_TOL)
    order = np.lexsort((-weight[tied], second[tied], first[tied]))
    k = int(tied[order[0]])
    q = float(weight[k])
    i, j = int(first[k]), int(second[k])
    if i == j or q >= 1.0:
        return point_mass(i)
    if q <= 0.0:
        return point_mass(j)
    return ActionDistribution(((i, q), (j, 1.0 - q)))


def grid_oracle(deltas, gains, q_step: float) -> float:
    """Brute-force minimum ratio over a q grid on every unordered pair.

    Slow and simple on purpose; exists to cross-check the closed-form
    solver.  Diagonal pairs double as singletons, and sweeping q over
    unordered pairs covers both orderings.
    """
    if not 0.0 < q_step <= 0.5:
        raise ValueError("q_step must lie in (0, 0.5]")
    d, g = _validate_inputs(deltas, gains)
    m = int(round(1.0 / q_step))
    qs = np.linspace(0.0, 1.0, m + 1)
    i_idx, j_idx = np.triu_indices(d.size)
    num = qs[None, :] * d[i_idx][:, None] + (1.0 - qs)[None, :] * d[j_idx][:, None]
    den = qs[None, :] * g[i_idx][:, None] + (1.0 - qs)[None, :] * g[j_idx][:, None]
    return float((num * num / den).min())
