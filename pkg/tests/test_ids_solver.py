"""Information-ratio solver against its brute-force grid oracle."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from banditalign.ids_solver import (
    ActionDistribution,
    distribution_ratio,
    grid_oracle,
    minimize_info_ratio,
    minimize_pair,
    point_mass,
)


class TestMinimizePair:
    def test_zero_shortfall_action_takes_all_mass(self):
        q, ratio = minimize_pair(0.0, 0.1, 0.5, 0.1)
        assert q == 1.0
        assert ratio == 0.0

    def test_flat_objective_collapses_to_singleton(self):
        # Equal shortfalls and gains: every q gives 0.2^2/0.1 = 0.4.
        q, ratio = minimize_pair(0.2, 0.1, 0.2, 0.1)
        assert q == 1.0
        assert ratio == pytest.approx(0.4, abs=1e-15)

    def test_interior_optimum(self):
        # Frozen from the grid oracle at q_step 1e-6.
        q, ratio = minimize_pair(0.1, 0.01, 0.3, 0.2)
        assert q == pytest.approx(0.6052631578947367, abs=1e-12)
        assert ratio == pytest.approx(0.37673130193905824, abs=1e-12)
        assert grid_oracle([0.1, 0.3], [0.01, 0.2], 1e-6) == pytest.approx(ratio, abs=1e-6)
        # Both endpoints are strictly worse.
        assert ratio < 0.1**2 / 0.01
        assert ratio < 0.3**2 / 0.2

    def test_matches_grid_on_random_pairs(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            d1, d2 = rng.uniform(0.0, 2.0, 2)
            g1, g2 = rng.uniform(1e-4, 0.25, 2)
            _, ratio = minimize_pair(d1, g1, d2, g2)
            oracle = grid_oracle([d1, d2], [g1, g2], 1e-4)
            assert ratio <= oracle + 1e-6

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            minimize_pair(0.1, 0.0, 0.2, 0.1)
        with pytest.raises(ValueError):
            minimize_pair(-0.1, 0.1, 0.2, 0.1)


class TestGridOracle:
    def test_singleton_is_exact(self):
        assert grid_oracle([0.3], [0.1], 0.01) == pytest.approx(0.3**2 / 0.1, abs=1e-15)

    def test_shortfall_scaling_is_quadratic(self):
        d = [0.4, 0.9, 0.2]
        g = [0.05, 0.2, 0.01]
        base = grid_oracle(d, g, 1e-3)
        scaled = grid_oracle([2.5 * x for x in d], g, 1e-3)
        assert scaled == pytest.approx(2.5**2 * base, rel=1e-12)

    def test_gain_scaling_is_inverse(self):
        d = [0.4, 0.9, 0.2]
        g = [0.05, 0.2, 0.01]
        base = grid_oracle(d, g, 1e-3)
        scaled = grid_oracle(d, [3.0 * x for x in g], 1e-3)
        assert scaled == pytest.approx(base / 3.0, rel=1e-12)

    def test_step_validation(self):
        with pytest.raises(ValueError):
            grid_oracle([0.1], [0.1], 0.0)
        with pytest.raises(ValueError):
            grid_oracle([0.1], [0.1], 0.6)


class TestActionDistribution:
    def test_probabilities_must_sum_to_one(self):
        with pytest.raises(ValueError):
            ActionDistribution(((0, 0.5), (1, 0.4)))

    def test_probabilities_must_be_positive(self):
        with pytest.raises(ValueError):
            ActionDistribution(((0, 1.2), (1, -0.2)))

    def test_sampling_frequencies(self):
        dist = ActionDistribution(((2, 0.25), (5, 0.75)))
        rng = np.random.default_rng(0)
        draws = [dist.sample(rng) for _ in range(20_000)]
        assert abs(np.mean([d == 2 for d in draws]) - 0.25) < 0.01

    def test_point_mass_needs_no_randomness(self):
        assert point_mass(3).sample(None) == 3


class TestMinimizeInfoRatio:
    def test_zero_delta_shortcut(self):
        dist = minimize_info_ratio([0.4, 0.0, 0.0], [0.1, 0.2, 0.3])
        assert dist.support == ((1, 1.0),)

    def test_flat_instance_picks_lowest_index(self):
        dist = minimize_info_ratio([0.3, 0.3, 0.3], [0.1, 0.1, 0.1])
        assert dist.support == ((0, 1.0),)

    def test_two_action_interior_mix(self):
        dist = minimize_info_ratio([0.1, 0.3], [0.01, 0.2])
        assert len(dist.support) == 2
        (i, q), (j, p) = dist.support
        assert (i, j) == (0, 1)
        assert q == pytest.approx(0.6052631578947367, abs=1e-12)
        assert q + p == pytest.approx(1.0, abs=1e-15)

    def test_support_pair_agrees_with_pair_solver(self):
        rng = np.random.default_rng(23)
        for _ in range(100):
            size = int(rng.integers(2, 9))
            d = rng.uniform(0.01, 2.0, size)
            g = rng.uniform(1e-4, 0.25, size)
            dist = minimize_info_ratio(d, g)
            if len(dist.support) == 2:
                (i, q), (j, _) = dist.support
                q_pair, _ = minimize_pair(d[i], g[i], d[j], g[j])
                assert q == q_pair

    def test_never_loses_to_grid_oracle(self):
        rng = np.random.default_rng(31)
        for _ in range(200):
            size = int(rng.integers(2, 33))
            d = rng.uniform(0.0, 2.0, size)
            g = rng.uniform(1e-4, 0.25, size)
            dist = minimize_info_ratio(d, g)
            assert len(dist.support) <= 2
            ratio = distribution_ratio(dist, d, g)
            assert ratio <= grid_oracle(d, g, 1e-3) + 1e-6

    def test_beats_every_point_mass(self):
        rng = np.random.default_rng(37)
        for _ in range(100):
            size = int(rng.integers(2, 17))
            d = rng.uniform(0.01, 2.0, size)
            g = rng.uniform(1e-4, 0.25, size)
            best = distribution_ratio(minimize_info_ratio(d, g), d, g)
            for k in range(size):
                assert best <= d[k] ** 2 / g[k] + 1e-12

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(st.floats(0.01, 2.0), min_size=2, max_size=8),
        st.floats(0.1, 10.0),
        st.integers(0, 10**6),
    )
    def test_homogeneity(self, deltas, c, gain_seed):
        rng = np.random.default_rng(gain_seed)
        d = np.array(deltas)
        g = rng.uniform(1e-4, 0.25, d.size)
        base = minimize_info_ratio(d, g)
        scaled_d = minimize_info_ratio(c * d, g)
        scaled_g = minimize_info_ratio(d, c * g)
        # Scaling leaves the optimizer unchanged up to float noise in q.
        for scaled in (scaled_d, scaled_g):
            assert [i for i, _ in scaled.support] == [i for i, _ in base.support]
            for (_, p_scaled), (_, p_base) in zip(scaled.support, base.support):
                assert p_scaled == pytest.approx(p_base, abs=1e-10)
        r = distribution_ratio(base, d, g)
        assert distribution_ratio(scaled_d, c * d, g) == pytest.approx(c**2 * r, rel=1e-10)
        assert distribution_ratio(scaled_g, d, c * g) == pytest.approx(r / c, rel=1e-10)

    def test_input_validation(self):
        with pytest.raises(ValueError):
            minimize_info_ratio([], [])
        with pytest.raises(ValueError):
            minimize_info_ratio([0.1], [0.0])
        with pytest.raises(ValueError):
            minimize_info_ratio([-0.1], [0.1])
