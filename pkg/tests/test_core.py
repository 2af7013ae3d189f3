"""Belief-state types: conjugate updates, posterior means, counting invariants."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from banditalign.core import (
    Action,
    ActionKind,
    BeliefState,
    BetaPosterior,
    apply,
    env_arm,
    expected_reward,
    expected_rewards,
    human_query,
    mean,
    update,
)


class TestBetaPosterior:
    def test_prior_update_with_one(self):
        assert update(BetaPosterior(1, 1), 1) == BetaPosterior(2, 1)

    def test_prior_update_with_zero(self):
        assert update(BetaPosterior(1, 1), 0) == BetaPosterior(1, 2)

    def test_update_touches_only_matching_count(self):
        assert update(BetaPosterior(3, 7), 1) == BetaPosterior(4, 7)

    def test_update_rejects_nonbinary(self):
        with pytest.raises(ValueError):
            update(BetaPosterior(1, 1), 2)

    def test_mean_examples(self):
        assert mean(BetaPosterior(1, 1)) == 0.5
        assert mean(BetaPosterior(2, 1)) == pytest.approx(2 / 3)
        assert mean(BetaPosterior(4, 7)) == pytest.approx(4 / 11)

    def test_counts_never_below_prior(self):
        with pytest.raises(ValueError):
            BetaPosterior(0.5, 1.0)

    @given(st.lists(st.integers(0, 1), max_size=60), st.randoms())
    def test_update_order_does_not_matter(self, bits, pyrandom):
        shuffled = list(bits)
        pyrandom.shuffle(shuffled)
        p = q = BetaPosterior()
        for o in bits:
            p = update(p, o)
        for o in shuffled:
            q = update(q, o)
        assert p == q
        assert p.alpha == 1 + sum(bits)
        assert p.beta == 1 + len(bits) - sum(bits)

    @given(st.integers(0, 200), st.integers(0, 200))
    def test_mean_stays_interior(self, ones, zeros):
        p = BetaPosterior(1 + ones, 1 + zeros)
        assert 0.0 < p.mean < 1.0


class TestAction:
    def test_flat_layout_puts_arms_first(self):
        assert env_arm(3).flat(8) == 3
        assert human_query(3).flat(8) == 11

    def test_flat_round_trip(self):
        for flat in range(16):
            assert Action.from_flat(flat, 8).flat(8) == flat

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            env_arm(8).flat(8)
        with pytest.raises(ValueError):
            Action.from_flat(16, 8)


class TestBeliefState:
    def test_prior_shape(self):
        b = BeliefState.prior(5)
        assert b.n_arms == 5
        assert b.t == 0
        assert b.env(2) == BetaPosterior(1, 1)
        assert b.pref(4) == BetaPosterior(1, 1)

    def test_apply_env_updates_env_only(self):
        b = apply(BeliefState.prior(4), env_arm(0), 1)
        assert b.env(0) == BetaPosterior(2, 1)
        assert b.pref(0) == BetaPosterior(1, 1)
        assert all(b.env(i) == BetaPosterior(1, 1) for i in range(1, 4))
        assert b.t == 1

    def test_apply_query_updates_pref_only(self):
        b = apply(BeliefState.prior(4), human_query(3), 0)
        assert b.pref(3) == BetaPosterior(1, 2)
        assert b.env(3) == BetaPosterior(1, 1)
        assert b.t == 1

    def test_apply_leaves_original_untouched(self):
        b0 = BeliefState.prior(3)
        apply(b0, env_arm(1), 1)
        assert b0.env(1) == BetaPosterior(1, 1)
        assert b0.t == 0

    def test_observation_count_tracks_t(self):
        rng = np.random.default_rng(0)
        b = BeliefState.prior(6)
        for _ in range(300):
            before = b.observation_count()
            a = Action(
                ActionKind.ENV_ARM if rng.random() < 0.5 else ActionKind.HUMAN_QUERY,
                int(rng.integers(6)),
            )
            b = apply(b, a, int(rng.integers(2)))
            assert b.observation_count() == before + 1
        assert b.observation_count() == b.t == 300


class TestExpectedReward:
    def test_symmetric_prior_gives_half(self):
        assert expected_reward(BeliefState.prior(2), 0) == 0.5

    def test_aligned_certainty_gives_one(self):
        big = 1e9
        b = BeliefState(
            np.array([big]), np.array([1.0]), np.array([big]), np.array([1.0])
        )
        assert expected_reward(b, 0) == pytest.approx(1.0, abs=1e-8)

    def test_flat_preference_pins_reward_at_half(self):
        # m_theta = 1/2 makes the reward 1/2 no matter the environment mean.
        b = apply(BeliefState.prior(3), env_arm(1), 1)
        assert b.env(1).mean == pytest.approx(2 / 3)
        assert expected_reward(b, 1) == pytest.approx(0.5)

    def test_vectorized_matches_scalar(self):
        rng = np.random.default_rng(1)
        b = BeliefState.prior(8)
        for _ in range(50):
            a = Action.from_flat(int(rng.integers(16)), 8)
            b = apply(b, a, int(rng.integers(2)))
        vec = expected_rewards(b)
        assert vec.shape == (8,)
        for arm in range(8):
            assert vec[arm] == expected_reward(b, arm)

    def test_rewards_bounded(self):
        rng = np.random.default_rng(2)
        b = BeliefState.prior(4)
        for _ in range(200):
            b = apply(b, Action.from_flat(int(rng.integers(8)), 4), int(rng.integers(2)))
        assert np.all(expected_rewards(b) >= 0.0)
        assert np.all(expected_rewards(b) <= 1.0)
