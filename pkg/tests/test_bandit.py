import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from displaylab.bandit import (
    BanditConfig,
    adversarial_reward,
    choose_action,
    new_qtable,
    update,
)
from displaylab.classifier import LinearModel
from displaylab.errors import ValidationError
from displaylab.membership import LambdaConfig
from displaylab.strategies import ACTION_SPACE


class TestChooseAction:
    def test_greedy_picks_unique_max(self):
        table = new_qtable(BanditConfig(epsilon0=0.0, q_init=0.0))
        q = list(table.q)
        q[ACTION_SPACE.index(LambdaConfig(1, 1, 1))] = 0.9
        table = dataclasses.replace(table, q=tuple(q))
        got = choose_action(table, np.random.default_rng(0))
        assert got == LambdaConfig(1, 1, 1)

    def test_all_equal_ties_to_first_action(self):
        table = new_qtable(BanditConfig(epsilon0=0.0))
        got = choose_action(table, np.random.default_rng(0))
        assert got == LambdaConfig(0, 0, 1)

    def test_full_exploration_reproducible(self):
        table = new_qtable(BanditConfig(epsilon0=1.0))
        a = [choose_action(table, np.random.default_rng(5)) for _ in range(1)]
        b = [choose_action(table, np.random.default_rng(5)) for _ in range(1)]
        assert a == b
        seq = []
        rng = np.random.default_rng(5)
        for _ in range(20):
            seq.append(choose_action(table, rng))
        assert len(set(seq)) > 1  # actually explores


class TestUpdate:
    def test_arithmetic(self):
        table = new_qtable(BanditConfig(lr=0.1, q_init=0.5))
        action = ACTION_SPACE[0]
        table = update(table, action, 1.0)
        assert table.value_of(action) == pytest.approx(0.55)

    def test_reward_equal_to_q_is_fixed_point(self):
        table = new_qtable(BanditConfig(lr=0.5, q_init=0.7))
        action = ACTION_SPACE[3]
        updated = update(table, action, 0.7)
        assert updated.q == table.q

    def test_recurrence_one_zero_one(self):
        table = new_qtable(BanditConfig(lr=0.5, q_init=1.0))
        action = ACTION_SPACE[2]
        expected = [1.0, 0.5, 0.75]
        for reward, want in zip([1.0, 0.0, 1.0], expected):
            table = update(table, action, reward)
            assert table.value_of(action) == pytest.approx(want)

    def test_counts_and_epsilon_decay(self):
        table = new_qtable(BanditConfig(epsilon0=0.5, epsilon_decay=0.8))
        action = ACTION_SPACE[0]
        table = update(table, action, 0.3)
        assert table.counts[0] == 1
        assert table.epsilon == pytest.approx(0.4)

    def test_reward_out_of_range(self):
        table = new_qtable()
        with pytest.raises(ValidationError):
            update(table, ACTION_SPACE[0], 1.5)
        with pytest.raises(ValidationError):
            update(table, ACTION_SPACE[0], float("nan"))

    def test_pure_transition(self):
        table = new_qtable()
        a = update(table, ACTION_SPACE[1], 0.25)
        b = update(table, ACTION_SPACE[1], 0.25)
        assert a == b
        assert table.counts[1] == 0  # original untouched


class TestAdversarialReward:
    def make_model(self):
        # predicts positive iff x0 > 0
        return LinearModel(weights=np.array([1.0]), bias=0.0)

    def test_all_wrong_is_one(self):
        model = self.make_model()
        X = np.array([[-1.0], [-2.0]])
        assert adversarial_reward(model, X, [1, 1]) == 1.0

    def test_perfect_is_zero(self):
        model = self.make_model()
        X = np.array([[1.0], [-1.0]])
        assert adversarial_reward(model, X, [1, 0]) == 0.0

    def test_balanced_error_arithmetic(self):
        model = self.make_model()
        # 2 positives with 1 missed, 2 negatives both right
        X = np.array([[1.0], [-1.0], [-2.0], [-3.0]])
        y = [1, 1, 0, 0]
        assert adversarial_reward(model, X, y) == pytest.approx(0.25)

    def test_empty_display_rejected(self):
        with pytest.raises(ValidationError):
            adversarial_reward(self.make_model(), np.empty((0, 1)), [])


class TestInvariants:
    def test_dominant_action_wins_with_greedy_policy(self):
        # constant rewards: one action pays 0.9, the rest 0.1
        table = new_qtable(BanditConfig(lr=0.5, epsilon0=0.0, q_init=1.0))
        rng = np.random.default_rng(0)
        best = LambdaConfig(1, 0, 1)
        pulls = []
        for _ in range(20):
            action = choose_action(table, rng)
            pulls.append(action)
            reward = 0.9 if action == best else 0.1
            table = update(table, action, reward)
        assert pulls[-1] == best
        assert choose_action(table, np.random.default_rng(1)) == best


@settings(max_examples=200, deadline=None)
@given(
    rewards=st.lists(st.floats(0.0, 1.0), min_size=1, max_size=30),
    idx=st.integers(0, 6),
    lr=st.floats(0.05, 1.0),
)
def test_q_stays_in_unit_interval(rewards, idx, lr):
    table = new_qtable(BanditConfig(lr=lr, q_init=1.0))
    for r in rewards:
        table = update(table, ACTION_SPACE[idx], r)
        assert all(0.0 <= v <= 1.0 for v in table.q)
