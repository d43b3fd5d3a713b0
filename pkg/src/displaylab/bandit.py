"""Stateless Q-learning over the 7 criterion configurations.

One value estimate per action, no state transitions: the one-step update
q(a) <- q(a) + lr * (reward - q(a)) keeps every estimate inside [0, 1] as
long as rewards and the initial values are. Exploration is epsilon-greedy
with multiplicative decay per update.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .classifier import LinearModel, raw_score
from .errors import ValidationError
from .membership import LambdaConfig
from .strategies import ACTION_SPACE


@dataclass(frozen=True)
class BanditConfig:
    lr: float = 0.5
    epsilon0: float = 0.5
    epsilon_decay: float = 0.8
    q_init: float = 1.0
    discount: float = 1.0  # recorded only; one-step updates have no successor

    def __post_init__(self):
        if not 0.0 < self.lr <= 1.0:
            raise ValidationError("lr must lie in (0, 1]")
        if not 0.0 <= self.epsilon0 <= 1.0:
            raise ValidationError("epsilon0 must lie in [0, 1]")
        if not 0.0 < self.epsilon_decay <= 1.0:
            raise ValidationError("epsilon_decay must lie in (0, 1]")
        if not 0.0 <= self.q_init <= 1.0:
            raise ValidationError("q_init must lie in [0, 1]")
        if not 0.0 <= self.discount <= 1.0:
            raise ValidationError("discount must lie in [0, 1]")


@dataclass(frozen=True)
class QTable:
    """Per-action value estimates, aligned with ACTION_SPACE."""

    q: tuple[float, ...]
    counts: tuple[int, ...]
    lr: float
    epsilon: float
    epsilon_decay: float
    discount: float

    def __post_init__(self):
        if len(self.q) != len(ACTION_SPACE) or len(self.counts) != len(ACTION_SPACE):
            raise ValidationError(
                f"q table must carry exactly {len(ACTION_SPACE)} actions"
            )

    def value_of(self, action: LambdaConfig) -> float:
        return self.q[ACTION_SPACE.index(action)]


def new_qtable(config: BanditConfig | None = None) -> QTable:
    config = config or BanditConfig()
    k = len(ACTION_SPACE)
    return QTable(
        q=(config.q_init,) * k,
        counts=(0,) * k,
        lr=config.lr,
        epsilon=config.epsilon0,
        epsilon_decay=config.epsilon_decay,
        discount=config.discount,
    )


def choose_action(qtable: QTable, rng: np.random.Generator) -> LambdaConfig:
    """Epsilon-greedy pick; greedy ties resolve to the lowest action index.

    Always draws exactly one uniform variate for the explore/exploit coin,
    so the rng advances the same way whether or not exploration triggers.
    """
    if rng.random() < qtable.epsilon:
        return ACTION_SPACE[int(rng.integers(len(ACTION_SPACE)))]
    return ACTION_SPACE[int(np.argmax(qtable.q))]


def update(qtable: QTable, action: LambdaConfig, reward: float) -> QTable:
    """Pure one-step value update; also decays epsilon."""
    if not (isinstance(reward, (int, float)) and math.isfinite(reward)):
        raise ValidationError(f"reward must be finite, got {reward!r}")
    if not 0.0 <= reward <= 1.0:
        raise ValidationError(f"reward must lie in [0, 1], got {reward}")
    idx = ACTION_SPACE.index(action)
    q = list(qtable.q)
    q[idx] = q[idx] + qtable.lr * (reward - q[idx])
    counts = list(qtable.counts)
    counts[idx] += 1
    return replace(
        qtable,
        q=tuple(q),
        counts=tuple(counts),
        epsilon=qtable.epsilon * qtable.epsilon_decay,
    )


def adversarial_reward(
    model: LinearModel, features: np.ndarray, labels: np.ndarray | list[int]
) -> float:
    """Error of the pre-update classifier on the freshly labeled display.

    Balanced error when the display holds both classes, plain error rate
    otherwise; either way the display is rewarded for challenging the
    classifier, with values in [0, 1].
    """
    y = np.asarray(labels, dtype=int).ravel()
    if y.size == 0:
        raise ValidationError("display must be non-empty")
    X = np.atleast_2d(np.asarray(features, dtype=float))
    if X.shape[0] != y.size:
        raise ValidationError("features and labels must align")
    preds = (np.asarray(raw_score(model, X)) > 0).astype(int)
    pos = y == 1
    neg = ~pos
    if pos.any() and neg.any():
        fnr = float((preds[pos] != 1).mean())
        fpr = float((preds[neg] != 0).mean())
        return 0.5 * (fnr + fpr)
    return float((preds != y).mean())
