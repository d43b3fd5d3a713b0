"""Linear max-margin classifier trained on the labels gathered so far.

Full-batch subgradient descent on class-weighted L2-regularized hinge loss.
Each epoch's step is accepted only if it does not increase the objective
(halving the step otherwise), so the loss curve is non-increasing by
construction and training is fully deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ValidationError

# scores are clamped away from {0, 1} before any logarithm downstream
EPS_CLAMP = 1e-6


@dataclass(frozen=True)
class ClassifierConfig:
    epochs: int = 300
    lr0: float = 1.0
    lambda_reg: float = 1e-3


@dataclass(frozen=True)
class LinearModel:
    weights: np.ndarray
    bias: float
    training_meta: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        return {
            "weights": [float(w) for w in self.weights],
            "bias": float(self.bias),
            "training_meta": dict(self.training_meta),
        }

    @staticmethod
    def from_dict(data: dict) -> "LinearModel":
        return LinearModel(
            weights=np.asarray(data["weights"], dtype=float),
            bias=float(data["bias"]),
            training_meta=dict(data.get("training_meta", {})),
        )


def _hinge_objective(
    X: np.ndarray, y: np.ndarray, c: np.ndarray, w: np.ndarray, b: float, lam: float
) -> float:
    margins = y * (X @ w + b)
    hinge = np.maximum(0.0, 1.0 - margins)
    return 0.5 * lam * float(w @ w) + float(c @ hinge) / len(y)


def _hinge_subgradient(
    X: np.ndarray, y: np.ndarray, c: np.ndarray, w: np.ndarray, b: float, lam: float
) -> tuple[np.ndarray, float]:
    margins = y * (X @ w + b)
    active = margins < 1.0
    cy = c * y * active
    grad_w = lam * w - (X.T @ cy) / len(y)
    grad_b = -float(cy.sum()) / len(y)
    return grad_w, grad_b


def train(
    X: np.ndarray, y: np.ndarray, config: Optional[ClassifierConfig] = None
) -> LinearModel:
    """Fit the linear model on labels in {0, 1}.

    Classes are weighted by inverse frequency so the rare positive class is
    not swamped. A single-class batch yields the biased fallback model that
    predicts the seen class everywhere.
    """
    config = config or ClassifierConfig()
    X = np.atleast_2d(np.asarray(X, dtype=float))
    y = np.asarray(y, dtype=int).ravel()
    if X.shape[0] == 0:
        raise ValidationError("training set is empty")
    if X.shape[0] != y.shape[0]:
        raise ValidationError(
            f"feature/label count mismatch: {X.shape[0]} vs {y.shape[0]}"
        )
    if not set(np.unique(y)) <= {0, 1}:
        raise ValidationError("labels must be binary in {0, 1}")

    n, dim = X.shape
    classes = np.unique(y)
    meta = {
        "epochs": config.epochs,
        "lr0": config.lr0,
        "lambda_reg": config.lambda_reg,
    }

    if len(classes) == 1:
        # nothing to separate yet: predict the seen class everywhere
        bias = 1.0 if classes[0] == 1 else -1.0
        meta["class_weights"] = {int(classes[0]): 1.0}
        meta["one_class"] = True
        return LinearModel(weights=np.zeros(dim), bias=bias, training_meta=meta)

    counts = {cls: int((y == cls).sum()) for cls in (0, 1)}
    class_weight = {cls: n / (2.0 * counts[cls]) for cls in (0, 1)}
    c = np.array([class_weight[int(label)] for label in y])
    sign = 2.0 * y - 1.0
    meta["class_weights"] = {k: float(v) for k, v in class_weight.items()}

    w = np.zeros(dim)
    b = 0.0
    obj = _hinge_objective(X, sign, c, w, b, config.lambda_reg)
    for t in range(config.epochs):
        grad_w, grad_b = _hinge_subgradient(X, sign, c, w, b, config.lambda_reg)
        step = config.lr0 / (1.0 + t)
        while step > 1e-16:
            w_new = w - step * grad_w
            b_new = b - step * grad_b
            obj_new = _hinge_objective(X, sign, c, w_new, b_new, config.lambda_reg)
            if obj_new <= obj:
                w, b, obj = w_new, b_new, obj_new
                break
            step *= 0.5

    return LinearModel(weights=w, bias=float(b), training_meta=meta)


def raw_score(model: LinearModel, features: np.ndarray) -> np.ndarray | float:
    """Signed decision value w.x + b; the label boundary sits at zero."""
    feats = np.asarray(features, dtype=float)
    if feats.shape[-1] != model.weights.shape[0]:
        raise ValidationError(
            f"feature dimension {feats.shape[-1]} does not match model "
            f"dimension {model.weights.shape[0]}"
        )
    scores = feats @ model.weights + model.bias
    return float(scores) if feats.ndim == 1 else scores


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x, dtype=float)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def score_matrix(model: LinearModel, X: np.ndarray) -> np.ndarray:
    """Per-sample rows (g, 1-g): logistic-squashed raw scores, clamped.

    Rows sum to one and every entry stays inside [EPS_CLAMP, 1 - EPS_CLAMP]
    so entropy terms downstream never see log(0).
    """
    scores = np.atleast_1d(np.asarray(raw_score(model, np.atleast_2d(X))))
    g = np.clip(_sigmoid(scores), EPS_CLAMP, 1.0 - EPS_CLAMP)
    return np.column_stack([g, 1.0 - g])
