"""Convex display-selection objective and its multiplicative fixed-point solver.

The selection distribution mu lives on the interior of the probability
simplex. Its objective mixes four terms, each gated by a binary knob:

  eta   * sum_i mu_i * d2(i, cluster(i))     closeness to cluster centroids
  alpha * sum_k p_k log p_k, p = C' mu       entropy of per-cluster mass
  beta  * sum_i mu_i sum_c F_ic log F_ic     score entropy near the boundary
          sum_i mu_i log mu_i                peakedness regularizer (always on)

Stationarity of the Lagrangian gives a multiplicative update: exponentiate
the negated per-sample costs and renormalize. Only the alpha term couples
samples through mu, so with alpha off the update is a constant map and one
step lands exactly on the optimum; with alpha on, the raw iteration can
oscillate between symmetric configurations and is damped by averaging.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import ValidationError

# lower clamp applied to cluster masses before their logarithm; the masses
# are analytically positive, this guards float underflow only
MASS_FLOOR = 1e-12

SIMPLEX_TOL = 1e-9


@dataclass(frozen=True)
class LambdaConfig:
    """Binary switches for the diversity (alpha), ambiguity (beta) and
    representativity (eta) terms."""

    alpha: int
    beta: int
    eta: int

    def __post_init__(self):
        for name, v in (("alpha", self.alpha), ("beta", self.beta), ("eta", self.eta)):
            if v not in (0, 1):
                raise ValidationError(f"{name} must be 0 or 1, got {v!r}")

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.alpha, self.beta, self.eta)


@dataclass(frozen=True)
class Instance:
    """One selection problem: cluster geometry, scores and active criteria."""

    D: np.ndarray  # (n, K) squared distances to centroids
    C: np.ndarray  # (n, K) one-hot cluster indicators
    F: np.ndarray  # (n, 2) normalized score rows
    lam: LambdaConfig

    def __post_init__(self):
        D, C, F = self.D, self.C, self.F
        if D.ndim != 2 or C.shape != D.shape:
            raise ValidationError("D and C must share an (n, K) shape")
        n = D.shape[0]
        if F.shape != (n, 2):
            raise ValidationError(f"F must have shape ({n}, 2), got {F.shape}")
        if np.any(D < 0) or not np.all(np.isfinite(D)):
            raise ValidationError("D entries must be finite and non-negative")
        if not np.all((C == 0) | (C == 1)) or not np.all(C.sum(axis=1) == 1):
            raise ValidationError("C rows must be one-hot")
        if np.any(C.sum(axis=0) == 0):
            raise ValidationError("every cluster must contain at least one sample")
        if np.any(F <= 0) or np.any(F >= 1):
            raise ValidationError("F entries must lie strictly inside (0, 1)")
        if np.any(np.abs(F.sum(axis=1) - 1.0) > 1e-9):
            raise ValidationError("F rows must sum to 1")

    @property
    def n(self) -> int:
        return self.D.shape[0]


@dataclass(frozen=True)
class MembershipVector:
    """Strictly positive selection probabilities over the candidate pool."""

    mu: np.ndarray
    converged: bool = True
    iterations: int = 0

    def __post_init__(self):
        mu = self.mu
        if np.any(mu <= 0):
            raise ValidationError("membership entries must be strictly positive")
        if abs(float(mu.sum()) - 1.0) > SIMPLEX_TOL:
            raise ValidationError("membership must sum to 1")


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-9
    max_fixpoint_iters: int = 1000
    damping: float = 0.5

    def __post_init__(self):
        if self.tol <= 0:
            raise ValidationError("tol must be positive")
        if not 0.0 < self.damping <= 1.0:
            raise ValidationError("damping must lie in (0, 1]")
        if self.max_fixpoint_iters < 1:
            raise ValidationError("max_fixpoint_iters must be at least 1")


def _per_sample_costs(instance: Instance) -> np.ndarray:
    """mu-independent part of the exponent: eta and beta contributions."""
    lam = instance.lam
    cost = np.zeros(instance.n)
    if lam.eta:
        cost += (instance.D * instance.C).sum(axis=1)
    if lam.beta:
        cost += (instance.F * np.log(instance.F)).sum(axis=1)
    return cost


def objective(instance: Instance, mu: np.ndarray) -> float:
    """Evaluate the selection objective at an interior point of the simplex."""
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (instance.n,):
        raise ValidationError(f"mu must have shape ({instance.n},)")
    if np.any(mu <= 0):
        raise ValidationError("objective is defined for strictly positive mu only")
    lam = instance.lam
    value = float(mu @ np.log(mu))
    if lam.eta:
        value += float(mu @ (instance.D * instance.C).sum(axis=1))
    if lam.alpha:
        p = np.maximum(instance.C.T @ mu, MASS_FLOOR)
        value += float(p @ np.log(p))
    if lam.beta:
        value += float(mu @ (instance.F * np.log(instance.F)).sum(axis=1))
    return value


def fixpoint_step(instance: Instance, mu: np.ndarray) -> np.ndarray:
    """One undamped multiplicative update, returned normalized.

    The exponent is accumulated in the log domain and max-shifted before the
    single exp, so large squared distances cannot overflow.
    """
    mu = np.asarray(mu, dtype=float)
    if np.any(mu <= 0):
        raise ValidationError("fixpoint_step needs strictly positive mu")
    exponent = -_per_sample_costs(instance)
    if instance.lam.alpha:
        p = instance.C.T @ mu
        assert np.all(p > 0), "cluster lost all mass despite positive mu"
        exponent -= instance.C @ (np.log(np.maximum(p, MASS_FLOOR)) + 1.0)
    exponent -= exponent.max()
    # floor the shifted exponent so exp underflow cannot zero an entry;
    # anything this small is already ~1e-304 relative to the top entry
    raw = np.exp(np.maximum(exponent, -700.0))
    return raw / raw.sum()


def solve(
    instance: Instance,
    config: Optional[SolverConfig] = None,
    on_iterate=None,
) -> MembershipVector:
    """Iterate the damped fixed-point update from the uniform start.

    With alpha off the update has no mu dependence, so the first undamped
    step is already the exact optimum. Otherwise iterates
    mu <- (1 - damping) * mu + damping * step(mu) until the l1 change drops
    below tol; if the budget runs out, the best iterate seen is returned
    with converged=False. ``on_iterate`` is a debugging hook called with
    every accepted iterate.
    """
    config = config or SolverConfig()
    n = instance.n
    mu = np.full(n, 1.0 / n)

    if not instance.lam.alpha:
        mu = fixpoint_step(instance, mu)
        if on_iterate is not None:
            on_iterate(mu)
        return MembershipVector(mu=mu, iterations=1)

    gamma = config.damping
    best_mu, best_obj = mu, objective(instance, mu)
    for it in range(1, config.max_fixpoint_iters + 1):
        stepped = fixpoint_step(instance, mu)
        new = (1.0 - gamma) * mu + gamma * stepped
        change = float(np.abs(new - mu).sum())
        mu = new / new.sum()
        if on_iterate is not None:
            on_iterate(mu)
        obj = objective(instance, mu)
        if obj < best_obj:
            best_mu, best_obj = mu, obj
        if change < config.tol:
            return MembershipVector(mu=mu, converged=True, iterations=it)
    return MembershipVector(mu=best_mu, converged=False, iterations=config.max_fixpoint_iters)


def select_display(
    mu: np.ndarray, candidate_ids: Sequence[str], b: int
) -> list[str]:
    """Ids of the b largest memberships; exact ties go to the lower index."""
    mu = np.asarray(mu, dtype=float)
    if len(candidate_ids) != mu.shape[0]:
        raise ValidationError("candidate_ids must align with mu")
    if not 0 < b <= mu.shape[0]:
        raise ValidationError(f"display size {b} exceeds {mu.shape[0]} candidates")
    order = np.argsort(-mu, kind="stable")
    return [candidate_ids[i] for i in order[:b]]


def instance_to_dict(instance: Instance) -> dict:
    return {
        "D": instance.D.tolist(),
        "C": instance.C.tolist(),
        "F": instance.F.tolist(),
        "lambda": {
            "alpha": instance.lam.alpha,
            "beta": instance.lam.beta,
            "eta": instance.lam.eta,
        },
    }


def instance_from_dict(data: dict) -> Instance:
    lam = data["lambda"]
    return Instance(
        D=np.asarray(data["D"], dtype=float),
        C=np.asarray(data["C"], dtype=float),
        F=np.asarray(data["F"], dtype=float),
        lam=LambdaConfig(alpha=lam["alpha"], beta=lam["beta"], eta=lam["eta"]),
    )


def save_instance(instance: Instance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(instance_to_dict(instance)))


def load_instance(path: str | Path) -> Instance:
    return instance_from_dict(json.loads(Path(path).read_text()))
