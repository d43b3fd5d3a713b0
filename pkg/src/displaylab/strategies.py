"""Display-selection strategies behind one interface.

Criterion strategies delegate to the membership solver; random, maxmin and
uncertainty are the classic baselines. Every strategy sees the same refreshed
cluster model and score matrix for its iteration, so comparisons isolate the
selection rule itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .clustering import ClusterModel
from .errors import PoolExhaustedError, ValidationError
from .membership import Instance, LambdaConfig, SolverConfig, select_display, solve

# canonical 7-action space: every binary (alpha, beta, eta) except all-off,
# ordered lexicographically
ACTION_SPACE: tuple[LambdaConfig, ...] = tuple(
    LambdaConfig(alpha=a, beta=b, eta=e)
    for a in (0, 1)
    for b in (0, 1)
    for e in (0, 1)
    if (a, b, e) != (0, 0, 0)
)

_NAMED_LAMBDAS = {
    "rep": LambdaConfig(alpha=0, beta=0, eta=1),
    "div": LambdaConfig(alpha=1, beta=0, eta=0),
    "amb": LambdaConfig(alpha=0, beta=1, eta=0),
    "rep+div": LambdaConfig(alpha=1, beta=0, eta=1),
    "rep+amb": LambdaConfig(alpha=0, beta=1, eta=1),
    "div+amb": LambdaConfig(alpha=1, beta=1, eta=0),
    "flat": LambdaConfig(alpha=1, beta=1, eta=1),
}

STRATEGY_NAMES = tuple(_NAMED_LAMBDAS) + ("random", "maxmin", "uncertainty", "rl")


@dataclass(frozen=True)
class StrategyKind:
    """Either a fixed criterion configuration or a named baseline."""

    kind: str  # criterion | random | maxmin | uncertainty
    lam: Optional[LambdaConfig] = None

    def __post_init__(self):
        if self.kind == "criterion":
            if self.lam is None:
                raise ValidationError("criterion strategy needs a LambdaConfig")
            if self.lam.as_tuple() == (0, 0, 0):
                raise ValidationError("criterion requires at least one active term")
        elif self.kind not in ("random", "maxmin", "uncertainty"):
            raise ValidationError(f"unknown strategy kind {self.kind!r}")
        elif self.lam is not None:
            raise ValidationError(f"{self.kind} strategy takes no LambdaConfig")


def criterion(lam: LambdaConfig) -> StrategyKind:
    return StrategyKind(kind="criterion", lam=lam)


RANDOM = StrategyKind(kind="random")
MAXMIN = StrategyKind(kind="maxmin")
UNCERTAINTY = StrategyKind(kind="uncertainty")


def lambda_name(lam: LambdaConfig) -> str:
    """Human-readable name of a criterion configuration, e.g. 'rep+div'."""
    for name, candidate in _NAMED_LAMBDAS.items():
        if candidate == lam:
            return name
    return f"a{lam.alpha}b{lam.beta}e{lam.eta}"


def parse_strategy(name: str) -> StrategyKind | str:
    """Map a CLI/config name to a StrategyKind; 'rl' is resolved per
    iteration by the session's bandit and is returned as the marker string."""
    if name in _NAMED_LAMBDAS:
        return criterion(_NAMED_LAMBDAS[name])
    if name in ("random", "maxmin", "uncertainty"):
        return StrategyKind(kind=name)
    if name == "rl":
        return "rl"
    raise ValidationError(
        f"unknown strategy {name!r}; choose one of {', '.join(STRATEGY_NAMES)}"
    )


@dataclass(frozen=True)
class SelectionContext:
    """Everything one iteration's selection rule may look at.

    Candidate arrays are aligned with candidate_ids, which follow pool order.
    """

    candidate_ids: tuple[str, ...]
    candidate_features: np.ndarray  # (n, d)
    labeled_features: np.ndarray  # (m, d); m may be 0
    cluster_model: Optional[ClusterModel]
    score_matrix: Optional[np.ndarray]  # (n, 2)
    raw_scores: Optional[np.ndarray]  # (n,)
    seed: int = 0
    solver: SolverConfig = SolverConfig()


def propose_display(kind: StrategyKind, context: SelectionContext, b: int) -> list[str]:
    """Pick b distinct unlabeled ids according to the strategy."""
    n = len(context.candidate_ids)
    if n == 0:
        raise PoolExhaustedError("no unlabeled candidates remain")
    if not 0 < b <= n:
        raise ValidationError(f"display size {b} exceeds {n} remaining candidates")

    if kind.kind == "criterion":
        model = context.cluster_model
        if model is None or context.score_matrix is None:
            raise ValidationError("criterion strategies need clusters and scores")
        instance = Instance(D=model.D, C=model.C, F=context.score_matrix, lam=kind.lam)
        result = solve(instance, context.solver)
        return select_display(result.mu, context.candidate_ids, b)

    if kind.kind == "random":
        rng = np.random.default_rng(context.seed)
        picks = rng.choice(n, size=b, replace=False)
        return [context.candidate_ids[i] for i in picks]

    if kind.kind == "maxmin":
        picks = maxmin_select(context.labeled_features, context.candidate_features, b)
        return [context.candidate_ids[i] for i in picks]

    if kind.kind == "uncertainty":
        if context.raw_scores is None:
            raise ValidationError("uncertainty strategy needs raw scores")
        # closest to the decision boundary first; stable sort breaks ties
        # toward the lower pool index
        order = np.argsort(np.abs(context.raw_scores), kind="stable")
        return [context.candidate_ids[i] for i in order[:b]]

    raise ValidationError(f"unknown strategy kind {kind.kind!r}")


def maxmin_select(
    labeled_features: np.ndarray, candidate_features: np.ndarray, b: int
) -> list[int]:
    """Greedy farthest-first candidate indices.

    Each pick maximizes the minimum euclidean distance to the labeled set
    plus everything picked so far; ties go to the lowest index. With no
    labeled samples the first pick seeds at index 0.
    """
    candidates = np.atleast_2d(np.asarray(candidate_features, dtype=float))
    labeled = np.asarray(labeled_features, dtype=float).reshape(-1, candidates.shape[1])
    n = candidates.shape[0]
    if not 0 < b <= n:
        raise ValidationError(f"cannot pick {b} from {n} candidates")

    picks: list[int] = []
    if labeled.shape[0] == 0:
        picks.append(0)
        min_dist = np.linalg.norm(candidates - candidates[0], axis=1)
        min_dist[0] = -np.inf
    else:
        diffs = candidates[:, None, :] - labeled[None, :, :]
        min_dist = np.sqrt(np.einsum("nmd,nmd->nm", diffs, diffs)).min(axis=1)

    while len(picks) < b:
        nxt = int(np.argmax(min_dist))
        picks.append(nxt)
        dist_new = np.linalg.norm(candidates - candidates[nxt], axis=1)
        min_dist = np.minimum(min_dist, dist_new)
        min_dist[nxt] = -np.inf
    return picks
