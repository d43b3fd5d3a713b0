"""Active-learning session: the label/train/select loop, metrics, persistence.

A session walks T iterations. Each accepted batch of labels retrains the
classifier on everything labeled so far, scores the session on the held-out
test split, and (unless the budget is exhausted) builds the next display from
the unlabeled remainder of the train split. With the "rl" strategy a bandit
picks which criterion combination drives each display, paid with the error
of the previous classifier on the batch it just received.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import bandit as bandit_mod
from .bandit import BanditConfig, QTable, adversarial_reward, choose_action, new_qtable
from .classifier import ClassifierConfig, LinearModel, raw_score, score_matrix, train
from .clustering import ClusterModel, fit_kmeans, squared_distances
from .errors import FormatError, SessionStateError, ValidationError
from .membership import LambdaConfig, SolverConfig
from .pool import DataPool, Sample, simulated_oracle
from .strategies import (
    SelectionContext,
    StrategyKind,
    criterion,
    parse_strategy,
    propose_display,
)

AWAITING = "awaiting_labels"
DONE = "none"


@dataclass(frozen=True)
class SessionConfig:
    strategy: str = "rl"
    display_size: int = 8
    iterations: int = 10
    n_clusters: Optional[int] = None  # defaults to display_size
    seed: int = 0
    solver: SolverConfig = SolverConfig()
    classifier: ClassifierConfig = ClassifierConfig()
    bandit: BanditConfig = BanditConfig()
    evaluation_enabled: bool = True
    refit_clustering: bool = True
    kmeans_max_iters: int = 100

    def __post_init__(self):
        if self.display_size < 1:
            raise ValidationError("display_size must be at least 1")
        if self.iterations < 1:
            raise ValidationError("iterations must be at least 1")
        if self.n_clusters is not None and self.n_clusters < 1:
            raise ValidationError("n_clusters must be at least 1")
        parse_strategy(self.strategy)  # raises on unknown names

    @property
    def clusters(self) -> int:
        return self.n_clusters if self.n_clusters is not None else self.display_size


@dataclass
class IterationRecord:
    iteration: int  # 1-based completed-display count
    display_ids: list[str]
    strategy: str
    action: Optional[tuple[int, int, int]]  # (alpha, beta, eta) behind this display
    reward: Optional[float]
    eer_percent: Optional[float]
    eer_sweep_percent: Optional[float]
    sampling_percent: float

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["action"] = list(self.action) if self.action is not None else None
        return d

    @staticmethod
    def from_dict(d: dict) -> "IterationRecord":
        action = d.get("action")
        return IterationRecord(
            iteration=d["iteration"],
            display_ids=list(d["display_ids"]),
            strategy=d["strategy"],
            action=tuple(action) if action is not None else None,
            reward=d.get("reward"),
            eer_percent=d.get("eer_percent"),
            eer_sweep_percent=d.get("eer_sweep_percent"),
            sampling_percent=d["sampling_percent"],
        )


@dataclass
class SessionState:
    pool: DataPool
    config: SessionConfig
    labeled: list[tuple[str, int, int]]  # (id, label, display index)
    current_display: list[str]
    status: str
    iteration: int  # completed displays
    model: Optional[LinearModel]
    qtable: Optional[QTable]
    pending_action: Optional[LambdaConfig]
    history: list[IterationRecord]
    rng: np.random.Generator
    static_clusters: Optional[ClusterModel] = None

    @property
    def labeled_ids(self) -> set[str]:
        return {sid for sid, _, _ in self.labeled}

    def unlabeled_train_indices(self) -> list[int]:
        done = self.labeled_ids
        return [i for i in self.pool.train_indices if self.pool.samples[i].id not in done]


def start_session(pool: DataPool, config: SessionConfig) -> SessionState:
    """Draw the uniformly random first display and hand it to the oracle."""
    if pool.split is None:
        raise ValidationError("pool needs a train/test split; run split_pool first")
    train_idx = pool.train_indices
    n_train = len(train_idx)
    b, T = config.display_size, config.iterations
    if b > n_train:
        raise ValidationError(f"display size {b} exceeds train split of {n_train}")
    if b * T > n_train:
        raise ValidationError(
            f"label budget {b}x{T} exceeds the {n_train}-sample train split"
        )
    if config.clusters > n_train - b * (T - 1):
        raise ValidationError(
            f"{config.clusters} clusters cannot fit the final iteration's "
            f"{n_train - b * (T - 1)} candidates"
        )
    if config.evaluation_enabled:
        test_idx = pool.test_indices
        if not test_idx:
            raise ValidationError("evaluation needs a non-empty test split")
        if not pool.has_labels(test_idx):
            raise ValidationError(
                "evaluation needs ground-truth test labels; disable evaluation "
                "for unlabeled pools"
            )
        test_labels = {pool.samples[i].truth_label for i in test_idx}
        if len(test_labels) < 2:
            raise ValidationError("evaluation needs both classes in the test split")

    rng = np.random.default_rng(config.seed)
    first = rng.choice(n_train, size=b, replace=False)
    display = [pool.samples[train_idx[i]].id for i in first]

    return SessionState(
        pool=pool,
        config=config,
        labeled=[],
        current_display=display,
        status=AWAITING,
        iteration=0,
        model=None,
        qtable=new_qtable(config.bandit) if config.strategy == "rl" else None,
        pending_action=None,
        history=[],
        rng=rng,
    )


def _iteration_seeds(config: SessionConfig, completed: int) -> tuple[int, int]:
    ss = np.random.SeedSequence([config.seed, completed])
    kmeans_seed, strategy_seed = (int(v) for v in ss.generate_state(2))
    return kmeans_seed, strategy_seed


def _subset_clusters(model: ClusterModel, rows: np.ndarray) -> ClusterModel:
    """Restrict a fitted model to a candidate subset, dropping clusters that
    end up empty there."""
    assignment = model.assignment[rows]
    keep = np.flatnonzero(np.isin(np.arange(model.n_clusters), assignment))
    remap = {int(old): new for new, old in enumerate(keep)}
    new_assignment = np.array([remap[int(a)] for a in assignment])
    points = model.points[rows]
    centroids = model.centroids[keep]
    D = squared_distances(points, centroids)
    C = np.zeros((len(rows), len(keep)))
    C[np.arange(len(rows)), new_assignment] = 1.0
    return ClusterModel(
        points=points, centroids=centroids, assignment=new_assignment, D=D, C=C
    )


def _build_context(state: SessionState, completed: int) -> SelectionContext:
    pool, config = state.pool, state.config
    cand_idx = state.unlabeled_train_indices()
    cand_ids = tuple(pool.samples[i].id for i in cand_idx)
    cand_X = pool.feature_matrix(cand_idx)
    labeled_X = (
        pool.feature_matrix([pool.index_of(sid) for sid, _, _ in state.labeled])
        if state.labeled
        else np.empty((0, pool.feature_dim))
    )
    kmeans_seed, strategy_seed = _iteration_seeds(config, completed)

    if config.refit_clustering:
        clusters = fit_kmeans(
            cand_X,
            K=min(config.clusters, len(cand_idx)),
            seed=kmeans_seed,
            max_iters=config.kmeans_max_iters,
        )
    else:
        if state.static_clusters is None:
            train_X = pool.feature_matrix(pool.train_indices)
            state.static_clusters = fit_kmeans(
                train_X,
                K=min(config.clusters, len(pool.train_indices)),
                seed=_iteration_seeds(config, 0)[0],
                max_iters=config.kmeans_max_iters,
            )
        train_pos = {idx: j for j, idx in enumerate(pool.train_indices)}
        rows = np.array([train_pos[i] for i in cand_idx])
        clusters = _subset_clusters(state.static_clusters, rows)

    scores = np.asarray(raw_score(state.model, cand_X))
    F = score_matrix(state.model, cand_X)
    return SelectionContext(
        candidate_ids=cand_ids,
        candidate_features=cand_X,
        labeled_features=labeled_X,
        cluster_model=clusters,
        score_matrix=F,
        raw_scores=scores,
        seed=strategy_seed,
        solver=config.solver,
    )


def submit_labels(
    state: SessionState, labels: Sequence[tuple[str, int]]
) -> SessionState:
    """Consume labels for the current display and advance one iteration."""
    if state.status != AWAITING:
        raise SessionStateError("session is finished; no display awaits labels")
    label_map = dict(labels)
    if len(label_map) != len(labels):
        raise ValidationError("duplicate ids in submitted labels")
    got, want = set(label_map), set(state.current_display)
    if got != want:
        missing = sorted(want - got)
        extra = sorted(got - want)
        raise ValidationError(
            f"labels must cover the current display exactly; "
            f"missing={missing} extra={extra}"
        )
    for sid, lab in label_map.items():
        if lab not in (0, 1):
            raise ValidationError(f"label for {sid!r} must be 0 or 1")

    pool, config = state.pool, state.config
    t = state.iteration
    display_ids = list(state.current_display)
    display_X = pool.feature_matrix([pool.index_of(sid) for sid in display_ids])
    display_y = np.array([label_map[sid] for sid in display_ids])

    reward = None
    if state.qtable is not None and state.model is not None and state.pending_action is not None:
        reward = adversarial_reward(state.model, display_X, display_y)
        state.qtable = bandit_mod.update(state.qtable, state.pending_action, reward)

    state.labeled.extend((sid, int(label_map[sid]), t) for sid in display_ids)

    all_idx = [pool.index_of(sid) for sid, _, _ in state.labeled]
    X = pool.feature_matrix(all_idx)
    y = np.array([lab for _, lab, _ in state.labeled])
    state.model = train(X, y, config.classifier)

    eer_pct = sweep_pct = None
    if config.evaluation_enabled:
        test_idx = pool.test_indices
        test_X = pool.feature_matrix(test_idx)
        test_y = np.array([pool.samples[i].truth_label for i in test_idx])
        eer_pct = 100.0 * eer(state.model, test_X, test_y)
        sweep_pct = 100.0 * eer_threshold_sweep(
            np.asarray(raw_score(state.model, test_X)), test_y
        )

    completed = t + 1
    n_train = len(pool.train_indices)
    state.history.append(
        IterationRecord(
            iteration=completed,
            display_ids=display_ids,
            strategy=config.strategy,
            action=state.pending_action.as_tuple() if state.pending_action else None,
            reward=reward,
            eer_percent=eer_pct,
            eer_sweep_percent=sweep_pct,
            sampling_percent=100.0 * len(state.labeled) / n_train,
        )
    )
    state.iteration = completed

    if completed < config.iterations:
        if config.strategy == "rl":
            action = choose_action(state.qtable, state.rng)
            kind: StrategyKind = criterion(action)
            state.pending_action = action
        else:
            kind = parse_strategy(config.strategy)
            state.pending_action = kind.lam if kind.kind == "criterion" else None
        context = _build_context(state, completed)
        state.current_display = propose_display(kind, context, config.display_size)
    else:
        state.current_display = []
        state.pending_action = None
        state.status = DONE
    return state


def eer(model: LinearModel, features: np.ndarray, labels: np.ndarray) -> float:
    """Balanced error at the fixed zero threshold, in [0, 1]."""
    y = np.asarray(labels, dtype=int).ravel()
    pos, neg = y == 1, y == 0
    if not (pos.any() and neg.any()):
        raise ValidationError("evaluation set must contain both classes")
    preds = (np.asarray(raw_score(model, np.atleast_2d(features))) > 0).astype(int)
    fnr = float((preds[pos] != 1).mean())
    fpr = float((preds[neg] != 0).mean())
    return 0.5 * (fnr + fpr)


def eer_threshold_sweep(scores: np.ndarray, labels: np.ndarray) -> float:
    """Diagnostic equal-error point: sweep all thresholds, return the balanced
    error where false-positive and false-negative rates meet."""
    scores = np.asarray(scores, dtype=float).ravel()
    y = np.asarray(labels, dtype=int).ravel()
    n_pos = int((y == 1).sum())
    n_neg = int((y == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise ValidationError("evaluation set must contain both classes")
    order = np.argsort(scores, kind="stable")
    y_sorted = y[order]
    # cut k: the k lowest scores predicted negative, the rest positive
    pos_below = np.concatenate([[0], np.cumsum(y_sorted == 1)])
    neg_below = np.concatenate([[0], np.cumsum(y_sorted == 0)])
    fnr = pos_below / n_pos
    fpr = (n_neg - neg_below) / n_neg
    k = int(np.argmin(np.abs(fpr - fnr)))
    return 0.5 * float(fpr[k] + fnr[k])


def auc_of_run(history: Sequence) -> float:
    """Average of the per-iteration error percentages across a whole run."""
    if len(history) == 0:
        raise ValidationError("history is empty")
    values = []
    for item in history:
        v = item.eer_percent if isinstance(item, IterationRecord) else item
        if v is None:
            raise ValidationError("history record is missing its error value")
        values.append(float(v))
    return float(np.mean(values))


def run_with_simulated_oracle(pool: DataPool, config: SessionConfig) -> SessionState:
    """Drive a full session, answering every display from ground truth."""
    state = start_session(pool, config)
    while state.status == AWAITING:
        answers = simulated_oracle(pool, state.current_display)
        submit_labels(state, answers)
    return state


# --- persistence ----------------------------------------------------------


def _config_to_dict(config: SessionConfig) -> dict:
    return dataclasses.asdict(config)


def _config_from_dict(d: dict) -> SessionConfig:
    return SessionConfig(
        strategy=d["strategy"],
        display_size=d["display_size"],
        iterations=d["iterations"],
        n_clusters=d.get("n_clusters"),
        seed=d["seed"],
        solver=SolverConfig(**d["solver"]),
        classifier=ClassifierConfig(**d["classifier"]),
        bandit=BanditConfig(**d["bandit"]),
        evaluation_enabled=d["evaluation_enabled"],
        refit_clustering=d.get("refit_clustering", True),
        kmeans_max_iters=d.get("kmeans_max_iters", 100),
    )


def _pool_to_dict(pool: DataPool) -> dict:
    samples = []
    for s in pool.samples:
        row: dict = {"id": s.id, "features": list(s.features)}
        if s.truth_label is not None:
            row["label"] = s.truth_label
        if s.image_refs is not None:
            row["image_refs"] = list(s.image_refs)
        samples.append(row)
    return {"samples": samples, "split": list(pool.split) if pool.split else None}


def _pool_from_dict(d: dict) -> DataPool:
    samples = tuple(
        Sample(
            id=row["id"],
            features=tuple(row["features"]),
            truth_label=row.get("label"),
            image_refs=tuple(row["image_refs"]) if row.get("image_refs") else None,
        )
        for row in d["samples"]
    )
    split = tuple(d["split"]) if d.get("split") else None
    return DataPool(samples=samples, split=split)


def state_to_dict(state: SessionState) -> dict:
    return {
        "version": 1,
        "config": _config_to_dict(state.config),
        "pool": _pool_to_dict(state.pool),
        "labeled": [[sid, lab, it] for sid, lab, it in state.labeled],
        "current_display": list(state.current_display),
        "status": state.status,
        "iteration": state.iteration,
        "model": state.model.to_dict() if state.model else None,
        "qtable": dataclasses.asdict(state.qtable) if state.qtable else None,
        "pending_action": list(state.pending_action.as_tuple())
        if state.pending_action
        else None,
        "history": [r.to_dict() for r in state.history],
        "rng_state": state.rng.bit_generator.state,
    }


def state_from_dict(doc: dict) -> SessionState:
    if doc.get("version") != 1:
        raise FormatError(f"unsupported session file version {doc.get('version')!r}")
    config = _config_from_dict(doc["config"])
    qdoc = doc.get("qtable")
    qtable = (
        QTable(
            q=tuple(qdoc["q"]),
            counts=tuple(qdoc["counts"]),
            lr=qdoc["lr"],
            epsilon=qdoc["epsilon"],
            epsilon_decay=qdoc["epsilon_decay"],
            discount=qdoc["discount"],
        )
        if qdoc
        else None
    )
    pending = doc.get("pending_action")
    rng = np.random.default_rng()
    rng.bit_generator.state = doc["rng_state"]
    return SessionState(
        pool=_pool_from_dict(doc["pool"]),
        config=config,
        labeled=[(sid, lab, it) for sid, lab, it in doc["labeled"]],
        current_display=list(doc["current_display"]),
        status=doc["status"],
        iteration=doc["iteration"],
        model=LinearModel.from_dict(doc["model"]) if doc.get("model") else None,
        qtable=qtable,
        pending_action=LambdaConfig(*pending) if pending else None,
        history=[IterationRecord.from_dict(r) for r in doc["history"]],
        rng=rng,
    )


def save_session(state: SessionState, path: str | Path) -> None:
    """Atomic json write: a crash mid-save never corrupts an existing file."""
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(state_to_dict(state)))
    os.replace(tmp, path)


def load_session(path: str | Path) -> SessionState:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
        return state_from_dict(doc)
    except (json.JSONDecodeError, KeyError, IndexError, TypeError) as exc:
        raise FormatError(f"corrupt or partial session file {path}: {exc}") from exc
