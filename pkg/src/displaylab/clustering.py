"""K-means over the candidate pool, exposing squared distances and indicators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError


@dataclass(frozen=True)
class ClusterModel:
    points: np.ndarray  # (n, d) data the model was fit on
    centroids: np.ndarray  # (K, d)
    assignment: np.ndarray  # (n,) cluster index per sample
    D: np.ndarray  # (n, K) squared euclidean distances
    C: np.ndarray  # (n, K) one-hot indicators

    @property
    def n_clusters(self) -> int:
        return self.centroids.shape[0]


def squared_distances(X: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = X[:, None, :] - centroids[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def _kmeans_pp_init(X: np.ndarray, K: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centroids = np.empty((K, X.shape[1]))
    first = int(rng.integers(n))
    centroids[0] = X[first]
    chosen = {first}
    for k in range(1, K):
        d2 = squared_distances(X, centroids[:k]).min(axis=1)
        total = d2.sum()
        if total > 0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            # remaining points all duplicate a centroid; take the lowest
            # unchosen index to stay deterministic
            idx = min(i for i in range(n) if i not in chosen)
        centroids[k] = X[idx]
        chosen.add(idx)
    return centroids


def _assign_with_repair(
    X: np.ndarray, centroids: np.ndarray
) -> tuple[np.ndarray, np.ndarray, bool]:
    """Nearest-centroid assignment (ties to the lowest index), reseeding any
    empty cluster at the point farthest from its stale centroid."""
    K = centroids.shape[0]
    repaired = False
    for _ in range(K + 1):
        d2 = squared_distances(X, centroids)
        assignment = d2.argmin(axis=1)
        empty = [k for k in range(K) if not np.any(assignment == k)]
        if not empty:
            return d2, assignment, repaired
        repaired = True
        for k in empty:
            centroids[k] = X[int(np.argmax(d2[:, k]))]
    # duplicate points can keep a cluster empty through reseeding; force the
    # seed point over, keeping rows one-hot
    d2 = squared_distances(X, centroids)
    assignment = d2.argmin(axis=1)
    for k in range(K):
        if not np.any(assignment == k):
            assignment[int(np.argmax(d2[:, k]))] = k
    return d2, assignment, True


def fit_kmeans(X: np.ndarray, K: int, seed: int, max_iters: int = 100) -> ClusterModel:
    """Lloyd iterations from a k-means++ start, deterministic per seed.

    Runs until the assignment stops changing or max_iters is hit; the
    returned model always has K non-empty clusters and an assignment
    consistent with argmin over its distance matrix.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValidationError("need a non-empty (n, d) feature matrix")
    n = X.shape[0]
    if K < 1 or K > n:
        raise ValidationError(f"K must satisfy 1 <= K <= n, got K={K}, n={n}")
    if max_iters < 1:
        raise ValidationError("max_iters must be at least 1")

    rng = np.random.default_rng(seed)
    centroids = _kmeans_pp_init(X, K, rng)
    assignment = None
    wcss_prev = np.inf

    for _ in range(max_iters):
        d2, new_assignment, repaired = _assign_with_repair(X, centroids)
        wcss = float(d2[np.arange(n), new_assignment].sum())
        if repaired:
            wcss_prev = np.inf  # reseeding restarts the monotone sequence
        assert wcss <= wcss_prev + 1e-9 * max(1.0, wcss_prev), (
            f"Lloyd step increased the within-cluster sum of squares: "
            f"{wcss_prev} -> {wcss}"
        )
        if assignment is not None and np.array_equal(new_assignment, assignment):
            break
        assignment = new_assignment
        for k in range(K):
            members = X[assignment == k]
            if len(members):
                centroids[k] = members.mean(axis=0)
        d2 = squared_distances(X, centroids)
        wcss_prev = float(d2[np.arange(n), assignment].sum())
    else:
        # out of iterations: take one last consistent assignment
        d2, assignment, _ = _assign_with_repair(X, centroids)

    D = squared_distances(X, centroids)
    C = np.zeros((n, K))
    C[np.arange(n), assignment] = 1.0
    return ClusterModel(
        points=X.copy(), centroids=centroids, assignment=assignment, D=D, C=C
    )


def matrices(model: ClusterModel) -> tuple[np.ndarray, np.ndarray]:
    """Return (D, C); D is recomputed from points and centroids."""
    D = squared_distances(model.points, model.centroids)
    return D, model.C.copy()
