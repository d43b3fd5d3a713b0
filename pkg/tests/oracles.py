"""Independent reference implementations used to check the package.

Everything here is deliberately written from the problem definitions
(straight-line loops, exhaustive enumeration, dynamic programming over the
integer grid) and shares no code path with the library under test.
"""

from __future__ import annotations

import math

import numpy as np


def objective_reference(D, C, F, alpha, beta, eta, mu) -> float:
    """Plain-loop evaluation of the selection objective.

    Uses the 0*log(0)=0 continuous extension so grid boundary points are
    evaluable.
    """
    n, K = len(D), len(D[0])

    def xlogx(v: float) -> float:
        return 0.0 if v == 0.0 else v * math.log(v)

    total = 0.0
    for i in range(n):
        total += xlogx(mu[i])
        if eta:
            for k in range(K):
                if C[i][k] == 1:
                    total += mu[i] * D[i][k]
        if beta:
            for c in range(2):
                total += mu[i] * F[i][c] * math.log(F[i][c])
    if alpha:
        for k in range(K):
            p = sum(mu[i] for i in range(n) if C[i][k] == 1)
            total += xlogx(p)
    return total


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def grid_minimum_naive(D, C, F, alpha, beta, eta, M: int) -> float:
    """Exhaustive minimum of the objective over the step-1/M simplex grid."""
    n = len(D)
    best = math.inf
    for comp in _compositions(M, n):
        mu = [c / M for c in comp]
        val = objective_reference(D, C, F, alpha, beta, eta, mu)
        if val < best:
            best = val
    return best


def _minplus_convolve(g: np.ndarray, h: np.ndarray) -> np.ndarray:
    """out[m] = min_{0<=c<=m} g[m-c] + h[c]."""
    M = len(g) - 1
    m = np.arange(M + 1)
    idx = m[:, None] - m[None, :]
    vals = np.where(idx >= 0, g[np.clip(idx, 0, M)] + h[None, :], np.inf)
    return vals.min(axis=1)


def grid_minimum(D, C, F, alpha, beta, eta, M: int = 1000) -> float:
    """Exact minimum over the step-1/M grid by exhaustive dynamic programming.

    Allocating integer mass per sample decomposes per cluster, so the full
    enumeration collapses into min-plus convolutions while still visiting
    every grid value that the naive sweep would. Validated against
    grid_minimum_naive in the oracle self-tests.
    """
    D = np.asarray(D, dtype=float)
    C = np.asarray(C, dtype=float)
    F = np.asarray(F, dtype=float)
    n, K = D.shape
    assign = C.argmax(axis=1)

    a = np.zeros(n)
    if eta:
        a += D[np.arange(n), assign]
    if beta:
        a += (F * np.log(F)).sum(axis=1)

    frac = np.arange(M + 1) / M
    with np.errstate(divide="ignore", invalid="ignore"):
        xlogx = np.where(frac > 0, frac * np.log(np.where(frac > 0, frac, 1.0)), 0.0)

    cluster_tables = []
    for k in range(K):
        members = np.flatnonzero(assign == k)
        g = a[members[0]] * frac + xlogx
        for i in members[1:]:
            g = _minplus_convolve(g, a[i] * frac + xlogx)
        if alpha:
            g = g + xlogx  # cluster-mass entropy at mass m/M
        cluster_tables.append(g)

    total = cluster_tables[0]
    for g in cluster_tables[1:]:
        total = _minplus_convolve(total, g)
    return float(total[M])


def greedy_maxmin_reference(labeled, candidates, b: int) -> list[int]:
    """Loop-based farthest-first selection; ties to the lowest index."""

    def dist(u, v) -> float:
        return math.sqrt(sum((x - y) ** 2 for x, y in zip(u, v)))

    labeled = [list(v) for v in labeled]
    candidates = [list(v) for v in candidates]
    picks: list[int] = []
    refs = list(labeled)
    if not refs:
        picks.append(0)
        refs.append(candidates[0])
    while len(picks) < b:
        best_i, best_d = None, -1.0
        for i, cand in enumerate(candidates):
            if i in picks:
                continue
            md = min(dist(cand, ref) for ref in refs)
            if md > best_d:
                best_d, best_i = md, i
        picks.append(best_i)
        refs.append(candidates[best_i])
    return picks


def balanced_error_reference(predictions, labels) -> float:
    pos = [(p, y) for p, y in zip(predictions, labels) if y == 1]
    neg = [(p, y) for p, y in zip(predictions, labels) if y == 0]
    fnr = sum(1 for p, _ in pos if p != 1) / len(pos)
    fpr = sum(1 for p, _ in neg if p != 0) / len(neg)
    return 0.5 * (fnr + fpr)


def random_instance_arrays(rng: np.random.Generator, n: int, K: int):
    """Random valid (D, C, F) arrays with every cluster populated."""
    while True:
        assign = rng.integers(K, size=n)
        if len(set(assign.tolist())) == K:
            break
    C = np.zeros((n, K))
    C[np.arange(n), assign] = 1.0
    D = rng.uniform(0.0, 4.0, size=(n, K))
    g = rng.uniform(0.02, 0.98, size=n)
    F = np.column_stack([g, 1.0 - g])
    return D, C, F
