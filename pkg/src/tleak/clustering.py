"""k-means (Lloyd + k-means++), Hungarian matching, clustering accuracy.

Clustering accuracy follows the usual unsupervised convention: the fraction
of correct predictions under the permutation of predicted class ids that
maximizes agreement with the true labels,

    Acc(y, yhat) = max_perm (1/m) sum_i 1[y_i = perm(yhat_i)]

found by solving a linear assignment problem on the negated contingency
matrix. Everything here is deterministic: argmin ties go to the lowest
centroid index, restart r of k-means derives its seed as seed + r, empty
clusters are reseeded to the globally farthest point (ties to the lowest row
index), and assignment-problem ties resolve to the lexicographically
smallest permutation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DegenerateDataError, InputError, ShapeError
from .samples import PSEUDO, EmbeddingSet, LabelVector, check_aligned

_ASSIGN_TILE = 1 << 22


@dataclass(frozen=True)
class KMeansConfig:
    k: int
    max_iters: int = 300
    tol: float = 1e-4
    seed: int = 0
    n_init: int = 10

    def __post_init__(self):
        if self.k < 1:
            raise InputError(f"k must be >= 1, got {self.k}")
        if self.max_iters < 1:
            raise InputError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.tol < 0:
            raise InputError(f"tol must be >= 0, got {self.tol}")
        if self.n_init < 1:
            raise InputError(f"n_init must be >= 1, got {self.n_init}")


@dataclass(frozen=True)
class KMeansResult:
    centroids: np.ndarray
    assignment: LabelVector
    inertia: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class AccuracyResult:
    """accuracy under the best mapping, the mapping itself (predicted class
    -> true class), and the true-by-predicted contingency matrix."""

    accuracy: float
    mapping: np.ndarray
    confusion: np.ndarray


def _assign(X: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest centroid per row and the squared distance to it."""
    m, d = X.shape
    k = centroids.shape[0]
    labels = np.empty(m, dtype=np.int64)
    dists = np.empty(m, dtype=np.float64)
    step = max(1, min(m, _ASSIGN_TILE // max(1, k * d)))
    for start in range(0, m, step):
        stop = min(start + step, m)
        diff = X[start:stop, None, :] - centroids[None, :, :]
        d2 = np.sum(diff * diff, axis=-1)
        labels[start:stop] = np.argmin(d2, axis=1)
        dists[start:stop] = d2[np.arange(stop - start), labels[start:stop]]
    return labels, dists


def _plus_plus_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    m = X.shape[0]
    chosen = np.empty(k, dtype=np.int64)
    chosen[0] = rng.integers(m)
    d2 = np.sum((X - X[chosen[0]]) ** 2, axis=1)
    for j in range(1, k):
        total = float(d2.sum())
        if total <= 0.0:
            raise DegenerateDataError(
                f"fewer than {k} distinct points; cannot place {k} centroids"
            )
        chosen[j] = rng.choice(m, p=d2 / total)
        d2 = np.minimum(d2, np.sum((X - X[chosen[j]]) ** 2, axis=1))
    return X[chosen].copy()


def _lloyd(X: np.ndarray, cfg: KMeansConfig, seed: int):
    rng = np.random.default_rng(seed)
    centroids = _plus_plus_init(X, cfg.k, rng)
    prev = math.inf
    labels = None
    dists = None
    iterations = 0
    converged = False
    for it in range(1, cfg.max_iters + 1):
        iterations = it
        labels, dists = _assign(X, centroids)
        inertia = float(dists.sum())
        if inertia > prev * (1.0 + 1e-9) + 1e-12:
            raise AssertionError(
                f"inertia increased across an iteration ({prev} -> {inertia})"
            )
        if prev != math.inf:
            gap = prev - inertia
            if gap <= cfg.tol * max(prev, np.finfo(float).tiny):
                converged = True
                break
        prev = inertia
        for c in range(cfg.k):
            mask = labels == c
            if mask.any():
                centroids[c] = X[mask].mean(axis=0)
        empty = [c for c in range(cfg.k) if not (labels == c).any()]
        if empty:
            repair = dists.copy()
            for c in empty:
                far = int(np.argmax(repair))
                if repair[far] <= 0.0:
                    raise DegenerateDataError(
                        "not enough distinct points to repair empty clusters"
                    )
                centroids[c] = X[far]
                repair[far] = -1.0
    labels, dists = _assign(X, centroids)
    inertia = float(dists.sum())
    return centroids, labels, inertia, iterations, converged


def kmeans(data: EmbeddingSet, cfg: KMeansConfig) -> KMeansResult:
    """Lloyd's algorithm with k-means++ seeding and n_init restarts.

    Restart r runs from seed cfg.seed + r; the lowest-inertia restart wins
    (first such restart on a tie). Identical data and config give a
    bit-identical result.
    """
    if cfg.k > data.m:
        raise InputError(f"k={cfg.k} exceeds the number of samples m={data.m}")
    X = data.values
    best = None
    for r in range(cfg.n_init):
        run = _lloyd(X, cfg, cfg.seed + r)
        if best is None or run[2] < best[2]:
            best = run
    centroids, labels, inertia, iterations, converged = best
    return KMeansResult(
        centroids=centroids,
        assignment=LabelVector(labels=labels, num_classes=cfg.k, kind=PSEUDO),
        inertia=inertia,
        iterations=iterations,
        converged=converged,
    )


def _assignment_total(cost: np.ndarray, rows, cols) -> float:
    return math.fsum(float(cost[r, c]) for r, c in zip(rows, cols))


def hungarian(cost) -> tuple[np.ndarray, float]:
    """Minimum-cost perfect matching on a square cost matrix.

    Returns (perm, total) with total = sum_r cost[r, perm[r]] minimal. Among
    cost-minimal permutations the lexicographically smallest is returned,
    found by fixing rows in order to their smallest viable column.
    """
    C = np.asarray(cost, dtype=np.float64)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise InputError(f"cost matrix must be square, got shape {C.shape}")
    if C.size == 0:
        raise InputError("cost matrix is empty")
    if not np.all(np.isfinite(C)):
        raise InputError("cost matrix entries must be finite")
    n = C.shape[0]
    rows, cols = linear_sum_assignment(C)
    best_total = _assignment_total(C, rows, cols)
    perm = np.empty(n, dtype=np.int64)
    free = list(range(n))
    fixed_entries: list[float] = []
    for r in range(n):
        for j in free:
            remaining_rows = list(range(r + 1, n))
            remaining_cols = [c for c in free if c != j]
            entries = fixed_entries + [float(C[r, j])]
            if remaining_rows:
                sub = C[np.ix_(remaining_rows, remaining_cols)]
                sr, sc = linear_sum_assignment(sub)
                entries.extend(float(sub[a, b]) for a, b in zip(sr, sc))
            # fsum over the complete entry list gives the correctly rounded
            # real total, so equal real totals compare equal here.
            if math.fsum(entries) == best_total:
                perm[r] = j
                free.remove(j)
                fixed_entries.append(float(C[r, j]))
                break
        else:
            raise AssertionError("no column preserved the optimal total")
    return perm, best_total


def clustering_accuracy(y_true: LabelVector, y_pred: LabelVector) -> AccuracyResult:
    """Best-permutation agreement between two labelings of the same rows.

    Label spaces are zero-padded to the larger of the two class counts, the
    contingency matrix is built, and its negation is fed to the assignment
    solver. The returned mapping sends predicted class ids to true class ids.
    """
    if len(y_true) != len(y_pred):
        raise ShapeError(
            f"label vectors differ in length: {len(y_true)} vs {len(y_pred)}"
        )
    m = len(y_true)
    C = max(y_true.num_classes, y_pred.num_classes)
    confusion = np.zeros((C, C), dtype=np.int64)
    np.add.at(confusion, (y_true.labels, y_pred.labels), 1)
    # rows of the assignment problem are predicted classes, columns true ones
    perm, _ = hungarian(-confusion.T.astype(np.float64))
    correct = int(sum(confusion[perm[p], p] for p in range(C)))
    return AccuracyResult(
        accuracy=correct / m,
        mapping=perm,
        confusion=confusion,
    )


def mix_targets(y_gt, y_pl, alpha: float) -> np.ndarray:
    """Blend a ground-truth target with a pseudo-label target.

    Returns alpha * y_gt + (1 - alpha) * y_pl. Both inputs must be
    probability vectors of the same length (entries >= 0 summing to 1 within
    1e-9) and alpha must lie in [0, 1].
    """
    if not (0.0 <= alpha <= 1.0):
        raise InputError(f"alpha must be in [0, 1], got {alpha}")
    a = np.asarray(y_gt, dtype=np.float64)
    b = np.asarray(y_pl, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1 or a.shape != b.shape:
        raise ShapeError(
            f"targets must be 1-D vectors of equal length, got {a.shape} and {b.shape}"
        )
    for name, vec in (("y_gt", a), ("y_pl", b)):
        if not np.all(np.isfinite(vec)) or (vec < 0).any():
            raise InputError(f"{name} must have nonnegative finite entries")
        if abs(float(vec.sum()) - 1.0) > 1e-9:
            raise InputError(f"{name} must sum to 1 (got {float(vec.sum())!r})")
    return alpha * a + (1.0 - alpha) * b
