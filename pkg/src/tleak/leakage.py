"""Transfer leakage, self leakage, pseudo transfer leakage, and bootstrap std.

Transfer leakage measures how much class structure a representation carries:
it is the class-count-weighted sum of unbiased MMD^2 values between every
ordered pair of distinct class-conditional sample groups,

    value = sum_{c != c'} (|I_c| |I_c'|) / (m (m - 1)) * MMD^2(I_c, I_c')

where I_c holds the rows labeled c and m counts the rows that belong to a
retained class. With a kernel whose K(x, x) = 1 (gaussian, laplacian) the
population quantity lies in [0, 4], is 0 exactly when labels are independent
of the representation, and grows with class separation.

Variants: self leakage is the same statistic where the caller passes raw
features instead of a learned representation; pseudo transfer leakage swaps
ground-truth labels for k-means cluster assignments; bootstrap_leakage adds
a resampled mean/std around the point estimate.

Class pairs may be scored in parallel (worker count capped by the
TLEAK_THREADS environment variable); the weighted sum is always accumulated
in ascending (c, c') order, so results do not depend on the worker count.
"""

from __future__ import annotations

import dataclasses
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .clustering import KMeansConfig, kmeans
from .errors import (
    DegenerateClusteringError,
    InputError,
    InsufficientSamplesError,
    ResamplingError,
)
from .kernels import KernelSpec, resolve_bandwidth
from .mmd import SampleGroup, mmd2_unbiased
from .samples import PSEUDO, TRUTH, EmbeddingSet, LabelVector, check_aligned

TRANSFER = "transfer"
SELF = "self"

_REDRAW_FACTOR = 100


@dataclass(frozen=True)
class BootstrapSummary:
    """Resampling summary: population std over `replicates` redraws."""

    mean: float
    std: float
    replicates: int
    seed: int


@dataclass(frozen=True)
class LeakageReport:
    """Everything needed to audit and recompute a leakage value.

    value equals sum over ordered pairs c != c' of
    pair_weight[c][c'] * pair_mmd[c][c']; pair_weight[c][c'] is
    |I_c| |I_c'| / (m (m - 1)) over retained rows, and pair_mmd is symmetric
    with a zero diagonal. negatives_present flags any negative pair estimate
    (legitimate for the unbiased statistic, never clamped).
    """

    value: float
    pair_mmd: np.ndarray
    pair_weight: np.ndarray
    class_counts: np.ndarray
    kernel: KernelSpec
    negatives_present: bool
    kind: str = TRANSFER
    dropped_clusters: tuple[int, ...] = ()
    bootstrap: BootstrapSummary | None = None

    def to_json_dict(self) -> dict:
        doc = {
            "schema": "tleak_report_v1",
            "kind": self.kind,
            "value": self.value,
            "negatives_present": self.negatives_present,
            "class_counts": [int(c) for c in self.class_counts],
            "pair_mmd": [[float(v) for v in row] for row in self.pair_mmd],
            "pair_weight": [[float(v) for v in row] for row in self.pair_weight],
            "dropped_clusters": list(self.dropped_clusters),
            "kernel": self.kernel.to_json_dict(),
        }
        if self.bootstrap is None:
            doc["bootstrap"] = None
        else:
            doc["bootstrap"] = {
                "mean": self.bootstrap.mean,
                "std": self.bootstrap.std,
                "replicates": self.bootstrap.replicates,
                "seed": self.bootstrap.seed,
            }
        return doc


def _worker_count(n_jobs: int) -> int:
    cap = os.environ.get("TLEAK_THREADS")
    workers = os.cpu_count() or 1
    if cap:
        try:
            workers = min(workers, max(1, int(cap)))
        except ValueError:
            raise InputError(f"TLEAK_THREADS must be an integer, got {cap!r}")
    return max(1, min(workers, n_jobs))


def _group_name(kind: str, c: int) -> str:
    return f"cluster {c}" if kind == PSEUDO else f"class {c}"


def _core(values: np.ndarray, labels: np.ndarray, num_classes: int,
          spec: KernelSpec, kind: str) -> tuple[float, np.ndarray, np.ndarray,
                                               np.ndarray, bool]:
    """Weighted pair-MMD sum over one labeled embedding matrix.

    `spec` must already be resolved. Rows whose class is empty cannot exist
    (every row carries a label), so m is just the row count here; callers
    that drop classes (pseudo labels) filter rows before calling.
    """
    counts = np.bincount(labels, minlength=num_classes)
    for c in range(num_classes):
        if counts[c] == 1:
            raise InsufficientSamplesError(
                f"{_group_name(kind, c)} has a single sample; the unbiased "
                "estimator needs at least 2 per class"
            )
    m = int(labels.shape[0])
    present = [c for c in range(num_classes) if counts[c] >= 2]
    pair_mmd = np.zeros((num_classes, num_classes), dtype=np.float64)
    pair_weight = np.outer(counts, counts).astype(np.float64)
    if m >= 2:
        pair_weight /= float(m * (m - 1))
    if len(present) >= 2:
        data = EmbeddingSet(values)
        groups = {
            c: SampleGroup(data, np.flatnonzero(labels == c),
                           name=_group_name(kind, c))
            for c in present
        }
        pairs = [(c, c2) for i, c in enumerate(present) for c2 in present[i + 1:]]
        workers = _worker_count(len(pairs))
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(
                    lambda p: mmd2_unbiased(groups[p[0]], groups[p[1]], spec),
                    pairs,
                ))
        else:
            results = [mmd2_unbiased(groups[c], groups[c2], spec)
                       for c, c2 in pairs]
        for (c, c2), v in zip(pairs, results):
            pair_mmd[c, c2] = v
            pair_mmd[c2, c] = v
    terms = [
        pair_weight[c, c2] * pair_mmd[c, c2]
        for c in range(num_classes)
        for c2 in range(num_classes)
        if c != c2
    ]
    value = math.fsum(terms)
    # The diagonal is exactly 0, so any negative entry is an off-diagonal pair.
    negatives = bool((pair_mmd < 0).any())
    return value, pair_mmd, pair_weight, counts, negatives


def _resolved(spec: KernelSpec, data: EmbeddingSet) -> KernelSpec:
    if spec.resolved:
        return spec
    return resolve_bandwidth(spec, data)


def _truth_leakage(data: EmbeddingSet, labels: LabelVector, spec: KernelSpec,
                   kind: str) -> LeakageReport:
    check_aligned(data, labels)
    if labels.kind != TRUTH:
        raise InputError(
            f"{kind} leakage expects ground-truth labels, got kind "
            f"{labels.kind!r}"
        )
    rspec = _resolved(spec, data)
    value, pair_mmd, pair_weight, counts, negatives = _core(
        data.values, labels.labels, labels.num_classes, rspec, labels.kind
    )
    return LeakageReport(
        value=value, pair_mmd=pair_mmd, pair_weight=pair_weight,
        class_counts=counts, kernel=rspec, negatives_present=negatives,
        kind=kind,
    )


def transfer_leakage(data: EmbeddingSet, labels: LabelVector,
                     spec: KernelSpec) -> LeakageReport:
    """Transfer leakage of a representation against ground-truth labels.

    Parameters
    ----------
    data : EmbeddingSet
        Representations of the unlabeled samples, one row each.
    labels : LabelVector
        Ground-truth classes (kind "truth"); every nonempty class needs at
        least 2 members.
    spec : KernelSpec
        Kernel; an unresolved median bandwidth is resolved against `data`.
    """
    return _truth_leakage(data, labels, spec, TRANSFER)


def self_leakage(data: EmbeddingSet, labels: LabelVector,
                 spec: KernelSpec) -> LeakageReport:
    """Same statistic computed on raw features (identity representation).

    The caller passes the original feature vectors as `data`; the report is
    tagged kind "self" so downstream tooling can tell the two apart.
    """
    return _truth_leakage(data, labels, spec, SELF)


def pseudo_transfer_leakage(data: EmbeddingSet, k: int, spec: KernelSpec,
                            km_cfg: KMeansConfig | None = None) -> LeakageReport:
    """Transfer leakage under k-means pseudo labels.

    Runs k-means with `k` clusters on `data` (km_cfg supplies the remaining
    clustering settings; its own k is overridden), then scores the leakage
    formula over the cluster assignment. Clusters with fewer than 2 members
    cannot enter the unbiased estimator; their rows are excluded, the weight
    normalization uses the retained row count, and their ids are recorded in
    the report's dropped_clusters.
    """
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    if data.m < 2 * k:
        raise InputError(
            f"need m >= 2k rows for k-means pseudo labeling, got m={data.m}, k={k}"
        )
    cfg = KMeansConfig(k=k) if km_cfg is None else dataclasses.replace(km_cfg, k=k)
    assignment = kmeans(data, cfg).assignment
    counts = assignment.class_counts()
    dropped = tuple(int(c) for c in range(k) if counts[c] < 2)
    kept_mask = np.isin(assignment.labels, [c for c in range(k) if counts[c] >= 2])
    if not kept_mask.any():
        raise DegenerateClusteringError(
            "every cluster has fewer than 2 members; nothing to score"
        )
    rspec = _resolved(spec, data)
    value, pair_mmd, pair_weight, kept_counts, negatives = _core(
        data.values[kept_mask], assignment.labels[kept_mask], k, rspec, PSEUDO
    )
    return LeakageReport(
        value=value, pair_mmd=pair_mmd, pair_weight=pair_weight,
        class_counts=kept_counts, kernel=rspec, negatives_present=negatives,
        kind=PSEUDO, dropped_clusters=dropped,
    )


def _resample_valid(labels: np.ndarray, original_counts: np.ndarray) -> bool:
    counts = np.bincount(labels, minlength=original_counts.shape[0])
    return bool(np.all(counts[original_counts > 0] >= 2))


def bootstrap_leakage(data: EmbeddingSet, labels: LabelVector, spec: KernelSpec,
                      replicates: int, seed: int,
                      stratified: bool = False) -> LeakageReport:
    """Point estimate plus bootstrap mean/std of the transfer leakage.

    Draws `replicates` i.i.d.-with-replacement row resamples (labels carried
    along), recomputes the leakage on each, and reports the population
    standard deviation. A resample in which any originally nonempty class
    ends up with fewer than 2 members is redrawn; the total redraw budget is
    100x the replicate count. Replicate r uses the derived seed seed + r.
    The bandwidth is resolved once against the original data and reused, so
    the spread reflects row sampling only.

    With stratified=True each class is resampled within itself, preserving
    the class counts exactly (no redraws needed).
    """
    if replicates < 2:
        raise InputError(f"replicates must be >= 2, got {replicates}")
    point = transfer_leakage(data, labels, spec)
    rspec = point.kernel
    original_counts = np.bincount(labels.labels, minlength=labels.num_classes)
    class_rows = [np.flatnonzero(labels.labels == c)
                  for c in range(labels.num_classes)]
    budget = _REDRAW_FACTOR * replicates
    attempts = 0
    values = []
    for r in range(replicates):
        rng = np.random.default_rng(seed + r)
        while True:
            if attempts >= budget:
                raise ResamplingError(
                    f"no valid resample after {budget} attempts; classes too "
                    "small for bootstrap"
                )
            attempts += 1
            if stratified:
                parts = [rows[rng.integers(0, rows.size, size=rows.size)]
                         for rows in class_rows if rows.size]
                idx = np.concatenate(parts)
            else:
                idx = rng.integers(0, data.m, size=data.m)
            drawn = labels.labels[idx]
            if stratified or _resample_valid(drawn, original_counts):
                break
        v, _, _, _, _ = _core(data.values[idx], drawn, labels.num_classes,
                              rspec, labels.kind)
        values.append(v)
    mean = math.fsum(values) / replicates
    var = math.fsum((v - mean) ** 2 for v in values) / replicates
    summary = BootstrapSummary(mean=mean, std=math.sqrt(var),
                               replicates=replicates, seed=seed)
    return dataclasses.replace(point, bootstrap=summary)
