"""Kernel evaluation, Gram blocks, bandwidth selection, and the kappa bound.

Three kernel families are supported:

    gaussian    K(x, y) = exp(-||x - y||^2 / (2 sigma^2))
    laplacian   K(x, y) = exp(-||x - y||_1 / sigma)
    linear      K(x, y) = x . y

The gaussian is parameterized with the squared distance over 2 sigma^2 and
sigma equal to the median pairwise distance under the default policy, so the
bandwidth recorded in a report is directly comparable across runs. Gram
blocks are produced by broadcasting exactly the same elementwise operations
the scalar evaluation uses, which keeps block entries bitwise identical to
kernel_eval and therefore independent of tiling or worker count.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist

from .errors import ConfigurationError, DegenerateDataError, InputError, ShapeError
from .samples import EmbeddingSet, LabelVector, check_aligned

GAUSSIAN = "gaussian"
LAPLACIAN = "laplacian"
LINEAR = "linear"
_FAMILIES = (GAUSSIAN, LAPLACIAN, LINEAR)

FIXED = "fixed"
MEDIAN = "median"

# Rows per Gram tile are chosen so one broadcast difference tensor stays
# near this many float64 elements (about 64 MB).
_TILE_BUDGET = 1 << 23

# Cap on the number of rows fed to the median heuristic.
_MEDIAN_SAMPLE_CAP = 1000


@dataclass(frozen=True)
class KernelSpec:
    """A kernel family plus its bandwidth policy.

    Parameters
    ----------
    family : str
        One of "gaussian", "laplacian", "linear".
    bandwidth_policy : str or None
        "fixed" or "median". Ignored (normalized to None) for the linear
        family, which has no bandwidth.
    bandwidth_value : float, optional
        The fixed bandwidth; required when the policy is "fixed".
    seed : int
        Subsampling seed for the median heuristic.
    resolved_bandwidth : float, optional
        The sigma actually used for evaluation. Populated immediately for
        fixed policies and by resolve_bandwidth for the median policy.
    """

    family: str
    bandwidth_policy: str | None = MEDIAN
    bandwidth_value: float | None = None
    seed: int = 0
    resolved_bandwidth: float | None = None

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise InputError(
                f"unknown kernel family {self.family!r}, expected one of {_FAMILIES}"
            )
        if self.family == LINEAR:
            object.__setattr__(self, "bandwidth_policy", None)
            object.__setattr__(self, "bandwidth_value", None)
            object.__setattr__(self, "resolved_bandwidth", None)
            object.__setattr__(self, "seed", 0)
            return
        if self.bandwidth_policy not in (FIXED, MEDIAN):
            raise InputError(
                f"unknown bandwidth policy {self.bandwidth_policy!r}"
            )
        if self.bandwidth_policy == FIXED:
            v = self.bandwidth_value
            if v is None or not np.isfinite(v) or v <= 0:
                raise InputError(f"fixed bandwidth must be a positive real, got {v!r}")
            object.__setattr__(self, "bandwidth_value", float(v))
            # A fixed bandwidth needs no data to resolve against.
            object.__setattr__(self, "resolved_bandwidth", float(v))
        elif self.bandwidth_value is not None:
            raise InputError("bandwidth_value is only meaningful with the fixed policy")
        rb = self.resolved_bandwidth
        if rb is not None:
            if not np.isfinite(rb) or rb <= 0:
                raise InputError(f"resolved bandwidth must be positive, got {rb!r}")
            object.__setattr__(self, "resolved_bandwidth", float(rb))

    @property
    def resolved(self) -> bool:
        return self.family == LINEAR or self.resolved_bandwidth is not None

    def to_json_dict(self) -> dict:
        """Serialize to the JSON object layout used in reports and configs."""
        if self.family == LINEAR:
            return {"family": LINEAR}
        if self.bandwidth_policy == FIXED:
            bw = {"policy": FIXED, "value": self.bandwidth_value}
        else:
            bw = {"policy": MEDIAN, "seed": self.seed}
        if self.resolved_bandwidth is not None and self.bandwidth_policy == MEDIAN:
            bw["resolved"] = self.resolved_bandwidth
        return {"family": self.family, "bandwidth": bw}

    @classmethod
    def from_json_dict(cls, obj: dict) -> "KernelSpec":
        if not isinstance(obj, dict) or "family" not in obj:
            raise InputError("kernel spec must be an object with a 'family' key")
        family = obj["family"]
        if family == LINEAR:
            return cls(family=LINEAR)
        bw = obj.get("bandwidth")
        if bw is None:
            return cls(family=family)
        if not isinstance(bw, dict) or "policy" not in bw:
            raise InputError("kernel bandwidth must be an object with a 'policy' key")
        if bw["policy"] == FIXED:
            return cls(family=family, bandwidth_policy=FIXED,
                       bandwidth_value=bw.get("value"))
        if bw["policy"] == MEDIAN:
            return cls(family=family, bandwidth_policy=MEDIAN,
                       seed=int(bw.get("seed", 0)),
                       resolved_bandwidth=bw.get("resolved"))
        raise InputError(f"unknown bandwidth policy {bw['policy']!r}")


def gaussian_kernel(bandwidth: float | None = None, *, seed: int = 0) -> KernelSpec:
    """Gaussian spec; fixed bandwidth if given, else the median heuristic."""
    if bandwidth is None:
        return KernelSpec(GAUSSIAN, MEDIAN, seed=seed)
    return KernelSpec(GAUSSIAN, FIXED, bandwidth_value=bandwidth)


def laplacian_kernel(bandwidth: float | None = None, *, seed: int = 0) -> KernelSpec:
    if bandwidth is None:
        return KernelSpec(LAPLACIAN, MEDIAN, seed=seed)
    return KernelSpec(LAPLACIAN, FIXED, bandwidth_value=bandwidth)


def linear_kernel() -> KernelSpec:
    return KernelSpec(LINEAR)


@dataclass(frozen=True)
class GramBlock:
    """A dense block of kernel values over row and column index subsets."""

    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray


def _require_sigma(spec: KernelSpec) -> float:
    sigma = spec.resolved_bandwidth
    if sigma is None:
        raise ConfigurationError(
            f"{spec.family} kernel bandwidth not resolved; "
            "call resolve_bandwidth against the data first"
        )
    return sigma


def _pair_values(spec: KernelSpec, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Kernel values for every (row of X, row of Y) pair.

    This is the single evaluation path: the scalar kernel_eval and every Gram
    block go through it, so their outputs agree bitwise. Each output element
    only depends on its own pair of rows, which makes the result independent
    of how callers tile the computation.
    """
    if spec.family == LINEAR:
        return np.sum(X[:, None, :] * Y[None, :, :], axis=-1)
    sigma = _require_sigma(spec)
    diff = X[:, None, :] - Y[None, :, :]
    if spec.family == GAUSSIAN:
        d2 = np.sum(diff * diff, axis=-1)
        return np.exp(-d2 / (2.0 * sigma * sigma))
    d1 = np.sum(np.abs(diff), axis=-1)
    return np.exp(-d1 / sigma)


def _self_values(spec: KernelSpec, X: np.ndarray) -> np.ndarray:
    """K(x, x) per row, via the same formulas evaluated at y = x."""
    if spec.family == LINEAR:
        return np.sum(X * X, axis=-1)
    sigma = _require_sigma(spec)
    z = X - X
    if spec.family == GAUSSIAN:
        return np.exp(-np.sum(z * z, axis=-1) / (2.0 * sigma * sigma))
    return np.exp(-np.sum(np.abs(z), axis=-1) / sigma)


def kernel_eval(spec: KernelSpec, x, y) -> float:
    """Evaluate K(x, y) for two vectors.

    Parameters
    ----------
    spec : KernelSpec
        Must be resolved for gaussian/laplacian families.
    x, y : array_like
        Real vectors of equal dimension.
    """
    xv = np.asarray(x, dtype=np.float64)
    yv = np.asarray(y, dtype=np.float64)
    if xv.ndim != 1 or yv.ndim != 1:
        raise ShapeError("kernel_eval expects 1-D vectors")
    if xv.shape[0] != yv.shape[0]:
        raise ShapeError(
            f"dimension mismatch: {xv.shape[0]} vs {yv.shape[0]}"
        )
    return float(_pair_values(spec, xv[None, :], yv[None, :])[0, 0])


def _tile_rows(n_rows: int, n_cols: int, dim: int) -> int:
    per_row = max(1, n_cols * dim)
    return max(1, min(n_rows, _TILE_BUDGET // per_row))


def _cross_values(spec: KernelSpec, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Kernel matrix between two row matrices, tiled over X's rows.

    Entries equal kernel_eval on the corresponding row pairs exactly; the
    tiling bounds memory and cannot change any entry.
    """
    if not spec.resolved:
        _require_sigma(spec)
    values = np.empty((X.shape[0], Y.shape[0]), dtype=np.float64)
    if X.shape[0] and Y.shape[0]:
        step = _tile_rows(X.shape[0], Y.shape[0], X.shape[1])
        for start in range(0, X.shape[0], step):
            stop = min(start + step, X.shape[0])
            values[start:stop] = _pair_values(spec, X[start:stop], Y)
    return values


def gram_block(spec: KernelSpec, data: EmbeddingSet, rows, cols) -> GramBlock:
    """Materialize the kernel matrix over two index subsets of `data`.

    Entries equal kernel_eval on the corresponding row pairs exactly. Rows
    are processed in fixed-size tiles to bound memory; tiling cannot change
    any entry.
    """
    ridx = np.asarray(rows, dtype=np.int64).reshape(-1)
    cidx = np.asarray(cols, dtype=np.int64).reshape(-1)
    m = data.m
    for idx in (ridx, cidx):
        if idx.size and (idx.min() < 0 or idx.max() >= m):
            raise IndexError(
                f"index out of range: [{idx.min()}, {idx.max()}] vs {m} rows"
            )
    values = _cross_values(spec, data.values[ridx], data.values[cidx])
    return GramBlock(rows=ridx, cols=cidx, values=values)


def resolve_bandwidth(spec: KernelSpec, data: EmbeddingSet) -> KernelSpec:
    """Return a copy of `spec` with its bandwidth resolved against `data`.

    The median policy takes the median pairwise distance (Euclidean for
    gaussian, L1 for laplacian) over at most 1000 rows, sampled without
    replacement using spec.seed when the data is larger. Zero distances are
    excluded so near-duplicate rows cannot collapse the bandwidth.
    """
    if spec.family == LINEAR:
        raise InputError("linear kernel has no bandwidth to resolve")
    if spec.bandwidth_policy == FIXED:
        return dataclasses.replace(spec, resolved_bandwidth=spec.bandwidth_value)
    if data.m < 2:
        raise InputError("bandwidth resolution needs at least 2 rows")
    if data.m > _MEDIAN_SAMPLE_CAP:
        rng = np.random.default_rng(spec.seed)
        idx = np.sort(rng.choice(data.m, size=_MEDIAN_SAMPLE_CAP, replace=False))
        X = data.values[idx]
    else:
        X = data.values
    metric = "euclidean" if spec.family == GAUSSIAN else "cityblock"
    dists = pdist(X, metric=metric)
    positive = dists[dists > 0.0]
    if positive.size == 0:
        raise DegenerateDataError(
            "all pairwise distances are zero; median bandwidth undefined"
        )
    sigma = float(np.median(positive))
    return dataclasses.replace(spec, resolved_bandwidth=sigma)


def kappa(spec: KernelSpec, data: EmbeddingSet, labels: LabelVector) -> float:
    """Largest class-conditional mean of sqrt(K(x, x)).

    This is the constant bounding transfer leakage by 4 kappa^2. For the
    gaussian and laplacian families K(x, x) = 1, so the result is exactly 1
    regardless of the data.
    """
    check_aligned(data, labels)
    root = np.sqrt(_self_values(spec, data.values))
    best = None
    for c in range(labels.num_classes):
        mask = labels.labels == c
        if not mask.any():
            continue
        mean = float(np.mean(root[mask]))
        if best is None or mean > best:
            best = mean
    if best is None:
        raise InputError("all classes empty")
    return best
