"""Unbiased squared maximum mean discrepancy between two sample groups.

The estimator is the diagonal-excluded U-statistic

    MMD^2(a, b) =   sum_{i != j in a} K(x_i, x_j) / (|a| (|a| - 1))
                  + sum_{i != j in b} K(x_i, x_j) / (|b| (|b| - 1))
                  - 2 sum_{i in a, j in b} K(x_i, x_j) / (|a| |b|)

which is unbiased for the population MMD^2 and can be negative when the two
groups come from the same distribution. Values are returned as-is, never
clamped, because downstream leakage sums weight them and clamping would bias
the aggregate.

Summation discipline: group indices are sorted ascending, each Gram row is
summed by numpy's pairwise reduction, and row totals are combined with
math.fsum. The cross term is accumulated in a canonical orientation chosen
from the group contents, so the result is deterministic for a given input
regardless of index order and exactly symmetric in (a, b).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, InsufficientSamplesError, ShapeError
from .kernels import KernelSpec, _cross_values, gram_block, kernel_eval
from .samples import EmbeddingSet

_ORACLE_CAP = 200


@dataclass(frozen=True)
class SampleGroup:
    """An index subset of an EmbeddingSet (one class's rows).

    Index order never affects any statistic computed from the group.
    """

    source: EmbeddingSet
    indices: np.ndarray
    name: str | None = None

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64).reshape(-1)
        if idx.size == 0:
            raise InputError(f"empty sample group{self._suffix()}")
        if idx.min() < 0 or idx.max() >= self.source.m:
            raise IndexError(
                f"group index out of range{self._suffix()}: "
                f"[{idx.min()}, {idx.max()}] vs {self.source.m} rows"
            )
        if np.unique(idx).size != idx.size:
            raise InputError(f"duplicate indices in sample group{self._suffix()}")
        idx.setflags(write=False)
        object.__setattr__(self, "indices", idx)

    def _suffix(self) -> str:
        return f" ({self.name})" if self.name else ""

    def __len__(self) -> int:
        return int(self.indices.size)


def _check_pair(a: SampleGroup, b: SampleGroup) -> None:
    if a.source.dim != b.source.dim:
        raise ShapeError(
            f"groups have different dimensionality: {a.source.dim} vs {b.source.dim}"
        )
    for g in (a, b):
        if len(g) < 2:
            label = g.name if g.name else "sample group"
            raise InsufficientSamplesError(
                f"{label} has {len(g)} sample(s); the unbiased estimator needs "
                "at least 2"
            )


def _offdiag_sum(values: np.ndarray) -> float:
    """Sum of a square block excluding its diagonal, rows combined exactly."""
    work = values.copy()
    np.fill_diagonal(work, 0.0)
    return math.fsum(work.sum(axis=1))


def _block_sum(values: np.ndarray) -> float:
    return math.fsum(values.sum(axis=1))


def mmd2_unbiased(a: SampleGroup, b: SampleGroup, spec: KernelSpec) -> float:
    """Unbiased MMD^2 estimate between two groups under the given kernel.

    Parameters
    ----------
    a, b : SampleGroup
        Index subsets with at least 2 members each, over data of a common
        dimensionality.
    spec : KernelSpec
        Resolved kernel.

    Returns
    -------
    float
        The U-statistic; may be negative.
    """
    _check_pair(a, b)
    ia = np.sort(a.indices)
    ib = np.sort(b.indices)
    na, nb = ia.size, ib.size
    saa = _offdiag_sum(gram_block(spec, a.source, ia, ia).values)
    sbb = _offdiag_sum(gram_block(spec, b.source, ib, ib).values)
    # The cross sum is orientation-independent mathematically but not in
    # floating point, so it is always accumulated with the canonically
    # smaller group (by size, then row bytes) supplying the tile rows.
    Xa = a.source.values[ia]
    Xb = b.source.values[ib]
    if (na, Xa.tobytes()) <= (nb, Xb.tobytes()):
        sab = _block_sum(_cross_values(spec, Xa, Xb))
    else:
        sab = _block_sum(_cross_values(spec, Xb, Xa))
    return (
        saa / (na * (na - 1))
        + sbb / (nb * (nb - 1))
        - 2.0 * sab / (na * nb)
    )


def mmd2_brute_oracle(a: SampleGroup, b: SampleGroup, spec: KernelSpec) -> float:
    """Same statistic as mmd2_unbiased, written as literal nested loops.

    Test-scale reference implementation: no blocking, no reuse, no
    reordering, every kernel value evaluated independently in index order.
    Groups are capped at 200 members.
    """
    if len(a) > _ORACLE_CAP or len(b) > _ORACLE_CAP:
        raise InputError(f"oracle is limited to groups of {_ORACLE_CAP} members")
    _check_pair(a, b)
    xa = [a.source.values[i] for i in a.indices]
    xb = [b.source.values[i] for i in b.indices]
    na, nb = len(xa), len(xb)
    saa = 0.0
    for i in range(na):
        for j in range(na):
            if i != j:
                saa += kernel_eval(spec, xa[i], xa[j])
    sbb = 0.0
    for i in range(nb):
        for j in range(nb):
            if i != j:
                sbb += kernel_eval(spec, xb[i], xb[j])
    sab = 0.0
    for i in range(na):
        for j in range(nb):
            sab += kernel_eval(spec, xa[i], xb[j])
    return (
        saa / (na * (na - 1))
        + sbb / (nb * (nb - 1))
        - 2.0 * sab / (na * nb)
    )
