"""Containers for embedding matrices and their label vectors.

An EmbeddingSet is an m x d float64 matrix of representations, one row per
sample. A LabelVector assigns each row an integer class in [0, num_classes)
and remembers whether the labels are ground truth or pseudo labels. Both are
immutable after validation so downstream statistics can assume clean input.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, ShapeError

TRUTH = "truth"
PSEUDO = "pseudo"
_LABEL_KINDS = (TRUTH, PSEUDO)


def _as_float_matrix(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ShapeError(f"embeddings must be a 2-D matrix, got ndim={arr.ndim}")
    return arr


@dataclass(frozen=True)
class EmbeddingSet:
    """An m x d matrix of sample representations.

    Parameters
    ----------
    values : array_like
        Real matrix, one row per sample. 1-D input is treated as m x 1.
    sample_ids : sequence of str, optional
        Per-row identifiers; must be unique and of length m when given.
    """

    values: np.ndarray
    sample_ids: tuple[str, ...] | None = None

    def __post_init__(self):
        arr = _as_float_matrix(self.values)
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InputError(f"empty dataset (shape {arr.shape})")
        if not np.all(np.isfinite(arr)):
            bad = int(np.flatnonzero(~np.isfinite(arr).all(axis=1))[0])
            raise InputError(f"non-finite value in embeddings (first bad row {bad})")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        if self.sample_ids is not None:
            ids = tuple(str(s) for s in self.sample_ids)
            if len(ids) != arr.shape[0]:
                raise ShapeError(
                    f"sample_ids length {len(ids)} != row count {arr.shape[0]}"
                )
            if len(set(ids)) != len(ids):
                raise InputError("sample_ids must be unique")
            object.__setattr__(self, "sample_ids", ids)

    @property
    def m(self) -> int:
        return self.values.shape[0]

    @property
    def dim(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class LabelVector:
    """Integer class labels aligned with an EmbeddingSet.

    Every label must fall in [0, num_classes). `kind` records whether the
    labels are ground truth ("truth") or produced by a clustering ("pseudo").
    """

    labels: np.ndarray
    num_classes: int
    kind: str = TRUTH

    def __post_init__(self):
        arr = np.asarray(self.labels)
        if arr.ndim != 1:
            raise ShapeError(f"labels must be 1-D, got ndim={arr.ndim}")
        if arr.size == 0:
            raise InputError("empty label vector")
        if not np.issubdtype(arr.dtype, np.integer):
            flt = np.asarray(arr, dtype=np.float64)
            if not np.all(flt == np.floor(flt)):
                raise InputError("labels must be integers")
            arr = flt.astype(np.int64)
        arr = arr.astype(np.int64, copy=True)
        if self.num_classes < 1:
            raise InputError(f"num_classes must be positive, got {self.num_classes}")
        if arr.min() < 0 or arr.max() >= self.num_classes:
            raise InputError(
                f"labels must lie in [0, {self.num_classes}), "
                f"got range [{arr.min()}, {arr.max()}]"
            )
        if self.kind not in _LABEL_KINDS:
            raise InputError(f"unknown label kind {self.kind!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "labels", arr)

    @classmethod
    def from_labels(cls, labels, kind: str = TRUTH) -> "LabelVector":
        """Build a vector inferring num_classes = max(label) + 1."""
        arr = np.asarray(labels, dtype=np.int64)
        if arr.size == 0:
            raise InputError("empty label vector")
        return cls(labels=arr, num_classes=int(arr.max()) + 1, kind=kind)

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.num_classes)


def check_aligned(data: EmbeddingSet, labels: LabelVector) -> None:
    """Raise ShapeError unless labels and data have the same row count."""
    if len(labels) != data.m:
        raise ShapeError(
            f"label count {len(labels)} != sample count {data.m}"
        )
