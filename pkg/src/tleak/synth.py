"""Synthetic Gaussian mixtures with a controllable class-separation knob.

Class c gets its mean at separation * sigma along standard basis direction
e_{c mod dim} and per_class i.i.d. isotropic Gaussian points around it. At
separation 0 every class is identically distributed (leakage should vanish);
large separations make classes trivially clusterable.

Reproducibility across platforms and library versions matters more here than
speed, so the sampler is pinned down completely: uniforms come from numpy's
default_rng (PCG64), class c draws from its own stream seeded seed + c, and
normal variates are produced by an explicit Box-Muller transform (cosine
branch then sine branch, interleaved) instead of the library's ziggurat
sampler, whose tables are not a stable contract.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .samples import TRUTH, EmbeddingSet, LabelVector


@dataclass(frozen=True)
class MixtureSpec:
    num_classes: int
    dim: int
    separation: float
    per_class: int
    sigma: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.num_classes < 1:
            raise InputError(f"num_classes must be >= 1, got {self.num_classes}")
        if self.dim < 1:
            raise InputError(f"dim must be >= 1, got {self.dim}")
        if self.per_class < 2:
            raise InputError(f"per_class must be >= 2, got {self.per_class}")
        if not np.isfinite(self.separation) or self.separation < 0:
            raise InputError(f"separation must be >= 0, got {self.separation}")
        if not np.isfinite(self.sigma) or self.sigma <= 0:
            raise InputError(f"sigma must be > 0, got {self.sigma}")


def _box_muller(rng: np.random.Generator, count: int) -> np.ndarray:
    """`count` standard normals from the rng's uniform stream."""
    pairs = (count + 1) // 2
    # 1 - U keeps the argument of the log in (0, 1].
    u1 = 1.0 - rng.random(pairs)
    u2 = rng.random(pairs)
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    z = np.empty(2 * pairs, dtype=np.float64)
    z[0::2] = radius * np.cos(angle)
    z[1::2] = radius * np.sin(angle)
    return z[:count]


def gen_mixture(spec: MixtureSpec) -> tuple[EmbeddingSet, LabelVector]:
    """Draw the mixture: rows are class-major (all of class 0 first)."""
    n, d = spec.per_class, spec.dim
    values = np.empty((spec.num_classes * n, d), dtype=np.float64)
    for c in range(spec.num_classes):
        rng = np.random.default_rng(spec.seed + c)
        z = _box_muller(rng, n * d).reshape(n, d)
        mean = np.zeros(d)
        mean[c % d] = spec.separation * spec.sigma
        values[c * n: (c + 1) * n] = mean + spec.sigma * z
    labels = np.repeat(np.arange(spec.num_classes, dtype=np.int64), n)
    return (
        EmbeddingSet(values),
        LabelVector(labels=labels, num_classes=spec.num_classes, kind=TRUTH),
    )
