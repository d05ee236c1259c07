"""tleak: kernel two-sample statistics for labeled embedding sets.

The headline quantity is transfer leakage, a weighted sum of unbiased MMD^2
values between class-conditional groups of a representation, which measures
how much class structure the representation exposes. The package also ships
its pseudo-label and raw-feature variants, bootstrap stability, k-means and
Hungarian-matched clustering accuracy, benchmark class-split generation, and
a synthetic mixture generator, all behind a deterministic CLI (`tleak`).
"""

from . import errors
from .clustering import (
    AccuracyResult,
    KMeansConfig,
    KMeansResult,
    clustering_accuracy,
    hungarian,
    kmeans,
    mix_targets,
)
from .io import load_embeddings, load_labels, save_csv, save_tlk
from .kernels import (
    GramBlock,
    KernelSpec,
    gaussian_kernel,
    gram_block,
    kappa,
    kernel_eval,
    laplacian_kernel,
    linear_kernel,
    resolve_bandwidth,
)
from .leakage import (
    BootstrapSummary,
    LeakageReport,
    bootstrap_leakage,
    pseudo_transfer_leakage,
    self_leakage,
    transfer_leakage,
)
from .mmd import SampleGroup, mmd2_brute_oracle, mmd2_unbiased
from .samples import EmbeddingSet, LabelVector
from .splits import (
    ClassHierarchy,
    SplitConfig,
    SplitManifest,
    Superclass,
    ValidationReport,
    build_splits,
    load_fixture_hierarchy,
    validate_manifest,
)
from .synth import MixtureSpec, gen_mixture

__version__ = "0.1.0"

__all__ = [
    "AccuracyResult",
    "BootstrapSummary",
    "ClassHierarchy",
    "EmbeddingSet",
    "GramBlock",
    "KMeansConfig",
    "KMeansResult",
    "KernelSpec",
    "LabelVector",
    "LeakageReport",
    "MixtureSpec",
    "SampleGroup",
    "SplitConfig",
    "SplitManifest",
    "Superclass",
    "ValidationReport",
    "bootstrap_leakage",
    "build_splits",
    "clustering_accuracy",
    "errors",
    "gaussian_kernel",
    "gen_mixture",
    "gram_block",
    "hungarian",
    "kappa",
    "kernel_eval",
    "kmeans",
    "laplacian_kernel",
    "linear_kernel",
    "load_embeddings",
    "load_fixture_hierarchy",
    "load_labels",
    "mix_targets",
    "mmd2_brute_oracle",
    "mmd2_unbiased",
    "pseudo_transfer_leakage",
    "resolve_bandwidth",
    "save_csv",
    "save_tlk",
    "self_leakage",
    "transfer_leakage",
    "validate_manifest",
]
