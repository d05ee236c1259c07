# When ground-truth labels are unavailable, k-means pseudo labels stand in.
# This script clusters a mixture, scores the clustering against the truth,
# and compares pseudo leakage with the true-label value.

import numpy as np

from tleak import (
    KMeansConfig,
    MixtureSpec,
    clustering_accuracy,
    gaussian_kernel,
    gen_mixture,
    hungarian,
    kmeans,
    mix_targets,
    pseudo_transfer_leakage,
    transfer_leakage,
)

data, labels = gen_mixture(
    MixtureSpec(num_classes=4, dim=8, separation=3.0, per_class=100, seed=1)
)

result = kmeans(data, KMeansConfig(k=4, seed=0))
print("k-means inertia:", result.inertia)
print("iterations:", result.iterations, "converged:", result.converged)

acc = clustering_accuracy(labels, result.assignment)
print("clustering accuracy:", acc.accuracy)
print("cluster -> class mapping:", acc.mapping)

# the mapping comes from a minimum-cost assignment on the negated
# contingency table; the solver is also usable on its own
cost = np.array([[4.0, 1.0, 3.0], [2.0, 0.0, 5.0], [3.0, 2.0, 2.0]])
perm, total = hungarian(cost)
print("assignment for a 3x3 cost matrix:", perm, "total cost:", total)

truth = transfer_leakage(data, labels, gaussian_kernel())
pseudo = pseudo_transfer_leakage(data, 4, gaussian_kernel())
print()
print("leakage with true labels: ", truth.value)
print("leakage with pseudo labels:", pseudo.value)
print("dropped clusters:", pseudo.dropped_clusters)

# soft targets for a downstream learner can blend the two label sources
hard = np.zeros(4)
hard[2] = 1.0
soft = np.full(4, 0.25)
print()
print("mixed target (70% ground truth):", mix_targets(hard, soft, 0.7))
