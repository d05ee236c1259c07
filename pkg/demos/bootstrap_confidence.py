# Bootstrap resampling around the leakage point estimate.

from tleak import MixtureSpec, bootstrap_leakage, gaussian_kernel, gen_mixture

data, labels = gen_mixture(
    MixtureSpec(num_classes=3, dim=8, separation=2.5, per_class=200, seed=5)
)

report = bootstrap_leakage(data, labels, gaussian_kernel(), replicates=10, seed=0)
print("point estimate:", report.value)
print("bootstrap mean:", report.bootstrap.mean)
print("bootstrap std: ", report.bootstrap.std)
print("replicates:", report.bootstrap.replicates, "seed:", report.bootstrap.seed)

# plain resampling redraws until every class keeps at least two members;
# stratified resampling sidesteps redraws by resampling within classes,
# which also freezes the class counts
strat = bootstrap_leakage(
    data, labels, gaussian_kernel(), replicates=10, seed=0, stratified=True
)
print()
print("stratified mean:", strat.bootstrap.mean)
print("stratified std: ", strat.bootstrap.std)

# the bandwidth is resolved once on the original data and shared by every
# replicate, so the spread reflects sampling noise only
print()
print("bandwidth used everywhere:", report.kernel.resolved_bandwidth)
