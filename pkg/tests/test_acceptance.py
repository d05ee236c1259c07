"""Acceptance gate: one test per required behavior, with pinned tolerances.

Each test registers a PASS/FAIL line through the record_criterion fixture so
the terminal summary shows every criterion explicitly.
"""

import itertools
import math
import time

import numpy as np
from scipy.stats import spearmanr

import tleak as T
from tleak.cli import main
from tleak.io import save_tlk
from tleak.samples import PSEUDO


def _checked(record, name, passed, detail):
    record(name, passed, detail)
    assert passed, f"{name}: {detail}"


def test_mmd_oracle_equivalence(record_criterion):
    t0 = time.perf_counter()
    rng = np.random.default_rng(0)
    worst = 0.0
    for trial in range(200):
        d = int(rng.integers(1, 17))
        na, nb = int(rng.integers(2, 51)), int(rng.integers(2, 51))
        X = rng.standard_normal((na + nb, d))
        ds = T.EmbeddingSet(X)
        a = T.SampleGroup(ds, np.arange(na))
        b = T.SampleGroup(ds, np.arange(na, na + nb))
        fam = trial % 3
        if fam == 0:
            spec = T.resolve_bandwidth(T.gaussian_kernel(), ds)
        elif fam == 1:
            spec = T.resolve_bandwidth(T.laplacian_kernel(), ds)
        else:
            spec = T.linear_kernel()
        delta = abs(T.mmd2_unbiased(a, b, spec) - T.mmd2_brute_oracle(a, b, spec))
        worst = max(worst, delta)
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-10 and elapsed < 10.0
    _checked(
        record_criterion,
        "MMD oracle equivalence (200 instances, |delta| < 1e-10, < 10 s)",
        ok,
        f"worst |delta| = {worst:.2e}, {elapsed:.1f} s",
    )


def test_independence_gives_near_zero_leakage(record_criterion):
    t0 = time.perf_counter()
    values = []
    for seed in range(10):
        rng = np.random.default_rng(seed)
        data = T.EmbeddingSet(rng.standard_normal((2000, 8)))
        labels = T.LabelVector(labels=rng.integers(0, 2, 2000), num_classes=2)
        report = T.transfer_leakage(data, labels, T.gaussian_kernel())
        values.append(abs(report.value))
    mean_abs = math.fsum(values) / len(values)
    elapsed = time.perf_counter() - t0
    ok = mean_abs < 0.02 and elapsed < 60.0
    _checked(
        record_criterion,
        "Independent labels give near-zero leakage (10 seeds, mean < 0.02, < 60 s)",
        ok,
        f"mean |T-Leak| = {mean_abs:.2e}, {elapsed:.1f} s",
    )


def test_leakage_upper_bound(record_criterion):
    rng = np.random.default_rng(7)
    worst = -np.inf
    for trial in range(100):
        kind = trial % 5
        if kind == 0:  # random scale over five orders of magnitude
            m, d = int(rng.integers(4, 80)), int(rng.integers(1, 12))
            X = rng.standard_normal((m, d)) * 10.0 ** rng.uniform(-2.0, 3.0)
            C = int(rng.integers(2, 5))
        elif kind == 1:  # tight clusters separated by huge gaps
            C = int(rng.integers(2, 5))
            d = int(rng.integers(1, 8))
            X = np.concatenate(
                [rng.standard_normal((20, d)) * 1e-3 + 1e6 * c for c in range(C)]
            )
            m = 20 * C
        elif kind == 2:  # heavy duplication
            m, d, C = 40, 3, 2
            X = np.repeat(rng.standard_normal((4, d)), 10, axis=0)
        elif kind == 3:  # collinear grid
            m, d, C = 30, 1, 3
            X = np.linspace(0.0, 1.0, m)[:, None]
        else:
            m, d, C = int(rng.integers(6, 40)), int(rng.integers(1, 6)), 2
            X = rng.standard_normal((m, d))
        labels = rng.integers(0, C, m)
        for c in range(C):
            if (labels == c).sum() < 2:
                pool = np.flatnonzero(np.bincount(labels, minlength=C)[labels] > 2)
                labels[pool[: 2 - (labels == c).sum()]] = c
        data = T.EmbeddingSet(np.asarray(X, dtype=float))
        lv = T.LabelVector(labels=np.asarray(labels, dtype=np.int64), num_classes=C)
        for base in (T.gaussian_kernel(), T.laplacian_kernel()):
            try:
                worst = max(worst, T.transfer_leakage(data, lv, base).value)
            except T.errors.DegenerateDataError:
                continue  # all rows identical: no bandwidth, no statistic
    ok = worst <= 4.0 + 1e-9
    _checked(
        record_criterion,
        "Leakage bounded by 4 for normalized kernels (100 inputs)",
        ok,
        f"max T-Leak = {worst:.4f}",
    )


def test_leakage_tracks_clustering_accuracy(record_criterion):
    t0 = time.perf_counter()
    separations = [0.0, 0.5, 1.0, 2.0, 4.0]
    leakages = []
    accuracies = []
    for sep in separations:
        spec = T.MixtureSpec(
            num_classes=5, dim=16, separation=sep, per_class=400, seed=0
        )
        data, labels = T.gen_mixture(spec)
        report = T.transfer_leakage(data, labels, T.gaussian_kernel())
        leakages.append(report.value)
        km = T.kmeans(data, T.KMeansConfig(k=5, seed=0))
        accuracies.append(T.clustering_accuracy(labels, km.assignment).accuracy)
    strictly_up = all(b > a for a, b in zip(leakages, leakages[1:]))
    non_decreasing = all(b >= a for a, b in zip(accuracies, accuracies[1:]))
    rho = float(spearmanr(leakages, accuracies).statistic)
    elapsed = time.perf_counter() - t0
    ok = strictly_up and non_decreasing and rho >= 0.9 and elapsed < 120.0
    _checked(
        record_criterion,
        "Leakage rises with separation and tracks accuracy (Spearman >= 0.9, < 2 min)",
        ok,
        f"leakage {['%.3f' % v for v in leakages]}, "
        f"accuracy {['%.3f' % v for v in accuracies]}, rho = {rho:.2f}, {elapsed:.0f} s",
    )


def test_assignment_exhaustive_optimality(record_criterion):
    rng = np.random.default_rng(3)
    failures = 0
    for trial in range(500):
        n = int(rng.integers(1, 7))
        if trial % 3 == 0:
            cost = rng.integers(0, 5, size=(n, n)).astype(float)
        else:
            cost = rng.standard_normal((n, n)) * 10.0 ** rng.uniform(-1, 2)
        perm, total = T.hungarian(cost)
        best_total = None
        best_perm = None
        for cand in itertools.permutations(range(n)):
            t = math.fsum(float(cost[i, cand[i]]) for i in range(n))
            if best_total is None or t < best_total:
                best_total, best_perm = t, cand
            elif t == best_total and cand < best_perm:
                best_perm = cand
        if total != best_total or tuple(perm) != best_perm:
            failures += 1
    ok = failures == 0
    _checked(
        record_criterion,
        "Assignment solver matches exhaustive enumeration (500 instances, exact)",
        ok,
        f"{failures} mismatches",
    )


def test_accuracy_exact_properties(record_criterion):
    rng = np.random.default_rng(9)
    failures = 0
    for _ in range(200):
        m = int(rng.integers(1, 80))
        C = int(rng.integers(1, 7))
        y = rng.integers(0, C, m)
        p = rng.integers(0, C, m)
        t = T.LabelVector(labels=y, num_classes=C)
        if T.clustering_accuracy(t, T.LabelVector(labels=y.copy(), num_classes=C, kind=PSEUDO)).accuracy != 1.0:
            failures += 1
        perm = rng.permutation(C)
        a1 = T.clustering_accuracy(t, T.LabelVector(labels=p, num_classes=C, kind=PSEUDO)).accuracy
        a2 = T.clustering_accuracy(t, T.LabelVector(labels=perm[p], num_classes=C, kind=PSEUDO)).accuracy
        if a1 != a2:
            failures += 1
    ok = failures == 0
    _checked(
        record_criterion,
        "Accuracy: identity = 1 and relabel-invariant (200 vectors, exact)",
        ok,
        f"{failures} violations",
    )


def test_benchmark_split_counts(record_criterion):
    h30 = T.load_fixture_hierarchy("entity30")
    cfg30 = T.SplitConfig(
        half_size=15, labeled_per_super=6, unlabeled_per_super=2, make_mixed=True
    )
    m30a = T.build_splits(h30, cfg30)
    m30b = T.build_splits(h30, cfg30)
    l1 = m30a.labeled_sets["L1"]
    l2 = m30a.labeled_sets["L2"]
    mixed = m30a.labeled_sets["L1.5"]
    from_l1 = len(set(mixed) & set(l1))
    from_l2 = len(set(mixed) & set(l2))
    counts30 = (
        len(l1) == 90
        and len(l2) == 90
        and len(m30a.unlabeled_sets["U1"]) == 30
        and len(m30a.unlabeled_sets["U2"]) == 30
        and len(mixed) == 90
        and from_l1 == 45
        and from_l2 == 45
    )

    h100 = T.load_fixture_hierarchy("cifar100")
    cfg100 = T.SplitConfig(
        half_size=10, labeled_per_super=4, unlabeled_per_super=1, make_mixed=False
    )
    m100a = T.build_splits(h100, cfg100)
    m100b = T.build_splits(h100, cfg100)
    counts100 = (
        len(m100a.labeled_sets["L1"]) == 40
        and len(m100a.labeled_sets["L2"]) == 40
        and len(m100a.unlabeled_sets["U1"]) == 10
        and len(m100a.unlabeled_sets["U2"]) == 10
    )

    stable = m30a.to_json() == m30b.to_json() and m100a.to_json() == m100b.to_json()
    valid = (
        T.validate_manifest(m30a, h30).ok and T.validate_manifest(m100a, h100).ok
    )
    ok = counts30 and counts100 and stable and valid
    _checked(
        record_criterion,
        "Split counts: 30x8 -> 90/30 with 45+45 mixed; 20x5 -> 40/10; byte-stable",
        ok,
        f"counts30={counts30}, counts100={counts100}, stable={stable}, valid={valid}",
    )


def test_bootstrap_stability(record_criterion):
    data, labels = T.gen_mixture(
        T.MixtureSpec(num_classes=2, dim=8, separation=4.0, per_class=1000, seed=3)
    )
    report = T.bootstrap_leakage(
        data, labels, T.gaussian_kernel(), replicates=10, seed=0
    )
    ratio = report.bootstrap.std / report.bootstrap.mean

    const = T.EmbeddingSet(np.array([[0.0], [0.0], [5.0], [5.0]]))
    const_labels = T.LabelVector(labels=np.array([0, 0, 1, 1]), num_classes=2)
    const_report = T.bootstrap_leakage(
        const, const_labels, T.gaussian_kernel(1.0), replicates=10, seed=0
    )
    ok = ratio < 0.05 and const_report.bootstrap.std == 0.0
    _checked(
        record_criterion,
        "Bootstrap stability: std/mean < 0.05 at B=10; constant data std = 0",
        ok,
        f"std/mean = {ratio:.4f}, constant std = {const_report.bootstrap.std}",
    )


def test_cli_runs_are_byte_identical(record_criterion, tmp_path):
    rng = np.random.default_rng(1)
    data = T.EmbeddingSet(rng.standard_normal((24, 3)))
    labels = T.LabelVector(labels=np.repeat(np.arange(3), 8), num_classes=3)
    src = tmp_path / "data.tlk"
    save_tlk(src, data, labels)
    tcsv = tmp_path / "true.csv"
    pcsv = tmp_path / "pred.csv"
    tcsv.write_text("label\n" + "\n".join(str(v) for v in labels.labels) + "\n")
    pred = np.roll(labels.labels, 5)
    pcsv.write_text("label\n" + "\n".join(str(v) for v in pred) + "\n")

    invocations = {
        "compute": ["compute", "--data", src, "--no-timestamp"],
        "pseudo": ["pseudo", "--data", src, "--k", "3", "--no-timestamp"],
        "bootstrap": [
            "bootstrap", "--data", src, "--replicates", "3", "--seed", "2",
            "--no-timestamp",
        ],
        "acc": ["acc", "--true", tcsv, "--pred", pcsv, "--no-timestamp"],
        "kmeans": ["kmeans", "--data", src, "--k", "3", "--no-timestamp"],
        "splits": [
            "splits", "--fixture", "cifar100", "--half", "10", "--labeled", "4",
            "--unlabeled", "1", "--mixed",
        ],
        "synth": [
            "synth", "--classes", "2", "--dim", "3", "--sep", "1.5",
            "--per-class", "8", "--seed", "4",
        ],
        "sweep": [
            "sweep", "--separations", "0,1", "--classes", "2", "--dim", "3",
            "--per-class", "10", "--seed", "0",
        ],
    }
    mismatched = []
    for name, args in invocations.items():
        blobs = []
        for run in ("one", "two"):
            out = tmp_path / f"{name}.{run}.out"
            argv = [str(a) for a in args] + ["--out", str(out)]
            if main(argv) != 0:
                mismatched.append(f"{name} (nonzero exit)")
                break
            blobs.append(out.read_bytes())
        else:
            if blobs[0] != blobs[1]:
                mismatched.append(name)
    ok = not mismatched
    _checked(
        record_criterion,
        "CLI determinism: every subcommand byte-identical across reruns",
        ok,
        "all 8 subcommands" if ok else f"mismatches: {mismatched}",
    )
