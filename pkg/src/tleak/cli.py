"""Command-line interface.

Subcommands: compute, pseudo, bootstrap, acc, kmeans, splits, synth, sweep.
Exit codes: 0 success, 2 input or usage error, 3 numeric or degenerate
error. All randomness sits behind explicit seed flags, every JSON report
records the invoking configuration, and output files are written atomically.
Set TLEAK_THREADS to cap the worker count; results do not depend on it.
"""

from __future__ import annotations

import argparse
import csv
import io as _stdio
import json
import sys
from datetime import datetime, timezone

from . import io as tio
from .clustering import KMeansConfig, clustering_accuracy, kmeans
from .errors import InputError, NumericError, TleakError
from .kernels import (
    FIXED,
    GAUSSIAN,
    LINEAR,
    MEDIAN,
    KernelSpec,
)
from .leakage import (
    bootstrap_leakage,
    pseudo_transfer_leakage,
    self_leakage,
    transfer_leakage,
)
from .samples import LabelVector
from .splits import (
    FIXTURES,
    ClassHierarchy,
    SplitConfig,
    build_splits,
    load_fixture_hierarchy,
)
from .synth import MixtureSpec, gen_mixture


def _kernel_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kernel", default=GAUSSIAN,
                   choices=["gaussian", "laplacian", "linear"],
                   help="kernel family (default gaussian)")
    p.add_argument("--bandwidth", default=MEDIAN,
                   help="'median' or a positive number (default median)")
    p.add_argument("--bandwidth-seed", type=int, default=0,
                   help="row subsampling seed for the median heuristic")


def _report_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="write a JSON report here")
    p.add_argument("--no-timestamp", action="store_true",
                   help="omit generated_at from the report (byte-stable output)")


def _kernel_from_args(args) -> KernelSpec:
    if args.kernel == LINEAR:
        return KernelSpec(LINEAR)
    if args.bandwidth == MEDIAN:
        return KernelSpec(args.kernel, MEDIAN, seed=args.bandwidth_seed)
    try:
        value = float(args.bandwidth)
    except ValueError:
        raise InputError(
            f"--bandwidth must be 'median' or a number, got {args.bandwidth!r}"
        ) from None
    return KernelSpec(args.kernel, FIXED, bandwidth_value=value)


def _finish_report(doc: dict, args, config: dict) -> dict:
    doc["config"] = config
    if not args.no_timestamp:
        doc["generated_at"] = datetime.now(timezone.utc).isoformat()
    return doc


def _write_or_skip(args, doc: dict) -> None:
    if args.out:
        tio.write_json(args.out, doc)


def _need_labels(path, fmt):
    data, labels = tio.load_embeddings(path, fmt)
    if labels is None:
        raise InputError(f"{path} carries no labels")
    return data, labels


def _cmd_compute(args) -> int:
    data, labels = _need_labels(args.data, args.format)
    spec = _kernel_from_args(args)
    fn = self_leakage if getattr(args, "self") else transfer_leakage
    report = fn(data, labels, spec)
    doc = _finish_report(report.to_json_dict(), args, {
        "command": "compute",
        "data": args.data,
        "format": args.format,
        "kernel": spec.to_json_dict(),
        "self": bool(getattr(args, "self")),
    })
    _write_or_skip(args, doc)
    print(report.value)
    return 0


def _cmd_pseudo(args) -> int:
    data, _ = tio.load_embeddings(args.data, args.format)
    spec = _kernel_from_args(args)
    cfg = KMeansConfig(k=args.k, max_iters=args.max_iters, tol=args.tol,
                       seed=args.kmeans_seed, n_init=args.n_init)
    report = pseudo_transfer_leakage(data, args.k, spec, cfg)
    doc = _finish_report(report.to_json_dict(), args, {
        "command": "pseudo",
        "data": args.data,
        "format": args.format,
        "kernel": spec.to_json_dict(),
        "k": args.k,
        "kmeans": {"seed": cfg.seed, "n_init": cfg.n_init,
                   "max_iters": cfg.max_iters, "tol": cfg.tol},
    })
    _write_or_skip(args, doc)
    print(report.value)
    return 0


def _cmd_bootstrap(args) -> int:
    data, labels = _need_labels(args.data, args.format)
    spec = _kernel_from_args(args)
    report = bootstrap_leakage(data, labels, spec, args.replicates, args.seed,
                               stratified=args.stratified)
    doc = _finish_report(report.to_json_dict(), args, {
        "command": "bootstrap",
        "data": args.data,
        "format": args.format,
        "kernel": spec.to_json_dict(),
        "replicates": args.replicates,
        "seed": args.seed,
        "stratified": args.stratified,
    })
    _write_or_skip(args, doc)
    print(report.value)
    return 0


def _cmd_acc(args) -> int:
    y_true = tio.load_labels(getattr(args, "true"))
    y_pred = tio.load_labels(args.pred)
    if y_true.num_classes != y_pred.num_classes:
        width = max(y_true.num_classes, y_pred.num_classes)
        y_true = LabelVector(y_true.labels, width, y_true.kind)
        y_pred = LabelVector(y_pred.labels, width, y_pred.kind)
    result = clustering_accuracy(y_true, y_pred)
    doc = _finish_report({
        "accuracy": {
            "accuracy": result.accuracy,
            "mapping": [int(v) for v in result.mapping],
            "confusion": [[int(v) for v in row] for row in result.confusion],
        },
    }, args, {
        "command": "acc",
        "true": getattr(args, "true"),
        "pred": args.pred,
    })
    _write_or_skip(args, doc)
    print(result.accuracy)
    return 0


def _cmd_kmeans(args) -> int:
    data, _ = tio.load_embeddings(args.data, args.format)
    cfg = KMeansConfig(k=args.k, max_iters=args.max_iters, tol=args.tol,
                       seed=args.seed, n_init=args.n_init)
    result = kmeans(data, cfg)
    doc = _finish_report({
        "k": args.k,
        "inertia": result.inertia,
        "iterations": result.iterations,
        "converged": result.converged,
        "centroids": [[float(v) for v in row] for row in result.centroids],
        "assignment": [int(v) for v in result.assignment.labels],
    }, args, {
        "command": "kmeans",
        "data": args.data,
        "format": args.format,
        "k": args.k,
        "seed": cfg.seed,
        "n_init": cfg.n_init,
        "max_iters": cfg.max_iters,
        "tol": cfg.tol,
    })
    _write_or_skip(args, doc)
    print(result.inertia)
    return 0


def _cmd_splits(args) -> int:
    if args.fixture:
        hierarchy = load_fixture_hierarchy(args.fixture)
    else:
        try:
            with open(args.hierarchy, encoding="utf-8") as fh:
                hierarchy = ClassHierarchy.from_json_dict(json.load(fh))
        except OSError as exc:
            raise InputError(f"cannot read {args.hierarchy}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"{args.hierarchy} is not valid JSON: {exc}") from exc
    cfg = SplitConfig(
        half_size=args.half,
        labeled_per_super=args.labeled,
        unlabeled_per_super=args.unlabeled,
        make_mixed=args.mixed,
        seed=args.seed,
        selection=args.selection,
    )
    manifest = build_splits(hierarchy, cfg)
    tio.atomic_write_text(args.out, manifest.to_json())
    sizes = {name: len(v) for name, v in sorted(manifest.labeled_sets.items())}
    sizes.update({name: len(v) for name, v in sorted(manifest.unlabeled_sets.items())})
    print(" ".join(f"{k}={v}" for k, v in sizes.items()))
    return 0


def _cmd_synth(args) -> int:
    spec = MixtureSpec(num_classes=args.classes, dim=args.dim,
                       separation=args.sep, per_class=args.per_class,
                       sigma=args.sigma, seed=args.seed)
    data, labels = gen_mixture(spec)
    if args.format == "csv":
        tio.save_csv(args.out, data, labels)
    else:
        tio.save_tlk(args.out, data, labels)
    print(f"wrote {data.m} x {data.dim} samples to {args.out}")
    return 0


def _cmd_sweep(args) -> int:
    try:
        separations = [float(s) for s in args.separations.split(",") if s != ""]
    except ValueError:
        raise InputError(
            f"--separations must be comma-separated numbers, got {args.separations!r}"
        ) from None
    if not separations:
        raise InputError("--separations is empty")
    spec = _kernel_from_args(args)
    buf = _stdio.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["separation", "leakage", "kmeans_accuracy"])
    for sep in separations:
        mix = MixtureSpec(num_classes=args.classes, dim=args.dim,
                          separation=sep, per_class=args.per_class,
                          sigma=args.sigma, seed=args.seed)
        data, labels = gen_mixture(mix)
        leak = transfer_leakage(data, labels, spec).value
        cfg = KMeansConfig(k=args.classes, seed=args.kmeans_seed)
        result = kmeans(data, cfg)
        acc = clustering_accuracy(labels, result.assignment).accuracy
        writer.writerow([repr(sep), repr(leak), repr(acc)])
    tio.atomic_write_text(args.out, buf.getvalue())
    print(f"wrote {len(separations)} sweep rows to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tleak",
        description="Kernel two-sample leakage statistics for labeled "
                    "embedding sets, plus clustering and split tools.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="transfer or self leakage of a labeled file")
    p.add_argument("--data", required=True, help="embedding file (csv or tlk)")
    p.add_argument("--format", default="auto", choices=["auto", "csv", "tlk"])
    _kernel_flags(p)
    p.add_argument("--self", action="store_true",
                   help="tag the report as self leakage (raw-feature input)")
    _report_flags(p)
    p.set_defaults(fn=_cmd_compute)

    p = sub.add_parser("pseudo", help="transfer leakage under k-means pseudo labels")
    p.add_argument("--data", required=True)
    p.add_argument("--format", default="auto", choices=["auto", "csv", "tlk"])
    p.add_argument("--k", type=int, required=True)
    _kernel_flags(p)
    p.add_argument("--kmeans-seed", type=int, default=0)
    p.add_argument("--n-init", type=int, default=10)
    p.add_argument("--max-iters", type=int, default=300)
    p.add_argument("--tol", type=float, default=1e-4)
    _report_flags(p)
    p.set_defaults(fn=_cmd_pseudo)

    p = sub.add_parser("bootstrap", help="bootstrap mean/std around the leakage")
    p.add_argument("--data", required=True)
    p.add_argument("--format", default="auto", choices=["auto", "csv", "tlk"])
    p.add_argument("--replicates", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stratified", action="store_true",
                   help="resample within each class instead of over all rows")
    _kernel_flags(p)
    _report_flags(p)
    p.set_defaults(fn=_cmd_bootstrap)

    p = sub.add_parser("acc", help="clustering accuracy between two label files")
    p.add_argument("--true", required=True, help="ground-truth labels")
    p.add_argument("--pred", required=True, help="predicted labels")
    _report_flags(p)
    p.set_defaults(fn=_cmd_acc)

    p = sub.add_parser("kmeans", help="k-means clustering of an embedding file")
    p.add_argument("--data", required=True)
    p.add_argument("--format", default="auto", choices=["auto", "csv", "tlk"])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-init", type=int, default=10)
    p.add_argument("--max-iters", type=int, default=300)
    p.add_argument("--tol", type=float, default=1e-4)
    _report_flags(p)
    p.set_defaults(fn=_cmd_kmeans)

    p = sub.add_parser("splits", help="labeled/unlabeled class-split manifest")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--hierarchy", help="hierarchy JSON file")
    src.add_argument("--fixture", choices=list(FIXTURES),
                     help="use a bundled hierarchy")
    p.add_argument("--half", type=int, required=True,
                   help="superclasses per half")
    p.add_argument("--labeled", type=int, required=True,
                   help="labeled subclasses per superclass")
    p.add_argument("--unlabeled", type=int, required=True,
                   help="unlabeled subclasses per superclass")
    p.add_argument("--mixed", action="store_true", help="emit the mixed set L1.5")
    p.add_argument("--selection", default="positional",
                   choices=["positional", "seeded"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_splits)

    p = sub.add_parser("synth", help="synthetic Gaussian-mixture embeddings")
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--sep", type=float, required=True,
                   help="class-mean separation in units of sigma")
    p.add_argument("--per-class", type=int, required=True)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", default="tlk", choices=["tlk", "csv"])
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_synth)

    p = sub.add_parser("sweep", help="separation sweep: leakage and k-means "
                                     "accuracy per separation, as CSV")
    p.add_argument("--separations", default="0,0.5,1,2,4",
                   help="comma-separated separation values")
    p.add_argument("--classes", type=int, default=5)
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--per-class", type=int, default=400)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0,
                   help="mixture seed, reused for every separation")
    p.add_argument("--kmeans-seed", type=int, default=0)
    _kernel_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except NumericError as exc:
        print(f"tleak: {exc}", file=sys.stderr)
        return 3
    except TleakError as exc:
        print(f"tleak: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
