/**
 * In-process access to the tleak toolchain for callers that hold embeddings
 * as plain arrays. Each function marshals its arguments into the file
 * formats the CLI understands, runs the matching subcommand in a private
 * temp directory, and hands back the parsed report. No statistic is ever
 * computed on this side of the process boundary.
 *
 * The `tleak` executable must be reachable on PATH, or named explicitly
 * through the TLEAK_BIN environment variable.
 */

import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';

import { runTleak, TleakInputError } from './run';
import { asLabels, asView, encodeTlk, Matrix } from './tlk';

export { TleakError, TleakInputError, TleakDataError } from './run';
export type { ArrayView, Matrix } from './tlk';

export type KernelFamily = 'gaussian' | 'laplacian' | 'linear';

export interface KernelOptions {
    /** Kernel family; the core defaults to gaussian. */
    kernel?: KernelFamily;
    /** A positive number, or 'median' for the median heuristic (the default). */
    bandwidth?: number | 'median';
    /** Seed for the median heuristic's row subsample. */
    bandwidthSeed?: number;
}

export interface PseudoOptions extends KernelOptions {
    kmeansSeed?: number;
    nInit?: number;
    maxIters?: number;
    tol?: number;
}

export interface BandwidthInfo {
    policy: string;
    seed: number | null;
    resolved: number;
}

export interface KernelInfo {
    family: KernelFamily;
    /** Absent for the linear kernel, which has no bandwidth. */
    bandwidth?: BandwidthInfo;
}

export interface BootstrapInfo {
    replicates: number;
    seed: number;
    stratified: boolean;
    mean: number;
    std: number;
    values: number[];
}

/** Parsed tleak_report_v1 document, keys exactly as serialized. */
export interface LeakageReport {
    schema: string;
    kind: 'transfer' | 'self' | 'pseudo';
    value: number;
    negatives_present: boolean;
    class_counts: number[];
    pair_mmd: number[][];
    pair_weight: number[][];
    dropped_clusters: number[];
    kernel: KernelInfo;
    bootstrap: BootstrapInfo | null;
}

export interface AccuracyResult {
    accuracy: number;
    /** mapping[j] is the true class assigned to predicted cluster j. */
    mapping: number[];
    confusion: number[][];
}

export interface Superclass {
    name: string;
    subclasses: string[];
}

export interface ClassHierarchy {
    superclasses: Superclass[];
}

export interface SplitOptions {
    halfSize: number;
    labeledPerSuper: number;
    unlabeledPerSuper: number;
    /** Also emit the mixed L1.5 labeled set. */
    makeMixed?: boolean;
    selection?: 'positional' | 'seeded';
    seed?: number;
}

export interface SplitManifest {
    schema: string;
    labeled_sets: Record<string, string[]>;
    unlabeled_sets: Record<string, string[]>;
    provenance: {
        hierarchy_sha256: string;
        config: Record<string, unknown>;
        seed: number;
        mixed_rule: string | null;
    };
}

/**
 * Score the transfer leakage of a labeled embedding matrix.
 *
 * `data` is either an array of equal-length rows or a row-major
 * Float64Array with an explicit shape; `labels` assigns one integer class
 * per row. The result mirrors the CLI's JSON report.
 */
export function transferLeakage(
    data: Matrix,
    labels: ArrayLike<number>,
    options: KernelOptions = {},
): LeakageReport {
    const view = asView(data);
    const lab = asLabels(labels, view.rows);
    return withTempDir((dir) => {
        const dataPath = path.join(dir, 'data.tlk');
        fs.writeFileSync(dataPath, encodeTlk(view, lab));
        const out = path.join(dir, 'report.json');
        runTleak([
            'compute', '--data', dataPath, '--format', 'tlk',
            ...kernelArgs(options), '--out', out, '--no-timestamp',
        ]);
        return readReport(out);
    });
}

/**
 * Cluster unlabeled embeddings with k-means and score the leakage of the
 * resulting pseudo-labels. Singleton clusters are dropped by the core and
 * listed in the report's dropped_clusters.
 */
export function pseudoTransferLeakage(
    data: Matrix,
    k: number,
    options: PseudoOptions = {},
): LeakageReport {
    if (!Number.isInteger(k) || k < 1) {
        throw new TleakInputError(`k must be a positive integer, got ${k}`);
    }
    const view = asView(data);
    return withTempDir((dir) => {
        const dataPath = path.join(dir, 'data.tlk');
        fs.writeFileSync(dataPath, encodeTlk(view));
        const out = path.join(dir, 'report.json');
        const args = [
            'pseudo', '--data', dataPath, '--format', 'tlk', '--k', String(k),
            ...kernelArgs(options),
        ];
        if (options.kmeansSeed !== undefined) {
            args.push('--kmeans-seed', String(options.kmeansSeed));
        }
        if (options.nInit !== undefined) {
            args.push('--n-init', String(options.nInit));
        }
        if (options.maxIters !== undefined) {
            args.push('--max-iters', String(options.maxIters));
        }
        if (options.tol !== undefined) {
            args.push('--tol', String(options.tol));
        }
        args.push('--out', out, '--no-timestamp');
        runTleak(args);
        return readReport(out);
    });
}

/**
 * Hungarian-matched clustering accuracy between a ground-truth labeling
 * and a predicted one.
 */
export function clusteringAccuracy(
    yTrue: ArrayLike<number>,
    yPred: ArrayLike<number>,
): AccuracyResult {
    const a = asLabels(yTrue, yTrue.length, 'true labels');
    const b = asLabels(yPred, yPred.length, 'predicted labels');
    return withTempDir((dir) => {
        const truePath = path.join(dir, 'true.csv');
        const predPath = path.join(dir, 'pred.csv');
        fs.writeFileSync(truePath, labelCsv(a));
        fs.writeFileSync(predPath, labelCsv(b));
        const out = path.join(dir, 'acc.json');
        runTleak([
            'acc', '--true', truePath, '--pred', predPath,
            '--out', out, '--no-timestamp',
        ]);
        const doc = JSON.parse(fs.readFileSync(out, 'utf-8'));
        return doc.accuracy as AccuracyResult;
    });
}

/** Build a labeled/unlabeled benchmark split manifest from a class hierarchy. */
export function buildSplits(
    hierarchy: ClassHierarchy,
    options: SplitOptions,
): SplitManifest {
    return withTempDir((dir) => {
        const hierPath = path.join(dir, 'hierarchy.json');
        fs.writeFileSync(hierPath, JSON.stringify(hierarchy));
        const out = path.join(dir, 'manifest.json');
        const args = [
            'splits', '--hierarchy', hierPath,
            '--half', String(options.halfSize),
            '--labeled', String(options.labeledPerSuper),
            '--unlabeled', String(options.unlabeledPerSuper),
        ];
        if (options.makeMixed) {
            args.push('--mixed');
        }
        if (options.selection !== undefined) {
            args.push('--selection', options.selection);
        }
        if (options.seed !== undefined) {
            args.push('--seed', String(options.seed));
        }
        args.push('--out', out);
        runTleak(args);
        return JSON.parse(fs.readFileSync(out, 'utf-8')) as SplitManifest;
    });
}

function kernelArgs(options: KernelOptions): string[] {
    const args: string[] = [];
    if (options.kernel !== undefined) {
        args.push('--kernel', options.kernel);
    }
    if (options.bandwidth !== undefined) {
        args.push('--bandwidth', String(options.bandwidth));
    }
    if (options.bandwidthSeed !== undefined) {
        args.push('--bandwidth-seed', String(options.bandwidthSeed));
    }
    return args;
}

function readReport(file: string): LeakageReport {
    const doc = JSON.parse(fs.readFileSync(file, 'utf-8'));
    // The config echo names the temp files written above, which mean
    // nothing to the caller; the report proper is everything else.
    delete doc.config;
    return doc as LeakageReport;
}

function labelCsv(labels: Int32Array): string {
    return 'label\n' + Array.from(labels).join('\n') + '\n';
}

function withTempDir<T>(fn: (dir: string) => T): T {
    const dir = fs.mkdtempSync(path.join(os.tmpdir(), 'tleak-'));
    try {
        return fn(dir);
    } finally {
        fs.rmSync(dir, { recursive: true, force: true });
    }
}
