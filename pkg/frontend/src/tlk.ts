import * as os from 'node:os';
import { TleakInputError } from './run';

// Binary layout: "TLK1" magic, u32 row count, u32 column count, u8 label
// flag, then row-major float64 values and, when flagged, int32 labels.
// Everything after the magic is little-endian.

export interface ArrayView {
    data: Float64Array;
    rows: number;
    cols: number;
}

export type Matrix = number[][] | ArrayView;

export function asView(matrix: Matrix): ArrayView {
    if (!Array.isArray(matrix)) {
        const { data, rows, cols } = matrix;
        if (!Number.isInteger(rows) || !Number.isInteger(cols) || rows < 0 || cols < 0) {
            throw new TleakInputError('rows and cols must be non-negative integers');
        }
        if (data.length !== rows * cols) {
            throw new TleakInputError(
                `buffer holds ${data.length} values, expected ${rows}x${cols}`);
        }
        return matrix;
    }
    const rows = matrix.length;
    const cols = rows === 0 ? 0 : matrix[0].length;
    const data = new Float64Array(rows * cols);
    for (let i = 0; i < rows; i++) {
        const row = matrix[i];
        if (row.length !== cols) {
            throw new TleakInputError(`row ${i} has ${row.length} values, expected ${cols}`);
        }
        data.set(row, i * cols);
    }
    return { data, rows, cols };
}

export function asLabels(labels: ArrayLike<number>, rows: number, what = 'labels'): Int32Array {
    if (labels.length !== rows) {
        throw new TleakInputError(`${what}: got ${labels.length} entries for ${rows} rows`);
    }
    const out = new Int32Array(labels.length);
    for (let i = 0; i < labels.length; i++) {
        const v = labels[i];
        if (!Number.isInteger(v)) {
            throw new TleakInputError(`${what}[${i}] is not an integer: ${v}`);
        }
        if (v < -0x80000000 || v > 0x7fffffff) {
            throw new TleakInputError(`${what}[${i}] does not fit in a signed 32-bit label`);
        }
        out[i] = v;
    }
    return out;
}

export function encodeTlk(view: ArrayView, labels?: Int32Array): Buffer {
    const header = Buffer.alloc(13);
    header.write('TLK1', 0, 'ascii');
    header.writeUInt32LE(view.rows, 4);
    header.writeUInt32LE(view.cols, 8);
    header.writeUInt8(labels ? 1 : 0, 12);
    const parts = [header, valueBytes(view.data)];
    if (labels) {
        parts.push(labelBytes(labels));
    }
    return Buffer.concat(parts);
}

// Typed arrays carry platform byte order, so on little-endian hosts the
// buffer can be handed over as-is; otherwise take one converting copy.
function valueBytes(data: Float64Array): Buffer {
    if (os.endianness() === 'LE') {
        return Buffer.from(data.buffer, data.byteOffset, data.byteLength);
    }
    const buf = Buffer.alloc(data.length * 8);
    for (let i = 0; i < data.length; i++) {
        buf.writeDoubleLE(data[i], i * 8);
    }
    return buf;
}

function labelBytes(labels: Int32Array): Buffer {
    if (os.endianness() === 'LE') {
        return Buffer.from(labels.buffer, labels.byteOffset, labels.byteLength);
    }
    const buf = Buffer.alloc(labels.length * 4);
    for (let i = 0; i < labels.length; i++) {
        buf.writeInt32LE(labels[i], i * 4);
    }
    return buf;
}
