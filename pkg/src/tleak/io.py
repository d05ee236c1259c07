"""Embedding file formats, report serialization, atomic writes.

Two interchangeable input formats:

csv
    One row per sample, numeric feature columns, optional final integer
    column headed "label". A file without a header row is read as pure
    features.

tlk binary
    magic "TLK1" (4 bytes)
    m           little-endian uint32
    d           little-endian uint32
    has_labels  uint8 (0 or 1)
    values      m * d little-endian float64, row-major
    labels      m little-endian int32 (only when has_labels = 1)

Loaders validate everything (finiteness, label range, exact byte counts) and
fail with positioned messages; arbitrary byte streams produce format errors,
never crashes. Writers go through a temp file in the destination directory
followed by an atomic rename.
"""

from __future__ import annotations

import csv
import io as _stdio
import json
import os
import struct
import tempfile
from pathlib import Path

import numpy as np

from .errors import FormatError, InputError
from .samples import TRUTH, EmbeddingSet, LabelVector

TLK_MAGIC = b"TLK1"
_HEADER = struct.Struct("<4sIIB")

CSV_FORMAT = "csv"
TLK_FORMAT = "tlk"
AUTO_FORMAT = "auto"


def atomic_write_bytes(path, data: bytes) -> None:
    """Write bytes then rename into place so readers never see a torn file."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or Path("."),
                               prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, target)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def atomic_write_text(path, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def dumps_json(doc: dict) -> str:
    """Canonical report serialization: fixed key order, 2-space indent."""
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def write_json(path, doc: dict) -> None:
    atomic_write_text(path, dumps_json(doc))


def _validated_labels(raw: np.ndarray, where: str) -> LabelVector:
    arr = np.asarray(raw, dtype=np.int64)
    if (arr == -1).any():
        pos = int(np.flatnonzero(arr == -1)[0])
        raise InputError(
            f"unlabeled sentinel not supported ({where} row {pos} has label -1)"
        )
    if (arr < 0).any():
        pos = int(np.flatnonzero(arr < 0)[0])
        raise InputError(f"negative label {int(arr[pos])} at {where} row {pos}")
    return LabelVector(labels=arr, num_classes=int(arr.max()) + 1, kind=TRUTH)


def save_tlk(path, data: EmbeddingSet, labels: LabelVector | None = None) -> None:
    if labels is not None and len(labels) != data.m:
        raise InputError("labels and data disagree on the row count")
    header = _HEADER.pack(TLK_MAGIC, data.m, data.dim, 1 if labels is not None else 0)
    body = np.ascontiguousarray(data.values, dtype="<f8").tobytes()
    tail = b""
    if labels is not None:
        if labels.labels.max(initial=0) > np.iinfo(np.int32).max:
            raise InputError("labels exceed the int32 range of the tlk format")
        tail = np.ascontiguousarray(labels.labels, dtype="<i4").tobytes()
    atomic_write_bytes(path, header + body + tail)


def _load_tlk_bytes(raw: bytes) -> tuple[EmbeddingSet, LabelVector | None]:
    if len(raw) < _HEADER.size:
        raise FormatError(
            f"truncated header: need {_HEADER.size} bytes, got {len(raw)} "
            f"(byte offset {len(raw)})"
        )
    magic, m, d, has_labels = _HEADER.unpack_from(raw, 0)
    if magic != TLK_MAGIC:
        raise FormatError(f"bad magic {magic!r} at byte offset 0, expected {TLK_MAGIC!r}")
    if m == 0:
        raise InputError("empty dataset (m = 0)")
    if d == 0:
        raise InputError("empty dataset (d = 0)")
    if has_labels not in (0, 1):
        raise FormatError(f"has_labels must be 0 or 1, got {has_labels} at byte offset 12")
    values_bytes = m * d * 8
    expected = _HEADER.size + values_bytes + (m * 4 if has_labels else 0)
    if len(raw) < expected:
        raise FormatError(
            f"truncated file: expected {expected} bytes for m={m}, d={d}, "
            f"has_labels={has_labels}; got {len(raw)} (byte offset {len(raw)})"
        )
    if len(raw) > expected:
        raise FormatError(f"trailing data after byte offset {expected}")
    values = np.frombuffer(raw, dtype="<f8", count=m * d,
                           offset=_HEADER.size).reshape(m, d)
    data = EmbeddingSet(values.astype(np.float64))
    labels = None
    if has_labels:
        ints = np.frombuffer(raw, dtype="<i4", count=m,
                             offset=_HEADER.size + values_bytes)
        labels = _validated_labels(ints, "label block")
    return data, labels


def save_csv(path, data: EmbeddingSet, labels: LabelVector | None = None) -> None:
    if labels is not None and len(labels) != data.m:
        raise InputError("labels and data disagree on the row count")
    buf = _stdio.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = [f"f{j}" for j in range(data.dim)]
    if labels is not None:
        header.append("label")
    writer.writerow(header)
    for i in range(data.m):
        row = [repr(float(v)) for v in data.values[i]]
        if labels is not None:
            row.append(str(int(labels.labels[i])))
        writer.writerow(row)
    atomic_write_text(path, buf.getvalue())


def _parse_csv_text(text: str) -> tuple[EmbeddingSet, LabelVector | None]:
    rows = list(csv.reader(_stdio.StringIO(text)))
    rows = [r for r in rows if r]
    if not rows:
        raise InputError("empty dataset (no rows)")

    def all_numeric(cells: list[str]) -> bool:
        for cell in cells:
            try:
                float(cell)
            except ValueError:
                return False
        return True

    has_header = not all_numeric(rows[0])
    has_labels = has_header and rows[0][-1].strip() == "label"
    width = len(rows[0])
    data_rows = rows[1:] if has_header else rows
    first_line = 2 if has_header else 1
    if not data_rows:
        raise InputError("empty dataset (header only)")
    n_features = width - 1 if has_labels else width
    if n_features < 1:
        raise InputError("no feature columns")
    values = np.empty((len(data_rows), n_features), dtype=np.float64)
    label_ints = np.empty(len(data_rows), dtype=np.int64) if has_labels else None
    for i, row in enumerate(data_rows):
        line = first_line + i
        if len(row) != width:
            raise FormatError(
                f"line {line}: expected {width} columns, got {len(row)}"
            )
        for j in range(n_features):
            try:
                values[i, j] = float(row[j])
            except ValueError:
                raise FormatError(
                    f"line {line}: non-numeric cell {row[j]!r} in column {j}"
                ) from None
        if has_labels:
            try:
                label_ints[i] = int(row[-1])
            except ValueError:
                raise FormatError(
                    f"line {line}: label must be an integer, got {row[-1]!r}"
                ) from None
    data = EmbeddingSet(values)
    labels = _validated_labels(label_ints, "csv") if has_labels else None
    return data, labels


def _sniff_format(path: Path, raw_head: bytes) -> str:
    suffix = path.suffix.lower()
    if suffix == ".csv":
        return CSV_FORMAT
    if suffix == ".tlk":
        return TLK_FORMAT
    if raw_head.startswith(TLK_MAGIC):
        return TLK_FORMAT
    return CSV_FORMAT


def load_embeddings(path, fmt: str = AUTO_FORMAT) -> tuple[EmbeddingSet, LabelVector | None]:
    """Load an embedding file, returning labels when the file carries them.

    fmt "auto" selects by file extension, falling back to magic sniffing.
    """
    p = Path(path)
    if fmt not in (AUTO_FORMAT, CSV_FORMAT, TLK_FORMAT):
        raise InputError(f"unknown format {fmt!r}")
    try:
        raw = p.read_bytes()
    except OSError as exc:
        raise InputError(f"cannot read {p}: {exc}") from exc
    resolved = fmt if fmt != AUTO_FORMAT else _sniff_format(p, raw[:4])
    if resolved == TLK_FORMAT:
        return _load_tlk_bytes(raw)
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError(
            f"not valid UTF-8 text (byte offset {exc.start}); "
            "is this a binary file misread as csv?"
        ) from exc
    return _parse_csv_text(text)


def _parse_label_only_csv(text: str) -> LabelVector | None:
    rows = [r for r in csv.reader(_stdio.StringIO(text)) if r]
    if not rows or [c.strip() for c in rows[0]] != ["label"]:
        return None
    ints = np.empty(len(rows) - 1, dtype=np.int64)
    for i, row in enumerate(rows[1:]):
        line = i + 2
        if len(row) != 1:
            raise FormatError(f"line {line}: expected 1 column, got {len(row)}")
        try:
            ints[i] = int(row[0])
        except ValueError:
            raise FormatError(
                f"line {line}: label must be an integer, got {row[0]!r}"
            ) from None
    if ints.size == 0:
        raise InputError("empty dataset (header only)")
    return _validated_labels(ints, "csv")


def load_labels(path, fmt: str = AUTO_FORMAT) -> LabelVector:
    """Load a label vector from a labeled embedding file or a single integer
    column (with or without a "label" header)."""
    p = Path(path)
    if fmt in (AUTO_FORMAT, CSV_FORMAT):
        try:
            text = p.read_bytes().decode("utf-8")
        except (OSError, UnicodeDecodeError):
            text = None
        if text is not None:
            only = _parse_label_only_csv(text)
            if only is not None:
                return only
    data, labels = load_embeddings(path, fmt)
    if labels is not None:
        return labels
    if data.dim == 1:
        col = data.values[:, 0]
        if np.all(col == np.floor(col)):
            return _validated_labels(col.astype(np.int64), "label column")
    raise InputError(
        f"{path} carries no labels: add a 'label' column or pass a "
        "single-column integer file"
    )
