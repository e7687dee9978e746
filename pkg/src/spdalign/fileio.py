"""Plain-text file formats for matrices, transforms, traces, and datasets.

All floats are written with 17 significant digits so that a write/read
round trip reproduces the exact float64 values, and all writes go through
a temp file plus atomic rename so readers never observe a partial file.

Formats:

* matrix file: first line ``n``, then ``n`` rows of ``n`` floats.
* transform file: first line ``n m``, then ``n`` rows of ``m`` floats.
* trace file: one ``iter J grad_norm step`` row per recorded iteration.
* manifest file: one ``sample_id class_label path`` row per sample, where
  the path is relative to the manifest's directory. Blank lines and lines
  starting with ``#`` are ignored in every format.
"""

import os
import tempfile

import numpy as np

from .errors import ValidationError
from .graphs import LabeledDataset

FLOAT_FMT = "%.17g"


def atomic_write(path, text):
    """Write text to path via a same-directory temp file and atomic rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise


def _float_row(row):
    return " ".join(FLOAT_FMT % v for v in row)


def _data_lines(path):
    """Yield (line_number, stripped_line) skipping blanks and # comments."""
    try:
        with open(path, "r") as handle:
            raw = handle.readlines()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    for number, line in enumerate(raw, start=1):
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            yield number, stripped


def _parse_floats(path, number, line, expected):
    fields = line.split()
    if len(fields) != expected:
        raise ValidationError(
            f"{path}:{number}: expected {expected} values, got {len(fields)}"
        )
    try:
        return [float(f) for f in fields]
    except ValueError as exc:
        raise ValidationError(f"{path}:{number}: non-numeric value: {exc}") from exc


def _parse_header_ints(path, lines, count):
    try:
        number, line = next(lines)
    except StopIteration:
        raise ValidationError(f"{path}: empty file") from None
    fields = line.split()
    if len(fields) != count:
        raise ValidationError(
            f"{path}:{number}: header must hold {count} integer(s), "
            f"got {len(fields)} field(s)"
        )
    values = []
    for field in fields:
        try:
            value = int(field)
        except ValueError:
            raise ValidationError(
                f"{path}:{number}: header field {field!r} is not an integer"
            ) from None
        if value < 1:
            raise ValidationError(f"{path}:{number}: header value must be >= 1")
        values.append(value)
    return values


def _parse_rows(path, lines, rows, cols):
    out = np.empty((rows, cols))
    filled = 0
    for number, line in lines:
        if filled == rows:
            raise ValidationError(
                f"{path}:{number}: found more than {rows} data rows"
            )
        out[filled] = _parse_floats(path, number, line, cols)
        filled += 1
    if filled != rows:
        raise ValidationError(f"{path}: expected {rows} data rows, found {filled}")
    if not np.all(np.isfinite(out)):
        raise ValidationError(f"{path}: file holds non-finite values")
    return out


def save_matrix(path, X):
    """Write a square matrix under the single-integer header format."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValidationError(f"matrix must be square, got shape {X.shape}")
    n = X.shape[0]
    body = "\n".join(_float_row(row) for row in X)
    atomic_write(path, f"{n}\n{body}\n")


def load_matrix(path):
    lines = _data_lines(path)
    (n,) = _parse_header_ints(path, lines, 1)
    return _parse_rows(path, lines, n, n)


def save_transform(path, W):
    """Write a tall transform matrix under the two-integer header format."""
    W = np.asarray(W, dtype=float)
    if W.ndim != 2:
        raise ValidationError(f"transform must be 2-D, got shape {W.shape}")
    n, m = W.shape
    body = "\n".join(_float_row(row) for row in W)
    atomic_write(path, f"{n} {m}\n{body}\n")


def load_transform(path):
    lines = _data_lines(path)
    n, m = _parse_header_ints(path, lines, 2)
    return _parse_rows(path, lines, n, m)


def save_trace(path, result):
    """Write one `iter J grad_norm step` row per recorded iteration."""
    rows = ["# iter J grad_norm step"]
    for k in range(result.J_trace.size):
        rows.append(
            "%d %s %s %s"
            % (
                k,
                FLOAT_FMT % result.J_trace[k],
                FLOAT_FMT % result.grad_norm_trace[k],
                FLOAT_FMT % result.step_trace[k],
            )
        )
    atomic_write(path, "\n".join(rows) + "\n")


def load_trace(path):
    """Read a trace file back as a (rows, 4) float array."""
    rows = [
        _parse_floats(path, number, line, 4) for number, line in _data_lines(path)
    ]
    if not rows:
        raise ValidationError(f"{path}: trace file holds no data rows")
    return np.asarray(rows)


def save_manifest(path, entries):
    """Write `sample_id class_label path` rows."""
    rows = ["# sample_id class_label path"]
    for sample_id, label, rel_path in entries:
        rows.append(f"{sample_id} {label} {rel_path}")
    atomic_write(path, "\n".join(rows) + "\n")


def parse_manifest(path):
    """Read manifest rows as (sample_id, class_label, path) string triples."""
    entries = []
    seen = set()
    for number, line in _data_lines(path):
        fields = line.split(None, 2)
        if len(fields) != 3:
            raise ValidationError(
                f"{path}:{number}: expected `sample_id class_label path`, "
                f"got {len(fields)} field(s)"
            )
        sample_id = fields[0]
        if sample_id in seen:
            raise ValidationError(
                f"{path}:{number}: duplicate sample id {sample_id!r}"
            )
        seen.add(sample_id)
        entries.append(tuple(fields))
    if not entries:
        raise ValidationError(f"{path}: manifest holds no entries")
    return entries


def load_dataset(manifest_path):
    """Load the dataset a manifest describes.

    Class labels are mapped to 0..c-1 in sorted order of their string form.
    Returns (dataset, sample_ids, label_names) where label_names[i] is the
    original label string for mapped class i.
    """
    entries = parse_manifest(manifest_path)
    base = os.path.dirname(os.path.abspath(manifest_path))
    label_names = sorted({label for _, label, _ in entries})
    label_index = {name: i for i, name in enumerate(label_names)}
    samples, labels, sample_ids = [], [], []
    for sample_id, label, rel_path in entries:
        matrix = load_matrix(os.path.join(base, rel_path))
        if samples and matrix.shape != samples[0].shape:
            raise ValidationError(
                f"{manifest_path}: sample {sample_id!r} has shape "
                f"{matrix.shape}, expected {samples[0].shape}"
            )
        samples.append(matrix)
        labels.append(label_index[label])
        sample_ids.append(sample_id)
    dataset = LabeledDataset(np.asarray(samples), np.asarray(labels))
    return dataset, sample_ids, label_names
