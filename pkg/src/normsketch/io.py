"""Dataset ingestion (CSV, LIBSVM) and benchmark report files."""
import csv
import math
import statistics
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .errors import InputError
from .matrix import as_csr

FORMATS = ("csv", "libsvm")
REPORT_HEADER = ["method", "norm", "size_param", "rep", "seed", "loss", "wall_time_s", "rows"]
SUMMARY_HEADER = ["method", "norm", "size_param", "count", "mean_loss", "std_loss"]


def _parse_float(tok, lineno):
    try:
        v = float(tok)
    except ValueError:
        raise InputError(f"line {lineno}: cannot parse {tok!r} as a number") from None
    if not math.isfinite(v):
        raise InputError(f"line {lineno}: non-finite value {tok!r}")
    return v


def _is_numeric_row(fields):
    try:
        [float(f) for f in fields]
    except ValueError:
        return False
    return True


def _read_csv(path):
    with open(path, newline="") as fh:
        rows = [(i + 1, r) for i, r in enumerate(csv.reader(fh)) if r and any(f.strip() for f in r)]
    if rows and not _is_numeric_row(rows[0][1]):
        rows = rows[1:]  # header
    if not rows:
        raise InputError(f"{path}: no data rows")
    width = len(rows[0][1])
    if width < 2:
        raise InputError(f"{path}: need at least one feature column and a response column")
    data = np.empty((len(rows), width))
    for k, (lineno, fields) in enumerate(rows):
        if len(fields) != width:
            raise InputError(f"line {lineno}: expected {width} fields, found {len(fields)}")
        data[k] = [_parse_float(f.strip(), lineno) for f in fields]
    return as_csr(data[:, :-1]), data[:, -1].copy()


def _read_libsvm(path):
    labels, rows, cols, vals = [], [], [], []
    n_cols = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            toks = line.split()
            r = len(labels)
            labels.append(_parse_float(toks[0], lineno))
            for tok in toks[1:]:
                idx, sep, val = tok.partition(":")
                if not sep:
                    raise InputError(f"line {lineno}: expected index:value, found {tok!r}")
                try:
                    j = int(idx)
                except ValueError:
                    raise InputError(f"line {lineno}: bad feature index {idx!r}") from None
                if j < 1:
                    raise InputError(f"line {lineno}: feature indices are 1-based, found {j}")
                rows.append(r)
                cols.append(j - 1)
                vals.append(_parse_float(val, lineno))
                n_cols = max(n_cols, j)
    if not labels:
        raise InputError(f"{path}: no data rows")
    A = sp.csr_matrix((vals, (rows, cols)), shape=(len(labels), max(n_cols, 1)))
    return as_csr(A), np.asarray(labels)


def ingest_dataset(path, fmt="csv"):
    """Read (A, b). CSV: last column is the response, optional header.
    LIBSVM: ``label idx:value ...`` with 1-based indices."""
    if fmt not in FORMATS:
        raise InputError(f"unknown format {fmt!r}; choose from {FORMATS}")
    try:
        return _read_csv(path) if fmt == "csv" else _read_libsvm(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def emit_dataset(A, b, path, fmt="csv"):
    """Write (A, b) so that ingest_dataset reproduces it bit for bit."""
    A = as_csr(A)
    b = np.asarray(b, dtype=np.float64)
    with open(path, "w", newline="") as fh:
        if fmt == "csv":
            dense = A.toarray()
            for row, y in zip(dense, b):
                fh.write(",".join(repr(float(v)) for v in row) + "," + repr(float(y)) + "\n")
        elif fmt == "libsvm":
            for i in range(A.shape[0]):
                lo, hi = A.indptr[i], A.indptr[i + 1]
                feats = " ".join(f"{j + 1}:{float(v)!r}" for j, v in zip(A.indices[lo:hi], A.data[lo:hi]))
                fh.write(f"{float(b[i])!r} {feats}".rstrip() + "\n")
        else:
            raise InputError(f"unknown format {fmt!r}; choose from {FORMATS}")


@dataclass(frozen=True)
class BenchmarkRecord:
    method: str
    norm: str
    size_param: int
    rep: int
    seed: int
    loss: float
    wall_time: float
    rows: int

    def sort_key(self):
        return (self.method, self.size_param, self.rep)


def summary_path(path):
    p = Path(path)
    return p.with_name(p.stem + ".summary" + p.suffix)


def timing_path(path):
    p = Path(path)
    return p.with_name(p.stem + ".timing" + p.suffix)


def summarize(records):
    groups = {}
    for r in sorted(records, key=BenchmarkRecord.sort_key):
        groups.setdefault((r.method, r.norm, r.size_param), []).append(r.loss)
    out = []
    for (method, norm, size), losses in groups.items():
        std = statistics.stdev(losses) if len(losses) > 1 else 0.0
        out.append((method, norm, size, len(losses), statistics.fmean(losses), std))
    return out


def emit_report(records, path, include_timing=True):
    """Write the per-run CSV and a per-(method, size) summary beside it.

    With ``include_timing=False`` the wall-time column is left empty and the
    timings go to a ``.timing`` sidecar, so the report itself is
    reproducible byte for byte.
    """
    records = sorted(records, key=BenchmarkRecord.sort_key)
    if not records:
        raise InputError("no benchmark records to write")
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(REPORT_HEADER)
            for r in records:
                wt = repr(r.wall_time) if include_timing else ""
                w.writerow([r.method, r.norm, r.size_param, r.rep, r.seed, repr(r.loss), wt, r.rows])
        with open(summary_path(path), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(SUMMARY_HEADER)
            for method, norm, size, count, mean, std in summarize(records):
                w.writerow([method, norm, size, count, repr(mean), repr(std)])
        if not include_timing:
            with open(timing_path(path), "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["method", "size_param", "rep", "wall_time_s"])
                for r in records:
                    w.writerow([r.method, r.size_param, r.rep, repr(r.wall_time)])
    except OSError as exc:
        raise InputError(f"cannot write report {path}: {exc}") from exc
    return Path(path)


def read_report(path):
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != REPORT_HEADER:
            raise InputError(f"{path}: unexpected header {reader.fieldnames}")
        for row in reader:
            out.append(
                BenchmarkRecord(
                    method=row["method"],
                    norm=row["norm"],
                    size_param=int(row["size_param"]),
                    rep=int(row["rep"]),
                    seed=int(row["seed"]),
                    loss=float(row["loss"]),
                    wall_time=float(row["wall_time_s"]) if row["wall_time_s"] else float("nan"),
                    rows=int(row["rows"]),
                )
            )
    return out
