"""File formats: Matrix Market (coordinate/array), CSV, LIBSVM, instance
directories and JSON result records.

Parsers raise ``ParseError`` carrying the 1-based line and column of the
offending token.
"""
import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .linalg import as_csr


class ParseError(ValueError):
    def __init__(self, msg, path=None, line=None, col=None):
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}"
            if col is not None:
                where += f":{col}"
        super().__init__(f"{where}: {msg}" if where else msg)
        self.path, self.line, self.col = path, line, col


def _num(tok, path, line, col, kind=float):
    try:
        v = kind(tok)
    except ValueError:
        raise ParseError(f"expected a number, got {tok!r}", path, line, col) from None
    if kind is float and not math.isfinite(v):
        raise ParseError(f"non-finite value {tok!r}", path, line, col)
    return v


def _tokens(line):
    # (column, token) pairs, 1-based columns
    out, i = [], 0
    while i < len(line):
        if line[i].isspace():
            i += 1
            continue
        j = i
        while j < len(line) and not line[j].isspace():
            j += 1
        out.append((i + 1, line[i:j]))
        i = j
    return out


def read_mtx(path):
    """Read a Matrix Market file: sparse CSR for coordinate, dense for array."""
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines:
        raise ParseError("empty file", path, 1)
    header = lines[0].split()
    if len(header) < 5 or header[0].lower() != "%%matrixmarket" or header[1].lower() != "matrix":
        raise ParseError("missing '%%MatrixMarket matrix' header", path, 1, 1)
    fmt, field_, symm = (h.lower() for h in header[2:5])
    if fmt not in ("coordinate", "array"):
        raise ParseError(f"unsupported format {fmt!r}", path, 1)
    if field_ not in ("real", "integer", "pattern", "double"):
        raise ParseError(f"unsupported field {field_!r}", path, 1)
    if symm not in ("general", "symmetric", "skew-symmetric"):
        raise ParseError(f"unsupported symmetry {symm!r}", path, 1)

    body = ((no, l) for no, l in enumerate(lines[1:], start=2)
            if l.strip() and not l.lstrip().startswith("%"))
    try:
        no, l = next(body)
    except StopIteration:
        raise ParseError("missing size line", path, len(lines) + 1) from None
    toks = _tokens(l)
    need = 3 if fmt == "coordinate" else 2
    if len(toks) != need:
        raise ParseError(f"size line needs {need} integers", path, no, 1)
    dims = [_num(t, path, no, c, int) for c, t in toks]
    rows, cols = dims[0], dims[1]
    if rows < 0 or cols < 0:
        raise ParseError("negative dimension", path, no, 1)

    if fmt == "array":
        vals = []
        for no, l in body:
            for c, t in _tokens(l):
                vals.append(_num(t, path, no, c))
        if len(vals) != rows * cols:
            raise ParseError(f"expected {rows * cols} values, found {len(vals)}", path, no)
        return np.array(vals, dtype=np.float64).reshape((rows, cols), order="F")

    nnz = dims[2]
    I, J, V = [], [], []
    for no, l in body:
        toks = _tokens(l)
        want = 2 if field_ == "pattern" else 3
        if len(toks) != want:
            raise ParseError(f"expected {want} fields", path, no, toks[0][0] if toks else 1)
        i = _num(toks[0][1], path, no, toks[0][0], int)
        j = _num(toks[1][1], path, no, toks[1][0], int)
        if not (1 <= i <= rows):
            raise ParseError(f"row index {i} out of range", path, no, toks[0][0])
        if not (1 <= j <= cols):
            raise ParseError(f"column index {j} out of range", path, no, toks[1][0])
        v = 1.0 if field_ == "pattern" else _num(toks[2][1], path, no, toks[2][0])
        I.append(i - 1)
        J.append(j - 1)
        V.append(v)
        if symm != "general" and i != j:
            I.append(j - 1)
            J.append(i - 1)
            V.append(v if symm == "symmetric" else -v)
    n_entries = sum(1 for i, j in zip(I, J)) if symm == "general" else None
    if symm == "general" and n_entries != nnz:
        raise ParseError(f"header declares {nnz} entries, found {n_entries}", path, len(lines))
    return as_csr(sp.coo_matrix((V, (I, J)), shape=(rows, cols)))


def _fmt(v):
    return repr(float(v))


def write_mtx(path, X):
    """Write coordinate format (sparse input) or array format (dense input)."""
    buf = io.StringIO()
    if sp.issparse(X):
        A = sp.coo_matrix(as_csr(X))
        buf.write("%%MatrixMarket matrix coordinate real general\n")
        buf.write(f"{A.shape[0]} {A.shape[1]} {A.nnz}\n")
        for i, j, v in zip(A.row, A.col, A.data):
            buf.write(f"{i + 1} {j + 1} {_fmt(v)}\n")
    else:
        X = np.asarray(X, dtype=np.float64)
        buf.write("%%MatrixMarket matrix array real general\n")
        buf.write(f"{X.shape[0]} {X.shape[1]}\n")
        for v in X.ravel(order="F"):
            buf.write(f"{_fmt(v)}\n")
    Path(path).write_text(buf.getvalue())


def read_csv_matrix(path):
    """Dense matrix from CSV; a first row that is not all-numeric is a header."""
    text = Path(path).read_text()
    rows = list(csv.reader(io.StringIO(text)))
    rows = [(no, r) for no, r in enumerate(rows, start=1) if any(c.strip() for c in r)]
    if not rows:
        raise ParseError("empty file", path, 1)
    first = rows[0][1]
    try:
        [float(c) for c in first]
    except ValueError:
        rows = rows[1:]
        if not rows:
            raise ParseError("header but no data", path, 2)
    width = len(rows[0][1])
    out = []
    for no, r in rows:
        if len(r) != width:
            raise ParseError(f"expected {width} fields, found {len(r)}", path, no)
        out.append([_num(c.strip(), path, no, k + 1) for k, c in enumerate(r)])
    return np.array(out, dtype=np.float64)


def write_csv_matrix(path, X, header=None):
    X = np.asarray(X.toarray() if sp.issparse(X) else X, dtype=np.float64)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if header:
        w.writerow(header)
    for row in X:
        w.writerow([_fmt(v) for v in row])
    Path(path).write_text(buf.getvalue())


def read_matrix(path):
    path = Path(path)
    if path.suffix.lower() == ".mtx":
        return read_mtx(path)
    return read_csv_matrix(path)


def read_libsvm(path, n_features=None):
    """``label idx:val ...`` lines, 1-based feature indices.  Returns (X csr, y)."""
    labels, I, J, V = [], [], [], []
    text = Path(path).read_text()
    row = 0
    maxj = 0
    for no, l in enumerate(text.splitlines(), start=1):
        l = l.split("#", 1)[0]
        toks = _tokens(l)
        if not toks:
            continue
        c0, lab = toks[0]
        labels.append(_num(lab, path, no, c0))
        for c, t in toks[1:]:
            if ":" not in t:
                raise ParseError(f"expected idx:val, got {t!r}", path, no, c)
            a, b = t.split(":", 1)
            j = _num(a, path, no, c, int)
            if j < 1:
                raise ParseError("feature indices are 1-based", path, no, c)
            I.append(row)
            J.append(j - 1)
            V.append(_num(b, path, no, c + len(a) + 1))
            maxj = max(maxj, j)
        row += 1
    if row == 0:
        raise ParseError("no samples", path, 1)
    d = n_features if n_features is not None else maxj
    if maxj > d:
        raise ParseError(f"feature index {maxj} exceeds n_features={d}", path)
    y = np.array(labels)
    uniq = np.unique(y)
    if set(uniq.tolist()) <= {0.0, 1.0}:
        y = 2 * y - 1
    elif not set(uniq.tolist()) <= {-1.0, 1.0}:
        raise ParseError(f"labels must be binary, found {uniq.tolist()}", path)
    return as_csr(sp.coo_matrix((V, (I, J)), shape=(row, d))), y


def write_libsvm(path, X, y):
    A = as_csr(X)
    lines = []
    for i in range(A.shape[0]):
        lo, hi = A.indptr[i], A.indptr[i + 1]
        feats = " ".join(f"{j + 1}:{_fmt(v)}" for j, v in zip(A.indices[lo:hi], A.data[lo:hi]))
        lines.append(f"{int(y[i]):+d} {feats}".rstrip())
    Path(path).write_text("\n".join(lines) + "\n")


def save_instance(directory, inst, fmt="mtx"):
    """X as X.mtx or X.csv, H_true as H.csv, metadata in instance.json."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    if fmt == "mtx":
        write_mtx(d / "X.mtx", inst.X)
    else:
        write_csv_matrix(d / "X.csv", inst.X)
    if inst.H_true is not None:
        write_csv_matrix(d / "H.csv", inst.H_true)
    meta = {"anchors": list(map(int, inst.anchors)), "noise_sigma": inst.noise_sigma,
            "seed": int(inst.seed), "shape": list(inst.X.shape), "format": fmt}
    (d / "instance.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def load_instance(directory):
    from .nmf.synthetic import SeparableInstance
    d = Path(directory)
    meta = json.loads((d / "instance.json").read_text())
    X = read_matrix(d / ("X.mtx" if meta["format"] == "mtx" else "X.csv"))
    if sp.issparse(X):
        X = X.toarray()
    H = read_csv_matrix(d / "H.csv") if (d / "H.csv").exists() else None
    return SeparableInstance(np.asfortranarray(X), meta["anchors"], H,
                             meta["noise_sigma"], meta["seed"])


@dataclass
class ResultRecord:
    experiment: str
    config: dict
    metrics: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    passed: dict = field(default_factory=dict)

    def to_dict(self, timings=True):
        out = {"experiment": self.experiment, "config": self.config,
               "metrics": self.metrics, "pass": self.passed}
        if timings:
            out["timings"] = self.timings
        return out

    def to_json(self, timings=True):
        return json.dumps(_plain(self.to_dict(timings)), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        return cls(d["experiment"], d["config"], d.get("metrics", {}),
                   d.get("timings", {}), d.get("pass", {}))

    @property
    def all_passed(self):
        return all(_flags(self.passed))


def _flags(obj):
    if isinstance(obj, dict):
        for v in obj.values():
            yield from _flags(v)
    elif isinstance(obj, (list, tuple)):
        for v in obj:
            yield from _flags(v)
    else:
        yield bool(obj)


def _plain(obj):
    """numpy scalars/arrays -> Python types; non-finite floats -> strings."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    return obj


def write_table(path_or_buf, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(["" if v is None else (_fmt(v) if isinstance(v, float) else v) for v in r])
    text = buf.getvalue()
    if hasattr(path_or_buf, "write"):
        path_or_buf.write(text)
    else:
        Path(path_or_buf).write_text(text)
    return text


def read_table(text):
    """CSV with header -> (header, rows of strings)."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise ParseError("empty table")
    return rows[0], rows[1:]


DEMO_ANCHORS = [0, 1, 2, 3, 4]


def demo_path(fmt="mtx"):
    """Path of the bundled 50 x 30 separable demo matrix (anchors 0..4)."""
    from importlib.resources import files
    if fmt not in ("mtx", "csv"):
        raise ValueError("fmt must be 'mtx' or 'csv'")
    return Path(str(files("countgauss") / "data" / f"demo_50x30_k5.{fmt}"))


def read_labeled_csv(path):
    """CSV whose first column is the +-1 label and the rest the features."""
    M = read_csv_matrix(path)
    if M.shape[1] < 2:
        raise ParseError("need a label column and at least one feature", path)
    y = M[:, 0]
    if not set(np.unique(y).tolist()) <= {-1.0, 1.0}:
        raise ParseError("labels (first column) must be -1 or +1", path)
    return M[:, 1:], y
