import json
import math

import numpy as np
import pytest
import scipy.io
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from countgauss.io import (DEMO_ANCHORS, ParseError, ResultRecord, demo_path, load_instance,
                           read_csv_matrix, read_labeled_csv, read_libsvm, read_matrix, read_mtx,
                           read_table, save_instance, write_csv_matrix, write_libsvm, write_mtx,
                           write_table)
from countgauss.nmf import generate_noisy_polytope, generate_separable, spa
from countgauss.rng import SeededRng


def sparse_random(r, n, d, density):
    A = r.normal((n, d)) * (r.uniform((n, d)) < density)
    return sp.csr_matrix(A)


# ------------------------------------------------------------- Matrix Market

@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 12), st.integers(1, 12))
def test_mtx_roundtrip_sparse(tmp_path_factory, seed, n, d):
    path = tmp_path_factory.mktemp("mtx") / "a.mtx"
    A = sparse_random(SeededRng(seed), n, d, 0.4)
    write_mtx(path, A)
    B = read_mtx(path)
    assert sp.issparse(B) and B.shape == A.shape
    assert np.array_equal(B.toarray(), A.toarray())


def test_mtx_roundtrip_dense_array(tmp_path):
    A = SeededRng(1).normal((4, 3))
    write_mtx(tmp_path / "a.mtx", A)
    assert "array" in (tmp_path / "a.mtx").read_text().splitlines()[0]
    assert np.array_equal(read_mtx(tmp_path / "a.mtx"), A)


def test_mtx_matches_scipy_reader(tmp_path):
    A = sparse_random(SeededRng(2), 9, 7, 0.3)
    write_mtx(tmp_path / "a.mtx", A)
    ref = scipy.io.mmread(str(tmp_path / "a.mtx"))
    assert np.array_equal(ref.toarray(), read_mtx(tmp_path / "a.mtx").toarray())
    # and we read what scipy writes, including symmetric storage
    S = sp.coo_matrix(np.array([[1.0, 2.0, 0.0], [2.0, 0.0, 3.0], [0.0, 3.0, 4.0]]))
    scipy.io.mmwrite(str(tmp_path / "s.mtx"), S, symmetry="symmetric")
    assert np.array_equal(read_mtx(tmp_path / "s.mtx").toarray(), S.toarray())


def test_mtx_pattern_and_skew(tmp_path):
    p = tmp_path / "p.mtx"
    p.write_text("%%MatrixMarket matrix coordinate pattern general\n% c\n2 2 2\n1 1\n2 1\n")
    assert np.array_equal(read_mtx(p).toarray(), [[1, 0], [1, 0]])
    p.write_text("%%MatrixMarket matrix coordinate real skew-symmetric\n2 2 1\n2 1 5\n")
    assert np.array_equal(read_mtx(p).toarray(), [[0, -5], [5, 0]])


@pytest.mark.parametrize("text,line,col", [
    ("", 1, None),
    ("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 x 1.0\n", 3, 3),
    ("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n", 3, 1),
    ("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n", None, None),
    ("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 nan\n", 3, 5),
    ("%%MatrixMarket matrix banana real general\n2 2 1\n1 1 1\n", 1, None),
])
def test_mtx_parse_errors(tmp_path, text, line, col):
    p = tmp_path / "bad.mtx"
    p.write_text(text)
    with pytest.raises(ParseError) as e:
        read_mtx(p)
    if line is not None:
        assert e.value.line == line
    if col is not None:
        assert e.value.col == col
    assert str(p) in str(e.value)


# ----------------------------------------------------------------------- CSV

def test_csv_roundtrip_exact(tmp_path):
    A = SeededRng(3).normal((5, 4)) * 1e-7
    write_csv_matrix(tmp_path / "a.csv", A)
    assert np.array_equal(read_csv_matrix(tmp_path / "a.csv"), A)
    write_csv_matrix(tmp_path / "h.csv", A, header=["a", "b", "c", "d"])
    assert np.array_equal(read_csv_matrix(tmp_path / "h.csv"), A)


def test_csv_errors(tmp_path):
    p = tmp_path / "x.csv"
    p.write_text("1,2\n3,oops\n")
    with pytest.raises(ParseError) as e:
        read_csv_matrix(p)
    assert e.value.line == 2
    p.write_text("1,2\n3\n")
    with pytest.raises(ParseError) as e:
        read_csv_matrix(p)
    assert e.value.line == 2
    p.write_text("")
    with pytest.raises(ParseError):
        read_csv_matrix(p)


def test_read_matrix_dispatch_and_demo():
    a = read_matrix(demo_path("mtx"))
    b = read_matrix(demo_path("csv"))
    a = a.toarray() if sp.issparse(a) else a
    assert a.shape == (50, 30)
    assert np.array_equal(a, b)
    assert sorted(spa(a, 5)) == DEMO_ANCHORS
    with pytest.raises(ValueError):
        demo_path("json")


# -------------------------------------------------------------------- LIBSVM

def test_libsvm_roundtrip(tmp_path):
    r = SeededRng(4)
    X = sparse_random(r, 6, 9, 0.5)
    y = np.array([1, -1, 1, 1, -1, -1.0])
    write_libsvm(tmp_path / "a.svm", X, y)
    X2, y2 = read_libsvm(tmp_path / "a.svm", n_features=9)
    assert np.array_equal(X2.toarray(), X.toarray())
    assert np.array_equal(y2, y)


def test_libsvm_format_details(tmp_path):
    p = tmp_path / "a.svm"
    p.write_text("1 1:0.5 3:2\n0 2:1  # comment\n\n")
    X, y = read_libsvm(p)
    assert np.array_equal(y, [1, -1])
    assert np.array_equal(X.toarray(), [[0.5, 0, 2], [0, 1, 0]])
    p.write_text("1 0:1\n")
    with pytest.raises(ParseError) as e:
        read_libsvm(p)
    assert (e.value.line, e.value.col) == (1, 3)
    p.write_text("2 1:1\n1 1:1\n")
    with pytest.raises(ParseError):
        read_libsvm(p)
    p.write_text("1 1:1\n-1 4:1\n")
    with pytest.raises(ParseError):
        read_libsvm(p, n_features=3)


def test_labeled_csv(tmp_path):
    p = tmp_path / "l.csv"
    p.write_text("label,f1,f2\n1,0.5,1\n-1,2,3\n")
    X, y = read_labeled_csv(p)
    assert np.array_equal(y, [1, -1]) and np.array_equal(X, [[0.5, 1], [2, 3]])
    p.write_text("3,1\n")
    with pytest.raises(ParseError):
        read_labeled_csv(p)


# ----------------------------------------------------------------- instances

@pytest.mark.parametrize("fmt", ["mtx", "csv"])
def test_instance_roundtrip(tmp_path, fmt):
    inst = generate_separable(8, 12, 3, SeededRng(5))
    save_instance(tmp_path / fmt, inst, fmt)
    back = load_instance(tmp_path / fmt)
    assert np.array_equal(back.X, inst.X)
    assert np.array_equal(back.H_true, inst.H_true)
    assert back.anchors == inst.anchors and back.seed == inst.seed


def test_instance_without_H(tmp_path):
    inst = generate_noisy_polytope(6, 3, 0.1, SeededRng(6))
    save_instance(tmp_path, inst, "csv")
    back = load_instance(tmp_path)
    assert np.array_equal(back.X, inst.X) and back.noise_sigma == 0.1


# ------------------------------------------------------------ result records

def test_result_record_roundtrip():
    rec = ResultRecord("x", {"seed": np.int64(3), "m": [1, 2]},
                       {"v": np.float64(0.25), "arr": np.arange(3), "inf": math.inf},
                       {"t": 1.5}, {"a": np.bool_(True), "nested": {"b": [True, False]}})
    text = rec.to_json()
    back = ResultRecord.from_json(text)
    assert back.to_json() == text
    assert back.metrics["inf"] == "inf"
    assert not back.all_passed
    no_t = json.loads(rec.to_json(timings=False))
    assert "timings" not in no_t
    assert ResultRecord("y", {}, passed={"a": True, "b": [True]}).all_passed


def test_table_roundtrip(tmp_path):
    header = ["k", "rate", "note"]
    rows = [[4, 0.1, "a,b"], [8, None, ""]]
    text = write_table(tmp_path / "t.csv", header, rows)
    assert (tmp_path / "t.csv").read_text() == text
    h, r = read_table(text)
    assert h == header
    assert r == [["4", "0.1", "a,b"], ["8", "", ""]]
    with pytest.raises(ParseError):
        read_table("")
