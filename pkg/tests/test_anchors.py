import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from countgauss.nmf import (IncompleteSelection, cg_nmf, error_curve, extreme_points_bruteforce,
                            generate_noisy_polytope, generate_separable, gp_nmf, nnls_solve,
                            regular_polygon, relative_error, spa, xray)
from countgauss.rng import SeededRng, mix64


# --------------------------------------------------------------- generators

def test_generate_separable_structure():
    inst = generate_separable(12, 20, 4, SeededRng(1))
    assert inst.anchors == [0, 1, 2, 3] and inst.k == 4
    assert np.all(inst.H_true >= 0)
    assert np.allclose(inst.X, inst.X[:, :4] @ inst.H_true, atol=1e-14)
    assert np.allclose(inst.H_true.sum(axis=0), 1)
    assert np.allclose(inst.H_true[:, :4], np.eye(4))


def test_generate_separable_k_equals_n():
    inst = generate_separable(6, 4, 4, SeededRng(2))
    assert np.allclose(inst.H_true, np.eye(4))
    assert extreme_points_bruteforce(inst.X) == [0, 1, 2, 3]


def test_generate_separable_large_shape_and_errors():
    inst = generate_separable(1000, 500, 10, SeededRng(3))
    assert inst.X.shape == (1000, 500)
    with pytest.raises(ValueError):
        generate_separable(5, 10, 6, SeededRng(0))


def test_noisy_polytope_counts():
    inst = generate_noisy_polytope(50, 20, 0.0, SeededRng(4))
    assert inst.X.shape == (50, 210)
    assert inst.X.shape[1] - inst.k == 190
    # noiseless midpoints are exact averages of two anchors
    pairs = [(i, j) for i in range(20) for j in range(i + 1, 20)]
    for c, (i, j) in enumerate(pairs, start=20):
        assert np.array_equal(inst.X[:, c], (inst.X[:, i] + inst.X[:, j]) / 2)


def test_noisy_polytope_noise_level():
    a = generate_noisy_polytope(400, 5, 0.0, SeededRng(5))
    b = generate_noisy_polytope(400, 5, 0.3, SeededRng(5))
    assert abs(np.std(b.X - a.X) - 0.3) < 0.02
    with pytest.raises(ValueError):
        generate_noisy_polytope(4, 5, 0.1, SeededRng(0))
    with pytest.raises(ValueError):
        generate_noisy_polytope(10, 5, -0.1, SeededRng(0))


# -------------------------------------------------------------- projections

def test_identity_columns():
    X = np.eye(6)
    for algo in (cg_nmf, gp_nmf):
        res = algo(X, 40, rng=SeededRng(1)) if algo is gp_nmf else algo(X, 40, None, SeededRng(1))
        assert set(res.union) <= set(range(6))
        assert set(res.union) == set(res.i_max) | set(res.i_min)


def test_identity_columns_recovery_frequency():
    k, delta = 5, 0.1
    om = 1 / (2 * k)  # crude lower bound used only to size m generously
    m = math.ceil(math.log(k / delta) / math.log(1 / (1 - om)))
    hits = sum(set(cg_nmf(np.eye(k), m, None, SeededRng(s)).union) == set(range(k))
               for s in range(200))
    assert hits / 200 >= 1 - 2 * delta


def test_vertex_only_noiseless_small():
    for t in range(100):
        inst = generate_separable(20, 50, 5, SeededRng(mix64(1, t)))
        a = cg_nmf(inst.X, 12, None, SeededRng(mix64(2, t)))
        b = gp_nmf(inst.X, 12, SeededRng(mix64(3, t)))
        assert set(a.union) <= set(inst.anchors)
        assert set(b.union) <= set(inst.anchors)


def test_vertex_only_noiseless_midpoints():
    inst = generate_noisy_polytope(30, 6, 0.0, SeededRng(9))
    for t in range(50):
        assert set(cg_nmf(inst.X, 10, None, SeededRng(t)).union) <= set(range(6))


def test_pentagon_gp_coverage():
    X = regular_polygon(5).vertices.T
    # miss probability per run <= 5 (4/5)^50 ~ 7e-5
    for s in range(20):
        assert gp_nmf(X, 50, SeededRng(s)).union == [0, 1, 2, 3, 4]


def test_sizes_and_determinism():
    inst = generate_separable(15, 30, 4, SeededRng(0))
    a = cg_nmf(inst.X, 7, 20, SeededRng(5))
    b = cg_nmf(inst.X, 7, 20, SeededRng(5))
    assert a == b
    assert len(a.i_max) <= 7 and len(a.i_min) <= 7
    assert all(0 <= j < 30 for j in a.union)
    assert sum(a.counts.values()) == 14


def test_sparse_input_matches_dense():
    inst = generate_separable(15, 30, 4, SeededRng(0))
    X = inst.X.copy()
    X[X < 0.2] = 0
    assert cg_nmf(sp.csr_matrix(X), 9, None, SeededRng(2)) == cg_nmf(X, 9, None, SeededRng(2))
    assert gp_nmf(sp.csr_matrix(X), 9, SeededRng(2)).union == gp_nmf(X, 9, SeededRng(2)).union


def test_tie_break_lowest_index():
    X = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])  # columns 0 and 1 identical
    res = cg_nmf(X, 30, None, SeededRng(0))
    assert 1 not in res.union


def test_m_zero_rejected():
    with pytest.raises(ValueError):
        cg_nmf(np.eye(3), 0, None, SeededRng(0))
    with pytest.raises(ValueError):
        gp_nmf(np.eye(3), 0, SeededRng(0))


def test_ranked_order():
    inst = generate_separable(15, 30, 4, SeededRng(0))
    res = cg_nmf(inst.X, 25, None, SeededRng(1))
    ranked = res.ranked()
    counts = [res.counts[j] for j in ranked]
    assert counts == sorted(counts, reverse=True)
    assert sorted(ranked) == res.union


# ----------------------------------------------------------------- SPA/XRAY

def test_spa_hand_example():
    X = np.array([[1.0, 0.0, 0.5], [0.0, 1.0, 0.5]])
    X = X / np.linalg.norm(X, axis=0)
    # after normalization all columns tie at norm 1; the lowest index wins,
    # then e_2 has the largest residual
    assert sorted(spa(X, 2)) == [0, 1]


def test_spa_duplicates_and_incomplete():
    X = np.array([[2.0, 2.0, 0.0], [0.0, 0.0, 1.0]])
    assert spa(X, 2) == [0, 2]
    with pytest.raises(IncompleteSelection) as e:
        spa(np.array([[1.0, 2.0, 3.0], [0.0, 0.0, 0.0]]), 2)
    assert e.value.found == [2]


def test_xray_examples():
    X = np.array([[5.0, 1.0, 0.5], [0.1, 1.0, 0.5]])
    assert xray(X, 1).indices == [0]
    with pytest.raises(ValueError):
        xray(-np.eye(2), 1)


def test_xray_truncates_on_zero_residual():
    X = np.array([[1.0, 0.0, 0.5], [0.0, 1.0, 0.5]])
    r = xray(X, 3)
    assert r.truncated and sorted(r.indices) == [0, 1]


@pytest.mark.parametrize("seed", range(10))
def test_spa_xray_exact_on_separable(seed):
    r = SeededRng(mix64(77, seed))
    k = 2 + seed % 7
    inst = generate_separable(10 + 4 * seed, 30, k, r)
    assert sorted(spa(inst.X, k)) == inst.anchors
    assert sorted(xray(inst.X, k).indices) == inst.anchors


# ------------------------------------------------------------ error curves

def test_relative_error_examples():
    inst = generate_separable(10, 20, 3, SeededRng(0))
    assert relative_error(inst.X, inst.anchors, inst.H_true) <= 1e-15
    assert relative_error(inst.X, [0, 1], np.zeros((2, 20))) == pytest.approx(1.0, abs=1e-15)
    r = SeededRng(1)
    X, H = r.uniform((6, 9)), r.uniform((2, 9))
    direct = math.sqrt(np.sum((X - X[:, [3, 5]] @ H) ** 2) / np.sum(X ** 2))
    assert relative_error(X, [3, 5], H) == pytest.approx(direct, rel=1e-14)
    with pytest.raises(ValueError):
        relative_error(np.zeros((3, 3)), [0], np.zeros((1, 3)))
    with pytest.raises(ValueError):
        relative_error(X, [0], np.zeros((2, 9)))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32), st.integers(2, 6))
def test_error_curve_non_increasing(seed, k):
    r = SeededRng(seed)
    X = r.uniform((8, 15))
    order = r.permutation(15)[:k].tolist()
    curve = error_curve(X, order)
    assert all(b <= a + 1e-7 for a, b in zip(curve, curve[1:]))


def test_error_curve_reaches_zero_with_all_anchors():
    inst = generate_separable(12, 25, 4, SeededRng(8))
    curve = error_curve(inst.X, [3, 1, 0, 2])
    assert curve[-1] <= 1e-6


def test_duplicate_anchor_columns_resolve_to_lowest_index():
    inst = generate_separable(10, 40, 1, SeededRng(3))
    assert extreme_points_bruteforce(inst.X) == [0]
    assert spa(inst.X, 1) == [0]
    assert xray(inst.X, 1).indices == [0]
