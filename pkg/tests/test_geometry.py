import math

import numpy as np
import pytest

from countgauss.nmf import (PolytopeSpec, condition_number, extreme_points_bruteforce,
                            generate_separable, normal_cone_member, projections_needed,
                            regular_polygon, sin_3pi_10_exceeds, solid_angle_mc, solid_angles_mc,
                            srht_counterexample_check)
from countgauss.rng import SeededRng


def test_normal_cone_examples():
    pent = regular_polygon(5)
    assert np.allclose(pent.vertices[0], [0, 1])
    assert normal_cone_member(pent, 0, [0.0, 0.0])
    assert normal_cone_member(pent, 0, [0.0, 1.0])
    assert not normal_cone_member(pent, 0, [1.0, 0.0])
    sq = PolytopeSpec([[1, 1], [-1, 1], [-1, -1], [1, -1]])
    for i, v in enumerate(sq.vertices):
        assert normal_cone_member(sq, i, v)


def test_pentagon_cone_edges():
    # the cone at (0,1) spans angles [3 pi/10, 7 pi/10]
    pent = regular_polygon(5)
    for a, inside in [(3 * math.pi / 10 + 1e-6, True), (3 * math.pi / 10 - 1e-3, False),
                      (7 * math.pi / 10 - 1e-6, True), (7 * math.pi / 10 + 1e-3, False)]:
        assert normal_cone_member(pent, 0, [math.cos(a), math.sin(a)]) == inside


def test_normal_cone_index_check():
    with pytest.raises(IndexError):
        normal_cone_member(regular_polygon(4), 4, [1, 0])


@pytest.mark.parametrize("k,expected", [(4, 0.25), (5, 0.2)])
def test_regular_polygon_solid_angles(k, expected):
    poly = regular_polygon(k)
    total, var = 0.0, 0.0
    for i in range(k):
        sa = solid_angle_mc(poly, i, 20_000, SeededRng(100 + i))
        assert abs(sa.value - expected) <= 4 * sa.stderr
        total += sa.value
        var += sa.stderr ** 2
    assert abs(total - 1) <= 4 * math.sqrt(var)


def test_solid_angle_irregular_polygon_sum():
    poly = PolytopeSpec([[0, 0], [3, 0], [4, 2], [1, 3], [-1, 1]]).validate()
    vals = [solid_angle_mc(poly, i, 10_000, SeededRng(i)) for i in range(5)]
    total = sum(v.value for v in vals)
    assert abs(total - 1) <= 4 * math.sqrt(sum(v.stderr ** 2 for v in vals))


def test_solid_angle_sample_floor():
    with pytest.raises(ValueError):
        solid_angle_mc(regular_polygon(4), 0, 999, SeededRng(0))


def test_shared_direction_estimates_sum_to_one():
    om = solid_angles_mc(regular_polygon(6).vertices.T, 30_000, SeededRng(3))
    assert om.sum() == pytest.approx(1.0)
    assert np.all(np.abs(om - 1 / 6) <= 4 * math.sqrt(1 / 6 * 5 / 6 / 30_000))


def test_condition_number_examples():
    om = [0.2] * 5
    assert condition_number(om, 5, "linear") == pytest.approx(1 / 3)
    assert condition_number(om, 5, "log") == pytest.approx(1 / (5 * math.log(1 / 0.6)))
    assert condition_number(om, 5, "log") == pytest.approx(0.3915, abs=1e-4)
    # both depend on omega only through w = max_i (1 - 2 omega_i), and in
    # opposite directions: log grows with w, linear shrinks with it
    narrow = [0.1, 0.2, 0.2, 0.2, 0.3]
    assert condition_number(narrow, 5, "log") > condition_number(om, 5, "log")
    assert condition_number(narrow, 5, "linear") < condition_number(om, 5, "linear")
    assert condition_number([0.25] * 5, 5, "linear") > condition_number(om, 5, "linear")
    with pytest.raises(ValueError):
        condition_number([0.5, 0.1], 2, "log")
    with pytest.raises(ValueError):
        condition_number(om, 5, "cubic")


def test_projections_needed():
    assert projections_needed(1 / 3, 5, 0.1) == math.ceil(5 / 3 * math.log(50))


def test_extreme_points_examples():
    assert extreme_points_bruteforce(np.eye(3)) == [0, 1, 2]
    X = np.array([[1.0, 0.0, 0.5], [0.0, 1.0, 0.5]])
    assert extreme_points_bruteforce(X) == [0, 1]
    inst = generate_separable(10, 30, 4, SeededRng(4))
    assert extreme_points_bruteforce(inst.X) == [0, 1, 2, 3]


def test_polytope_validate_rejects_interior_vertex():
    with pytest.raises(ValueError):
        PolytopeSpec([[0, 0], [2, 0], [0, 2], [0.5, 0.5]]).validate()


def test_exact_threshold_inequality():
    assert not sin_3pi_10_exceeds(1)
    for d in range(2, 200):
        assert sin_3pi_10_exceeds(d)
        assert math.sin(3 * math.pi / 10) > 1 / math.sqrt(d)


@pytest.mark.parametrize("d", [2, 4, 8, 16])
def test_counterexample_exhaustive(d):
    rep = srht_counterexample_check(d, samples=20_000, rng=SeededRng(d))
    assert rep.exhaustive and rep.vectors_checked == 2 ** d
    assert rep.in_cone == 0 and rep.threshold_exact and rep.passed
    # the cone is a 72 degree sector times R^(d-2): omega = 1/5 exactly
    assert abs(rep.omega - 0.2) <= 4 * rep.omega_stderr


def test_counterexample_sampled_regime():
    rep = srht_counterexample_check(64, samples=5000, rng=SeededRng(1), random_patterns=20_000)
    assert not rep.exhaustive and rep.in_cone == 0


def test_counterexample_tail_fraction_tends_to_normal_tail():
    # fraction of directions with x_2 > 1/sqrt(d) approaches P(Z > 1) ~ 0.1587
    rep = srht_counterexample_check(256, samples=50_000, rng=SeededRng(2), random_patterns=1000)
    assert abs(rep.frac_above - 0.1587) <= 0.01


def test_counterexample_rejects_bad_d():
    for d in (1, 3, 12):
        with pytest.raises(ValueError):
            srht_counterexample_check(d)


def test_bruteforce_duplicates_counted_once():
    X = np.array([[1.0, 0.0, 1.0, 0.5], [0.0, 1.0, 0.0, 0.5]])
    assert extreme_points_bruteforce(X) == [0, 1]
    assert extreme_points_bruteforce(np.ones((3, 4))) == [0]
