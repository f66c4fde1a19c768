import math

import numpy as np
import pytest

from stieltjes.errors import ArgumentError
from stieltjes.functions import (PiecewiseFunction, dual_compose,
                                 random_spline)
from stieltjes.integrals import integrate_g_dx
from stieltjes.representation import (IntervalMeasure, StieltjesOperator,
                                      abel_identity_check, additivity_check,
                                      apply, decompose, hull_membership,
                                      measure_from_function,
                                      measure_of_interval, roundtrip,
                                      weakly_compact_image_check)
from stieltjes.semivariation import e_set
from stieltjes.spaces import Seminorm, SpaceModel, pair


def single_jump():
    return PiecewiseFunction.step((0.0, 1.0), [0.5], [[1.0, -2.0]],
                                  [0.0, 0.0])


def ramp():
    return PiecewiseFunction.from_global_polynomial([0.0, 1.0], (0.0, 1.0))


def plane():
    return SpaceModel(2, "real", (Seminorm.weighted_sup([1.0, 1.0]),))


def test_operator_construction_records_bounds():
    T = StieltjesOperator(plane(), single_jump())
    assert T.domain == (0.0, 1.0)
    np.testing.assert_allclose(T.wcs_bounds, [2.0])
    with pytest.raises(ArgumentError):
        StieltjesOperator(SpaceModel(3, "real",
                                     (Seminorm.weighted_sup(np.ones(3)),)),
                          single_jump())


def test_apply_examples():
    T = StieltjesOperator(plane(), single_jump())
    one = PiecewiseFunction.constant(1.0, (0.0, 1.0))
    np.testing.assert_allclose(apply(T, one), [1.0, -2.0], atol=1e-12)
    np.testing.assert_allclose(T.apply(ramp()), [0.5, -1.0], atol=1e-10)
    zero = PiecewiseFunction.constant(0.0, (0.0, 1.0))
    np.testing.assert_allclose(apply(T, zero), [0.0, 0.0], atol=1e-14)


def test_apply_rejects_functions_outside_domain():
    T = StieltjesOperator(plane(), single_jump())
    jumpy = PiecewiseFunction.step((0.0, 1.0), [0.3], [1.0], 0.0)
    try:
        apply(T, jumpy)
    except ArgumentError:
        pass
    else:
        raise AssertionError("discontinuous g must be rejected")
    elsewhere = PiecewiseFunction.constant(1.0, (0.0, 2.0))
    with pytest.raises(ArgumentError):
        apply(T, elsewhere)
    with pytest.raises(ArgumentError):
        apply(T, single_jump())  # vector-valued


def test_operator_linearity():
    tol = 1e-8
    rng = np.random.default_rng(30)
    T = StieltjesOperator(plane(), single_jump())
    for _ in range(5):
        g = random_spline((0.0, 1.0), rng)
        h = random_spline((0.0, 1.0), rng)
        lam = float(rng.standard_normal())
        lhs = apply(T, lam * g + h, tol=tol)
        rhs = lam * apply(T, g, tol=tol) + apply(T, h, tol=tol)
        np.testing.assert_allclose(lhs, rhs, atol=2 * tol)


def test_decompose_negative_constant():
    g = PiecewiseFunction.constant(-0.5, (0.0, 1.0))
    g0, g1, g2, g3 = decompose(g)
    assert g0.sup_abs() == 0.0
    assert g2(0.3) == 0.5
    assert g1.sup_abs() == 0.0 and g3.sup_abs() == 0.0


def test_decompose_root_split():
    g = PiecewiseFunction.from_global_polynomial([-0.5, 1.0], (0.0, 1.0))
    g0, g1, g2, g3 = decompose(g)
    assert 0.5 in g0.breakpoints
    assert g0(0.25) == 0.0
    assert math.isclose(g0(0.75), 0.25, abs_tol=1e-14)
    assert math.isclose(g2(0.25), 0.25, abs_tol=1e-14)
    assert g2(0.75) == 0.0


def test_decompose_imaginary_constant():
    g = PiecewiseFunction.constant(1.0j, (0.0, 1.0))
    g0, g1, g2, g3 = decompose(g)
    assert g1(0.4) == 1.0
    for part in (g0, g2, g3):
        assert part.sup_abs() == 0.0


def test_decompose_rejects_large_sup():
    g = PiecewiseFunction.constant(1.5, (0.0, 1.0))
    with pytest.raises(ArgumentError):
        decompose(g)


def test_decompose_reconstructs():
    rng = np.random.default_rng(31)
    ts = np.linspace(0.0, 1.0, 1000)
    for trial in range(8):
        g = random_spline((0.0, 1.0), rng,
                          complex_field=bool(trial % 2))
        g0, g1, g2, g3 = decompose(g)
        rebuilt = (g0.values_at(ts) - g2.values_at(ts)
                   + 1j * (g1.values_at(ts) - g3.values_at(ts)))
        np.testing.assert_allclose(rebuilt, g.values_at(ts), atol=1e-12)
        for part in (g0, g1, g2, g3):
            lo, hi = part.range_bounds()
            assert lo >= -1e-12 and hi <= 1.0 + 1e-12


def test_abel_identity_hand_case():
    res = abel_identity_check([0.2, 0.7], [[1.0, 0.0], [0.0, 1.0]])
    np.testing.assert_allclose(res.lhs, [0.2, 0.7], atol=1e-15)
    np.testing.assert_allclose(res.rhs, [0.2, 0.7], atol=1e-15)
    assert res.gap <= 1e-15
    np.testing.assert_allclose(res.coefficients, [0.2, 0.5], atol=1e-15)


def test_abel_identity_trivial_cases():
    res = abel_identity_check([0.0, 0.0, 0.0], np.eye(3))
    assert res.gap == 0.0
    np.testing.assert_array_equal(res.lhs, np.zeros(3))

    res = abel_identity_check([1.0], [[2.0, -3.0]])
    np.testing.assert_array_equal(res.lhs, [2.0, -3.0])
    np.testing.assert_array_equal(res.rhs, [2.0, -3.0])


def test_abel_identity_randomized():
    rng = np.random.default_rng(32)
    for _ in range(200):
        n = int(rng.integers(1, 11))
        gv = rng.uniform(0.0, 1.0, n)
        inc = rng.standard_normal((n, 3))
        res = abel_identity_check(gv, inc)
        assert res.gap <= 1e-12
        assert np.all(res.coefficients >= 0.0)
        assert math.isclose(res.coefficients.sum(), gv.max(),
                            rel_tol=1e-12, abs_tol=1e-12)
        assert res.coefficients.sum() <= 1.0 + 1e-12


def test_abel_identity_validation():
    with pytest.raises(ArgumentError):
        abel_identity_check([0.5, 0.5], [[1.0, 0.0]])
    with pytest.raises(ArgumentError):
        abel_identity_check([1.5], [[1.0, 0.0]])
    with pytest.raises(ArgumentError):
        abel_identity_check([], np.zeros((0, 2)))


def test_hull_membership_inside():
    gens = np.array([[1.0, 0.0], [0.0, 1.0]])
    res = hull_membership(np.array([0.5, 0.25]), gens)
    assert res.member
    assert res.distance <= 1e-9
    np.testing.assert_allclose(res.coefficients @ gens, [0.5, 0.25],
                               atol=1e-9)
    assert np.sum(np.abs(res.coefficients)) <= 1.0 + 1e-9


def test_hull_membership_zero_vector():
    gens = np.array([[3.0, 1.0]])
    res = hull_membership(np.zeros(2), gens)
    assert res.member


def test_hull_membership_outside():
    gens = np.array([[1.0, 0.0], [0.0, 1.0]])
    res = hull_membership(np.array([1.0, 1.0]), gens)
    assert not res.member
    assert math.isclose(res.distance, 0.5, abs_tol=1e-7)
    assert res.functional is not None
    assert res.separation > 0.0
    # l1-normalized functional really separates v from the generators
    u, v = res.functional, np.array([1.0, 1.0])
    assert u @ v - np.max(np.abs(gens @ u)) > 0.0


def test_hull_membership_monotone_in_generators():
    rng = np.random.default_rng(33)
    small = rng.standard_normal((3, 2))
    big = np.concatenate([small, rng.standard_normal((3, 2))])
    for _ in range(20):
        beta = rng.uniform(-1.0, 1.0, 3)
        beta /= max(1.0, np.sum(np.abs(beta)))
        v = beta @ small
        assert hull_membership(v, small).member
        assert hull_membership(v, big).member


def test_hull_membership_complex():
    gens = np.array([[1.0 + 0.0j, 0.0j]])
    res = hull_membership(np.array([0.5j, 0.0j]), gens)
    assert res.member
    outside = hull_membership(np.array([0.0j, 1.0 + 0.0j]), gens)
    assert not outside.member


def test_image_check_single_jump():
    T = StieltjesOperator(plane(), single_jump())
    report = weakly_compact_image_check(T, sample_count=10, seed=0)
    assert report.ok
    assert report.worst_distance <= 1e-9
    assert report.checked == 40
    assert report.witness is None


def test_image_check_constant_integrator():
    x = PiecewiseFunction.constant([0.0, 0.0], (0.0, 1.0))
    T = StieltjesOperator(plane(), x)
    report = weakly_compact_image_check(T, sample_count=4, seed=1)
    assert report.ok


def test_image_check_full_increment_is_member():
    # g = 1 decomposes to g0 = 1, so Tg0 = x(b) - x(a), a generator itself
    x = single_jump()
    Tg0 = integrate_g_dx(PiecewiseFunction.constant(1.0, (0.0, 1.0)),
                         x).value
    gens = e_set(x)
    assert hull_membership(Tg0, gens).member


def test_image_check_smooth_integrator_reports_resolutions():
    coeffs = np.array([[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]])
    x = PiecewiseFunction(np.array([0.0, 1.0]), coeffs)
    T = StieltjesOperator(plane(), x)
    report = weakly_compact_image_check(T, sample_count=2, seed=3)
    assert len(report.resolutions) >= 2
    assert isinstance(report.ok, bool)
    if not report.ok:
        assert report.witness is not None


def test_measure_examples():
    m = measure_from_function(single_jump())
    np.testing.assert_allclose(measure_of_interval(m, 0.4, 0.6),
                               [1.0, -2.0])
    np.testing.assert_array_equal(measure_of_interval(m, 0.0, 0.25),
                                  [0.0, 0.0])
    np.testing.assert_allclose(measure_of_interval(m, 0.0, 1.0),
                               [1.0, -2.0])
    np.testing.assert_array_equal(measure_of_interval(m, 0.7, 0.7),
                                  [0.0, 0.0])
    with pytest.raises(ArgumentError):
        measure_of_interval(m, 0.6, 0.4)
    with pytest.raises(ArgumentError):
        measure_of_interval(m, 0.5, 1.5)


def test_measure_cumulative_vanishes_at_left_end():
    x = PiecewiseFunction.constant([2.0, 5.0], (0.0, 1.0))
    m = measure_from_function(x)
    np.testing.assert_array_equal(m.cumulative(0.0), [0.0, 0.0])
    with pytest.raises(ArgumentError):
        IntervalMeasure(x)


def test_measure_uniqueness_up_to_constants():
    x = single_jump()
    shifted = x + PiecewiseFunction.constant([4.0, -1.0], (0.0, 1.0))
    m1 = measure_from_function(x)
    m2 = measure_from_function(shifted)
    np.testing.assert_array_equal(m1.cumulative.values, m2.cumulative.values)
    np.testing.assert_array_equal(m1.cumulative.coeffs, m2.cumulative.coeffs)


def test_additivity_check():
    m = measure_from_function(single_jump())
    assert additivity_check(m, [0.0, 0.5, 1.0]) == 0.0
    assert additivity_check(m, [0.2, 0.9]) == 0.0
    poly = measure_from_function(
        PiecewiseFunction(np.array([0.0, 1.0]),
                          np.array([[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]])))
    assert additivity_check(poly, [0.0, 0.3, 0.6, 1.0]) <= 1e-15
    with pytest.raises(ArgumentError):
        additivity_check(m, [0.5, 0.5])
    with pytest.raises(ArgumentError):
        additivity_check(m, [0.5])


def test_roundtrip_scalar_pairing_example():
    x = single_jump()
    T = StieltjesOperator(plane(), x)
    dual = np.array([1.0, 0.0])
    lhs = pair(dual, T.apply(ramp()))
    y = measure_from_function(x).cumulative
    rhs = integrate_g_dx(ramp(), dual_compose(y, dual)).value
    assert math.isclose(lhs, 0.5, abs_tol=1e-10)
    assert math.isclose(lhs, rhs, abs_tol=1e-9)


def test_roundtrip_single_jump():
    report = roundtrip(single_jump(), probe_count=30, dual_count=10,
                       function_count=10, seed=4)
    assert report.identity_gap == 0.0
    assert report.pairing_gap < 1e-6
    # breakpoints join the probe grid, so the count can exceed the request
    assert report.probe_count >= 30


def test_roundtrip_constant_integrator():
    x = PiecewiseFunction.constant([3.0, 1.0], (0.0, 1.0))
    report = roundtrip(x, probe_count=10, dual_count=5, function_count=5,
                       seed=5)
    assert report.identity_gap == 0.0
    assert report.pairing_gap == 0.0
