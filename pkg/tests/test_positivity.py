"""Axis condition, infimum estimates, and the perturbation radius."""

import itertools

import numpy as np
import pytest

from polynormal.errors import ConditionFailed
from polynormal.polyalg import Polynomial, affine_substitute
from polynormal.positivity import (
    check_condition_337,
    epsilon_bound,
    estimate_inf_b,
    index_count,
    leading_axis_coeffs,
)

from conftest import all_multiindices, eligible_quartic_poly, example4_poly


def test_leading_axis_coeffs_reference_quartic():
    assert np.array_equal(leading_axis_coeffs(example4_poly()), [0.0, 0.0])


def test_leading_axis_coeffs_separable_quartic():
    p = Polynomial.from_terms(2, {(4, 0): 1.0, (0, 4): 1.0, (0, 0): 1.0})
    assert np.array_equal(leading_axis_coeffs(p), [1.0, 1.0])


def test_leading_axis_coeffs_1d():
    p = Polynomial.from_terms(1, {(6,): 3.0, (1,): -1.0, (0,): 2.0})
    assert np.array_equal(leading_axis_coeffs(p), [3.0])


def test_leading_axis_coeffs_odd_degree_rejected():
    with pytest.raises(ValueError):
        leading_axis_coeffs(Polynomial.from_terms(1, {(3,): 1.0}))


def test_condition_337_reference_quartic_fails():
    assert not check_condition_337(example4_poly())


def test_condition_337_eligible_quartic():
    assert check_condition_337(eligible_quartic_poly())


def test_condition_337_missing_axis_power():
    p = Polynomial.from_terms(2, {(4, 0): 1.0, (0, 2): 1.0})
    assert not check_condition_337(p)


def test_inf_b_quadratic_identity_ratio():
    p = Polynomial.from_terms(1, {(2,): 1.0, (0,): 1.0})
    inf_b, radius = estimate_inf_b(p)
    assert inf_b == pytest.approx(1.0, abs=1e-4)
    assert radius > 0.0


def test_inf_b_quartic_identity_ratio():
    p = Polynomial.from_terms(1, {(4,): 1.0, (0,): 1.0})
    inf_b, _ = estimate_inf_b(p)
    assert inf_b == pytest.approx(1.0, abs=1e-4)


def test_inf_b_with_interior_dip():
    # ratio (x^2 - x + 1)/(1 + x^2) has stationary values 1/2 at x=1, 3/2 at x=-1
    p = Polynomial.from_terms(1, {(2,): 1.0, (1,): -1.0, (0,): 1.0})
    inf_b, _ = estimate_inf_b(p)
    assert inf_b == pytest.approx(0.5, abs=1e-3)


def test_inf_b_requires_condition():
    with pytest.raises(ConditionFailed):
        estimate_inf_b(example4_poly())


def test_index_count_values():
    assert index_count(1, 2) == 3
    assert index_count(1, 4) == 5
    assert index_count(2, 4) == 15


def test_epsilon_bound_quadratic():
    report = epsilon_bound(Polynomial.from_terms(1, {(2,): 1.0, (0,): 1.0}))
    assert report.condition337
    assert report.index_count == 3
    assert report.inf_a_lower == pytest.approx(1.0 / 16.0, abs=1e-4)
    assert report.epsilon == pytest.approx(0.05625, abs=1e-4)
    assert report.epsilon < report.inf_a_lower


def test_epsilon_bound_quartic():
    report = epsilon_bound(Polynomial.from_terms(1, {(4,): 1.0, (0,): 1.0}))
    assert report.index_count == 5
    assert report.inf_a_lower == pytest.approx(1.0 / 96.0, abs=1e-4)


def test_epsilon_bound_failing_condition_degrades():
    report = epsilon_bound(example4_poly())
    assert not report.condition337
    assert report.epsilon == 0.0
    assert report.inf_b == 0.0
    assert report.inf_a_lower == 0.0


def test_scaling_covariance():
    p = eligible_quartic_poly()
    base = epsilon_bound(p)
    for lam in (0.5, 3.0, 10.0):
        scaled = epsilon_bound(lam * p)
        assert scaled.condition337
        assert scaled.inf_b == pytest.approx(lam * base.inf_b, rel=1e-12)
        assert scaled.search_radius == pytest.approx(base.search_radius, rel=1e-9)


def _l1_ball_grid(radius, per_axis=21):
    axes = [np.linspace(-radius, radius, per_axis)] * 2
    pts = np.array(list(itertools.product(*axes)))
    return pts[np.sum(np.abs(pts), axis=1) <= radius]


def test_perturbation_soundness():
    p = eligible_quartic_poly()
    report = epsilon_bound(p)
    assert report.epsilon > 0.0
    rng = np.random.default_rng(14)
    indices = all_multiindices(2, p.degree)
    ball = _l1_ball_grid(report.search_radius)
    exterior = rng.uniform(-8.0, 8.0, size=(40_000, 2))
    exterior = exterior[np.sum(np.abs(exterior), axis=1) > report.search_radius][:10_000]
    assert len(exterior) == 10_000
    for _ in range(200):
        delta = {
            alpha: rng.uniform(-1.0, 1.0) * report.epsilon * 0.999 for alpha in indices
        }
        w = p + Polynomial.from_terms(2, delta, eps=0.0)
        assert np.min(w.eval_many(ball)) > 0.0
        assert np.min(w.eval_many(exterior)) > 0.0


def _random_affine(rng, dim, max_cond=10.0):
    """Well-conditioned random affine map (condition number <= max_cond)."""
    q1, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    q2, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    smax = rng.uniform(0.5, 2.0)
    svals = smax * rng.uniform(1.0 / max_cond, 1.0, size=dim)
    svals[0] = smax
    F = q1 @ np.diag(svals) @ q2
    return F, rng.uniform(-2.0, 2.0, size=dim)


def _random_definite_top_poly(rng, dim, two_m, sign):
    """Random polynomial whose top form is sign-definite.

    Top form: positive combination of even monomials including every axis
    power (pointwise >= b0 ||x||_{2m}^{2m}), times the sign; lower-order
    terms arbitrary.
    """
    terms = {}
    for alpha in all_multiindices(dim, two_m):
        if sum(alpha) == two_m and all(a % 2 == 0 for a in alpha):
            terms[alpha] = sign * rng.uniform(0.5, 2.0)
        elif sum(alpha) < two_m:
            terms[alpha] = rng.uniform(-1.0, 1.0)
    return Polynomial.from_terms(dim, terms)


def test_condition_verdict_affine_invariant():
    rng = np.random.default_rng(15)
    polys = [_random_definite_top_poly(rng, 2, 4, +1.0) for _ in range(5)]
    polys += [_random_definite_top_poly(rng, 2, 4, -1.0) for _ in range(5)]
    for p in polys:
        verdict = check_condition_337(p)
        for _ in range(50):
            F, b = _random_affine(rng, 2)
            assert check_condition_337(affine_substitute(p, F, b)) == verdict


def test_inf_a_lower_is_sound_pointwise():
    rng = np.random.default_rng(16)
    for p in (eligible_quartic_poly(), Polynomial.from_terms(1, {(2,): 1.0, (0,): 1.0})):
        report = epsilon_bound(p)
        d = p.dim
        two_m = p.degree
        pts = rng.uniform(-6.0, 6.0, size=(10_000, d))
        denom = np.ones(len(pts))
        for alpha in all_multiindices(d, two_m):
            if sum(alpha) > 0:
                denom += np.prod(np.abs(pts) ** np.array(alpha), axis=1)
        ratio = p.eval_many(pts) / denom
        assert report.inf_a_lower <= np.min(ratio) + 1e-12
