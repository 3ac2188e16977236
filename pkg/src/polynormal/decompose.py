"""Gaussian-factor decomposition of polynomial-normal densities.

Pipeline: center (shift moves into the Gaussian factor), whiten, expand
the normalized polynomial in the Hermite basis, rescale by theta, and
split the characteristic function

    phi(t) = [sum beta_a (i t)^a e^{-theta^2 |t|^2 / 2}] * e^{-(1-theta^2) |t|^2 / 2}

in whitened coordinates.  The first factor is again a polynomial-normal
density as long as the rescaled polynomial stays nonnegative; its
admissible range is an interval reaching up to theta = 1, so the minimal
admissible theta is found by bisection.  The bisection's direct
minimization check is authoritative; the coefficient-perturbation radius
from the positivity report is used only as a cheap sufficient shortcut.

The reported theta_floor is the minimal isotropic-whitened theta found by
this search, not a claim about every conceivable factorization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .charfn import cf_multiply, forward_cf, gaussian_cf
from .errors import NoAdmissibleTheta, NotEligible, ThetaInadmissible
from .pnd import (
    PND,
    SearchBudget,
    make_pnd,
    minimize_polynomial,
    pnd_to_dict,
    whitened_poly,
)
from .polyalg import (
    HermiteCoeffs,
    Polynomial,
    affine_substitute,
    from_hermite,
    theta_rescale,
    to_hermite,
)
from .positivity import PositivityReport, check_condition_337, epsilon_bound, report_to_dict

VERDICT_HAS_REAL_ZERO = "HasRealZero"
VERDICT_FAILS_CONDITION_337 = "FailsCondition337"
VERDICT_ELIGIBLE = "Eligible"

# A scanned minimum at or below this counts as a zero of the density.
ZERO_TOL = 1e-9
# The rescaled polynomial may dip this far below zero and still be accepted.
RESCALE_TOL = -1e-12
DEFAULT_THETA_TOL = 1e-6

# Budget for the many positivity probes inside the theta bisection; each
# probe only needs a reliable sign, not a tight minimum.
PROBE_BUDGET = SearchBudget(doublings=4, grid_points=7, stop_below=10 * RESCALE_TOL)


@dataclass(frozen=True)
class Diagnosis:
    """Outcome of the decomposability precheck.

    ``FailsCondition337`` is not a proof of indecomposability -- only the
    applicability gate of the constructive split.  ``HasRealZero`` is
    conclusive: a density zero rules out any nontrivial factorization.
    """

    verdict: str
    witness_point: np.ndarray | None
    witness_value: float | None
    infimum: float
    infimum_point: np.ndarray
    attained: bool
    report: PositivityReport


@dataclass(frozen=True)
class GaussianFactor:
    mean: np.ndarray
    cov: np.ndarray


@dataclass(frozen=True)
class Decomposition:
    theta: float
    factor_Y: PND
    factor_Z: GaussianFactor
    min_p_theta: float
    cf_error: float
    conv_error: float | None = None


def precheck(
    pnd: PND, budget: SearchBudget | None = None, grid_tol: float = 1e-4
) -> Diagnosis:
    """Zero detection, then the axis condition on the whitened polynomial."""
    scan = minimize_polynomial(pnd.poly, budget)
    q = whitened_poly(pnd)
    report = epsilon_bound(q, grid_tol)
    if scan.value <= ZERO_TOL and scan.attained:
        return Diagnosis(
            VERDICT_HAS_REAL_ZERO,
            scan.point,
            scan.value,
            scan.value,
            scan.point,
            scan.attained,
            report,
        )
    verdict = VERDICT_ELIGIBLE if report.condition337 else VERDICT_FAILS_CONDITION_337
    return Diagnosis(verdict, None, None, scan.value, scan.point, scan.attained, report)


def _epsilon_shortcut(p_theta: Polynomial, base: Polynomial, epsilon: float) -> bool:
    """Sufficient admissibility test: all coefficients within the radius."""
    return epsilon > 0.0 and p_theta.max_abs_coeff_diff(base) < epsilon


def theta_floor(
    h: HermiteCoeffs,
    tol: float = DEFAULT_THETA_TOL,
    budget: SearchBudget | None = None,
    report: PositivityReport | None = None,
) -> float:
    """Smallest admissible theta found by bisection, to absolute tolerance tol.

    Admissible means the theta-rescaled polynomial scans no lower than the
    rescale tolerance.  Admissibility near 1 is guaranteed for eligible
    inputs, so the returned value is at most any workable theta below 1.
    """
    if tol <= 0.0:
        raise ValueError("tolerance must be positive")
    budget = budget or PROBE_BUDGET
    if h.degree == 0:
        return tol
    base = from_hermite(h)
    if report is None and check_condition_337(base):
        report = epsilon_bound(base)
    epsilon = report.epsilon if report is not None and report.condition337 else 0.0

    def admissible(theta: float) -> bool:
        p_theta = theta_rescale(h, theta)
        if _epsilon_shortcut(p_theta, base, epsilon):
            return True
        return minimize_polynomial(p_theta, budget).value >= RESCALE_TOL

    hi = 1.0 - 1e-9
    if not admissible(hi):
        raise NoAdmissibleTheta(
            "rescaled polynomial scans negative even at theta = 1 - 1e-9"
        )
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (hi + lo)
        if admissible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def decompose(
    pnd: PND,
    theta: float | None = None,
    tol: float = DEFAULT_THETA_TOL,
    budget: SearchBudget | None = None,
    diagnosis: Diagnosis | None = None,
) -> Decomposition:
    """Split a PND into a polynomial-normal factor and a Gaussian factor.

    With no explicit theta, picks theta_floor + tol: the largest Gaussian
    factor this search can certify.  The shift lands in the Gaussian
    factor; factor_Y is centered.
    """
    diag = diagnosis or precheck(pnd, budget)
    if diag.verdict != VERDICT_ELIGIBLE:
        raise NotEligible(diag)
    h = to_hermite(whitened_poly(pnd))
    if theta is None:
        floor = theta_floor(h, tol, report=diag.report)
        theta = min(floor + tol, 1.0 - 1e-9)
    elif not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")
    p_theta = theta_rescale(h, theta)
    scan = minimize_polynomial(p_theta, budget)
    if scan.value < RESCALE_TOL:
        raise ThetaInadmissible(scan.value)
    L = pnd.form.whitener
    Linv = np.linalg.inv(L)
    factor_y = make_pnd(
        affine_substitute(p_theta, Linv, np.zeros(pnd.dim)),
        pnd.form.matrix / theta**2,
        np.zeros(pnd.dim),
        budget,
    )
    factor_z = GaussianFactor(
        mean=np.array(pnd.shift), cov=(1.0 - theta**2) * (L @ L.T)
    )
    cf_error = _cf_product_error(pnd, factor_y, factor_z)
    if cf_error > 1e-9:
        raise RuntimeError(
            f"internal factorization check failed: coefficient error {cf_error:.3e}"
        )
    return Decomposition(theta, factor_y, factor_z, float(scan.value), cf_error)


def _cf_product_error(pnd: PND, factor_y: PND, factor_z: GaussianFactor) -> float:
    """Coefficient-wise gap between the original cf and the factor product."""
    original = forward_cf(pnd)
    product = cf_multiply(forward_cf(factor_y), gaussian_cf(factor_z.mean, factor_z.cov))
    return max(
        product.beta.max_abs_coeff_diff(original.beta),
        float(np.max(np.abs(product.sigma - original.sigma))),
        float(np.max(np.abs(product.shift - original.shift))),
    )


def diagnosis_to_dict(diag: Diagnosis) -> dict:
    witness = None
    if diag.witness_point is not None:
        witness = {
            "point": [float(v) for v in diag.witness_point],
            "value": float(diag.witness_value),
        }
    return {
        "verdict": diag.verdict,
        "witness": witness,
        "infimum": float(diag.infimum),
        "infimum_point": [float(v) for v in diag.infimum_point],
        "attained": bool(diag.attained),
        "report": report_to_dict(diag.report),
    }


def gaussian_to_dict(z: GaussianFactor) -> dict:
    return {
        "mean": [float(v) for v in z.mean],
        "cov": [[float(v) for v in row] for row in z.cov],
    }


def decomposition_to_dict(dec: Decomposition) -> dict:
    return {
        "theta": float(dec.theta),
        "factor_Y": pnd_to_dict(dec.factor_Y),
        "factor_Z": gaussian_to_dict(dec.factor_Z),
        "min_p_theta": float(dec.min_p_theta),
        "cf_error": float(dec.cf_error),
        "conv_error": dec.conv_error,
    }
