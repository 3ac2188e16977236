"""Sparse multivariate polynomials and the probabilists' Hermite basis.

Polynomials are sparse maps from exponent multi-indices to real
coefficients.  The Hermite side uses He_k, orthogonal under the weight
exp(-x^2/2) -- the Gaussian weight every density in this package carries
(He_2(x) = x^2 - 1, recurrence He_{k+1} = x He_k - k He_{k-1}).  Basis
conversion goes through exact integer recurrence tables in each variable,
tensored across coordinates, so round trips are limited only by float
rounding; Gauss-Hermite quadrature is not needed on the conversion path.
"""

from __future__ import annotations

import functools
import itertools
import json
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import DimensionMismatch

MultiIndex = tuple[int, ...]

# Coefficients at or below this magnitude are dropped when a term map is
# brought to canonical sparse form.  Configurable per call for callers that
# need to keep tiny coefficients alive.
CANON_EPS = 1e-14


def _canonical_terms(dim, terms, eps):
    items = terms.items() if isinstance(terms, Mapping) else terms
    acc: dict[MultiIndex, float] = {}
    for alpha, coef in items:
        idx = tuple(int(a) for a in alpha)
        if len(idx) != dim:
            raise DimensionMismatch(f"multi-index {idx} does not have length {dim}")
        if any(a < 0 for a in idx):
            raise ValueError(f"negative exponent in multi-index {idx}")
        acc[idx] = acc.get(idx, 0.0) + float(coef)
    return {a: c for a, c in acc.items() if abs(c) > eps}


def grlex_key(alpha: MultiIndex):
    """Graded lexicographic sort key: total degree first, then lex."""
    return (sum(alpha), alpha)


@dataclass(frozen=True)
class Polynomial:
    """Immutable sparse polynomial on R^dim.

    ``terms`` maps exponent multi-indices to coefficients and is always in
    canonical form: indices of length ``dim``, no near-zero coefficients.
    ``degree`` is the maximal total degree (0 for the zero polynomial).
    """

    dim: int
    terms: dict
    degree: int

    @staticmethod
    def from_terms(dim: int, terms, eps: float = CANON_EPS) -> "Polynomial":
        if dim <= 0:
            raise ValueError("dimension must be positive")
        tt = _canonical_terms(dim, terms, eps)
        deg = max((sum(a) for a in tt), default=0)
        return Polynomial(dim, tt, deg)

    @staticmethod
    def zero(dim: int) -> "Polynomial":
        return Polynomial.from_terms(dim, {})

    @staticmethod
    def constant(dim: int, value: float) -> "Polynomial":
        return Polynomial.from_terms(dim, {(0,) * dim: value})

    @staticmethod
    def variable(dim: int, j: int) -> "Polynomial":
        alpha = tuple(1 if k == j else 0 for k in range(dim))
        return Polynomial.from_terms(dim, {alpha: 1.0})

    def coefficient(self, alpha) -> float:
        return self.terms.get(tuple(alpha), 0.0)

    def sorted_terms(self) -> list:
        return sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]))

    # -- arithmetic ---------------------------------------------------------

    def _check_dim(self, other: "Polynomial"):
        if self.dim != other.dim:
            raise DimensionMismatch(
                f"polynomials have dimensions {self.dim} and {other.dim}"
            )

    def __add__(self, other):
        if np.isscalar(other):
            other = Polynomial.constant(self.dim, float(other))
        self._check_dim(other)
        out = dict(self.terms)
        for a, c in other.terms.items():
            out[a] = out.get(a, 0.0) + c
        return Polynomial.from_terms(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial.from_terms(self.dim, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other):
        if np.isscalar(other):
            other = Polynomial.constant(self.dim, float(other))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            return Polynomial.from_terms(
                self.dim, {a: float(other) * c for a, c in self.terms.items()}
            )
        self._check_dim(other)
        out: dict[MultiIndex, float] = {}
        for a1, c1 in self.terms.items():
            for a2, c2 in other.terms.items():
                a = tuple(x + y for x, y in zip(a1, a2))
                out[a] = out.get(a, 0.0) + c1 * c2
        return Polynomial.from_terms(self.dim, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Polynomial.constant(self.dim, 1.0)
        for _ in range(n):
            result = result * self
        return result

    # -- evaluation ---------------------------------------------------------

    def eval(self, x) -> float:
        """Evaluate at a single point of R^dim."""
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.shape[0] != self.dim:
            raise DimensionMismatch(f"point has length {x.shape[0]}, expected {self.dim}")
        total = 0.0
        for alpha, c in self.terms.items():
            v = c
            for xi, ai in zip(x, alpha):
                if ai:
                    v *= xi**ai
            total += v
        return total

    def eval_many(self, pts: np.ndarray) -> np.ndarray:
        """Evaluate at an (n, dim) array of points at once."""
        pts = np.asarray(pts, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1) if self.dim == 1 else pts.reshape(1, -1)
        if pts.shape[1] != self.dim:
            raise DimensionMismatch(f"points have dimension {pts.shape[1]}, expected {self.dim}")
        if not self.terms:
            return np.zeros(pts.shape[0])
        alphas = np.array(list(self.terms.keys()), dtype=float)
        coefs = np.array(list(self.terms.values()))
        # (n, nterms): product over coordinates of x_j ** alpha_j
        monomials = np.prod(pts[:, None, :] ** alphas[None, :, :], axis=2)
        return monomials @ coefs

    def grad_eval(self, x) -> np.ndarray:
        """Gradient at a single point."""
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.shape[0] != self.dim:
            raise DimensionMismatch(f"point has length {x.shape[0]}, expected {self.dim}")
        g = np.zeros(self.dim)
        for alpha, c in self.terms.items():
            for j, aj in enumerate(alpha):
                if aj == 0:
                    continue
                v = c * aj
                for k, ak in enumerate(alpha):
                    e = ak - 1 if k == j else ak
                    if e:
                        v *= x[k] ** e
                g[j] += v
        return g

    def max_abs_coeff_diff(self, other: "Polynomial") -> float:
        """Largest coefficient gap between two polynomials (0 if identical)."""
        self._check_dim(other)
        keys = set(self.terms) | set(other.terms)
        if not keys:
            return 0.0
        return max(abs(self.terms.get(a, 0.0) - other.terms.get(a, 0.0)) for a in keys)


@dataclass(frozen=True)
class HermiteCoeffs:
    """Coefficients of a tensor-product Hermite expansion.

    ``coeffs`` maps a multi-index alpha to the coefficient of
    prod_j He_{alpha_j}(x_j); same canonical-form rules as Polynomial.
    """

    dim: int
    coeffs: dict
    degree: int

    @staticmethod
    def from_coeffs(dim: int, coeffs, eps: float = CANON_EPS) -> "HermiteCoeffs":
        if dim <= 0:
            raise ValueError("dimension must be positive")
        cc = _canonical_terms(dim, coeffs, eps)
        deg = max((sum(a) for a in cc), default=0)
        return HermiteCoeffs(dim, cc, deg)

    def coefficient(self, alpha) -> float:
        return self.coeffs.get(tuple(alpha), 0.0)

    def sorted_coeffs(self) -> list:
        return sorted(self.coeffs.items(), key=lambda kv: grlex_key(kv[0]))

    def max_abs_coeff_diff(self, other: "HermiteCoeffs") -> float:
        keys = set(self.coeffs) | set(other.coeffs)
        if not keys:
            return 0.0
        return max(abs(self.coeffs.get(a, 0.0) - other.coeffs.get(a, 0.0)) for a in keys)


# -- 1D conversion tables (exact integers in float storage) ------------------


@functools.lru_cache(maxsize=None)
def _hermite_monomial_coeffs(k: int) -> tuple:
    """Monomial coefficients of He_k: He_k(x) = sum_r out[r] x^r."""
    if k == 0:
        return (1.0,)
    if k == 1:
        return (0.0, 1.0)
    prev = _hermite_monomial_coeffs(k - 1)
    prev2 = _hermite_monomial_coeffs(k - 2)
    out = [0.0] * (k + 1)
    for r, c in enumerate(prev):
        out[r + 1] += c
    for r, c in enumerate(prev2):
        out[r] -= (k - 1) * c
    return tuple(out)


@functools.lru_cache(maxsize=None)
def _monomial_hermite_coeffs(k: int) -> tuple:
    """Hermite coefficients of x^k: x^k = sum_j out[j] He_j(x)."""
    if k == 0:
        return (1.0,)
    prev = _monomial_hermite_coeffs(k - 1)
    # x * He_j = He_{j+1} + j He_{j-1}
    out = [0.0] * (k + 1)
    for j, c in enumerate(prev):
        if c == 0.0:
            continue
        out[j + 1] += c
        if j >= 1:
            out[j - 1] += j * c
    return tuple(out)


def hermite_1d(k: int, x):
    """He_k(x) by the three-term recurrence; accepts scalars or arrays."""
    if k < 0:
        raise ValueError("order must be non-negative")
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if k == 0:
        return h_prev.item() if h_prev.ndim == 0 else h_prev
    h = x.copy()
    for j in range(1, k):
        h, h_prev = x * h - j * h_prev, h
    return h.item() if h.ndim == 0 else h


# -- basis conversion and rescaling ------------------------------------------


def to_hermite(p: Polynomial) -> HermiteCoeffs:
    """Expand p in the tensor Hermite basis: p = sum beta_a prod He_{a_j}."""
    out: dict[MultiIndex, float] = {}
    for alpha, c in p.terms.items():
        tables = [_monomial_hermite_coeffs(aj) for aj in alpha]
        for idx in itertools.product(*(range(len(t)) for t in tables)):
            w = c
            for tab, i in zip(tables, idx):
                w *= tab[i]
            if w != 0.0:
                out[idx] = out.get(idx, 0.0) + w
    return HermiteCoeffs.from_coeffs(p.dim, out)


def from_hermite(h: HermiteCoeffs) -> Polynomial:
    """Expand a Hermite coefficient map back to monomial form."""
    out: dict[MultiIndex, float] = {}
    for alpha, c in h.coeffs.items():
        tables = [_hermite_monomial_coeffs(aj) for aj in alpha]
        for idx in itertools.product(*(range(len(t)) for t in tables)):
            w = c
            for tab, i in zip(tables, idx):
                w *= tab[i]
            if w != 0.0:
                out[idx] = out.get(idx, 0.0) + w
    return Polynomial.from_terms(h.dim, out)


def theta_rescale(h: HermiteCoeffs, theta: float) -> Polynomial:
    """Expanded form of sum_a beta_a theta^{-|a|} prod_j He_{a_j}(x_j / theta).

    At theta = 1 this is exactly ``from_hermite(h)``.  The family's
    coefficients converge to those of ``from_hermite(h)`` as theta -> 1-.
    """
    if not 0.0 < theta <= 1.0:
        raise ValueError(f"theta must lie in (0, 1], got {theta}")
    out: dict[MultiIndex, float] = {}
    for alpha, c in h.coeffs.items():
        tables = [_hermite_monomial_coeffs(aj) for aj in alpha]
        total = sum(alpha)
        for idx in itertools.product(*(range(len(t)) for t in tables)):
            w = c * theta ** (-(total + sum(idx)))
            for tab, i in zip(tables, idx):
                w *= tab[i]
            if w != 0.0:
                out[idx] = out.get(idx, 0.0) + w
    return Polynomial.from_terms(h.dim, out)


def affine_substitute(p: Polynomial, M, c) -> Polynomial:
    """Expanded form of x -> p(M x + c).

    M must be invertible for the degree to be preserved; that is the
    caller's responsibility.
    """
    M = np.asarray(M, dtype=float)
    c = np.asarray(c, dtype=float).reshape(-1)
    d = p.dim
    if M.shape != (d, d):
        raise DimensionMismatch(f"matrix has shape {M.shape}, expected {(d, d)}")
    if c.shape[0] != d:
        raise DimensionMismatch(f"offset has length {c.shape[0]}, expected {d}")
    # Linear form fed into coordinate j: sum_k M[j,k] x_k + c[j].
    forms = []
    for j in range(d):
        terms = {tuple(1 if i == k else 0 for i in range(d)): M[j, k] for k in range(d)}
        terms[(0,) * d] = c[j]
        forms.append(Polynomial.from_terms(d, terms))
    max_pow = [0] * d
    for alpha in p.terms:
        for j, aj in enumerate(alpha):
            max_pow[j] = max(max_pow[j], aj)
    powers = []
    for j in range(d):
        pj = [Polynomial.constant(d, 1.0)]
        for _ in range(max_pow[j]):
            pj.append(pj[-1] * forms[j])
        powers.append(pj)
    result = Polynomial.zero(d)
    for alpha, coef in p.terms.items():
        term = Polynomial.constant(d, coef)
        for j, aj in enumerate(alpha):
            if aj:
                term = term * powers[j][aj]
        result = result + term
    return result


# -- JSON schema --------------------------------------------------------------
# {"dim": d, "terms": [{"alpha": [a1, ..., ad], "coef": c}, ...]}, graded-lex.


def polynomial_to_dict(p: Polynomial) -> dict:
    return {
        "dim": p.dim,
        "terms": [
            {"alpha": list(alpha), "coef": coef} for alpha, coef in p.sorted_terms()
        ],
    }


def polynomial_from_dict(data: Mapping) -> Polynomial:
    dim = int(data["dim"])
    terms = [(tuple(t["alpha"]), float(t["coef"])) for t in data["terms"]]
    return Polynomial.from_terms(dim, terms)


def polynomial_to_json(p: Polynomial) -> str:
    return json.dumps(polynomial_to_dict(p), indent=2, sort_keys=True)


def polynomial_from_json(text: str) -> Polynomial:
    return polynomial_from_dict(json.loads(text))
