"""Galerkin assembly of the model operators in the Jacobi basis.

The principal operator Lambda = x(1-x)D^2 + ((5/2)(1-x) - (N/2)x)D is
diagonalized by the basis with eigenvalues -n(n+(N+3)/2).  The full operator
is L = -Lambda + ell1 * cD + L0 with cD = x(1-x)D.  Variable coefficients are
applied pseudospectrally: evaluate at the quadrature nodes, multiply, project.

Also houses the two integration-by-parts identities used by the energy
machinery, as computable residuals:

  (-alpha Lambda phi | psi) = (alpha dD phi | dD psi) + ((D alpha) cD phi | psi)
  (alpha dD phi | dD cD phi) = (alpha^* dD phi | dD phi),
      alpha^* = -(1/4) ((3 - (N+1)x) alpha + 2 cD alpha)

with dD = sqrt(x(1-x)) D.  The alpha^* multiplier is the corrected form; it is
what direct integration validates (see tests).
"""

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial

from .quadrature import JacobiBasis, SpectralField


def _as_polynomial(p):
    if isinstance(p, Polynomial):
        return p
    return Polynomial(np.atleast_1d(np.asarray(p, dtype=float)))


@dataclass(frozen=True)
class CoefficientFns:
    """The lower-order coefficients (ell1, L0) of the operator, plus N.

    Polynomials guarantee the analyticity hypothesis; they are given by
    ascending coefficient lists.
    """

    ell1: Polynomial
    L0: Polynomial
    n_param: float

    def __post_init__(self):
        if self.n_param <= 4.0:
            raise ValueError("assumption B0 requires N > 4")
        object.__setattr__(self, "ell1", _as_polynomial(self.ell1))
        object.__setattr__(self, "L0", _as_polynomial(self.L0))

    @classmethod
    def zero(cls, n_param):
        return cls(Polynomial([0.0]), Polynomial([0.0]), float(n_param))

    def m_values(self, x):
        """Symmetrizing density M(x) = exp(-int_0^x ell1); makes L self-adjoint
        in L^2(M b dx).  (The sign is forced by the ell1 term of the operator.)"""
        prim = self.ell1.integ(lbnd=0.0)
        return np.exp(-prim(np.asarray(x, dtype=float)))


@dataclass(frozen=True)
class OperatorMatrix:
    """Dense matrix of an operator acting on basis coefficients."""

    entries: np.ndarray
    label: str
    basis: JacobiBasis = field(repr=False, default=None)

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError("operator matrix must be square")
        object.__setattr__(self, "entries", e)

    def __matmul__(self, coeffs):
        return self.entries @ np.asarray(coeffs, dtype=float)


def _coefficient_values(basis, f):
    """Node values of a coefficient function given as callable, array, field or scalar."""
    x = basis.rule.nodes
    if isinstance(f, SpectralField):
        return f.values
    if callable(f):
        return np.broadcast_to(np.asarray(f(x), dtype=float), x.shape).copy()
    arr = np.asarray(f, dtype=float)
    if arr.ndim == 0:
        return np.full(x.shape, float(arr))
    if arr.shape != x.shape:
        raise ValueError("coefficient values must be sampled at the rule nodes")
    return arr


def _galerkin(basis, op_values, label):
    """Matrix with columns = projection of (operator applied to basis columns)."""
    w = basis.rule.weights
    entries = basis.values_table.T @ (w[:, None] * op_values)
    return OperatorMatrix(entries, label, basis)


def lambda_values(basis, which="lambda"):
    """Pointwise application tables: operator applied to every basis column."""
    x = basis.rule.nodes
    v, v1, v2 = basis.values_table, basis.deriv_table, basis.deriv2_table
    if which == "lambda":
        c2 = (x * (1.0 - x))[:, None]
        c1 = (2.5 * (1.0 - x) - (basis.n_param / 2.0) * x)[:, None]
        return c2 * v2 + c1 * v1
    raise ValueError(which)


def assemble_lambda(basis):
    """Matrix of -Lambda; diagonal with entries n(n+(N+3)/2) in exact arithmetic."""
    return _galerkin(basis, -lambda_values(basis), "-Lambda")


def assemble_L(basis, coeffs):
    """Matrix of L = -Lambda + ell1 * cD + L0 acting on basis coefficients."""
    if abs(coeffs.n_param - basis.n_param) > 1e-12:
        raise ValueError("coefficient N does not match the basis")
    x = basis.rule.nodes
    ell1 = coeffs.ell1(x)[:, None]
    L0 = coeffs.L0(x)[:, None]
    cd = (x * (1.0 - x))[:, None] * basis.deriv_table
    vals = -lambda_values(basis) + ell1 * cd + L0 * basis.values_table
    return _galerkin(basis, vals, "L")


def assemble_first_order(basis, kind, f=None):
    """Matrix of cD, dD, the endpoint model Laplacians, or a multiplication.

    kind: 'check_D' -> x(1-x)D;  'dot_D' -> sqrt(x(1-x))D;
          'delta0'  -> xD^2 + (5/2)D;  'delta1' -> (1-x)D^2 - (N/2)D
          (the [1] operator written in the unflipped variable);
          'multiply' -> pointwise multiplication by f.
    """
    x = basis.rule.nodes
    v, v1, v2 = basis.values_table, basis.deriv_table, basis.deriv2_table
    if kind == "check_D":
        vals = (x * (1.0 - x))[:, None] * v1
    elif kind == "dot_D":
        vals = np.sqrt(x * (1.0 - x))[:, None] * v1
    elif kind == "delta0":
        vals = x[:, None] * v2 + 2.5 * v1
    elif kind == "delta1":
        vals = (1.0 - x)[:, None] * v2 - (basis.n_param / 2.0) * v1
    elif kind == "multiply":
        if f is None:
            raise ValueError("multiply requires a coefficient function")
        vals = _coefficient_values(basis, f)[:, None] * v
    else:
        raise ValueError(f"unknown operator kind: {kind!r}")
    return _galerkin(basis, vals, kind)


def gram_weighted(basis, coeffs):
    """Gram matrix of the basis under the M-weighted inner product."""
    m = coeffs.m_values(basis.rule.nodes)
    w = basis.rule.weights * m
    return basis.values_table.T @ (w[:, None] * basis.values_table)


def symmetrized_form(basis, coeffs):
    """M-weighted Galerkin matrix <p_i | L p_j>_M, assembled directly.

    Symmetric up to quadrature error because L is self-adjoint in
    L^2(M b dx).  (Conjugating the coefficient-space matrix by the Gram
    matrix instead would leak top-degree truncation error: ell1*cD raises
    the degree of the last basis element out of the span.)
    """
    x = basis.rule.nodes
    ell1 = coeffs.ell1(x)[:, None]
    L0 = coeffs.L0(x)[:, None]
    cd = (x * (1.0 - x))[:, None] * basis.deriv_table
    vals = -lambda_values(basis) + ell1 * cd + L0 * basis.values_table
    m = coeffs.m_values(x)
    w = basis.rule.weights * m
    return basis.values_table.T @ (w[:, None] * vals)


def _want_field(basis, f):
    if isinstance(f, SpectralField):
        if f.basis is not basis:
            raise ValueError("field built on a different basis")
        return f
    return SpectralField.from_callable(basis, f if callable(f) else lambda x: f + 0.0 * x)


def ibp_formula1_terms(alpha, phi, psi):
    """(LHS, RHS) of the first integration-by-parts identity, by quadrature."""
    basis = phi.basis
    alpha = _want_field(basis, alpha)
    psi = _want_field(basis, psi)
    x = basis.rule.nodes
    w = basis.rule.weights
    xx = x * (1.0 - x)
    lam_phi = xx * phi.deriv_values(2) + (2.5 * (1.0 - x) - basis.n_param / 2.0 * x) * phi.deriv_values(1)
    lhs = np.dot(w, -alpha.values * lam_phi * psi.values)
    rhs = (np.dot(w, alpha.values * xx * phi.deriv_values(1) * psi.deriv_values(1))
           + np.dot(w, alpha.deriv_values(1) * xx * phi.deriv_values(1) * psi.values))
    return lhs, rhs


def ibp_residual_formula1(alpha, phi, psi):
    """|LHS - RHS| of the first identity."""
    lhs, rhs = ibp_formula1_terms(alpha, phi, psi)
    return abs(lhs - rhs)


def alpha_star_values(basis, alpha_values, alpha_deriv_values):
    """The corrected multiplier -(1/4)((3-(N+1)x) a + 2 x(1-x) a')."""
    x = basis.rule.nodes
    return -0.25 * ((3.0 - (basis.n_param + 1.0) * x) * alpha_values
                    + 2.0 * x * (1.0 - x) * alpha_deriv_values)


def ibp_formula2_terms(alpha, phi):
    """(LHS, RHS) of the second identity, by quadrature."""
    basis = phi.basis
    alpha = _want_field(basis, alpha)
    x = basis.rule.nodes
    w = basis.rule.weights
    xx = x * (1.0 - x)
    dphi = phi.deriv_values(1)
    d_cd_phi = (1.0 - 2.0 * x) * dphi + xx * phi.deriv_values(2)
    lhs = np.dot(w, alpha.values * xx * dphi * d_cd_phi)
    astar = alpha_star_values(basis, alpha.values, alpha.deriv_values(1))
    rhs = np.dot(w, astar * xx * dphi * dphi)
    return lhs, rhs


def ibp_residual_formula2(alpha, phi):
    """|LHS - RHS| of the second identity."""
    lhs, rhs = ibp_formula2_terms(alpha, phi)
    return abs(lhs - rhs)
