"""Self-adjoint eigensolution of the operator and its Liouville normal form.

The variational (Friedrichs) realization is discretized by the polynomial
Galerkin space: for N > 4 polynomials lie in the form domain and no boundary
conditions are imposed at the degenerate endpoints.  The generalized
symmetric problem S v = lambda G v (both M-weighted) is solved with the
in-repo rotation eigensolver.
"""

from dataclasses import dataclass

import numpy as np

from ._eigen import eigh_generalized
from .errors import ResolutionError
from .operators import CoefficientFns, OperatorMatrix, gram_weighted, lambda_values, symmetrized_form
from .quadrature import SpectralField


@dataclass(frozen=True)
class EigenPair:
    """Eigenvalue and M-normalized eigenfunction, indexed 1-based."""

    lam: float
    phi: SpectralField
    index: int
    galerkin_index: int
    residual: float


def _apply_L_values(basis, coeffs, f):
    """Pointwise values of L f at the rule nodes (exact for polynomials)."""
    x = basis.rule.nodes
    lam = (x * (1 - x)) * f.deriv_values(2) + (2.5 * (1 - x) - basis.n_param / 2 * x) * f.deriv_values(1)
    return -lam + coeffs.ell1(x) * x * (1 - x) * f.deriv_values(1) + coeffs.L0(x) * f.values


def weighted_norm(basis, coeffs, values):
    """Norm in L^2(M b dx) of node values."""
    m = coeffs.m_values(basis.rule.nodes)
    return float(np.sqrt(np.dot(basis.rule.weights * m, np.asarray(values) ** 2)))


def solve_eigen(L, coeffs, n_eig):
    """First n_eig eigenpairs of the M-weighted symmetric form, ascending.

    Requires basis size >= 4*n_eig so the returned pairs are resolved.
    """
    if not isinstance(L, OperatorMatrix) or L.basis is None:
        raise ValueError("solve_eigen needs an OperatorMatrix carrying its basis")
    basis = L.basis
    if basis.size < 4 * n_eig:
        raise ResolutionError(
            f"basis size {basis.size} < 4*n_eig = {4 * n_eig}; raise the resolution")
    S = symmetrized_form(basis, coeffs)
    S = (S + S.T) / 2.0
    G = gram_weighted(basis, coeffs)
    vals, vecs = eigh_generalized(S, G)

    pairs = []
    for k in range(n_eig):
        c = vecs[:, k]
        phi = SpectralField(basis, c)
        # sign: make the x=0 boundary value positive (Prop.-8 constants are nonzero)
        p0 = phi(0.0)
        if abs(p0) > 1e-10 * np.max(np.abs(phi.values)):
            if p0 < 0:
                phi = SpectralField(basis, -c, -phi.values)
        elif phi.values[int(np.argmax(np.abs(phi.values)))] < 0:
            phi = SpectralField(basis, -c, -phi.values)
        res_vals = _apply_L_values(basis, coeffs, phi) - vals[k] * phi.values
        res = weighted_norm(basis, coeffs, res_vals) / weighted_norm(basis, coeffs, phi.values)
        pairs.append(EigenPair(float(vals[k]), phi, k + 1, k, res))
    return pairs


def first_positive_eigenvalue(pairs, threshold=1e-8):
    """Smallest eigenvalue above threshold (Corollary-1 default mode choice)."""
    for p in pairs:
        if p.lam > threshold:
            return p
    raise ValueError("no positive eigenvalue among the computed pairs")


def liouville_xi(x):
    """Liouville variable xi = arcsin(2x-1), mapping [0,1] to [-pi/2, pi/2]."""
    return np.arcsin(2.0 * np.asarray(x, dtype=float) - 1.0)


def liouville_potential(coeffs, x):
    """Potential q of the normal form -eta'' + q eta = lambda eta.

    Evaluated by analytic differentiation of log a and log b; singular at the
    endpoints, so x must lie strictly inside (0,1).
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0.0) or np.any(x >= 1.0):
        raise ValueError("the potential is singular at the endpoints; need 0 < x < 1")
    n = coeffs.n_param
    ell1 = coeffs.ell1
    da_a = 2.5 / x - (n / 2.0) / (1.0 - x) - ell1(x)
    s = 4.0 / x - (n - 1.0) / (1.0 - x) - 2.0 * ell1(x)
    ds = -4.0 / x ** 2 - (n - 1.0) / (1.0 - x) ** 2 - 2.0 * ell1.deriv()(x)
    q = coeffs.L0(x) + 0.25 * x * (1.0 - x) * (ds - s * s / 4.0 + da_a * s)
    return q if q.ndim else float(q)


@dataclass(frozen=True)
class LiouvilleData:
    """Samples of the transformation: xi(x), q(x), and the symbol functions."""

    x: np.ndarray
    xi: np.ndarray
    q_values: np.ndarray
    sym_a: np.ndarray
    sym_b: np.ndarray
    sym_m: np.ndarray


def build_liouville(coeffs, x_samples):
    x = np.asarray(x_samples, dtype=float)
    n = coeffs.n_param
    m = coeffs.m_values(x)
    a = x ** 2.5 * (1.0 - x) ** (n / 2.0) * m
    b = x ** 1.5 * (1.0 - x) ** (n / 2.0 - 1.0) * m
    return LiouvilleData(x, liouville_xi(x), liouville_potential(coeffs, x), a, b, m)


def boundary_constants(pair, slope_h=1e-3):
    """Boundary values (C0, C1) and the one-sided slope of the eigenfunction near 0.

    The Galerkin eigenfunction is a polynomial, so the boundary values are
    plain evaluations.  Raises if the pair is not converged enough for the
    values to be trustworthy.
    """
    if pair.residual > 1e-6:
        raise ResolutionError(
            f"eigenpair {pair.index} residual {pair.residual:.2e} too large for "
            "boundary extrapolation")
    phi = pair.phi
    c0 = float(phi(0.0))
    c1 = float(phi(1.0))
    slope0 = (float(phi(slope_h)) - c0) / slope_h
    return c0, c1, slope0
