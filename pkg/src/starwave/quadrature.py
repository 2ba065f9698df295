"""Gauss-Jacobi quadrature on [0,1] and the orthonormal basis of the weighted
space L^2([0,1], x^{3/2} (1-x)^{N/2-1} dx).

Everything is built from the three-term recurrence of the Jacobi polynomials
for the weight x^{beta} (1-x)^{alpha} on [0,1].  Nodes and weights come from
the symmetric tridiagonal recurrence matrix (Golub-Welsch), diagonalized with
the in-repo Jacobi rotation solver.  Basis values and derivatives at arbitrary
points use the differentiated recurrence, never finite differences; the
degenerate endpoints make finite differences unreliable.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from math import exp, lgamma

import numpy as np

from ._eigen import jacobi_eigh, tridiag_eigvals_bisect


def beta_function(a, b):
    """Euler Beta(a, b) for positive arguments."""
    if a <= 0 or b <= 0:
        raise ValueError("beta_function requires positive arguments")
    return exp(lgamma(a) + lgamma(b) - lgamma(a + b))


def jacobi_recurrence(n_terms, alpha_exp, beta_exp):
    """Monic three-term recurrence for the weight x^beta (1-x)^alpha on [0,1].

    Returns (a, b) with a[k] (k < n_terms) the recurrence diagonal and
    b[k] (k < n_terms+1) the off-diagonal squares; b[0] is the total weight
    mass Beta(beta+1, alpha+1).  Mapped from the standard [-1,1] coefficients.
    """
    al, be = float(alpha_exp), float(beta_exp)
    a = np.zeros(n_terms)
    b = np.zeros(n_terms + 1)
    b[0] = beta_function(be + 1.0, al + 1.0)
    s = al + be
    a[0] = (be - al) / (s + 2.0)
    if n_terms + 1 > 1:
        b[1] = 4.0 * (1.0 + al) * (1.0 + be) / ((2.0 + s) ** 2 * (3.0 + s))
    for k in range(1, n_terms):
        den = 2.0 * k + s
        a[k] = (be * be - al * al) / (den * (den + 2.0))
    for k in range(2, n_terms + 1):
        den = 2.0 * k + s
        b[k] = (4.0 * k * (k + al) * (k + be) * (k + s)
                / (den * den * (den + 1.0) * (den - 1.0)))
    # shift [-1,1] -> [0,1]: x = (t+1)/2
    a = (a + 1.0) / 2.0
    b[1:] = b[1:] / 4.0
    return a, b


@dataclass(frozen=True)
class QuadratureRule:
    """An n-point rule for integrals against x^{beta_exp} (1-x)^{alpha_exp}."""

    nodes: np.ndarray
    weights: np.ndarray
    alpha_exp: float
    beta_exp: float

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.ndim != 1 or weights.shape != nodes.shape:
            raise ValueError("nodes and weights must be 1-d arrays of equal length")
        if np.any(nodes <= 0.0) or np.any(nodes >= 1.0):
            raise ValueError("quadrature nodes must lie in the open interval (0,1)")
        if np.any(np.diff(nodes) <= 0.0):
            raise ValueError("quadrature nodes must be strictly increasing")
        if np.any(weights <= 0.0):
            raise ValueError("quadrature weights must be positive")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self):
        return self.nodes.size

    def integrate(self, values):
        """Sum w_q f(x_q) for f sampled at the nodes."""
        return float(np.dot(self.weights, np.asarray(values, dtype=float)))

    def inner(self, f_values, g_values):
        return float(np.dot(self.weights, np.asarray(f_values) * np.asarray(g_values)))


@lru_cache(maxsize=256)
def _rule_cached(n, alpha_exp, beta_exp):
    a, b = jacobi_recurrence(n + 1, alpha_exp, beta_exp)
    off = np.sqrt(b[1:n])
    if n <= 160:
        t = np.zeros((n, n))
        np.fill_diagonal(t, a[:n])
        if n > 1:
            t[np.arange(n - 1), np.arange(1, n)] = off
            t[np.arange(1, n), np.arange(n - 1)] = off
        nodes, _ = jacobi_eigh(t)
    else:
        nodes = tridiag_eigvals_bisect(a[:n], off)
    nodes = np.sort(nodes)
    # Newton-polish the nodes as roots of the degree-n orthonormal polynomial;
    # eigenvalues alone carry O(1e-12) error that the Gram identity feels.
    sqb = np.sqrt(b)
    inv_norm0 = 1.0 / sqb[0]
    for _ in range(3):
        tab = _orthonormal_eval(a, sqb, inv_norm0, n, nodes, 1)
        pn, dpn = tab[0, n], tab[1, n]
        step = pn / dpn
        nodes = nodes - step
        if np.max(np.abs(step)) < 1e-16:
            break
    # Christoffel weights: w_i = 1 / sum_{k<n} p_k(x_i)^2
    tab = _orthonormal_eval(a, sqb, inv_norm0, n - 1, nodes, 0)[0]
    weights = 1.0 / np.sum(tab * tab, axis=0)
    rule = QuadratureRule(nodes, weights, float(alpha_exp), float(beta_exp))
    rule.nodes.setflags(write=False)
    rule.weights.setflags(write=False)
    return rule


def gauss_jacobi_rule(n, alpha_exp, beta_exp):
    """n-point Gauss rule on [0,1] for the weight x^{beta_exp} (1-x)^{alpha_exp}.

    Exact for polynomials of degree <= 2n-1.  Rejects non-integrable weights
    (alpha_exp <= -1 or beta_exp <= -1).
    """
    if n < 1:
        raise ValueError("rule size must be at least 1")
    if alpha_exp <= -1.0 or beta_exp <= -1.0:
        raise ValueError("weight exponents must exceed -1 for an integrable weight")
    return _rule_cached(int(n), float(alpha_exp), float(beta_exp))


def _orthonormal_eval(a, sqb, inv_norm0, degree_max, x, n_derivs):
    """Values (and derivatives) of orthonormal polynomials p_0..p_degree_max at x.

    Returns array of shape (n_derivs+1, degree_max+1, len(x)).  Recurrence:
    sqb[k+1] p_{k+1} = (x - a[k]) p_k - sqb[k] p_{k-1}, differentiated exactly.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    m = degree_max + 1
    out = np.zeros((n_derivs + 1, m, x.size))
    out[0, 0, :] = inv_norm0
    if m == 1:
        return out
    for k in range(0, degree_max):
        xm = x - a[k]
        nxt = xm * out[0, k] - (sqb[k] * out[0, k - 1] if k > 0 else 0.0)
        out[0, k + 1] = nxt / sqb[k + 1]
        if n_derivs >= 1:
            nxt = xm * out[1, k] + out[0, k] - (sqb[k] * out[1, k - 1] if k > 0 else 0.0)
            out[1, k + 1] = nxt / sqb[k + 1]
        if n_derivs >= 2:
            nxt = xm * out[2, k] + 2.0 * out[1, k] - (sqb[k] * out[2, k - 1] if k > 0 else 0.0)
            out[2, k + 1] = nxt / sqb[k + 1]
        if n_derivs >= 3:
            nxt = xm * out[3, k] + 3.0 * out[2, k] - (sqb[k] * out[3, k - 1] if k > 0 else 0.0)
            out[3, k + 1] = nxt / sqb[k + 1]
        if n_derivs >= 4:
            nxt = xm * out[4, k] + 4.0 * out[3, k] - (sqb[k] * out[4, k - 1] if k > 0 else 0.0)
            out[4, k + 1] = nxt / sqb[k + 1]
    return out


class JacobiBasis:
    """Orthonormal polynomial basis of L^2([0,1], x^{3/2}(1-x)^{N/2-1}dx).

    Carries its own quadrature rule (default twice the basis size, so products
    of two basis elements and degree-preserving operators integrate exactly)
    and cached value/derivative tables at the rule nodes.
    """

    def __init__(self, n_param, size=64, rule_factor=2):
        if n_param <= 4.0:
            raise ValueError("the weight requires N > 4 (assumption B0)")
        if size < 1:
            raise ValueError("basis size must be positive")
        self.n_param = float(n_param)
        self.size = int(size)
        self.alpha_exp = self.n_param / 2.0 - 1.0
        self.beta_exp = 1.5
        n_rec = max(2 * self.size + 2, 4)
        a, b = jacobi_recurrence(n_rec, self.alpha_exp, self.beta_exp)
        self._a = a
        self._sqb = np.sqrt(b)
        self._inv_norm0 = 1.0 / self._sqb[0]
        self.rule = gauss_jacobi_rule(rule_factor * self.size, self.alpha_exp, self.beta_exp)
        tables = _orthonormal_eval(self._a, self._sqb, self._inv_norm0,
                                   self.size - 1, self.rule.nodes, 2)
        # (nq, nb) layout: column j is basis degree j at the nodes
        self.values_table = np.ascontiguousarray(tables[0].T)
        self.deriv_table = np.ascontiguousarray(tables[1].T)
        self.deriv2_table = np.ascontiguousarray(tables[2].T)
        self._analysis = (self.values_table * self.rule.weights[:, None]).T

    def jacobi_eigenvalue(self, degree):
        """Closed-form eigenvalue n(n+(N+3)/2) of the principal operator."""
        n = np.asarray(degree, dtype=float)
        return n * (n + (self.n_param + 3.0) / 2.0)

    def eval(self, degree, x, deriv=0):
        """Value (or deriv-th derivative) of the degree-d basis polynomial at x."""
        if not 0 <= degree < self.size:
            raise ValueError(f"degree {degree} outside basis of size {self.size}")
        scalar = np.isscalar(x)
        tab = _orthonormal_eval(self._a, self._sqb, self._inv_norm0, degree,
                                x, deriv)
        out = tab[deriv, degree]
        return float(out[0]) if scalar else out

    def eval_all(self, x, deriv=0):
        """Table of all basis polynomials (and derivatives) at x: (..., nb, len(x))."""
        return _orthonormal_eval(self._a, self._sqb, self._inv_norm0,
                                 self.size - 1, x, deriv)

    def analyze(self, values):
        """Coefficients of the quadrature projection of point values at the rule nodes."""
        values = np.asarray(values, dtype=float)
        if values.shape[-1] != self.rule.size:
            raise ValueError("values must be sampled at the basis rule nodes")
        return values @ self._analysis.T

    def synthesize(self, coeffs, x):
        """Evaluate the expansion sum_j c_j p_j at x."""
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape[-1] != self.size:
            raise ValueError("coefficient vector does not match basis size")
        scalar = np.isscalar(x)
        tab = _orthonormal_eval(self._a, self._sqb, self._inv_norm0,
                                self.size - 1, x, 0)[0]
        out = coeffs @ tab
        return float(out[0]) if (scalar and out.ndim == 1) else out

    def node_values(self, coeffs):
        return np.asarray(coeffs, dtype=float) @ self.values_table.T

    def node_deriv(self, coeffs, order=1):
        table = {1: self.deriv_table, 2: self.deriv2_table}[order]
        return np.asarray(coeffs, dtype=float) @ table.T


@lru_cache(maxsize=32)
def get_basis(n_param, size=64, rule_factor=2):
    """Cached basis factory; bases are immutable after construction."""
    return JacobiBasis(n_param, size, rule_factor)


def eval_basis(basis, degree, x):
    """Value of the orthonormal degree-d basis polynomial at x."""
    return basis.eval(degree, x)


def analyze(rule, basis, values):
    """Project node values onto basis coefficients using the given rule.

    The rule must be at least as large as the basis and sample the same nodes
    the values were taken at.
    """
    if rule.size < basis.size:
        raise ValueError("rule size must be at least the basis size")
    if rule.size != basis.rule.size:
        raise ValueError("rule does not match the basis quadrature nodes")
    return basis.analyze(values)


def synthesize(basis, coeffs, x):
    """Evaluate basis coefficients at x."""
    return basis.synthesize(coeffs, x)


@dataclass(frozen=True)
class SpectralField:
    """A function on [0,1]: coefficients in a JacobiBasis plus cached node values."""

    basis: JacobiBasis
    coeffs: np.ndarray
    values: np.ndarray = field(default=None)

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.shape != (self.basis.size,):
            raise ValueError("coefficient vector does not match basis size")
        object.__setattr__(self, "coeffs", coeffs)
        if self.values is None:
            object.__setattr__(self, "values", self.basis.node_values(coeffs))
        else:
            object.__setattr__(self, "values", np.asarray(self.values, dtype=float))

    @classmethod
    def from_values(cls, basis, values):
        values = np.asarray(values, dtype=float)
        return cls(basis, basis.analyze(values), values)

    @classmethod
    def from_callable(cls, basis, fn):
        return cls.from_values(basis, fn(basis.rule.nodes))

    @classmethod
    def zero(cls, basis):
        return cls(basis, np.zeros(basis.size))

    def __call__(self, x):
        return self.basis.synthesize(self.coeffs, x)

    def deriv_values(self, order=1):
        """Exact derivative of the polynomial expansion, at the rule nodes."""
        return self.basis.node_deriv(self.coeffs, order)

    def norm(self):
        """Norm in the basis weight space (coefficients are orthonormal)."""
        return float(np.linalg.norm(self.coeffs))
