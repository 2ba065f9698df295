"""Background states (y*, v*) around which the problem is perturbed.

A background is a sum of separated terms g_i(t) * F_i(x) per component, with
analytic time factors and spectral spatial profiles, so time derivatives and
the operator applied to y* are available pointwise without differencing.
"""

from dataclasses import dataclass

import numpy as np

from .quadrature import SpectralField


@dataclass(frozen=True)
class _Term:
    g: callable          # g(t)
    dg: callable         # g'(t)
    profile: SpectralField


class Background:
    """Separated-form background with analytic time dependence."""

    def __init__(self, basis, y_terms, v_terms, provenance="custom", static=False):
        self.basis = basis
        self.y_terms = [_Term(*t) for t in y_terms]
        self.v_terms = [_Term(*t) for t in v_terms]
        self.provenance = provenance
        self.static = static
        x = basis.rule.nodes
        self._x = x
        ell = 2.5 * (1 - x) - basis.n_param / 2 * x
        self._lop_cache = {}
        for label, terms in (("y", self.y_terms), ("v", self.v_terms)):
            rows = []
            for term in terms:
                f = term.profile
                lam = x * (1 - x) * f.deriv_values(2) + ell * f.deriv_values(1)
                rows.append(lam)
            self._lop_cache[label] = rows

    @classmethod
    def zero(cls, basis):
        return cls(basis, [], [], provenance="zero", static=True)

    def fields(self, t, coeffs=None):
        """Node values of (y*, z*, v*, w*, dt y*, dt v*) and L-principal data.

        coeffs: CoefficientFns for the lower-order part of L y*; when given,
        'Ly' holds the full operator applied to y*.
        """
        x = self._x
        out = {k: np.zeros_like(x) for k in ("y", "z", "v", "w", "dty", "dtv")}
        lam_y = np.zeros_like(x)
        for term, lam in zip(self.y_terms, self._lop_cache["y"]):
            gv = term.g(t)
            out["y"] += gv * term.profile.values
            out["z"] += gv * x * term.profile.deriv_values(1)
            out["dty"] += term.dg(t) * term.profile.values
            lam_y += gv * lam
        for term in self.v_terms:
            gv = term.g(t)
            out["v"] += gv * term.profile.values
            out["w"] += gv * x * term.profile.deriv_values(1)
            out["dtv"] += term.dg(t) * term.profile.values
        out["lam_y"] = lam_y
        if coeffs is not None:
            dy = np.zeros_like(x)
            for term in self.y_terms:
                dy += term.g(t) * term.profile.deriv_values(1)
            out["Ly"] = (-lam_y + coeffs.ell1(x) * x * (1 - x) * dy
                         + coeffs.L0(x) * out["y"])
        return out

    def initial_values(self):
        """(y*(0), v*(0)) as node values."""
        f0 = self.fields(0.0)
        return f0["y"], f0["v"]


def periodic_background(basis, eps, eigenpair, theta0, model):
    """y* = eps sin(sqrt(lam) t + theta) Phi, v* = eps sqrt(lam)/J0 cos(...) Phi.

    The linearized time-periodic pair seeded from an eigenfunction.
    """
    lam = eigenpair.lam
    if lam <= 0:
        raise ValueError("periodic background needs a positive eigenvalue")
    root = np.sqrt(lam)
    phi = eigenpair.phi
    j0 = model.j0(basis.rule.nodes)
    v_profile = SpectralField.from_values(basis, root / j0 * phi.values)
    y_terms = [(lambda t: eps * np.sin(root * t + theta0),
                lambda t: eps * root * np.cos(root * t + theta0), phi)]
    v_terms = [(lambda t: eps * np.cos(root * t + theta0),
                lambda t: -eps * root * np.sin(root * t + theta0), v_profile)]
    return Background(basis, y_terms, v_terms,
                      provenance=f"periodic(eps={eps}, lam={lam:.6g}, theta0={theta0})")


def cauchy_background(basis, psi0, psi1, model):
    """y* = psi0 + t J(x,0,0) psi1, v* = psi1 (the Cauchy-problem background)."""
    j0 = model.j0(basis.rule.nodes)
    jpsi1 = SpectralField.from_values(basis, j0 * psi1.values)
    one = lambda t: 1.0
    zero = lambda t: 0.0
    y_terms = [(one, zero, psi0), (lambda t: t, one, jpsi1)]
    v_terms = [(one, zero, psi1)]
    return Background(basis, y_terms, v_terms, provenance="cauchy")


def trig_background(basis, rng, amplitude, n_terms=2, k_max=5, omega_max=3.0,
                    static=False):
    """Random small smooth background for property and audit tests."""
    def trig_pair(om, ph):
        return (lambda t, om=om, ph=ph: np.cos(om * t + ph),
                lambda t, om=om, ph=ph: -om * np.sin(om * t + ph))

    def make_terms():
        terms = []
        for _ in range(n_terms):
            c = np.zeros(basis.size)
            k = int(rng.integers(0, k_max))
            c[k] = amplitude * rng.normal()
            profile = SpectralField(basis, c)
            if static:
                terms.append((lambda t: 1.0, lambda t: 0.0, profile))
            else:
                om = rng.uniform(0.5, omega_max)
                ph = rng.uniform(0, 2 * np.pi)
                g, dg = trig_pair(om, ph)
                terms.append((g, dg, profile))
        return terms

    return Background(basis, make_terms(), make_terms(),
                      provenance="random", static=static)
