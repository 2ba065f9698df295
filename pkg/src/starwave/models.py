"""Concrete instances of the nonlinearity triple (J, H1, H2) and the
assumption checker.

Models carry analytic first partial derivatives next to the functions; the
linearization assembly needs them pointwise, and the checker cross-validates
them with central differences.  The 'vanishes at the right endpoint' condition
is tested as boundedness of f/(1-x) along a geometric sequence of x values,
which is the computable consequence of the analytic-factor definition.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import UBoxExit
from .operators import CoefficientFns


@dataclass(frozen=True)
class ModelSpec:
    """The triple (J, H1, H2) with analytic first derivatives, plus (ell1, L0, N).

    Signatures (all numpy-vectorized over same-shape arrays):
      J(x, y, z);  dJ = (dJ/dy, dJ/dz)
      H1(x, y, z, v);  dH1 = (dy, dz, dv)
      H2(x, y, z, v, w);  dH2 = (dy, dz, dv, dw)
    """

    name: str
    J: callable
    dJ: tuple
    H1: callable
    dH1: tuple
    H2: callable
    dH2: tuple
    coeffs: CoefficientFns
    u_radius: float = 0.1
    eps0: float = 0.05

    @property
    def n_param(self):
        return self.coeffs.n_param

    def j0(self, x):
        """J on the zero state (background coefficient of the linearized system)."""
        z = np.zeros_like(np.asarray(x, dtype=float))
        return self.J(x, z, z)

    def h10(self, x):
        z = np.zeros_like(np.asarray(x, dtype=float))
        return self.H1(x, z, z, z)


def default_model(n_param, u_radius=0.1, eps0=0.05):
    """J = 1+y, H1 = 1/(1+y), H2 = y^2 + (1-x)(z^2 + w^2), ell1 = L0 = 0."""
    one = np.ones_like
    zero = np.zeros_like

    def J(x, y, z):
        return 1.0 + y

    def H1(x, y, z, v):
        return 1.0 / (1.0 + y)

    def H2(x, y, z, v, w):
        return y * y + (1.0 - x) * (z * z + w * w)

    return ModelSpec(
        name="default",
        J=J, dJ=(lambda x, y, z: one(y), lambda x, y, z: zero(y)),
        H1=H1, dH1=(lambda x, y, z, v: -1.0 / (1.0 + y) ** 2,
                    lambda x, y, z, v: zero(y),
                    lambda x, y, z, v: zero(y)),
        H2=H2, dH2=(lambda x, y, z, v, w: 2.0 * y,
                    lambda x, y, z, v, w: 2.0 * (1.0 - x) * z,
                    lambda x, y, z, v, w: zero(y),
                    lambda x, y, z, v, w: 2.0 * (1.0 - x) * w),
        coeffs=CoefficientFns.zero(n_param),
        u_radius=u_radius, eps0=eps0)


def variant_model_zJ(n_param, u_radius=0.1, eps0=0.05):
    """J = 1 + y + (1-x)z: exercises a nonzero dJ/dz (still analytic after
    division by 1-x); H2 as in the default model."""
    zero = np.zeros_like

    def J(x, y, z):
        return 1.0 + y + (1.0 - x) * z

    def H1(x, y, z, v):
        return 1.0 / (1.0 + y + (1.0 - x) * z)

    def H2(x, y, z, v, w):
        return y * y + (1.0 - x) * (z * z + w * w)

    return ModelSpec(
        name="variant_zJ",
        J=J, dJ=(lambda x, y, z: np.ones_like(y), lambda x, y, z: (1.0 - x) * np.ones_like(y)),
        H1=H1, dH1=(lambda x, y, z, v: -1.0 / (1.0 + y + (1.0 - x) * z) ** 2,
                    lambda x, y, z, v: -(1.0 - x) / (1.0 + y + (1.0 - x) * z) ** 2,
                    lambda x, y, z, v: zero(y)),
        H2=H2, dH2=(lambda x, y, z, v, w: 2.0 * y,
                    lambda x, y, z, v, w: 2.0 * (1.0 - x) * z,
                    lambda x, y, z, v, w: zero(y),
                    lambda x, y, z, v, w: 2.0 * (1.0 - x) * w),
        coeffs=CoefficientFns.zero(n_param),
        u_radius=u_radius, eps0=eps0)


class PolyNd:
    """Multivariate polynomial sum of c * x^e0 * a1^e1 * ... from a term table."""

    def __init__(self, terms):
        self.terms = [(tuple(int(e) for e in t[:-1]), float(t[-1])) for t in terms]

    def __call__(self, *args):
        out = np.zeros_like(np.asarray(args[0], dtype=float))
        for exps, c in self.terms:
            term = np.full_like(out, c)
            for a, e in zip(args, exps):
                if e:
                    term = term * np.asarray(a, dtype=float) ** e
            out = out + term
        return out

    def partial(self, i):
        terms = []
        for exps, c in self.terms:
            if exps[i] > 0:
                new = list(exps)
                new[i] -= 1
                terms.append(tuple(new) + (c * exps[i],))
        if not terms:
            terms = [tuple(0 for _ in self.terms[0][0]) + (0.0,)] if self.terms else [(0, 0.0)]
        return PolyNd(terms)


def polynomial_model(name, j_terms, h1_terms, h2_terms, ell1, L0, n_param,
                     u_radius=0.1, eps0=0.05):
    """Custom model from coefficient tables: rows are [e_x, e_y, ..., coeff]."""
    J = PolyNd(j_terms)
    H1 = PolyNd(h1_terms)
    H2 = PolyNd(h2_terms)
    return ModelSpec(
        name=name,
        J=J, dJ=(J.partial(1), J.partial(2)),
        H1=H1, dH1=(H1.partial(1), H1.partial(2), H1.partial(3)),
        H2=H2, dH2=(H2.partial(1), H2.partial(2), H2.partial(3), H2.partial(4)),
        coeffs=CoefficientFns(np.atleast_1d(ell1), np.atleast_1d(L0), n_param),
        u_radius=u_radius, eps0=eps0)


def model_by_name(name, n_param, **kw):
    if name == "default":
        return default_model(n_param, **kw)
    if name == "variant_zJ":
        return variant_model_zJ(n_param, **kw)
    raise ValueError(f"unknown model {name!r}")


def assert_in_ubox(model, y, z, v, w, t=None):
    """Raise UBoxExit if the state leaves the box where the model is defined."""
    worst = max(float(np.max(np.abs(a))) for a in (y, z, v, w))
    if worst >= model.u_radius:
        where = "" if t is None else f" at t={t:.6g}"
        raise UBoxExit(f"state left the model box (|.| = {worst:.3e} >= "
                       f"{model.u_radius}){where}", t=t)


def perturbation_size(y, z, v, w):
    """The smallness functional |y| + |xDy| + |v| + |xDv| measured pointwise."""
    return float(np.max(np.abs(y) + np.abs(z) + np.abs(v) + np.abs(w)))


@dataclass(frozen=True)
class AssumptionReport:
    """Pass/fail per hypothesis with the worst sampled residuals."""

    checks: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c["passed"] for c in self.checks.values())

    def to_dict(self):
        return {"passed": self.passed, "checks": self.checks}


def _lop_apply(coeffs_fns, basis, fld, x):
    """Pointwise L y at arbitrary x for a spectral field y."""
    tab = basis.eval_all(np.atleast_1d(x), deriv=2)
    v = fld.coeffs @ tab[0]
    d1 = fld.coeffs @ tab[1]
    d2 = fld.coeffs @ tab[2]
    xx = np.atleast_1d(x)
    lam = xx * (1 - xx) * d2 + (2.5 * (1 - xx) - basis.n_param / 2 * xx) * d1
    return -lam + coeffs_fns.ell1(xx) * xx * (1 - xx) * d1 + coeffs_fns.L0(xx) * v


def check_assumptions(model, basis=None, n_x=41, growth_limit=10.0, seed=20240811):
    """Numerical audit of the standing hypotheses.

    B0 is arithmetic; B2 samples the identity H1(x,0,0,0) J(x,0,0) = 1 and the
    two-sided bound on J; B3 measures |dJ/dz|, |(dH1/dz) L y + dH2/dz| and
    |dH2/dw| divided by (1-x) at x = 0.9, 0.99, 0.999 on sampled states,
    requiring bounded growth along the sequence.  H2's quadratic vanishing at
    the origin is sampled by amplitude halving.
    """
    from .quadrature import SpectralField, get_basis

    checks = {}
    n = model.n_param
    checks["B0"] = {"passed": bool(n > 4.0), "value": n}

    xs = np.linspace(0.0, 1.0, n_x)
    zeros = np.zeros_like(xs)
    b2_res = np.max(np.abs(model.H1(xs, zeros, zeros, zeros) * model.J(xs, zeros, zeros) - 1.0))
    j_vals = model.J(xs, zeros, zeros)
    bounded = float(np.min(j_vals)) > 1e-8 and np.all(np.isfinite(j_vals))
    checks["B2"] = {"passed": bool(b2_res < 1e-10 and bounded),
                    "identity_residual": float(b2_res),
                    "j_min": float(np.min(j_vals)), "j_max": float(np.max(j_vals))}

    basis = basis or get_basis(n, size=32)
    rng = np.random.default_rng(seed)
    amp = 0.5 * model.u_radius
    cy = np.zeros(basis.size)
    cy[:6] = amp * rng.normal(size=6) * np.exp(-np.arange(6))
    cv = np.zeros(basis.size)
    cv[:6] = amp * rng.normal(size=6) * np.exp(-np.arange(6))
    fy = SpectralField(basis, cy)
    fv = SpectralField(basis, cv)
    x3 = np.array([0.9, 0.99, 0.999])
    tab = basis.eval_all(x3, deriv=1)
    y3 = fy.coeffs @ tab[0]
    z3 = x3 * (fy.coeffs @ tab[1])
    v3 = fv.coeffs @ tab[0]
    w3 = x3 * (fv.coeffs @ tab[1])
    ly3 = _lop_apply(model.coeffs, basis, fy, x3)

    scale = max(np.max(np.abs(y3)) + np.max(np.abs(z3)) + np.max(np.abs(v3))
                + np.max(np.abs(w3)), 1e-8)
    b3 = {}
    ok_b3 = True
    ratios = {
        "dJ_dz": np.abs(model.dJ[1](x3, y3, z3)) / (1.0 - x3),
        "dH1_dz_Ly_plus_dH2_dz": np.abs(model.dH1[1](x3, y3, z3, v3) * ly3
                                        + model.dH2[1](x3, y3, z3, v3, w3)) / (1.0 - x3),
        "dH2_dw": np.abs(model.dH2[3](x3, y3, z3, v3, w3)) / (1.0 - x3),
    }
    for key, r in ratios.items():
        base = max(float(r[0]), 1e-12 * scale)
        growth = float(r[-1]) / base
        passed = bool(growth < growth_limit and np.all(np.isfinite(r)))
        ok_b3 = ok_b3 and passed
        b3[key] = {"passed": passed, "ratios": [float(v) for v in r], "growth": growth}
    checks["B3"] = {"passed": ok_b3, "terms": b3}

    # quadratic vanishing of H2 at the origin (part of the analyticity class)
    xs5 = np.linspace(0.1, 0.9, 9)
    st = [0.8 * model.u_radius * rng.normal(size=9) for _ in range(4)]
    vals = []
    for s in (1.0, 0.5, 0.25):
        h2 = np.max(np.abs(model.H2(xs5, s * st[0], s * st[1], s * st[2], s * st[3])))
        vals.append(h2 / s ** 2)
    quad_ok = bool(max(vals) < 10.0 * max(min(vals), 1e-14) or max(vals) < 1e-14)
    checks["B1_H2_quadratic"] = {"passed": quad_ok, "scaled_values": vals}

    return AssumptionReport(checks)
