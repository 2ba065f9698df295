"""Cutoff decomposition and the graded norm families.

Powers of the endpoint model Laplacians are applied spectrally (they preserve
the polynomial space); time derivatives use centered finite differences of
accuracy order >= 2n+2 on the uniform grid, evaluated at interior nodes only.
Sup norms are taken over the quadrature nodes plus 100 uniform auxiliary
points, since the Gauss nodes of the degenerate weight avoid the endpoints.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ResolutionError
from .quadrature import SpectralField, gauss_jacobi_rule
from .timefields import StatePair, TimeField

_EXP_CLIP = 700.0


class CutoffOmega:
    """Smooth step: 1 on [0,1/3], 0 on [2/3,1], exp(-1/s) blend between.

    The plateaus are exact (branch, not evaluation), so derivative fields
    vanish identically outside (1/3, 2/3).
    """

    lower = 1.0 / 3.0
    upper = 2.0 / 3.0

    def _split(self, x):
        x = np.asarray(x, dtype=float)
        s = 3.0 * x - 1.0
        mid = (x > self.lower) & (x < self.upper)
        return x, s, mid

    @staticmethod
    def _fg(s):
        # f(s) = exp(-1/s); A = f(1-s), B = f(s)
        a = np.exp(-np.minimum(1.0 / (1.0 - s), _EXP_CLIP))
        b = np.exp(-np.minimum(1.0 / s, _EXP_CLIP))
        return a, b

    def __call__(self, x):
        x, s, mid = self._split(x)
        out = np.where(x <= self.lower, 1.0, 0.0)
        if np.any(mid):
            sm = s[mid]
            a, b = self._fg(sm)
            out[mid] = a / (a + b)
        return out if out.ndim else float(out)

    def deriv(self, x, order=1):
        x, s, mid = self._split(x)
        out = np.zeros_like(np.asarray(x, dtype=float))
        if np.any(mid):
            sm = s[mid]
            a, b = self._fg(sm)
            da = -a / (1.0 - sm) ** 2
            db = b / sm ** 2
            h = a + b
            g = da * b - a * db
            if order == 1:
                out[mid] = 3.0 * g / h ** 2
            elif order == 2:
                d2a = a / (1.0 - sm) ** 4 - 2.0 * a / (1.0 - sm) ** 3
                d2b = b / sm ** 4 - 2.0 * b / sm ** 3
                gp = d2a * b - a * d2b
                hp = da + db
                out[mid] = 9.0 * (gp * h - 2.0 * g * hp) / h ** 3
            else:
                raise ValueError("only first and second derivatives available")
        return out if out.ndim else float(out)


OMEGA = CutoffOmega()


def cutoff_split(u):
    """(u0, u1) with u0 = omega*u and u1 = u - u0, exactly partitioned at nodes."""
    if isinstance(u, SpectralField):
        w = OMEGA(u.basis.rule.nodes)
        v0 = w * u.values
        return (SpectralField.from_values(u.basis, v0),
                SpectralField.from_values(u.basis, u.values - v0))
    if isinstance(u, TimeField):
        w = OMEGA(u.basis.rule.nodes)
        vals = u.node_values()
        v0 = vals * w
        c0 = u.basis.analyze(v0)
        c1 = u.basis.analyze(vals - v0)
        return (TimeField(u.basis, u.grid, c0), TimeField(u.basis, u.grid, c1))
    if isinstance(u, StatePair):
        f0, f1 = cutoff_split(u.first)
        s0, s1 = cutoff_split(u.second)
        return StatePair(f0, s0), StatePair(f1, s1)
    raise TypeError("cutoff_split expects a SpectralField, TimeField or StatePair")


# ---------------------------------------------------------------------------
# per-basis machinery (mu-weighted rules, operator matrices, eval tables)

def _cache(basis):
    if not hasattr(basis, "_norms_cache"):
        basis._norms_cache = {}
    return basis._norms_cache


def _mu_rule(basis, mu):
    c = _cache(basis)
    key = ("rule", mu)
    if key not in c:
        if mu == 0:
            rule = gauss_jacobi_rule(basis.size + 2, 0.0, 1.5)
        else:
            rule = gauss_jacobi_rule(basis.size + 2, basis.n_param / 2.0 - 1.0, 0.0)
        tab = basis.eval_all(rule.nodes, deriv=1)
        c[key] = (rule, tab[0].T.copy(), tab[1].T.copy())  # (nq, nb) value/deriv
    return c[key]


def _delta_matrix(basis, mu):
    """Coefficient-action matrix of the endpoint model Laplacian (degree-preserving)."""
    c = _cache(basis)
    key = ("delta", mu)
    if key not in c:
        from .operators import assemble_first_order
        kind = "delta0" if mu == 0 else "delta1"
        c[key] = assemble_first_order(basis, kind).entries
    return c[key]


def _dot_square_matrix(basis, mu):
    """Matrix of the square of the half-weight derivative: xD^2 + D/2 or (1-x)D^2 - D/2."""
    c = _cache(basis)
    key = ("dotsq", mu)
    if key not in c:
        x = basis.rule.nodes
        v1, v2 = basis.deriv_table, basis.deriv2_table
        if mu == 0:
            vals = x[:, None] * v2 + 0.5 * v1
        else:
            vals = (1.0 - x)[:, None] * v2 - 0.5 * v1
        w = basis.rule.weights
        c[key] = basis.values_table.T @ (w[:, None] * vals)
    return c[key]


def _sup_tables(basis, aux_points=100):
    c = _cache(basis)
    key = ("sup", aux_points)
    if key not in c:
        aux = np.linspace(0.0, 1.0, aux_points)
        tab = basis.eval_all(aux, deriv=1)
        pts = np.concatenate([basis.rule.nodes, aux])
        val = np.vstack([basis.values_table, tab[0].T])
        der = np.vstack([basis.deriv_table, tab[1].T])
        c[key] = (pts, val, der)
    return c[key]


def norm_mu(field, mu):
    """Spatial norm with weight x^{3/2} (mu=0) or (1-x)^{N/2-1} (mu=1).

    Accepts a SpectralField (returns a float) or a TimeField (per-time array).
    """
    rule, val, _ = _mu_rule(field.basis, mu)
    coeffs = field.coeffs
    if coeffs.ndim == 1:
        u = val @ coeffs
        return float(np.sqrt(np.dot(rule.weights, u * u)))
    u = coeffs @ val.T
    return np.sqrt((u * u) @ rule.weights)


def _dot_norm_mu(basis, coeffs, mu):
    """Norm of the half-weight derivative of a coefficient vector."""
    rule, _, der = _mu_rule(basis, mu)
    du = der @ coeffs
    x = rule.nodes
    fac = x if mu == 0 else (1.0 - x)
    return float(np.sqrt(np.dot(rule.weights * fac, du * du)))


def bracket_seminorm(field, mu, ell):
    """<u>_[mu]ell: Delta^m in the mu norm (even ell=2m) or with one extra
    half-weight derivative (odd ell=2m+1)."""
    if ell < 0:
        raise ValueError("seminorm index must be nonnegative")
    basis = field.basis
    m, odd = divmod(ell, 2)
    c = field.coeffs.copy()
    dmat = _delta_matrix(basis, mu)
    for _ in range(m):
        c = dmat @ c
    if odd:
        return _dot_norm_mu(basis, c, mu)
    rule, val, _ = _mu_rule(basis, mu)
    u = val @ c
    return float(np.sqrt(np.dot(rule.weights, u * u)))


def pair_bracket_norm(pair_fields, mu, k):
    """||(h,k)||_[mu]k built from the bracket seminorms."""
    h, kk = pair_fields
    total = 0.0
    for ell in range(k + 1):
        total += bracket_seminorm(h, mu, ell + 1) ** 2
        total += bracket_seminorm(kk, mu, ell) ** 2
    return float(np.sqrt(total))


def pair_grade(pair, k):
    """||h||_k: cutoff pieces measured in their own endpoint norms.

    Spatial pairs (tuple of SpectralField) give the grade at that instant;
    a StatePair gives the sup over its time nodes.
    """
    if isinstance(pair, StatePair):
        p0, p1 = cutoff_split(pair)
        a = _pair_rows_norm(pair.basis, p0.first.coeffs, p0.second.coeffs, 0, k)
        b = _pair_rows_norm(pair.basis, p1.first.coeffs, p1.second.coeffs, 1, k)
        return float(np.max(np.hypot(a, b)))
    h, kk = pair
    h0, h1 = cutoff_split(h)
    k0, k1 = cutoff_split(kk)
    a = pair_bracket_norm((h0, k0), 0, k)
    b = pair_bracket_norm((h1, k1), 1, k)
    return float(np.hypot(a, b))


def sup_norm(field):
    """L-infinity over nodes plus auxiliary uniform points (spatial field)."""
    _, val, _ = _sup_tables(field.basis)
    return float(np.max(np.abs(val @ field.coeffs)))


# ---------------------------------------------------------------------------
# time differentiation (Fornberg weights on the uniform grid)

def fornberg_weights(z, x, m):
    """Weights for derivatives 0..m at z from nodes x (Fornberg's algorithm)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    c = np.zeros((n, m + 1))
    c1 = 1.0
    c4 = x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c


def _stencil_half(order, accuracy):
    if order == 0:
        return 0
    length = order + accuracy - 1
    if length % 2 == 0:
        length += 1
    return length // 2


def time_derivative(coeffs, dt, order, accuracy, half=None):
    """d^order/dt^order of (n_times, ...) rows by centered differences.

    Returns (interior_slice, derived_rows); interior-only evaluation.  A
    larger half-width may be imposed so several orders share one window.
    """
    own = _stencil_half(order, accuracy)
    half = own if half is None else max(half, own)
    if 2 * half + 1 > coeffs.shape[0]:
        raise ResolutionError(
            f"time stencil of {2 * half + 1} nodes exceeds the grid "
            f"({coeffs.shape[0]} nodes)")
    if order == 0:
        n_out = coeffs.shape[0] - 2 * half
        return slice(half, coeffs.shape[0] - half), coeffs[half:coeffs.shape[0] - half]
    offsets = np.arange(-own, own + 1) * dt
    w = fornberg_weights(0.0, offsets, order)[:, order]
    lead = half - own
    n_out = coeffs.shape[0] - 2 * half
    out = np.zeros((n_out,) + coeffs.shape[1:])
    for s, ws in enumerate(w):
        out += ws * coeffs[lead + s:lead + s + n_out]
    return slice(half, coeffs.shape[0] - half), out


# ---------------------------------------------------------------------------
# graded families

def _sup_over_rows(basis, rows):
    _, val, _ = _sup_tables(basis)
    return float(np.max(np.abs(rows @ val.T)))


def _mu_norms_of_rows(basis, rows, mu):
    rule, val, _ = _mu_rule(basis, mu)
    u = rows @ val.T
    return np.sqrt((u * u) @ rule.weights)


def grade_inf(u, n, mu=None, accuracy=None):
    """sup_{j+k<=n} ||(-d_t^2)^j (-Delta_mu)^k u||_inf; sup over mu if mu is None."""
    mus = (0, 1) if mu is None else (mu,)
    acc = accuracy or (2 * n + 2)
    H = _stencil_half(2 * n, acc)
    best = 0.0
    for m in mus:
        dmat = _delta_matrix(u.basis, m)
        for j in range(n + 1):
            _, rows = time_derivative(u.coeffs, u.grid.dt, 2 * j, acc, half=H)
            for k in range(n + 1 - j):
                best = max(best, _sup_over_rows(u.basis, rows))
                rows = rows @ dmat.T
    return best


def grade_two(u, n, mu=None, accuracy=None):
    """(sum_{j+k<=n} int_0^T ||.||_mu^2 dt)^{1/2}; combined over mu in quadrature.

    The time integral is a trapezoid rule over the interior window where the
    stencils exist.
    """
    mus = (0, 1) if mu is None else (mu,)
    acc = accuracy or (2 * n + 2)
    H = _stencil_half(2 * n, acc)
    total = 0.0
    for m in mus:
        dmat = _delta_matrix(u.basis, m)
        for j in range(n + 1):
            sl, rows = time_derivative(u.coeffs, u.grid.dt, 2 * j, acc, half=H)
            t_int = u.grid.times[sl]
            for k in range(n + 1 - j):
                norms = _mu_norms_of_rows(u.basis, rows, m)
                total += float(np.trapezoid(norms ** 2, t_int))
                rows = rows @ dmat.T
    return float(np.sqrt(total))


def _pair_rows_norm(basis, rows_h, rows_k, mu, k):
    out = np.zeros(rows_h.shape[0])
    dmat = _delta_matrix(basis, mu)
    dsq = _dot_square_matrix(basis, mu)
    rule, val, der = _mu_rule(basis, mu)
    x = rule.nodes
    fac = x if mu == 0 else (1.0 - x)

    def seminorms(rows, ell):
        m, odd = divmod(ell, 2)
        r = rows
        for _ in range(m):
            r = r @ dmat.T
        if odd:
            du = r @ der.T
            return np.sqrt((du * du * fac) @ rule.weights)
        u = r @ val.T
        return np.sqrt((u * u) @ rule.weights)

    for ell in range(k + 1):
        out += seminorms(rows_h, ell + 1) ** 2
        out += seminorms(rows_k, ell) ** 2
    return np.sqrt(out)


def pair_grade_sup(pair, n, tau=None, accuracy=None):
    """sup_{t<=tau} sum_{j+k<=n} ||d_t^j h(t)||_k with cutoff-piece composition."""
    acc = accuracy or (2 * n + 2)
    H = _stencil_half(n, acc)
    basis, grid = pair.basis, pair.grid
    p0, p1 = cutoff_split(pair)
    tau = grid.horizon if tau is None else tau
    totals = None
    t_int = None
    for j in range(n + 1):
        sl, rh0 = time_derivative(p0.first.coeffs, grid.dt, j, acc, half=H)
        _, rk0 = time_derivative(p0.second.coeffs, grid.dt, j, acc, half=H)
        _, rh1 = time_derivative(p1.first.coeffs, grid.dt, j, acc, half=H)
        _, rk1 = time_derivative(p1.second.coeffs, grid.dt, j, acc, half=H)
        t_int = grid.times[sl]
        if totals is None:
            totals = np.zeros(t_int.size)
        for k in range(n + 1 - j):
            a = _pair_rows_norm(basis, rh0, rk0, 0, k)
            b = _pair_rows_norm(basis, rh1, rk1, 1, k)
            totals += np.hypot(a, b)
    inside = t_int <= tau + 1e-12 * grid.horizon
    if not np.any(inside):
        raise ResolutionError("no interior time nodes below tau")
    return float(np.max(totals[inside]))


def pair_grade_int(pair, n, accuracy=None):
    """(sum_{j+k<=n} int_0^T ||d_t^j h||_k^2 dt)^{1/2} with cutoff composition."""
    acc = accuracy or (2 * n + 2)
    H = _stencil_half(n, acc)
    basis, grid = pair.basis, pair.grid
    p0, p1 = cutoff_split(pair)
    total = 0.0
    for j in range(n + 1):
        sl, rh0 = time_derivative(p0.first.coeffs, grid.dt, j, acc, half=H)
        _, rk0 = time_derivative(p0.second.coeffs, grid.dt, j, acc, half=H)
        _, rh1 = time_derivative(p1.first.coeffs, grid.dt, j, acc, half=H)
        _, rk1 = time_derivative(p1.second.coeffs, grid.dt, j, acc, half=H)
        t_int = grid.times[sl]
        for k in range(n + 1 - j):
            a = _pair_rows_norm(basis, rh0, rk0, 0, k)
            b = _pair_rows_norm(basis, rh1, rk1, 1, k)
            total += float(np.trapezoid(a * a + b * b, t_int))
    return float(np.sqrt(total))


def pair_grade_pointwise(pair, n, accuracy=None):
    """max_{j+k<=n, mu} ||d_t^j dotD_mu^k h^[mu]||_inf."""
    acc = accuracy or (2 * n + 2)
    basis, grid = pair.basis, pair.grid
    p0, p1 = cutoff_split(pair)
    pts, val, der = _sup_tables(basis)
    best = 0.0
    for mu, piece in ((0, p0), (1, p1)):
        esq = _dot_square_matrix(basis, mu)
        fac = np.sqrt(pts if mu == 0 else np.maximum(1.0 - pts, 0.0))
        for comp in (piece.first, piece.second):
            for j in range(n + 1):
                _, rows = time_derivative(comp.coeffs, grid.dt, j, acc)
                for k in range(n + 1 - j):
                    m, odd = divmod(k, 2)
                    r = rows
                    for _ in range(m):
                        r = r @ esq.T
                    if odd:
                        best = max(best, float(np.max(np.abs((r @ der.T) * fac))))
                    else:
                        best = max(best, float(np.max(np.abs(r @ val.T))))
    return best


def graded_norm(u, grading, n=0, mu=None, ell=0, tau=None):
    """Dispatch for the grade families.

    grading: 'inf_n', 'two_n' (TimeField); 'bracket' (SpectralField, needs mu
    and ell); 'pair_k' (spatial pair tuple or StatePair snapshot index 0);
    'pair_sup_n', 'pair_int_n', 'pointwise_n' (StatePair).
    """
    if grading == "inf_n":
        return grade_inf(u, n, mu)
    if grading == "two_n":
        return grade_two(u, n, mu)
    if grading == "bracket":
        if mu is None:
            raise ValueError("bracket seminorm needs mu")
        return bracket_seminorm(u, mu, ell)
    if grading == "pair_k":
        return pair_grade(u, n)
    if grading == "pair_sup_n":
        return pair_grade_sup(u, n, tau)
    if grading == "pair_int_n":
        return pair_grade_int(u, n)
    if grading == "pointwise_n":
        return pair_grade_pointwise(u, n)
    raise ValueError(f"unknown grading: {grading!r}")


@dataclass(frozen=True)
class GradedNormReport:
    """Per-(j,k) seminorm tables and composite grades for one time field."""

    n: int
    table_inf: dict
    table_two: dict
    composites: dict
    grid_meta: dict

    def to_dict(self):
        return {
            "n": self.n,
            "sup_table": {f"{j},{k},{mu}": v for (j, k, mu), v in self.table_inf.items()},
            "l2_table": {f"{j},{k},{mu}": v for (j, k, mu), v in self.table_two.items()},
            "composites": self.composites,
            "time_grid": self.grid_meta,
        }


def build_graded_report(u, n):
    """Full (j,k) tables for a TimeField, plus the composite grades."""
    acc = 2 * n + 2
    table_inf = {}
    table_two = {}
    for mu in (0, 1):
        dmat = _delta_matrix(u.basis, mu)
        for j in range(n + 1):
            sl, rows = time_derivative(u.coeffs, u.grid.dt, 2 * j, acc)
            t_int = u.grid.times[sl]
            for k in range(n + 1 - j):
                table_inf[(j, k, mu)] = _sup_over_rows(u.basis, rows)
                norms = _mu_norms_of_rows(u.basis, rows, mu)
                table_two[(j, k, mu)] = float(np.trapezoid(norms ** 2, t_int))
                rows = rows @ dmat.T
    composites = {}
    for m in range(n + 1):
        composites[f"inf_{m}"] = grade_inf(u, m, accuracy=acc)
        composites[f"two_{m}"] = grade_two(u, m, accuracy=acc)
    meta = {"horizon": u.grid.horizon, "n_steps": u.grid.n_steps, "dt": u.grid.dt,
            "fd_accuracy": acc}
    return GradedNormReport(n, table_inf, table_two, composites, meta)
