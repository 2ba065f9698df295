"""Time-dependent spectral fields on a uniform grid, and pairs of them."""

from dataclasses import dataclass, field

import numpy as np

from .quadrature import JacobiBasis


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid 0 = t_0 < ... < t_n = horizon with n_steps steps."""

    horizon: float
    n_steps: int

    def __post_init__(self):
        if self.horizon <= 0 or self.n_steps < 1:
            raise ValueError("need positive horizon and at least one step")

    @property
    def dt(self):
        return self.horizon / self.n_steps

    @property
    def times(self):
        return np.linspace(0.0, self.horizon, self.n_steps + 1)

    @property
    def midpoints(self):
        t = self.times
        return 0.5 * (t[:-1] + t[1:])


@dataclass(frozen=True)
class TimeField:
    """A function of (t, x): basis coefficients at every time node."""

    basis: JacobiBasis
    grid: TimeGrid
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (self.grid.n_steps + 1, self.basis.size):
            raise ValueError("coefficients must be (n_times, basis_size)")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_callable(cls, basis, grid, fn):
        xs = basis.rule.nodes
        rows = [basis.analyze(np.broadcast_to(np.asarray(fn(t, xs), dtype=float), xs.shape))
                for t in grid.times]
        return cls(basis, grid, np.array(rows))

    @classmethod
    def zero(cls, basis, grid):
        return cls(basis, grid, np.zeros((grid.n_steps + 1, basis.size)))

    def node_values(self):
        """(n_times, n_quad) values at the basis rule nodes."""
        return self.coeffs @ self.basis.values_table.T

    def snapshot(self, i):
        from .quadrature import SpectralField
        return SpectralField(self.basis, self.coeffs[i])

    def sup_abs(self, aux_points=100):
        """Max of |u| over rule nodes plus uniform auxiliary points, all times."""
        vals = np.abs(self.node_values()).max()
        aux = np.linspace(0.0, 1.0, aux_points)
        tab = self.basis.eval_all(aux)[0]
        return float(max(vals, np.abs(self.coeffs @ tab).max()))


@dataclass(frozen=True)
class StatePair:
    """A pair of time fields sharing one grid: (y,v), (h,k), or perturbations."""

    first: TimeField
    second: TimeField

    def __post_init__(self):
        if self.first.grid != self.second.grid:
            raise ValueError("components must share the time grid")
        if self.first.basis is not self.second.basis:
            raise ValueError("components must share the basis")

    @property
    def basis(self):
        return self.first.basis

    @property
    def grid(self):
        return self.first.grid

    @classmethod
    def zero(cls, basis, grid):
        return cls(TimeField.zero(basis, grid), TimeField.zero(basis, grid))

    def stacked(self):
        """(n_times, 2*nb) coefficient rows [first | second]."""
        return np.hstack([self.first.coeffs, self.second.coeffs])

    @classmethod
    def from_stacked(cls, basis, grid, rows):
        nb = basis.size
        return cls(TimeField(basis, grid, rows[:, :nb]),
                   TimeField(basis, grid, rows[:, nb:]))
