"""Uniform time grid underlying the discretized white-noise model.

The Hilbert space is L2([0, T]) restricted to the span of the m normalized
cell indicators e_j = 1_{[(j-1)dt, j*dt)} / sqrt(dt).  Coordinates of a
function with respect to this basis are called "coords" throughout; for a
piecewise-constant function with cell values v_j the coords are v_j*sqrt(dt).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid with ``cells`` cells on [0, horizon]; cell j covers
    [(j-1)*dt, j*dt)."""

    cells: int
    horizon: float = 1.0

    def __post_init__(self):
        if self.cells < 1:
            raise ValueError("need at least one cell")
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")

    @property
    def dt(self) -> float:
        return self.horizon / self.cells

    @property
    def times(self) -> np.ndarray:
        """Grid times t_0 = 0, ..., t_m = horizon."""
        return np.linspace(0.0, self.horizon, self.cells + 1)

    def index_of(self, t: float) -> int:
        """Index j such that t_j == t; ``t`` must sit on the grid."""
        j = round(t / self.dt)
        if not (0 <= j <= self.cells) or abs(j * self.dt - t) > 1e-9 * max(1.0, self.horizon):
            raise ValueError(f"t={t} is not a grid time of {self}")
        return j

    def indicator_coords(self, t: float) -> np.ndarray:
        """Basis coordinates of 1_{[0, t]} (t on the grid)."""
        j = self.index_of(t)
        u = np.zeros(self.cells)
        u[:j] = np.sqrt(self.dt)
        return u

    def path_from_noise(self, xi: np.ndarray) -> np.ndarray:
        """w(t_0), ..., w(t_m) from standardized increments xi (last axis)."""
        xi = np.asarray(xi, dtype=float)
        w = np.zeros(xi.shape[:-1] + (self.cells + 1,))
        np.cumsum(xi, axis=-1, out=w[..., 1:])
        w[..., 1:] *= np.sqrt(self.dt)
        return w

    def refine(self, factor: int) -> "TimeGrid":
        return TimeGrid(cells=self.cells * factor, horizon=self.horizon)
