"""Sampled density curves shared by the semiclassical and quantum pipelines."""
from dataclasses import dataclass, field

import numpy as np

__all__ = ["DensityGrid", "energy_grid"]


@dataclass(frozen=True)
class DensityGrid:
    """Values of a density on an ascending grid plus provenance metadata.

    ``variable`` is ``"E"`` or ``"scaledE"``.
    """

    variable: str
    grid: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if self.variable not in ("E", "scaledE"):
            raise ValueError("variable must be 'E' or 'scaledE'")
        if g.ndim != 1 or g.shape != v.shape:
            raise ValueError("grid and values must be 1-d arrays of equal length")
        if g.size > 1 and not np.all(np.diff(g) > 0):
            raise ValueError("grid must be strictly ascending")
        if not np.all(np.isfinite(v)):
            raise ValueError("density values must be finite")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "meta", dict(self.meta))

    def __sub__(self, other):
        if self.variable != other.variable or not np.array_equal(self.grid, other.grid):
            raise ValueError("densities live on different grids")
        return DensityGrid(self.variable, self.grid, self.values - other.values,
                           {"minuend": self.meta, "subtrahend": other.meta})

    def rms(self, lo=None, hi=None):
        m = np.ones(self.grid.size, bool)
        if lo is not None:
            m &= self.grid >= lo
        if hi is not None:
            m &= self.grid <= hi
        return float(np.sqrt(np.mean(self.values[m] ** 2)))


def energy_grid(lo, hi, step):
    """Inclusive uniform grid from lo to hi."""
    if not (hi > lo and step > 0):
        raise ValueError("need hi > lo and step > 0")
    n = int(round((hi - lo) / step))
    return np.linspace(lo, lo + n * step, n + 1)
