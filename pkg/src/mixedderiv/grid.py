"""Uniform periodic grids on [0, 2*pi) and real functions sampled on them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi


class GridMismatchError(ValueError):
    """Raised when two objects that must share a grid do not."""


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform grid with ``size`` nodes x_k = k*dx on a circle of circumference 2*pi."""

    size: int

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 2:
            raise ValueError(f"grid size must be an integer >= 2, got {self.size!r}")
        object.__setattr__(self, "size", int(self.size))

    @property
    def dx(self) -> float:
        return TWO_PI / self.size

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.size) * self.dx

    def function(self, values) -> "GridFunction":
        return GridFunction(self, values)

    def constant(self, value: float) -> "GridFunction":
        return GridFunction(self, np.full(self.size, float(value)))


def make_grid(size: int) -> PeriodicGrid:
    return PeriodicGrid(size)


class GridFunction:
    """Real nodal samples of a periodic function.

    The value array is copied on construction and marked read-only; all
    arithmetic returns new instances.  Mixing grids of different sizes, or the
    same size built from distinct ``PeriodicGrid`` objects, is allowed only
    when the grids compare equal.
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid: PeriodicGrid, values):
        arr = np.array(values, dtype=float)
        if arr.shape != (grid.size,):
            raise ValueError(
                f"values shape {arr.shape} does not match grid size {grid.size}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", arr)

    def __setattr__(self, name, value):
        raise AttributeError("GridFunction is immutable")

    def __len__(self) -> int:
        return self.grid.size

    def __repr__(self) -> str:
        return f"GridFunction(K={self.grid.size}, values={self.values!r})"

    def _coerce(self, other):
        if isinstance(other, GridFunction):
            if other.grid != self.grid:
                raise GridMismatchError(
                    f"grids differ: K={self.grid.size} vs K={other.grid.size}"
                )
            return other.values
        if np.isscalar(other):
            return other
        return NotImplemented

    def __add__(self, other):
        vals = self._coerce(other)
        if vals is NotImplemented:
            return NotImplemented
        return GridFunction(self.grid, self.values + vals)

    __radd__ = __add__

    def __sub__(self, other):
        vals = self._coerce(other)
        if vals is NotImplemented:
            return NotImplemented
        return GridFunction(self.grid, self.values - vals)

    def __rsub__(self, other):
        vals = self._coerce(other)
        if vals is NotImplemented:
            return NotImplemented
        return GridFunction(self.grid, vals - self.values)

    def __mul__(self, other):
        vals = self._coerce(other)
        if vals is NotImplemented:
            return NotImplemented
        return GridFunction(self.grid, self.values * vals)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if np.isscalar(other):
            return GridFunction(self.grid, self.values / other)
        return NotImplemented

    def __neg__(self):
        return GridFunction(self.grid, -self.values)


def same_grid(u: GridFunction, v: GridFunction) -> PeriodicGrid:
    if u.grid != v.grid:
        raise GridMismatchError(
            f"grids differ: K={u.grid.size} vs K={v.grid.size}"
        )
    return u.grid


def inner(u: GridFunction, v: GridFunction) -> float:
    """Trapezoidal (here: plain Riemann) inner product dx * sum(u_k v_k)."""
    g = same_grid(u, v)
    return g.dx * float(u.values @ v.values)


def mean(u: GridFunction) -> float:
    return float(u.values.mean())


def project_zero_mean(u: GridFunction) -> GridFunction:
    """Remove the constant mode: u - mean(u)."""
    return GridFunction(u.grid, u.values - u.values.mean())
