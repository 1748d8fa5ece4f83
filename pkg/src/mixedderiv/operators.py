"""Circulant difference/average operators, DFT symbols, and generalized inverses.

Every shift-invariant linear operator on a periodic grid is circulant and is
diagonalized by the discrete Fourier transform.  Its K complex eigenvalues

    lambda_w = sum_j c_j exp(i * w * j * dx),        w = 0, ..., K-1

(the *symbol*) determine application, composition, and the Moore-Penrose
pseudoinverse, which in symbol space is simply ``1/lambda_w`` on the support
of the symbol and zero elsewhere.

Operator *pairs* (D, M) — a difference side and an average side, as in the
forward-difference/forward-average pair or compact schemes — carry the
generalized inverse with symbol ``nu_w = symbol(M)_w / symbol(D)_w`` wherever
the D-symbol is nonzero.  Applying it approximates an antiderivative with the
constant mode removed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grid import GridFunction, PeriodicGrid, same_grid

#: Relative threshold below which a symbol entry counts as a zero mode.
SYMBOL_RTOL = 1e-12

#: Relative threshold for the zero-mean precondition of trap_antiderivative.
ZERO_MEAN_RTOL = 1e-10

STANDARD_KINDS = (
    "forward_diff",
    "backward_diff",
    "central_diff",
    "central_diff2",
    "central_diff3",
    "onesided2_diff",
    "forward_avg",
    "fourier_spectral_diff",
)

PAIR_KINDS = ("average_difference", "compact", "plain")


class NotZeroMeanError(ValueError):
    """Input to an antiderivative route has a mean above tolerance."""


class CompactMaskSingularError(ValueError):
    """A compact pair's average symbol vanishes on a mode the difference side keeps."""


def _mode_angles(size: int) -> np.ndarray:
    """Angles w*dx = 2*pi*w/K for the DFT modes w = 0..K-1."""
    return 2.0 * np.pi * np.arange(size) / size


@dataclass(frozen=True)
class CirculantOperator:
    """A circulant operator given by a stencil, a symbol, or both.

    Attributes
    ----------
    grid:
        The periodic grid the operator acts on.
    symbol:
        Complex eigenvalues on DFT modes 0..K-1.
    stencil:
        Mapping offset -> coefficient for local operators
        ((A u)_k = sum_j c_j u_{k+j}), or ``None`` for purely spectral ones.
    name:
        Informal label used in reprs and error curves.
    """

    grid: PeriodicGrid
    symbol: np.ndarray
    stencil: dict[int, float] | None = None
    name: str = ""

    @classmethod
    def from_stencil(cls, grid: PeriodicGrid, stencil: dict[int, float],
                     name: str = "") -> "CirculantOperator":
        angles = _mode_angles(grid.size)
        symbol = np.zeros(grid.size, dtype=complex)
        for offset, coeff in stencil.items():
            symbol += coeff * np.exp(1j * offset * angles)
        return cls(grid, symbol, dict(stencil), name)

    @classmethod
    def from_symbol(cls, grid: PeriodicGrid, symbol, name: str = "") -> "CirculantOperator":
        sym = np.asarray(symbol, dtype=complex)
        if sym.shape != (grid.size,):
            raise ValueError(f"symbol must have length {grid.size}")
        return cls(grid, sym, None, name)

    def symbol_at(self, omega: int) -> complex:
        """Symbol at mode ``omega``; K-periodic in the mode index."""
        return complex(self.symbol[omega % self.grid.size])

    def _apply_values(self, values: np.ndarray) -> np.ndarray:
        if self.stencil is not None:
            out = np.zeros_like(values)
            for offset, coeff in self.stencil.items():
                out += coeff * np.roll(values, -offset)
            return out
        return np.fft.ifft(self.symbol * np.fft.fft(values)).real

    def apply(self, u: GridFunction) -> GridFunction:
        if u.grid != self.grid:
            raise ValueError(
                f"operator on K={self.grid.size} applied to function on K={u.grid.size}"
            )
        return GridFunction(self.grid, self._apply_values(u.values))

    __call__ = apply

    def to_matrix(self) -> np.ndarray:
        """Dense K-by-K matrix, mostly useful as a small-scale test oracle."""
        k = self.grid.size
        cols = np.empty((k, k))
        for i in range(k):
            e = np.zeros(k)
            e[i] = 1.0
            cols[:, i] = self._apply_values(e)
        return cols


def identity_operator(grid: PeriodicGrid) -> CirculantOperator:
    return CirculantOperator.from_stencil(grid, {0: 1.0}, name="identity")


def make_standard(kind: str, grid: PeriodicGrid) -> CirculantOperator:
    """Build one of the named difference/average operators.

    Difference stencils are scaled by the appropriate power of dx.  For even K
    the Fourier-spectral derivative zeroes the Nyquist mode, which keeps the
    operator real and skew-symmetric.
    """
    dx = grid.dx
    if kind == "forward_diff":
        return CirculantOperator.from_stencil(
            grid, {0: -1.0 / dx, 1: 1.0 / dx}, name=kind)
    if kind == "backward_diff":
        return CirculantOperator.from_stencil(
            grid, {-1: -1.0 / dx, 0: 1.0 / dx}, name=kind)
    if kind == "central_diff":
        return CirculantOperator.from_stencil(
            grid, {-1: -0.5 / dx, 1: 0.5 / dx}, name=kind)
    if kind == "central_diff2":
        return CirculantOperator.from_stencil(
            grid, {-1: 1.0 / dx**2, 0: -2.0 / dx**2, 1: 1.0 / dx**2}, name=kind)
    if kind == "central_diff3":
        # central first difference composed with the central second difference
        c = 1.0 / (2.0 * dx**3)
        return CirculantOperator.from_stencil(
            grid, {2: c, 1: -2.0 * c, -1: 2.0 * c, -2: -c}, name=kind)
    if kind == "onesided2_diff":
        # second-order one-sided: (-u_{k+2} + 4 u_{k+1} - 3 u_k) / (2 dx)
        return CirculantOperator.from_stencil(
            grid, {0: -1.5 / dx, 1: 2.0 / dx, 2: -0.5 / dx}, name=kind)
    if kind == "forward_avg":
        return CirculantOperator.from_stencil(grid, {0: 0.5, 1: 0.5}, name=kind)
    if kind == "fourier_spectral_diff":
        freqs = np.fft.fftfreq(grid.size, d=1.0 / grid.size)
        symbol = 1j * freqs
        if grid.size % 2 == 0:
            symbol[grid.size // 2] = 0.0
        return CirculantOperator.from_symbol(grid, symbol, name=kind)
    raise ValueError(f"unknown operator kind {kind!r}; known: {STANDARD_KINDS}")


def _inverse_symbol(diff_symbol: np.ndarray, avg_symbol: np.ndarray) -> np.ndarray:
    nu = np.zeros_like(diff_symbol)
    scale = np.abs(diff_symbol).max()
    support = np.abs(diff_symbol) > SYMBOL_RTOL * scale
    nu[support] = avg_symbol[support] / diff_symbol[support]
    return nu


@dataclass(frozen=True)
class OperatorPair:
    """Difference/average operator pair with its generalized inverse symbol.

    ``pseudo_apply`` realizes the inverse: in symbol space it multiplies by
    ``nu_w = avg_symbol_w / diff_symbol_w`` on the support of the difference
    symbol and by zero elsewhere.  For a plain pair (average side = identity)
    this is exactly the Moore-Penrose pseudoinverse of the difference operator.
    """

    diff: CirculantOperator
    avg: CirculantOperator
    inverse_symbol: np.ndarray = field(default=None)  # type: ignore[assignment]
    name: str = ""

    def __post_init__(self):
        if self.diff.grid != self.avg.grid:
            raise ValueError("difference and average sides live on different grids")
        if self.inverse_symbol is None:
            object.__setattr__(
                self, "inverse_symbol",
                _inverse_symbol(self.diff.symbol, self.avg.symbol))

    @property
    def grid(self) -> PeriodicGrid:
        return self.diff.grid

    @classmethod
    def plain(cls, op: CirculantOperator, name: str = "") -> "OperatorPair":
        return cls(op, identity_operator(op.grid), name=name or f"plain({op.name})")

    def inverse_symbol_at(self, omega: int) -> complex:
        return complex(self.inverse_symbol[omega % self.grid.size])

    def _pseudo_apply_values(self, values: np.ndarray) -> np.ndarray:
        return np.fft.ifft(self.inverse_symbol * np.fft.fft(values)).real

    def pseudo_apply(self, v: GridFunction) -> GridFunction:
        """Apply the generalized inverse; the output has no constant mode
        whenever the difference symbol vanishes at mode zero."""
        if v.grid != self.grid:
            raise ValueError(
                f"pair on K={self.grid.size} applied to function on K={v.grid.size}"
            )
        return GridFunction(self.grid, self._pseudo_apply_values(v.values))

    def pseudoinverse_matrix(self) -> np.ndarray:
        """Dense matrix of pseudo_apply, as a small-scale oracle aid."""
        k = self.grid.size
        cols = np.empty((k, k))
        for i in range(k):
            e = np.zeros(k)
            e[i] = 1.0
            cols[:, i] = self._pseudo_apply_values(e)
        return cols


def make_pair(kind: str, grid: PeriodicGrid, *, operator: CirculantOperator | None = None,
              a: float = 1.0, b: float = 0.0, c: float = 0.0,
              alpha: float = 0.0, beta: float = 0.0) -> OperatorPair:
    """Build a named operator pair.

    Kinds
    -----
    ``average_difference``
        Forward difference with the forward two-point average
        (M u)_k = (u_k + u_{k+1})/2.  Its inverse symbol is
        ``-i*dx / (2*tan(w*dx/2))``; for even K the average symbol vanishes at
        the Nyquist mode, so the inverse zeroes that mode as well.
    ``compact``
        Six-coefficient implicit pair
        D U_k = (2c U_{k+3} + 3b U_{k+2} + 6a U_{k+1}
                 - 6a U_{k-1} - 3b U_{k-2} - 2c U_{k-3}) / (12 dx),
        M u_k = beta u_{k+2} + alpha u_{k+1} + u_k + alpha u_{k-1} + beta u_{k-2}.
        The average symbol must be nonzero wherever the difference symbol is
        (otherwise the scheme cannot be inverted there and
        CompactMaskSingularError is raised).
    ``plain``
        Wraps ``operator`` with an identity average side; the inverse is then
        the Moore-Penrose pseudoinverse of the operator.
    """
    if kind == "average_difference":
        return OperatorPair(make_standard("forward_diff", grid),
                            make_standard("forward_avg", grid),
                            name="average_difference")
    if kind == "compact":
        dx = grid.dx
        s = 1.0 / (12.0 * dx)
        diff = CirculantOperator.from_stencil(
            grid,
            {3: 2 * c * s, 2: 3 * b * s, 1: 6 * a * s,
             -1: -6 * a * s, -2: -3 * b * s, -3: -2 * c * s},
            name="compact_diff")
        avg = CirculantOperator.from_stencil(
            grid, {2: beta, 1: alpha, 0: 1.0, -1: alpha, -2: beta},
            name="compact_avg")
        d_scale = np.abs(diff.symbol).max()
        m_scale = np.abs(avg.symbol).max()
        needed = np.abs(diff.symbol) > SYMBOL_RTOL * d_scale
        singular = needed & (np.abs(avg.symbol) <= SYMBOL_RTOL * m_scale)
        if singular.any():
            modes = np.nonzero(singular)[0].tolist()
            raise CompactMaskSingularError(
                f"average symbol vanishes on modes {modes} kept by the difference side"
            )
        return OperatorPair(diff, avg, name="compact")
    if kind == "plain":
        if operator is None:
            raise ValueError("kind='plain' requires operator=...")
        return OperatorPair.plain(operator)
    raise ValueError(f"unknown pair kind {kind!r}; known: {PAIR_KINDS}")


def symbol(obj, omega: int) -> complex:
    """Symbol of an operator, or inverse symbol of a pair, at mode ``omega``."""
    if isinstance(obj, CirculantOperator):
        return obj.symbol_at(omega)
    if isinstance(obj, OperatorPair):
        return obj.inverse_symbol_at(omega)
    raise TypeError(f"expected CirculantOperator or OperatorPair, got {type(obj)!r}")


def trap_antiderivative(v: GridFunction) -> GridFunction:
    """Periodic antiderivative by cumulative trapezoidal sums, mean-corrected.

    For a zero-mean input v the result w satisfies the exact compatibility
    identity  forward_diff(w) = forward_avg(v)  and has zero mean itself.  The
    cumulative sum is anchored at node 0:

        w_k = dx * (v_0/2 + v_1 + ... + v_{k-1} + v_k/2) - (mean over k).

    Raises
    ------
    NotZeroMeanError
        If |mean(v)| exceeds ``ZERO_MEAN_RTOL * max|v| * K``.
    """
    vals = v.values
    tol = ZERO_MEAN_RTOL * np.abs(vals).max(initial=0.0) * v.grid.size
    m = vals.mean()
    if abs(m) > tol:
        raise NotZeroMeanError(
            f"input mean {m:.3e} exceeds zero-mean tolerance {tol:.3e}")
    partial = np.concatenate(([0.0], np.cumsum(0.5 * (vals[:-1] + vals[1:]))))
    w = v.grid.dx * partial
    return GridFunction(v.grid, w - w.mean())
