"""Modified-wavenumber analysis of inverse difference operators.

The quality of a generalized inverse as an approximate antiderivative is
measured per Fourier mode.  The exact integral of the complex exponential
``exp(i*w*x)`` over one grid cell ((k-1)*dx, k*dx) is

    I_k(w) = (2/w) * exp(i*w*(k - 1/2)*dx) * sin(w*dx/2),

while the inverse of an operator pair applied to the sampled exponential gives
the cell differences

    Ibar_k(w) = 2i * nu_w * exp(i*w*(k - 1/2)*dx) * sin(w*dx/2).

Their ratio is independent of the cell index, so the scalar

    e(w*dx) = | i * nu_w * w  -  1 |

is the relative error of the pair at scaled wavenumber w*dx.  Closed forms for
the classical choices (2nd-order central, 2nd-order one-sided,
average-difference, Fourier-spectral) are provided for cross-checking the
symbol route.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .grid import PeriodicGrid
from .operators import (
    SYMBOL_RTOL,
    OperatorPair,
    make_pair,
    make_standard,
)

#: Closed-form error kinds and the operator labels they validate.
CLOSED_FORM_KINDS = ("cd2", "od2", "ad", "ps")
LABEL_TO_KIND = {
    "central": "cd2",
    "one_sided": "od2",
    "average_difference": "ad",
    "fourier_spectral": "ps",
}

#: Half-width of the interval around multiples of pi excluded from curves.
DEFAULT_EXCLUSION_RADIUS = 0.05


class ModeOutOfRangeError(ValueError):
    """The difference symbol vanishes at the requested mode."""


class PoleAtMultipleOfPiError(ValueError):
    """Closed-form error evaluated at a scaled wavenumber n*pi."""


def exact_band_integral(omega: int, k: int, dx: float) -> complex:
    """Integral of exp(i*omega*x) over the cell ((k-1)*dx, k*dx).

    The formula is singular at omega = 0, where the band integral of the
    constant mode is simply dx.
    """
    if omega == 0:
        return complex(dx)
    return (2.0 / omega) * np.exp(1j * omega * (k - 0.5) * dx) * np.sin(omega * dx / 2.0)


def _checked_inverse_symbol(pair: OperatorPair, omega: int) -> complex:
    lam = pair.diff.symbol
    if abs(lam[omega % pair.grid.size]) <= SYMBOL_RTOL * np.abs(lam).max():
        raise ModeOutOfRangeError(
            f"difference symbol vanishes at mode {omega} (K={pair.grid.size})")
    return pair.inverse_symbol_at(omega)


def approx_band_integral(pair: OperatorPair, omega: int, k: int) -> complex:
    """Cell difference of the pair inverse applied to the sampled exponential."""
    dx = pair.grid.dx
    nu = _checked_inverse_symbol(pair, omega)
    return 2j * nu * np.exp(1j * omega * (k - 0.5) * dx) * np.sin(omega * dx / 2.0)


def relative_error(pair: OperatorPair, omega: int) -> float:
    """Relative band-integral error |i*nu_omega*omega - 1| at integer mode omega.

    The inverse symbol is K-periodic in the mode index while the factor omega
    is not, so modes above the Nyquist frequency probe the aliasing error.
    """
    nu = _checked_inverse_symbol(pair, omega)
    return abs(1j * nu * omega - 1.0)


def closed_form_error(kind: str, omega_tilde: float) -> float:
    """Closed-form relative error at scaled wavenumber ``omega_tilde`` > 0.

    Kinds: ``cd2`` (2nd-order central), ``od2`` (2nd-order one-sided), ``ad``
    (average-difference), ``ps`` (Fourier-spectral).  The ``ps`` curve vanishes
    below the Nyquist wavenumber pi and on each higher band equals
    ``|2*pi*m / (omega_tilde - 2*pi*m)|`` with m the nearest integer to
    omega_tilde/(2*pi), i.e. the aliasing error of the folded mode.
    """
    wt = float(omega_tilde)
    if wt <= 0.0:
        raise ValueError(f"omega_tilde must be positive, got {wt}")
    ratio = wt / np.pi
    if abs(ratio - round(ratio)) < 1e-12:
        raise PoleAtMultipleOfPiError(
            f"closed forms have poles/breakpoints at multiples of pi (got {wt})")
    if kind == "cd2":
        return abs(wt / np.sin(wt) - 1.0)
    if kind == "od2":
        z = np.exp(1j * wt)
        return abs(2j * wt / (-3.0 + 4.0 * z - z * z) - 1.0)
    if kind == "ad":
        return abs(wt / (2.0 * np.tan(wt / 2.0)) - 1.0)
    if kind == "ps":
        m = round(wt / (2.0 * np.pi))
        if m == 0:
            return 0.0
        return abs(2.0 * np.pi * m / (wt - 2.0 * np.pi * m))
    raise ValueError(f"unknown closed-form kind {kind!r}; known: {CLOSED_FORM_KINDS}")


def standard_error_pairs(grid: PeriodicGrid) -> dict[str, OperatorPair]:
    """The four canonical pairs benchmarked by the error curves."""
    return {
        "central": OperatorPair.plain(make_standard("central_diff", grid)),
        "one_sided": OperatorPair.plain(make_standard("onesided2_diff", grid)),
        "average_difference": make_pair("average_difference", grid),
        "fourier_spectral": OperatorPair.plain(make_standard("fourier_spectral_diff", grid)),
    }


@dataclass
class ErrorCurve:
    """Tabulated relative-error curves over one aliasing period (0, 2*pi).

    ``errors`` holds the symbol-route samples per operator label;
    ``closed_form`` and ``max_mismatch`` are filled for labels with a known
    closed form and record the cross-check against it.
    """

    grid_size: int
    modes: np.ndarray
    omega_tilde: np.ndarray
    errors: dict[str, np.ndarray]
    closed_form: dict[str, np.ndarray] = field(default_factory=dict)
    max_mismatch: dict[str, float] = field(default_factory=dict)
    build_seconds: float = 0.0


def build_error_curve(pairs: dict[str, OperatorPair] | None = None,
                      grid_size: int = 512,
                      samples: int = 200,
                      exclusion_radius: float = DEFAULT_EXCLUSION_RADIUS) -> ErrorCurve:
    """Sample relative errors on integer modes of a K-point grid.

    Modes are taken so that omega_tilde = omega*dx covers (0, 2*pi), skipping
    a band of half-width ``exclusion_radius`` around every multiple of pi
    (symbol zeros and closed-form poles live there).  For labels with a known
    closed form the samples are cross-checked and the maximum absolute
    mismatch recorded.
    """
    t0 = time.perf_counter()
    if samples < 16:
        raise ValueError(f"at least 16 samples are required, got {samples}")
    grid = PeriodicGrid(grid_size)
    if pairs is None:
        pairs = standard_error_pairs(grid)
    if not pairs:
        raise ValueError("at least one operator pair is required")
    for label, pair in pairs.items():
        if pair.grid.size != grid_size:
            raise ValueError(f"pair {label!r} built on K={pair.grid.size}, "
                             f"curve requested on K={grid_size}")

    all_modes = np.arange(1, grid_size)
    omega_tilde = 2.0 * np.pi * all_modes / grid_size
    dist_to_pole = np.abs(omega_tilde - np.pi * np.round(omega_tilde / np.pi))
    keep = dist_to_pole >= exclusion_radius
    kept_modes = all_modes[keep]
    if samples < len(kept_modes):
        idx = np.unique(np.round(np.linspace(0, len(kept_modes) - 1, samples)).astype(int))
        kept_modes = kept_modes[idx]
    omega_tilde = 2.0 * np.pi * kept_modes / grid_size

    errors = {}
    closed = {}
    mismatch = {}
    for label, pair in pairs.items():
        errors[label] = np.array([relative_error(pair, int(w)) for w in kept_modes])
        kind = LABEL_TO_KIND.get(label)
        if kind is not None:
            closed[label] = np.array([closed_form_error(kind, wt) for wt in omega_tilde])
            mismatch[label] = float(np.abs(errors[label] - closed[label]).max())

    return ErrorCurve(
        grid_size=grid_size,
        modes=kept_modes,
        omega_tilde=omega_tilde,
        errors=errors,
        closed_form=closed,
        max_mismatch=mismatch,
        build_seconds=time.perf_counter() - t0,
    )
