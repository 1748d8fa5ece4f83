"""Catalog of discretized mixed-derivative wave equations.

Each builder fixes a spatial discretization (difference operators, flux
forms, inverse pair) and returns an :class:`~mixedderiv.reduction.EquationDef`
ready for reduction.  Nonlinear terms use 2nd-order central differences and
pointwise products; every u*u_x-type flux is discretized in the
energy-consistent three-point skew form (d(u^2) + u du)/3.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from .grid import GridFunction, PeriodicGrid, inner
from .operators import CirculantOperator, OperatorPair, make_pair, make_standard
from .reduction import EquationDef

TWO_PI = 2.0 * np.pi


# ---------------------------------------------------------------------------
# generic initial data


def zero_data(grid: PeriodicGrid) -> GridFunction:
    return grid.constant(0.0)


def cosine_mode(grid: PeriodicGrid, mode: int = 1, amplitude: float = 1.0,
                phase: float = 0.0) -> GridFunction:
    return GridFunction(grid, amplitude * np.cos(mode * grid.nodes + phase))


def sine_mode(grid: PeriodicGrid, mode: int = 1, amplitude: float = 1.0) -> GridFunction:
    return GridFunction(grid, amplitude * np.sin(mode * grid.nodes))


GENERIC_INITIAL_DATA: dict[str, Callable] = {
    "zero": zero_data,
    "cosine": cosine_mode,
    "sine": sine_mode,
}


def projected_kink(grid: PeriodicGrid) -> GridFunction:
    """Kink-shaped periodic profile shifted so that sum_k sin(u_k) = 0.

    Starts from u_k = 4*atan(exp(sin x_k)) and adds the constant s solving
    sum sin(u_k + s) = 0 by scalar root finding (the sum is A cos s + B sin s,
    so a closed-form estimate brackets the root).  The roots repeat every pi;
    the one nearest zero is chosen so that refining the grid never hops to a
    branch a multiple of pi away.
    """
    base = 4.0 * np.arctan(np.exp(np.sin(grid.nodes)))
    a = float(np.sin(base).sum())
    b = float(np.cos(base).sum())
    if np.hypot(a, b) < 1e-300:
        return GridFunction(grid, base)
    s0 = -np.arctan2(a, b)
    s0 -= np.pi * np.round(s0 / np.pi)

    def total(s: float) -> float:
        return float(np.sin(base + s).sum())

    lo, hi = s0 - 0.5, s0 + 0.5
    if total(lo) * total(hi) > 0:  # pragma: no cover - estimate is already a root
        lo, hi = s0 - np.pi / 2, s0 + np.pi / 2
    shift = brentq(total, lo, hi, xtol=1e-15)
    return GridFunction(grid, base + shift)


# ---------------------------------------------------------------------------
# shared pieces


def _skew_product_flux(cen: CirculantOperator):
    """u*u_x in the three-point skew form (cen(u^2) + u*cen(u)) / 3."""

    def flux(u: GridFunction) -> np.ndarray:
        v = u.values
        return (cen._apply_values(v * v) + v * cen._apply_values(v)) / 3.0

    return flux


def _l2_norm(u: GridFunction) -> float:
    return float(np.sqrt(inner(u, u)))


def _cell_sum(values_fn):
    def functional(u: GridFunction) -> float:
        return u.grid.dx * float(values_fn(u.values).sum())
    return functional


# ---------------------------------------------------------------------------
# builders


def build_sine_gordon(grid: PeriodicGrid) -> EquationDef:
    """u_tx = sin(u), average-difference scheme.

    The reduction reproduces the trapezoidal integral form: du/dt equals the
    trapezoidal antiderivative of sin(u) minus the correction
    sum(cos u * antiderivative) / sum(cos u).  The cell sum of cos(u) is a
    conserved energy; validity requires it to stay away from zero, which it
    does along exact solutions.
    """
    return EquationDef(
        name="sine_gordon",
        grid=grid,
        inverse_pair=make_pair("average_difference", grid),
        f_bar=lambda u: GridFunction(grid, np.sin(u.values)),
        f_bar_grad=lambda u: GridFunction(grid, np.cos(u.values)),
        expected_behavior="regular",
        conserved=(("cos_sum", _cell_sum(np.cos)),),
        initial_data={"projected_kink": projected_kink},
        summary="u_tx = sin(u)  [average-difference]",
    )


def build_linear_kg(grid: PeriodicGrid, pair_kind: str = "average_difference") -> EquationDef:
    """u_tx = u (linear Klein-Gordon in light-cone coordinates).

    The constraint is linear, so the correction constant vanishes identically
    and du/dt is just the pair inverse applied to u.  ``pair_kind`` selects
    'average_difference' or 'fourier_spectral'.
    """
    if pair_kind == "average_difference":
        pair = make_pair("average_difference", grid)
    elif pair_kind == "fourier_spectral":
        pair = OperatorPair.plain(make_standard("fourier_spectral_diff", grid))
    else:
        raise ValueError(f"unknown pair_kind {pair_kind!r}")
    return EquationDef(
        name="linear_kg",
        grid=grid,
        inverse_pair=pair,
        f_bar=lambda u: u,
        f_bar_grad=lambda u: grid.constant(1.0),
        params={"pair_kind": pair_kind},
        expected_behavior="regular",
        conserved=(("l2_norm", _l2_norm),),
        summary="u_tx = u  [pair selectable]",
    )


def build_reduced_ostrovsky(grid: PeriodicGrid, gamma: float = 1.0) -> EquationDef:
    """(u_t + u u_x)_x = gamma*u, central skew flux + average-difference inverse.

    The quadratic flux is discretized in the differentiated skew form
    (cen(u^2) + u cen(u))/3, which has exactly zero mean and makes
    sum(u * du/dt) vanish; the L2 norm is conserved.  gamma = 0 would leave no
    constraint at all and is rejected.
    """
    if gamma == 0.0:
        raise ValueError("gamma must be nonzero (gamma = 0 removes the constraint)")
    cen = make_standard("central_diff", grid)
    skew = _skew_product_flux(cen)
    return EquationDef(
        name="reduced_ostrovsky",
        grid=grid,
        inverse_pair=make_pair("average_difference", grid),
        f_bar=lambda u: gamma * u,
        f_bar_grad=lambda u: grid.constant(gamma),
        g_bar=lambda u: GridFunction(grid, -skew(u)),
        params={"gamma": gamma},
        expected_behavior="regular",
        conserved=(("l2_norm", _l2_norm),),
        summary="(u_t + u u_x)_x = gamma u  [central skew flux]",
    )


def build_ostrovsky(grid: PeriodicGrid, beta: float = 0.5, gamma: float = 1.0,
                    variant: str = "fd") -> EquationDef:
    """Ostrovsky equation (u_t + u u_x + beta u_xxx)_x = gamma*u.

    Two norm-preserving discretizations are selectable:

    * ``fd`` — central differences, skew flux, third derivative by the
      five-point central third difference, average-difference inverse pair:
      du/dt = (cen(u^2) + u cen u)/3 - beta*cen3(u) + gamma*trap_inverse(u).
    * ``ps`` — the same layout with every operator Fourier-spectral and the
      spectral pseudoinverse.

    Every term is skew-adjoint against u, so the L2 norm is conserved either
    way.  With beta = 0 the fd variant coincides with
    :func:`build_reduced_ostrovsky`.
    """
    if gamma == 0.0:
        raise ValueError("gamma must be nonzero (gamma = 0 removes the constraint)")
    if variant == "fd":
        diff = make_standard("central_diff", grid)
        diff3 = make_standard("central_diff3", grid)
        pair = make_pair("average_difference", grid)
        name = "ostrovsky_fd"
    elif variant == "ps":
        diff = make_standard("fourier_spectral_diff", grid)
        diff3 = CirculantOperator.from_symbol(grid, diff.symbol ** 3,
                                              name="fourier_spectral_diff3")
        pair = OperatorPair.plain(diff)
        name = "ostrovsky_ps"
    else:
        raise ValueError(f"unknown variant {variant!r}; choose 'fd' or 'ps'")
    skew = _skew_product_flux(diff)

    def g_bar(u: GridFunction) -> GridFunction:
        return GridFunction(grid, -skew(u) + beta * diff3._apply_values(u.values))

    return EquationDef(
        name=name,
        grid=grid,
        inverse_pair=pair,
        f_bar=lambda u: gamma * u,
        f_bar_grad=lambda u: grid.constant(gamma),
        g_bar=g_bar,
        params={"beta": beta, "gamma": gamma, "variant": variant},
        expected_behavior="regular",
        conserved=(("l2_norm", _l2_norm),),
        summary="(u_t + u u_x + beta u_xxx)_x = gamma u  [" + variant + "]",
    )


def build_modified_hunter_saxton(grid: PeriodicGrid, gamma: float = 1.0) -> EquationDef:
    """(u_t + u u_x + (gamma/6) u_x^3)_x = u + u_x^2 / 2.

    Flux: skew form for u u_x plus the pointwise cubic (gamma/6)(cen u)^3.
    The constraint gradient is 1 - cen(cen(u)) (the exact gradient of the
    coded source), and its sum telescopes: grad F_d . 1 = 2*pi for every
    state, so the reduction never degenerates.  For smooth data the correction
    constant approaches (gamma / 12 pi) * dx * sum (cen u)^3.
    """
    cen = make_standard("central_diff", grid)
    skew = _skew_product_flux(cen)

    def g_bar(u: GridFunction) -> GridFunction:
        du = cen._apply_values(u.values)
        return GridFunction(grid, skew(u) + (gamma / 6.0) * du ** 3)

    def f_bar(u: GridFunction) -> GridFunction:
        du = cen._apply_values(u.values)
        return GridFunction(grid, u.values + 0.5 * du ** 2)

    def f_bar_grad(u: GridFunction) -> GridFunction:
        return GridFunction(
            grid, 1.0 - cen._apply_values(cen._apply_values(u.values)))

    return EquationDef(
        name="modified_hunter_saxton",
        grid=grid,
        inverse_pair=make_pair("average_difference", grid),
        f_bar=f_bar,
        f_bar_grad=f_bar_grad,
        g_bar=g_bar,
        params={"gamma": gamma},
        expected_behavior="regular",
        summary="(u_t + u u_x + (gamma/6) u_x^3)_x = u + u_x^2/2",
    )


def build_modified_short_pulse(grid: PeriodicGrid) -> EquationDef:
    """u_tx = u + u*(u^2)_xx / 2.

    The source uses the three-point central second difference cen2.  The
    constraint gradient sums to 2*pi - dx*sum((forward du)^2), so validity is
    data dependent: states whose discrete gradient energy approaches 2*pi make
    the reduction degenerate.  The validity check warns when the central-
    difference estimate of that energy comes within 10% of 2*pi.
    """
    cen = make_standard("central_diff", grid)
    cen2 = make_standard("central_diff2", grid)

    def f_bar(u: GridFunction) -> GridFunction:
        v = u.values
        return GridFunction(grid, v + 0.5 * v * cen2._apply_values(v * v))

    def f_bar_grad(u: GridFunction) -> GridFunction:
        v = u.values
        return GridFunction(
            grid,
            1.0 + 0.5 * cen2._apply_values(v * v) + v * cen2._apply_values(v))

    def validity_check(u0: GridFunction) -> str | None:
        du = cen._apply_values(u0.values)
        energy = grid.dx * float((du * du).sum())
        if abs(TWO_PI - energy) < 0.1 * TWO_PI:
            return (f"initial gradient energy {energy:.4f} is within 10% of 2*pi; "
                    "the constraint reduction may degenerate during the run")
        return None

    return EquationDef(
        name="modified_short_pulse",
        grid=grid,
        inverse_pair=make_pair("average_difference", grid),
        f_bar=f_bar,
        f_bar_grad=f_bar_grad,
        expected_behavior="conditional",
        summary="u_tx = u + u (u^2)_xx / 2",
        validity_check=validity_check,
    )


def build_nonlinear_kg_quadratic(grid: PeriodicGrid) -> EquationDef:
    """u_tx = u + u^2.

    The constraint gradient sums to 2*pi*(1 + 2*mean(u)); states with mean
    near -1/2 are degenerate, and the mean is not conserved, so validity can
    be lost mid-run.
    """

    def validity_check(u0: GridFunction) -> str | None:
        margin = 1.0 + 2.0 * float(u0.values.mean())
        if abs(margin) < 0.1:
            return (f"1 + 2*mean(u0) = {margin:.4f} is close to zero; "
                    "the constraint reduction may degenerate during the run")
        return None

    return EquationDef(
        name="nonlinear_kg_quadratic",
        grid=grid,
        inverse_pair=make_pair("average_difference", grid),
        f_bar=lambda u: GridFunction(grid, u.values + u.values ** 2),
        f_bar_grad=lambda u: GridFunction(grid, 1.0 + 2.0 * u.values),
        expected_behavior="conditional",
        summary="u_tx = u + u^2",
        validity_check=validity_check,
    )


def build_degenerate_cubic(grid: PeriodicGrid) -> EquationDef:
    """u_tx = u_x^3 / 3, which never admits an index-one reduction.

    The constraint gradient is -cen((cen u)^2), whose sum telescopes to zero
    for every state, so evaluating the reduced field raises
    DegenerateConstraintError immediately.  The ladder diagnostic equals the
    discrete analogue of -(1/3) * integral of u_x^5 (with the inverse-route
    projection applied to the cubed slope).
    """
    cen = make_standard("central_diff", grid)

    def f_bar(u: GridFunction) -> GridFunction:
        du = cen._apply_values(u.values)
        return GridFunction(grid, du ** 3 / 3.0)

    def f_bar_grad(u: GridFunction) -> GridFunction:
        du = cen._apply_values(u.values)
        return GridFunction(grid, -cen._apply_values(du * du))

    return EquationDef(
        name="degenerate_cubic",
        grid=grid,
        inverse_pair=OperatorPair.plain(cen),
        f_bar=f_bar,
        f_bar_grad=f_bar_grad,
        expected_behavior="degenerate",
        summary="u_tx = u_x^3 / 3",
    )


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class CatalogEntry:
    identifier: str
    builder: Callable[..., EquationDef]
    expected_behavior: str
    summary: str
    param_names: tuple[str, ...] = ()


EQUATIONS: dict[str, CatalogEntry] = {
    entry.identifier: entry
    for entry in (
        CatalogEntry("sine_gordon", build_sine_gordon, "regular",
                     "u_tx = sin(u)"),
        CatalogEntry("linear_kg", build_linear_kg, "regular",
                     "u_tx = u", ("pair_kind",)),
        CatalogEntry("reduced_ostrovsky", build_reduced_ostrovsky, "regular",
                     "(u_t + u u_x)_x = gamma u", ("gamma",)),
        CatalogEntry("ostrovsky_fd",
                     lambda grid, **p: build_ostrovsky(grid, variant="fd", **p),
                     "regular",
                     "(u_t + u u_x + beta u_xxx)_x = gamma u, finite differences",
                     ("beta", "gamma")),
        CatalogEntry("ostrovsky_ps",
                     lambda grid, **p: build_ostrovsky(grid, variant="ps", **p),
                     "regular",
                     "(u_t + u u_x + beta u_xxx)_x = gamma u, Fourier-spectral",
                     ("beta", "gamma")),
        CatalogEntry("modified_hunter_saxton", build_modified_hunter_saxton,
                     "regular",
                     "(u_t + u u_x + (gamma/6) u_x^3)_x = u + u_x^2/2",
                     ("gamma",)),
        CatalogEntry("modified_short_pulse", build_modified_short_pulse,
                     "conditional",
                     "u_tx = u + u (u^2)_xx / 2"),
        CatalogEntry("nonlinear_kg_quadratic", build_nonlinear_kg_quadratic,
                     "conditional",
                     "u_tx = u + u^2"),
        CatalogEntry("degenerate_cubic", build_degenerate_cubic, "degenerate",
                     "u_tx = u_x^3 / 3"),
    )
}


def build_equation(identifier: str, grid: PeriodicGrid, **params) -> EquationDef:
    """Instantiate a catalog equation on a grid. Unknown ids raise ValueError."""
    try:
        entry = EQUATIONS[identifier]
    except KeyError:
        known = ", ".join(sorted(EQUATIONS))
        raise ValueError(f"unknown equation {identifier!r}; known: {known}") from None
    return entry.builder(grid, **params)


def initial_data_generators(eq: EquationDef) -> dict[str, Callable]:
    """Generic generators plus the equation's own reference data."""
    table = dict(GENERIC_INITIAL_DATA)
    table.update(eq.initial_data)
    return table


def make_initial_data(eq: EquationDef, generator: str, **params) -> GridFunction:
    table = initial_data_generators(eq)
    try:
        fn = table[generator]
    except KeyError:
        known = ", ".join(sorted(table))
        raise ValueError(
            f"unknown initial data generator {generator!r}; known: {known}") from None
    return fn(eq.grid, **params)
