"""Reduction of mixed-derivative schemes to explicit ODEs with a correction term.

A spatial discretization of an equation of the form

    d/dt (D u) + [differentiated flux] = M f(u)

determines du/dt only up to the kernel of the difference operator D, i.e. up
to a constant drift.  The discrete constraint

    F_d(u) = dx * sum_k f_k(u)

must stay flat along solutions, and that single scalar condition fixes the
drift: with grad F_d the (Euclidean) gradient of F_d, the reduced right-hand
side is

    rhs(u) = -g(u) - Dpinv(dxg(u)) + PairInv(f(u)) + C_d(u) * 1,
    C_d(u) = grad F_d . (g_eff(u) - PairInv(f(u))) / (grad F_d . 1),

where PairInv is the pair's generalized inverse, Dpinv the pseudoinverse of
the difference side alone (used for fluxes supplied in differentiated form),
and g_eff collects both flux contributions.  By construction
grad F_d . rhs(u) = 0 at every state, so F_d is a first integral of the
reduced flow.

The reduction is valid exactly when grad F_d . 1 != 0.  When that inner
product vanishes the system is genuinely degenerate: the next constraint in
the ladder, F_1(u) = grad F_d . (g_eff(u) - PairInv(f(u))), must then vanish
as well for solutions to exist, and ``ladder_probe`` evaluates it as a
diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .grid import GridFunction, PeriodicGrid, inner
from .operators import OperatorPair, make_standard

#: |grad F_d . 1| below this fraction of ||grad F_d||_1 counts as degenerate.
DEGENERACY_RTOL = 1e-8

Fieldmap = Callable[[GridFunction], GridFunction]
Functional = Callable[[GridFunction], float]


class DegenerateConstraintError(RuntimeError):
    """The constraint gradient annihilates constants; no index-one reduction exists.

    Attributes
    ----------
    gradient_dot_one:
        The offending inner product grad F_d . 1.
    tolerance:
        The threshold it fell below.
    ladder_value:
        The next constraint F_1(u) in the degeneracy ladder, if it was probed.
    """

    def __init__(self, gradient_dot_one: float, tolerance: float,
                 ladder_value: float | None = None):
        self.gradient_dot_one = gradient_dot_one
        self.tolerance = tolerance
        self.ladder_value = ladder_value
        msg = (f"constraint gradient dotted with constants is {gradient_dot_one:.3e} "
               f"(tolerance {tolerance:.3e}); the reduction is degenerate")
        if ladder_value is not None:
            msg += f"; next ladder constraint evaluates to {ladder_value:.6e}"
        super().__init__(msg)


@dataclass(frozen=True)
class EquationDef:
    """A spatially discretized mixed-derivative equation.

    Attributes
    ----------
    name:
        Catalog identifier.
    grid:
        The periodic grid.
    inverse_pair:
        Operator pair whose generalized inverse realizes the antiderivative.
    f_bar:
        Nodal source term f(u) whose cell sum is the constraint.
    f_bar_grad:
        Gradient of sum_k f_k(u) with respect to u (the constraint gradient
        divided by dx).
    g_bar:
        Optional flux term entering the scheme as d/dt u + g_bar inside the
        difference operator.
    dxg_bar:
        Optional flux supplied in already-differentiated form (it enters the
        scheme outside the difference operator and is un-differentiated with
        the pseudoinverse of the difference side during reduction).  Must have
        zero mean.
    params:
        Builder parameters, echoed into manifests.
    expected_behavior:
        'regular', 'conditional' (data-dependent validity), or 'degenerate'.
    conserved:
        Named functionals expected constant along the reduced flow.
    initial_data:
        Named reference initial-data generators, keyword arguments allowed.
    summary:
        Human-readable equation form for listings.
    validity_check:
        Optional callable returning a warning string (or None) for given
        initial data; used by the simulation driver for conditional equations.
    """

    name: str
    grid: PeriodicGrid
    inverse_pair: OperatorPair
    f_bar: Fieldmap
    f_bar_grad: Fieldmap
    g_bar: Fieldmap | None = None
    dxg_bar: Fieldmap | None = None
    params: Mapping[str, float] = field(default_factory=dict)
    expected_behavior: str = "regular"
    conserved: Sequence[tuple[str, Functional]] = ()
    initial_data: Mapping[str, Callable] = field(default_factory=dict)
    summary: str = ""
    validity_check: Callable[[GridFunction], str | None] | None = None


def discrete_constraint(eq: EquationDef, u: GridFunction) -> float:
    """F_d(u) = dx * sum_k f_k(u)."""
    return eq.grid.dx * float(eq.f_bar(u).values.sum())


def constraint_gradient(eq: EquationDef, u: GridFunction) -> np.ndarray:
    """grad F_d(u) as a plain array (dx times the coded f_bar_grad)."""
    return eq.grid.dx * eq.f_bar_grad(u).values


def _diff_side_pseudoinverse(eq: EquationDef) -> OperatorPair:
    return OperatorPair.plain(eq.inverse_pair.diff)


def _effective_g_values(eq: EquationDef, u: GridFunction,
                        dpinv: OperatorPair | None = None) -> np.ndarray:
    g = np.zeros(eq.grid.size)
    if eq.g_bar is not None:
        g = g + eq.g_bar(u).values
    if eq.dxg_bar is not None:
        if dpinv is None:
            dpinv = _diff_side_pseudoinverse(eq)
        g = g + dpinv._pseudo_apply_values(eq.dxg_bar(u).values)
    return g


def _correction_parts(eq: EquationDef, u: GridFunction,
                      dpinv: OperatorPair | None = None):
    grad = constraint_gradient(eq, u)
    g_eff = _effective_g_values(eq, u, dpinv)
    f_inv = eq.inverse_pair._pseudo_apply_values(eq.f_bar(u).values)
    numerator = float(grad @ (g_eff - f_inv))
    denominator = float(grad.sum())
    tol = DEGENERACY_RTOL * float(np.abs(grad).sum())
    return grad, g_eff, f_inv, numerator, denominator, tol


def ladder_probe(eq: EquationDef, u: GridFunction) -> float:
    """Next constraint in the degeneracy ladder,
    F_1(u) = grad F_d . (g_eff(u) - PairInv(f(u)))."""
    _, _, _, numerator, _, _ = _correction_parts(eq, u)
    return numerator


def correction_constant(eq: EquationDef, u: GridFunction,
                        probe_on_degenerate: bool = True) -> float:
    """The constant drift C_d(u) that keeps the constraint flat.

    Raises DegenerateConstraintError when |grad F_d . 1| falls below
    ``DEGENERACY_RTOL * ||grad F_d||_1``; the error carries the ladder value
    F_1(u) unless probing is disabled.
    """
    _, _, _, numerator, denominator, tol = _correction_parts(eq, u)
    if abs(denominator) <= tol:
        ladder = numerator if probe_on_degenerate else None
        raise DegenerateConstraintError(denominator, tol, ladder)
    return numerator / denominator


class ReducedODE:
    """Callable right-hand side of the reduced ODE.

    Evaluating at a state returns du/dt as a GridFunction;
    ``last_correction`` keeps the drift constant from the most recent
    evaluation (advisory only, not synchronized across states).
    """

    def __init__(self, equation: EquationDef, degenerate_policy: str = "ladder_probe"):
        if degenerate_policy not in ("error", "ladder_probe"):
            raise ValueError(
                f"degenerate_policy must be 'error' or 'ladder_probe', got {degenerate_policy!r}")
        self.equation = equation
        self.degenerate_policy = degenerate_policy
        self.last_correction: float | None = None
        self._dpinv = (_diff_side_pseudoinverse(equation)
                       if equation.dxg_bar is not None else None)

    def __call__(self, u: GridFunction) -> GridFunction:
        eq = self.equation
        _, g_eff, f_inv, numerator, denominator, tol = _correction_parts(eq, u, self._dpinv)
        if abs(denominator) <= tol:
            ladder = numerator if self.degenerate_policy == "ladder_probe" else None
            raise DegenerateConstraintError(denominator, tol, ladder)
        c = numerator / denominator
        self.last_correction = c
        return GridFunction(eq.grid, -g_eff + f_inv + c)

    # keep the conventional name available for callers expecting an attribute
    @property
    def rhs(self) -> Callable[[GridFunction], GridFunction]:
        return self.__call__


def reduce(eq: EquationDef, degenerate_policy: str = "ladder_probe") -> ReducedODE:
    """Build the reduced ODE right-hand side for a discretized equation."""
    return ReducedODE(eq, degenerate_policy)


def differential_residual(eq: EquationDef, u: GridFunction,
                          udot: GridFunction) -> GridFunction:
    """Residual of the original differential-form scheme,
    D(udot + g_bar(u)) + dxg_bar(u) - M f(u)."""
    d, m = eq.inverse_pair.diff, eq.inverse_pair.avg
    lhs = udot.values
    if eq.g_bar is not None:
        lhs = lhs + eq.g_bar(u).values
    res = d._apply_values(lhs)
    if eq.dxg_bar is not None:
        res = res + eq.dxg_bar(u).values
    res = res - m._apply_values(eq.f_bar(u).values)
    return GridFunction(eq.grid, res)


def frozen_sg_rhs(u: GridFunction, reference_energy: float) -> GridFunction:
    """Sine-Gordon field with the correction denominator frozen at a reference.

    Uses the Fourier-spectral pseudoinverse Dinv and returns

        du/dt = Dinv(sin u) - (C(u) / H0) * 1,
        C(u)  = <cos u, Dinv(sin u)>,   H0 = reference_energy,

    with <.,.> the dx-weighted inner product.  Along this flow the cell sums
    F_d = dx*sum sin(u) and H_d = dx*sum cos(u) obey the closed two-by-two
    system  dF_d/dt = (C/H0)(H0 - H_d),  dH_d/dt = (C/H0) F_d.
    """
    if reference_energy == 0.0:
        raise ValueError("reference energy must be nonzero")
    pair = OperatorPair.plain(make_standard("fourier_spectral_diff", u.grid))
    sin_u = GridFunction(u.grid, np.sin(u.values))
    cos_u = GridFunction(u.grid, np.cos(u.values))
    ginv_sin = pair.pseudo_apply(sin_u)
    c_tilde = inner(cos_u, ginv_sin)
    return GridFunction(u.grid, ginv_sin.values - c_tilde / reference_energy)
