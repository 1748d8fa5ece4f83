"""Tests for the constraint-consistent reduction of discretized schemes.

The reduced field must (a) reproduce the original differential-form scheme on
constraint-satisfying states, (b) keep the constraint cell sum flat along the
flow, and (c) agree with a dense linear-algebra reassembly of the same pieces.
"""

import numpy as np
import pytest

from mixedderiv import (
    DegenerateConstraintError,
    EquationDef,
    OperatorPair,
    build_equation,
    constraint_gradient,
    correction_constant,
    differential_residual,
    discrete_constraint,
    frozen_sg_rhs,
    inner,
    ladder_probe,
    make_grid,
    make_standard,
    reduce,
    trap_antiderivative,
)
from mixedderiv.catalog import EQUATIONS

FLATNESS_TOL = 1e-11
RESIDUAL_TOL = 1e-11
IDENTITY_TOL = 1e-12

REGULAR_IDS = sorted(ident for ident, entry in EQUATIONS.items()
                     if entry.expected_behavior == "regular")


def random_states(grid, count, amplitude=0.5, seed=0):
    rng = np.random.default_rng(seed)
    return [grid.function(amplitude * rng.standard_normal(grid.size))
            for _ in range(count)]


def projected_sg_states(grid, count, seed=0):
    """Random states shifted so the sine cell sum vanishes."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        vals = 0.8 * rng.standard_normal(grid.size)
        shift = np.arctan2(np.sin(vals).sum(), np.cos(vals).sum())
        out.append(grid.function(vals - shift))
    return out


# ---------------------------------------------------------------------------
# constraint bookkeeping


def test_constraint_and_gradient_definitions():
    grid = make_grid(16)
    eq = build_equation("sine_gordon", grid)
    u = grid.function(0.3 * np.cos(grid.nodes))
    assert discrete_constraint(eq, u) == pytest.approx(
        grid.dx * np.sin(u.values).sum(), abs=1e-14)
    np.testing.assert_allclose(constraint_gradient(eq, u),
                               grid.dx * np.cos(u.values), atol=1e-14)


@pytest.mark.parametrize("ident", ["sine_gordon", "modified_hunter_saxton",
                                   "modified_short_pulse"])
def test_gradient_matches_finite_differences(ident):
    grid = make_grid(16)
    eq = build_equation(ident, grid)
    rng = np.random.default_rng(1)
    u = grid.function(0.4 * rng.standard_normal(16))
    grad = constraint_gradient(eq, u)
    h = 1e-6 * (1.0 + np.abs(u.values).max())
    for k in (0, 5, 11):
        e = np.zeros(16)
        e[k] = h
        fd = (discrete_constraint(eq, grid.function(u.values + e))
              - discrete_constraint(eq, grid.function(u.values - e))) / (2 * h)
        assert grad[k] == pytest.approx(fd, rel=1e-6, abs=1e-9)


@pytest.mark.parametrize("ident", REGULAR_IDS)
def test_constraint_flat_along_reduced_field(ident):
    grid = make_grid(32)
    eq = build_equation(ident, grid)
    ode = reduce(eq)
    for u in random_states(grid, 10, seed=2):
        rhs = ode(u)
        grad = constraint_gradient(eq, u)
        scale = np.linalg.norm(grad) * np.linalg.norm(rhs.values) + 1e-300
        assert abs(grad @ rhs.values) <= FLATNESS_TOL * scale


@pytest.mark.parametrize("pair_kind", ["average_difference", "fourier_spectral"])
def test_linear_constraint_needs_no_correction(pair_kind):
    grid = make_grid(32)
    eq = build_equation("linear_kg", grid, pair_kind=pair_kind)
    for u in random_states(grid, 5, amplitude=2.0, seed=3):
        assert abs(correction_constant(eq, u)) <= 1e-13


def test_correction_is_reported_on_the_ode():
    grid = make_grid(32)
    eq = build_equation("sine_gordon", grid)
    ode = reduce(eq)
    assert ode.last_correction is None
    u = random_states(grid, 1, seed=4)[0]
    rhs = ode(u)
    assert ode.last_correction == pytest.approx(correction_constant(eq, u))
    # the rhs attribute is an alias for calling the object
    np.testing.assert_allclose(ode.rhs(u).values, rhs.values)


# ---------------------------------------------------------------------------
# agreement with dense linear algebra


@pytest.mark.parametrize("ident", ["sine_gordon", "ostrovsky_fd",
                                   "modified_hunter_saxton",
                                   "modified_short_pulse",
                                   "nonlinear_kg_quadratic"])
def test_reduced_field_matches_dense_reassembly(ident):
    """Rebuild -g + pinv(D) M f + c with numpy's SVD pseudoinverse and the
    flatness condition grad . rhs = 0 determining c."""
    grid = make_grid(24)
    eq = build_equation(ident, grid)
    ode = reduce(eq)
    dmat = eq.inverse_pair.diff.to_matrix()
    mmat = eq.inverse_pair.avg.to_matrix()
    dpinv = np.linalg.pinv(dmat)
    for u in random_states(grid, 5, amplitude=0.3, seed=5):
        base = dpinv @ (mmat @ eq.f_bar(u).values)
        if eq.g_bar is not None:
            base = base - eq.g_bar(u).values
        grad = constraint_gradient(eq, u)
        c = -float(grad @ base) / float(grad.sum())
        np.testing.assert_allclose(ode(u).values, base + c, atol=1e-9)


# ---------------------------------------------------------------------------
# equivalence with the differential form


def test_sine_gordon_residual_on_constraint_states():
    grid = make_grid(64)
    eq = build_equation("sine_gordon", grid)
    ode = reduce(eq)
    worst = 0.0
    for u in projected_sg_states(grid, 50, seed=6):
        res = differential_residual(eq, u, ode(u))
        worst = max(worst, np.abs(res.values).max())
    assert worst <= RESIDUAL_TOL


def test_sine_gordon_matches_trapezoidal_formula():
    # on constraint-satisfying states the reduced field equals the
    # antiderivative of sin(u) minus sum(cos u * anti)/sum(cos u)
    grid = make_grid(64)
    eq = build_equation("sine_gordon", grid)
    ode = reduce(eq)
    for u in projected_sg_states(grid, 10, seed=7):
        anti = trap_antiderivative(grid.function(np.sin(u.values))).values
        cos_u = np.cos(u.values)
        printed = anti - (cos_u @ anti) / cos_u.sum()
        np.testing.assert_allclose(ode(u).values, printed, atol=IDENTITY_TOL)


def test_residual_ignores_constant_shifts_of_udot():
    # the outer difference operator annihilates constants
    grid = make_grid(32)
    eq = build_equation("sine_gordon", grid)
    u, = projected_sg_states(grid, 1, seed=8)
    udot = reduce(eq)(u)
    r0 = differential_residual(eq, u, udot)
    r5 = differential_residual(eq, u, udot + 5.0)
    np.testing.assert_allclose(r0.values, r5.values, atol=1e-13)


def test_differentiated_flux_slot_matches_flux_slot():
    """Supplying d/dx(g) instead of g must reproduce the same reduced field:
    un-differentiating with the pseudoinverse of the difference side loses only
    a constant, which the correction constant re-absorbs."""
    grid = make_grid(32)
    base = build_equation("reduced_ostrovsky", grid, gamma=1.0)
    fwd = make_standard("forward_diff", grid)
    moved = EquationDef(
        name="reduced_ostrovsky_dxg",
        grid=grid,
        inverse_pair=base.inverse_pair,
        f_bar=base.f_bar,
        f_bar_grad=base.f_bar_grad,
        dxg_bar=lambda u: fwd.apply(base.g_bar(u)),
    )
    ode_base, ode_moved = reduce(base), reduce(moved)
    for u in random_states(grid, 5, seed=9):
        a, b = ode_base(u).values, ode_moved(u).values
        scale = np.abs(a).max() + 1.0
        np.testing.assert_allclose(b, a, atol=1e-12 * scale)


def test_differentiated_flux_constant_component_is_immaterial():
    # the pseudoinverse route projects out any constant in the supplied d/dx(g)
    grid = make_grid(32)
    base = build_equation("reduced_ostrovsky", grid, gamma=1.0)
    fwd = make_standard("forward_diff", grid)

    def make(offset):
        return EquationDef(
            name="probe", grid=grid, inverse_pair=base.inverse_pair,
            f_bar=base.f_bar, f_bar_grad=base.f_bar_grad,
            dxg_bar=lambda u: fwd.apply(base.g_bar(u)) + offset)

    u, = random_states(grid, 1, seed=10)
    np.testing.assert_allclose(reduce(make(0.0))(u).values,
                               reduce(make(3.0))(u).values, atol=1e-12)


# ---------------------------------------------------------------------------
# degeneracy ladder


def test_ladder_probe_equals_constraint_drift_of_uncorrected_field():
    # F_1 = grad F_d . (g_eff - PairInv f) = -d/dh F_d(u + h*w) at h=0 for the
    # uncorrected field w = -g_eff + PairInv f
    grid = make_grid(32)
    eq = build_equation("modified_hunter_saxton", grid)
    ode = reduce(eq)
    u, = random_states(grid, 1, seed=11)
    w = ode(u).values - correction_constant(eq, u)
    h = 1e-7
    drift = (discrete_constraint(eq, grid.function(u.values + h * w))
             - discrete_constraint(eq, grid.function(u.values - h * w))) / (2 * h)
    assert ladder_probe(eq, u) == pytest.approx(-drift, rel=1e-5)


def test_degenerate_equation_raises_immediately():
    grid = make_grid(64)
    eq = build_equation("degenerate_cubic", grid)
    u = grid.function(np.sin(grid.nodes))
    with pytest.raises(DegenerateConstraintError) as excinfo:
        reduce(eq)(u)
    err = excinfo.value
    assert abs(err.gradient_dot_one) <= err.tolerance
    assert err.ladder_value is not None
    assert "degenerate" in str(err)
    with pytest.raises(DegenerateConstraintError):
        correction_constant(eq, u)


def test_degenerate_policy_controls_ladder_reporting():
    grid = make_grid(64)
    eq = build_equation("degenerate_cubic", grid)
    u = grid.function(np.sin(grid.nodes))
    with pytest.raises(DegenerateConstraintError) as excinfo:
        reduce(eq, degenerate_policy="error")(u)
    assert excinfo.value.ladder_value is None
    with pytest.raises(DegenerateConstraintError) as excinfo:
        correction_constant(eq, u, probe_on_degenerate=False)
    assert excinfo.value.ladder_value is None
    with pytest.raises(ValueError, match="degenerate_policy"):
        reduce(eq, degenerate_policy="shrug")


# ---------------------------------------------------------------------------
# frozen-denominator sine-Gordon field


def test_frozen_field_closes_the_two_by_two_system():
    grid = make_grid(32)
    spectral = OperatorPair.plain(make_standard("fourier_spectral_diff", grid))
    rng = np.random.default_rng(12)
    h0 = 5.0
    for _ in range(50):
        u = grid.function(rng.standard_normal(32))
        rhs = frozen_sg_rhs(u, h0)
        sin_u = grid.function(np.sin(u.values))
        cos_u = grid.function(np.cos(u.values))
        c_tilde = inner(cos_u, spectral.pseudo_apply(sin_u))
        f_d = grid.dx * np.sin(u.values).sum()
        h_d = grid.dx * np.cos(u.values).sum()
        df_dt = inner(cos_u, rhs)
        dh_dt = -inner(sin_u, rhs)
        assert abs(df_dt - (c_tilde / h0) * (h0 - h_d)) <= IDENTITY_TOL
        assert abs(dh_dt - (c_tilde / h0) * f_d) <= IDENTITY_TOL


def test_frozen_field_edge_cases():
    grid = make_grid(16)
    with pytest.raises(ValueError, match="nonzero"):
        frozen_sg_rhs(grid.constant(0.0), 0.0)
    # at u = 0 the field vanishes identically
    rhs = frozen_sg_rhs(grid.constant(0.0), 2 * np.pi)
    np.testing.assert_allclose(rhs.values, 0.0, atol=1e-15)
