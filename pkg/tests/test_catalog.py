"""Tests for the equation catalog: builders, conservation and validity."""

import numpy as np
import pytest

from mixedderiv import (
    EQUATIONS,
    build_equation,
    constraint_gradient,
    correction_constant,
    discrete_constraint,
    initial_data_generators,
    inner,
    ladder_probe,
    make_grid,
    make_initial_data,
    make_standard,
    projected_kink,
    reduce,
)

ALL_IDS = [
    "degenerate_cubic",
    "linear_kg",
    "modified_hunter_saxton",
    "modified_short_pulse",
    "nonlinear_kg_quadratic",
    "ostrovsky_fd",
    "ostrovsky_ps",
    "reduced_ostrovsky",
    "sine_gordon",
]

CONSERVATION_TOL = 1e-11


def random_states(grid, count, amplitude=0.5, seed=0):
    rng = np.random.default_rng(seed)
    return [grid.function(amplitude * rng.standard_normal(grid.size))
            for _ in range(count)]


# ---------------------------------------------------------------------------
# registry


def test_catalog_contents():
    assert sorted(EQUATIONS) == ALL_IDS
    behaviors = {ident: entry.expected_behavior
                 for ident, entry in EQUATIONS.items()}
    assert behaviors["degenerate_cubic"] == "degenerate"
    assert behaviors["modified_short_pulse"] == "conditional"
    assert behaviors["nonlinear_kg_quadratic"] == "conditional"
    for ident in ("sine_gordon", "linear_kg", "reduced_ostrovsky",
                  "ostrovsky_fd", "ostrovsky_ps", "modified_hunter_saxton"):
        assert behaviors[ident] == "regular"
    assert EQUATIONS["ostrovsky_fd"].param_names == ("beta", "gamma")
    assert all(entry.summary for entry in EQUATIONS.values())


def test_build_rejects_unknown_inputs():
    grid = make_grid(16)
    with pytest.raises(ValueError, match="unknown equation"):
        build_equation("heat", grid)
    with pytest.raises(ValueError, match="pair_kind"):
        build_equation("linear_kg", grid, pair_kind="bogus")
    for ident in ("reduced_ostrovsky", "ostrovsky_fd", "ostrovsky_ps"):
        with pytest.raises(ValueError, match="gamma"):
            build_equation(ident, grid, gamma=0.0)


def test_builders_echo_their_parameters():
    grid = make_grid(16)
    eq = build_equation("ostrovsky_fd", grid, beta=0.25, gamma=2.0)
    assert eq.params == {"beta": 0.25, "gamma": 2.0, "variant": "fd"}
    assert eq.name == "ostrovsky_fd"
    assert build_equation("ostrovsky_ps", grid).name == "ostrovsky_ps"


# ---------------------------------------------------------------------------
# coded gradients


@pytest.mark.parametrize("ident", ALL_IDS)
def test_constraint_gradient_matches_finite_differences(ident):
    grid = make_grid(16)
    eq = build_equation(ident, grid)
    rng = np.random.default_rng(1)
    for _ in range(3):
        u = grid.function(0.5 * rng.standard_normal(16))
        grad = constraint_gradient(eq, u)
        h = 1e-6 * (1.0 + np.abs(u.values).max())
        for k in (0, 7, 12):
            e = np.zeros(16)
            e[k] = h
            fd = (discrete_constraint(eq, grid.function(u.values + e))
                  - discrete_constraint(eq, grid.function(u.values - e))) / (2 * h)
            assert grad[k] == pytest.approx(fd, rel=2e-5, abs=1e-8), f"{ident}[{k}]"


# ---------------------------------------------------------------------------
# conservation identities


def test_skew_flux_has_zero_cell_sum():
    # the (d(u^2) + u du)/3 product-rule form telescopes exactly; beta = 0
    # removes the (also telescoping) dispersive term from the fd/ps variants
    grid = make_grid(32)
    for ident in ("reduced_ostrovsky", "ostrovsky_fd", "ostrovsky_ps"):
        params = {"gamma": 1.0} if ident == "reduced_ostrovsky" \
            else {"beta": 0.0, "gamma": 1.0}
        eq = build_equation(ident, grid, **params)
        for u in random_states(grid, 5, seed=2):
            g = eq.g_bar(u).values
            scale = np.abs(g).max() + 1.0
            assert abs(g.sum()) <= 1e-13 * scale * grid.size, ident


def test_sine_gordon_cosine_sum_is_conserved():
    # d/dt sum cos(u) = -sum sin(u)*du/dt vanishes along the reduced field on
    # states satisfying the constraint sum sin(u) = 0 (which the flow keeps)
    grid = make_grid(64)
    eq = build_equation("sine_gordon", grid)
    ode = reduce(eq)
    rng = np.random.default_rng(3)
    for _ in range(20):
        vals = 0.8 * rng.standard_normal(64)
        shift = np.arctan2(np.sin(vals).sum(), np.cos(vals).sum())
        u = grid.function(vals - shift)
        rhs = ode(u)
        assert abs(float(np.sin(u.values) @ rhs.values)) <= CONSERVATION_TOL
    (name, functional), = eq.conserved
    assert name == "cos_sum"
    assert functional(grid.constant(0.0)) == pytest.approx(2 * np.pi, abs=1e-13)


@pytest.mark.parametrize("ident,params", [
    ("reduced_ostrovsky", {"gamma": 1.0}),
    ("ostrovsky_fd", {"beta": 0.5, "gamma": 1.0}),
    ("ostrovsky_ps", {"beta": 0.5, "gamma": 1.0}),
])
def test_ostrovsky_l2_norm_is_conserved(ident, params):
    grid = make_grid(64)
    eq = build_equation(ident, grid, **params)
    ode = reduce(eq)
    for u in random_states(grid, 20, amplitude=0.8, seed=4):
        rhs = ode(u)
        scale = abs(inner(u, u)) + 1.0
        assert abs(inner(u, rhs)) <= CONSERVATION_TOL * scale, ident


def test_ostrovsky_fd_with_beta_zero_reduces_to_quadratic_model():
    grid = make_grid(32)
    full = reduce(build_equation("ostrovsky_fd", grid, beta=0.0, gamma=1.3))
    reduced = reduce(build_equation("reduced_ostrovsky", grid, gamma=1.3))
    for u in random_states(grid, 5, seed=5):
        np.testing.assert_allclose(full(u).values, reduced(u).values, atol=1e-13)


def test_ostrovsky_ps_single_mode_closed_form():
    # for u = a*cos(m x) every term is a resolved Fourier mode, so the field is
    # -(a^2 m/2) sin(2mx) + a*(gamma/m - beta m^3) sin(mx) exactly
    grid = make_grid(32)
    a, m, beta, gamma = 0.7, 3, 0.4, 1.2
    eq = build_equation("ostrovsky_ps", grid, beta=beta, gamma=gamma)
    x = grid.nodes
    u = grid.function(a * np.cos(m * x))
    expected = (-(a * a * m / 2.0) * np.sin(2 * m * x)
                + a * (gamma / m - beta * m ** 3) * np.sin(m * x))
    np.testing.assert_allclose(reduce(eq)(u).values, expected, atol=1e-11)


def test_linear_kg_spectral_field_is_the_antiderivative():
    grid = make_grid(64)
    eq = build_equation("linear_kg", grid, pair_kind="fourier_spectral")
    ode = reduce(eq)
    x = grid.nodes
    np.testing.assert_allclose(ode(grid.function(np.cos(x))).values,
                               np.sin(x), atol=1e-12)
    np.testing.assert_allclose(ode(grid.function(np.cos(5 * x))).values,
                               np.sin(5 * x) / 5.0, atol=1e-12)


# ---------------------------------------------------------------------------
# Hunter-Saxton variant


def test_hunter_saxton_gradient_sum_telescopes_to_two_pi():
    grid = make_grid(32)
    eq = build_equation("modified_hunter_saxton", grid, gamma=0.7)
    for u in random_states(grid, 10, amplitude=2.0, seed=6):
        assert constraint_gradient(eq, u).sum() == pytest.approx(
            2 * np.pi, abs=1e-12)


def test_hunter_saxton_correction_approaches_cubic_cell_sum():
    # C_d -> (gamma / 12 pi) * dx * sum (du)^3 at second order in the spacing
    gamma = 1.3
    diffs = {}
    for size in (64, 256):
        grid = make_grid(size)
        eq = build_equation("modified_hunter_saxton", grid, gamma=gamma)
        u = grid.function(np.sin(grid.nodes) + 0.5 * np.sin(2 * grid.nodes))
        cen = make_standard("central_diff", grid)
        du = cen.apply(u).values
        closed = (gamma / (12 * np.pi)) * grid.dx * float((du ** 3).sum())
        diffs[size] = abs(correction_constant(eq, u) - closed)
    # refining 64 -> 256 should shrink the gap by about 4^2
    assert 8.0 <= diffs[64] / diffs[256] <= 32.0
    # at u = sin(x) both sides vanish, so the gap is far below any tolerance
    grid = make_grid(256)
    eq = build_equation("modified_hunter_saxton", grid, gamma=gamma)
    u = grid.function(np.sin(grid.nodes))
    du = make_standard("central_diff", grid).apply(u).values
    closed = (gamma / (12 * np.pi)) * grid.dx * float((du ** 3).sum())
    assert abs(correction_constant(eq, u) - closed) <= 1e-3


# ---------------------------------------------------------------------------
# conditional equations


def test_short_pulse_gradient_sum_identity():
    # grad F_d . 1 = 2*pi - dx * sum (forward du)^2 exactly, by summation
    # by parts of the second-difference term
    grid = make_grid(32)
    eq = build_equation("modified_short_pulse", grid)
    fwd = make_standard("forward_diff", grid)
    for u in random_states(grid, 10, amplitude=1.0, seed=7):
        du = fwd.apply(u).values
        expected = 2 * np.pi - grid.dx * float((du * du).sum())
        assert constraint_gradient(eq, u).sum() == pytest.approx(expected,
                                                                 abs=1e-10)
    assert constraint_gradient(eq, grid.constant(0.0)).sum() == pytest.approx(
        2 * np.pi, abs=1e-12)


def test_short_pulse_validity_check():
    grid = make_grid(64)
    eq = build_equation("modified_short_pulse", grid)
    assert eq.validity_check(grid.constant(0.0)) is None
    # amplitude 1 mode 1: gradient energy dx*sum(cos^2) = pi, harmless
    assert eq.validity_check(grid.function(np.sin(grid.nodes))) is None
    # amplitude sqrt(2) brings the gradient energy to 2*pi exactly
    risky = grid.function(np.sqrt(2.0) * np.sin(grid.nodes))
    message = eq.validity_check(risky)
    assert message is not None and "2*pi" in message


def test_nonlinear_kg_validity_check():
    grid = make_grid(64)
    eq = build_equation("nonlinear_kg_quadratic", grid)
    assert eq.validity_check(grid.constant(0.0)) is None
    message = eq.validity_check(grid.constant(-0.49))
    assert message is not None and "mean" in message


# ---------------------------------------------------------------------------
# degeneracy diagnostics


def test_degenerate_cubic_ladder_sign():
    grid = make_grid(64)
    eq = build_equation("degenerate_cubic", grid)
    cen = make_standard("central_diff", grid)

    def reference(u):
        du = cen.apply(u).values
        return -float((du ** 5).sum()) / 3.0

    # at u = sin(x) the fifth power cancels by symmetry: both diagnostics sit
    # at round-off, which counts as agreeing signs
    u_sin = grid.function(np.sin(grid.nodes))
    assert abs(ladder_probe(eq, u_sin)) <= 1e-10
    assert abs(reference(u_sin)) <= 1e-10
    # an asymmetric profile gives an order-one diagnostic with a definite sign
    u_asym = grid.function(np.sin(grid.nodes) + 0.6 * np.sin(2 * grid.nodes))
    probe = ladder_probe(eq, u_asym)
    assert abs(probe) > 1.0
    assert np.sign(probe) == np.sign(reference(u_asym))


# ---------------------------------------------------------------------------
# initial data


def test_generic_initial_data_generators():
    grid = make_grid(16)
    eq = build_equation("linear_kg", grid)
    table = initial_data_generators(eq)
    assert {"zero", "cosine", "sine"} <= set(table)
    np.testing.assert_allclose(make_initial_data(eq, "zero").values, 0.0)
    u = make_initial_data(eq, "cosine", mode=2, amplitude=0.5, phase=0.1)
    np.testing.assert_allclose(u.values, 0.5 * np.cos(2 * grid.nodes + 0.1))
    v = make_initial_data(eq, "sine", mode=3)
    np.testing.assert_allclose(v.values, np.sin(3 * grid.nodes))
    with pytest.raises(ValueError, match="unknown initial data generator"):
        make_initial_data(eq, "sawtooth")


def test_sine_gordon_exposes_projected_kink():
    grid = make_grid(64)
    eq = build_equation("sine_gordon", grid)
    assert "projected_kink" in initial_data_generators(eq)
    u = make_initial_data(eq, "projected_kink")
    assert abs(np.sin(u.values).sum()) <= 1e-12


@pytest.mark.parametrize("size", [32, 64, 128, 1024])
def test_projected_kink_satisfies_the_constraint(size):
    grid = make_grid(size)
    u = projected_kink(grid)
    assert abs(np.sin(u.values).sum()) <= 1e-12
    assert np.all(np.isfinite(u.values))
    assert np.abs(u.values).max() < 2 * np.pi


def test_projected_kink_shift_is_stable_across_refinement():
    # the added constant must stay on the same root branch for every grid,
    # otherwise coarse and fine profiles drift a multiple of pi apart
    shifts = {}
    for size in (32, 64, 128, 256, 1024):
        grid = make_grid(size)
        base = 4.0 * np.arctan(np.exp(np.sin(grid.nodes)))
        shifts[size] = float((projected_kink(grid).values - base)[0])
    values = list(shifts.values())
    assert max(values) - min(values) < 0.05
