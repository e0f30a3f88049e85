"""High-level suites: resolvent sweep, rotation semantics, commutation, growth."""

import math

import numpy as np
import pytest

from rotlog import symop
from rotlog.gridops import (
    GaussianField,
    coordinate_gaussian,
    make_grid,
    radial_gaussian,
    spectral_derivative,
    upwind_derivative,
)
from rotlog.verify import (
    ConfigError,
    FieldDecayError,
    SuiteConfig,
    discrete_commutation_residual,
    growth_ratios,
    norm_growth_study,
    resolvent_sweep,
    rotation_compare,
    run_suite,
    standard_generator,
    suite_config_from_dict,
    unitarity_check,
)

L = math.pi


# ---------------------------------------------------------------------------
# resolvent sweep
# ---------------------------------------------------------------------------

def test_sweep_upwind_bounds():
    D = upwind_derivative(make_grid(1, 64, L), "x")
    reports = resolvent_sweep(D, [1.0, 5.0, 1.0 + 10.0j])
    by_lam = {r.lam: r for r in reports}
    assert by_lam[1.0 + 0j].measured_norm <= 1.0 + 1e-9
    assert by_lam[5.0 + 0j].measured_norm <= 0.2 + 1e-9
    assert by_lam[1.0 + 10.0j].measured_norm <= 1.0 + 1e-9  # bound depends on Re only
    assert all(r.satisfied for r in reports)
    assert all(len(r.power_checks) == 4 for r in reports)


def test_sweep_spectral_skew_case():
    D = spectral_derivative(make_grid(1, 32, L), "x")
    reports = resolvent_sweep(D, [0.5, 2.0, 1.0 + 5.0j])
    assert all(r.satisfied for r in reports)


def test_sweep_requires_positive_real_part():
    D = upwind_derivative(make_grid(1, 16, L), "x")
    with pytest.raises(ValueError):
        resolvent_sweep(D, [1.0, -1.0])


def test_sweep_flags_spectrum_adjacent_lambda():
    # the spectral derivative has eigenvalue 0, so a tiny Re lambda is
    # numerically on the spectrum: flagged per entry, not fatal
    D = spectral_derivative(make_grid(1, 32, L), "x")
    reports = resolvent_sweep(D, [1e-13, 1.0])
    assert reports[0].error is not None and not reports[0].satisfied
    assert reports[1].satisfied


# ---------------------------------------------------------------------------
# rotation semantics
# ---------------------------------------------------------------------------

def test_rotation_radial_invariance():
    grid = make_grid(2, 32, 6.0)
    result = rotation_compare(grid, 1.1, radial_gaussian(0.8), tol=1e-6)
    assert result.residual <= 1e-10


def test_rotation_coordinate_field_quarter_turn():
    # f = x g(r) under a quarter turn becomes -y g(r) (clockwise transport)
    grid = make_grid(2, 32, 7.0)
    f = coordinate_gaussian(0, 1.0, 2)
    result = rotation_compare(grid, math.pi / 2, f, tol=1e-6)
    assert result.passed
    from rotlog.funcalc import expm
    from rotlog.gridops import angular_momentum_matrix, field_norm
    M = angular_momentum_matrix(grid, "z").entries
    rotated = expm(math.pi / 2 * M) @ f.sample(grid)
    X, Y = grid.meshes()
    expected = (-Y * np.exp(-(X**2 + Y**2) / 2.0)).ravel()
    assert field_norm(grid, rotated - expected) <= 1e-6


def test_rotation_orientation_small_angle():
    # f = x g -> cos(t) x g - sin(t) y g
    grid = make_grid(2, 32, 7.0)
    theta = 0.3
    f = coordinate_gaussian(0, 1.0, 2)
    from rotlog.funcalc import expm
    from rotlog.gridops import angular_momentum_matrix, field_norm
    M = angular_momentum_matrix(grid, "z").entries
    rotated = expm(theta * M) @ f.sample(grid)
    X, Y = grid.meshes()
    g = np.exp(-(X**2 + Y**2) / 2.0)
    expected = (math.cos(theta) * X * g - math.sin(theta) * Y * g).ravel()
    assert field_norm(grid, rotated - expected) <= 1e-7


def test_rotation_zero_angle():
    grid = make_grid(2, 16, 6.0)
    result = rotation_compare(grid, 0.0, radial_gaussian(0.8), tol=1e-6)
    assert result.residual <= 1e-12


def test_rotation_wrap_precondition():
    grid = make_grid(2, 16, 6.0)
    with pytest.raises(FieldDecayError):
        rotation_compare(grid, 0.5, GaussianField(sigma=3.0), tol=1e-6)


# ---------------------------------------------------------------------------
# unitarity
# ---------------------------------------------------------------------------

def test_unitarity_imaginary_coordinate():
    grid = make_grid(1, 64, L)
    from rotlog.gridops import coordinate_operator
    M = 1j * coordinate_operator(grid, "x").entries
    rng = np.random.default_rng(0)
    fields = [rng.standard_normal(64) + 1j * rng.standard_normal(64) for _ in range(4)]
    results = unitarity_check(M, [0.0, 0.5, 2.0], fields, tol=1e-12)
    assert all(r.passed for r in results)


def test_unitarity_rotation_generator():
    grid = make_grid(2, 16, L)
    from rotlog.gridops import angular_momentum_matrix
    M = angular_momentum_matrix(grid, "z")
    rng = np.random.default_rng(1)
    fields = [rng.standard_normal(grid.size) for _ in range(3)]
    results = unitarity_check(M, [0.7], fields, tol=1e-10)
    assert all(r.passed for r in results)


def test_unitarity_rejects_non_skew():
    with pytest.raises(ValueError):
        unitarity_check(np.diag([1.0, 2.0]), [0.5], [np.ones(2)])


# ---------------------------------------------------------------------------
# discrete commutation residuals
# ---------------------------------------------------------------------------

def test_commutation_radial_field_annihilated():
    grid = make_grid(3, 32, 7.0)
    u = radial_gaussian(1.0).sample(grid)
    results = discrete_commutation_residual(grid, u)
    assert all(r.residual <= 1e-8 for r in results)


def test_commutation_trend_with_resolution():
    worst = {}
    for n in (16, 24):
        grid = make_grid(3, n, 7.0)
        u = coordinate_gaussian(0, 1.0, 3).sample(grid)
        worst[n] = max(r.residual for r in discrete_commutation_residual(grid, u))
    assert worst[24] < worst[16]


def test_commutation_symbolic_control():
    # the grid residual estimates a relation that holds exactly in the algebra
    for i, j, k in (("x", "y", "z"), ("y", "z", "x"), ("z", "x", "y")):
        lhs = symop.commutator(symop.rotation_generator(i), symop.rotation_generator(j))
        assert lhs == -symop.rotation_generator(k)


# ---------------------------------------------------------------------------
# norm growth
# ---------------------------------------------------------------------------

def test_norm_growth_spectral_values():
    rows = norm_growth_study("spectral", [16, 32, 64], L)
    np.testing.assert_allclose([v for _, v in rows], [7.0, 15.0, 31.0], rtol=1e-8)
    assert min(growth_ratios(rows)) >= 1.8


def test_norm_growth_upwind_doubles():
    rows = norm_growth_study("upwind", [16, 32], L)
    # ||(S - I)/h|| = 2/h, and h halves when n doubles; the power-iteration
    # estimate approaches from below, so allow its terminal accuracy
    h16, h32 = 2 * L / 16, 2 * L / 32
    np.testing.assert_allclose([v for _, v in rows], [2 / h16, 2 / h32], rtol=1e-6)


def test_norm_flat_controls():
    for scheme in ("identity", "coordinate"):
        rows = norm_growth_study(scheme, [16, 32, 64], L)
        ratios = growth_ratios(rows)
        assert max(ratios) <= 1.0 + 1e-9


def test_norm_growth_validation():
    with pytest.raises(ValueError):
        norm_growth_study("spectral", [32, 16], L)
    with pytest.raises(ValueError):
        norm_growth_study("magic", [16, 32], L)


# ---------------------------------------------------------------------------
# suite configuration and runner
# ---------------------------------------------------------------------------

def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError) as err:
        suite_config_from_dict({"checks": ["symbolic"], "bogus": 1, "nope": 2})
    assert err.value.keys == ["bogus", "nope"]


def test_config_rejects_empty():
    with pytest.raises(ConfigError):
        suite_config_from_dict({})


def test_config_rejects_bad_values():
    with pytest.raises(ConfigError) as err:
        suite_config_from_dict({"checks": ["not_a_check"], "rotation_size": "many"})
    assert set(err.value.keys) == {"checks", "rotation_size"}


def test_config_parses_complex_strings():
    config = suite_config_from_dict({"kappas": ["2", "1+1i"], "checks": ["symbolic"]})
    assert config.kappas == (2 + 0j, 1 + 1j)


def test_run_suite_small():
    config = suite_config_from_dict(
        {"checks": ["symbolic", "norm_growth"], "norm_growth_sizes": [8, 16]}
    )
    records = run_suite(config)
    assert records and all(r.passed for r in records)
    checks = {r.check for r in records}
    assert "symbolic_exact" in checks


def test_run_suite_parallel_matches_serial():
    config = suite_config_from_dict(
        {"checks": ["symbolic", "norm_growth", "unitarity"], "norm_growth_sizes": [8, 16]}
    )
    serial = {(r.check, r.residual) for r in run_suite(config, jobs=1)}
    parallel = {(r.check, r.residual) for r in run_suite(config, jobs=4)}
    assert serial == parallel


def test_standard_generators():
    assert standard_generator("upwind", 16, L).dim == 16
    assert standard_generator("rot2d", 8, L).dim == 64
    assert standard_generator("rot3d", 4, L).dim == 64
    with pytest.raises(ValueError):
        standard_generator("bogus", 8, L)


def test_default_config_tolerances():
    config = SuiteConfig()
    assert config.tolerance("logrep") == 1e-8
    assert config.tolerance("series") == 1e-10
