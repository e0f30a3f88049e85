"""Evolution families, logarithmic representation, perturbation identities."""

import cmath
import math

import numpy as np
import pytest

from rotlog.funcalc import BranchCutError, expm
from rotlog.gridops import (
    angular_momentum_matrix,
    coordinate_operator,
    make_grid,
    spectral_derivative,
    upwind_derivative,
)
from rotlog.logrep import (
    CommutationError,
    EvolutionFamily,
    dt_log_representation,
    evolution,
    log_representation,
    product_perturbation,
    reconstruct_generator,
    semigroup_violation_of_exp_a,
    series_reconstruction,
    sum_decomposition,
)

L = math.pi


def rot2d_family(n=16, horizon=1.0):
    return EvolutionFamily(angular_momentum_matrix(make_grid(2, n, L), "z"), horizon=horizon)


def upwind_family(n=64, horizon=1.0):
    return EvolutionFamily(upwind_derivative(make_grid(1, n, L), "x"), horizon=horizon)


# ---------------------------------------------------------------------------
# evolution family basics
# ---------------------------------------------------------------------------

def test_group_properties():
    fam = rot2d_family()
    U = fam.evolution_matrix
    for t, r, s in ((0.5, 0.2, -0.1), (0.9, 0.4, 0.0), (0.3, -0.3, 0.6)):
        assert np.linalg.norm(U(t, r) @ U(r, s) - U(t, s), 2) <= 1e-10
    np.testing.assert_allclose(U(0.3, 0.3), np.eye(fam.dim), atol=1e-15)
    assert np.linalg.norm(U(0.7, 0.0) @ U(0.0, 0.7) - np.eye(fam.dim), 2) <= 1e-10


def test_skew_generator_gives_unitary_evolution():
    fam = rot2d_family()
    U = fam.evolution_matrix(0.6, 0.0)
    assert np.linalg.norm(U @ U.conj().T - np.eye(fam.dim), 2) <= 1e-12


def test_spectral_shift_translates_band_limited_fields():
    # e^{h d/dx} on trigonometric interpolants is exactly the one-node shift
    grid = make_grid(1, 32, L)
    fam = EvolutionFamily(spectral_derivative(grid, "x"), horizon=1.0)
    x = grid.axis_nodes()
    f = np.sin(2 * x) + 0.5 * np.cos(3 * x)
    shifted = fam.evolution_matrix(grid.spacing, 0.0) @ f
    np.testing.assert_allclose(shifted, np.roll(f, -1), atol=1e-11)


def test_interval_enforced():
    fam = rot2d_family(horizon=0.5)
    with pytest.raises(ValueError):
        fam.evolution_matrix(0.6, 0.0)
    with pytest.raises(ValueError):
        evolution(fam, 0.2, -0.7)


# ---------------------------------------------------------------------------
# the logarithm a(t,s)
# ---------------------------------------------------------------------------

def test_log_at_equal_times_is_scalar():
    fam = rot2d_family()
    for kappa in (2.0, 1.0 + 1.0j):
        rep = log_representation(fam, 0.4, 0.4, kappa)
        expected = cmath.log(1.0 + kappa) * np.eye(fam.dim)
        assert np.linalg.norm(rep.a_matrix.entries - expected, 2) <= 1e-12


def test_log_norm_bound():
    fam = rot2d_family()
    rep = log_representation(fam, 0.3, 0.0, 2.0)
    a_norm = np.linalg.norm(rep.a_matrix.entries, 2)
    u_norm = np.linalg.norm(rep.u_matrix.entries, 2)
    bound = math.log(u_norm + 2.0) + abs(math.log(rep.branch_report.min_distance)) + math.pi
    assert a_norm <= bound
    assert np.isfinite(a_norm)


def test_kappa_zero_on_cut_rejected():
    # theta = pi rotation block: U has eigenvalue -1, so kappa = 0 hits the cut
    block = np.array([[0.0, -1.0], [1.0, 0.0]])
    fam = EvolutionFamily(block, horizon=4.0)
    with pytest.raises(BranchCutError):
        log_representation(fam, math.pi, 0.0, 0.0)


# ---------------------------------------------------------------------------
# d/dt of the logarithm
# ---------------------------------------------------------------------------

def test_dt_zero_generator():
    fam = EvolutionFamily(np.zeros((4, 4)), horizon=1.0)
    for method in ("exact", "central-difference"):
        out = dt_log_representation(fam, 0.3, 0.0, 2.0, method=method)
        assert np.linalg.norm(out.entries, 2) <= 1e-10


def test_dt_scalar_closed_form():
    # 1x1 family: d/dt log(e^{iw(t-s)} + kappa) = iw e^{iw(t-s)}/(e^{iw(t-s)} + kappa)
    w, kappa, t = 1.3, 2.0, 0.45
    fam = EvolutionFamily(np.array([[1j * w]]), horizon=1.0)
    expected = 1j * w * cmath.exp(1j * w * t) / (cmath.exp(1j * w * t) + kappa)
    for method in ("exact", "central-difference"):
        got = dt_log_representation(fam, t, 0.0, kappa, method=method).entries[0, 0]
        assert abs(got - expected) <= 1e-9


def test_dt_methods_agree():
    fam = rot2d_family(horizon=1.2)
    exact = dt_log_representation(fam, 0.5, 0.0, 2.0, method="exact").entries
    fd = dt_log_representation(fam, 0.5, 0.0, 2.0, method="central-difference").entries
    assert np.linalg.norm(exact - fd, 2) <= 1e-6


def test_dt_methods_agree_upwind():
    fam = upwind_family(horizon=1.2)
    for dt in (0.1, 0.5):
        exact = dt_log_representation(fam, dt, 0.0, 2.0, method="exact").entries
        fd = dt_log_representation(fam, dt, 0.0, 2.0, method="central-difference").entries
        assert np.linalg.norm(exact - fd, 2) <= 1e-6


def test_dt_bad_method():
    with pytest.raises(ValueError):
        dt_log_representation(rot2d_family(), 0.2, 0.0, 2.0, method="magic")


# ---------------------------------------------------------------------------
# generator reconstruction
# ---------------------------------------------------------------------------

def test_reconstruct_rotation():
    fam = rot2d_family()
    for kappa in (2.0, 3.0, 1.0 + 1.0j):
        result = reconstruct_generator(fam, 0.3, 0.0, kappa)
        assert result.passed, result


def test_reconstruct_upwind_hard_cell():
    # t-s = 1.0 makes ||U(s,t)|| ~ 7e8; the residual evaluation escalates to
    # long double so the identity is still resolved below 1e-8
    fam = upwind_family()
    result = reconstruct_generator(fam, 1.0, 0.0, 2.0)
    assert result.passed, result
    assert result.residual <= 1e-8


def test_reconstruct_zero_generator_absolute():
    fam = EvolutionFamily(np.zeros((3, 3)), horizon=1.0)
    result = reconstruct_generator(fam, 0.5, 0.0, 2.0)
    assert result.residual == 0.0
    assert result.info["relative"] == 0.0


def test_reconstruct_inadmissible_kappa():
    block = np.array([[0.0, -1.0], [1.0, 0.0]])
    fam = EvolutionFamily(block, horizon=4.0)
    with pytest.raises(BranchCutError):
        reconstruct_generator(fam, math.pi, 0.0, 0.0)


# ---------------------------------------------------------------------------
# product perturbation
# ---------------------------------------------------------------------------

def test_product_with_identity_reduces_to_reconstruction():
    fam = rot2d_family()
    base = reconstruct_generator(fam, 0.3, 0.0, 2.0)
    via_l = product_perturbation(np.eye(fam.dim), fam, 0.3, 0.0, 2.0)
    assert abs(base.residual - via_l.residual) <= 1e-12


def test_product_coordinate_times_derivative():
    grid = make_grid(2, 16, L)
    X = coordinate_operator(grid, "x")
    fam = EvolutionFamily(spectral_derivative(grid, "y"), horizon=1.0)
    result = product_perturbation(X, fam, 0.3, 0.0, 2.0)
    assert result.passed, result


def test_product_noncommuting_rejected():
    grid = make_grid(2, 16, L)
    X = coordinate_operator(grid, "x")
    fam = EvolutionFamily(spectral_derivative(grid, "x"), horizon=1.0)
    with pytest.raises(CommutationError):
        product_perturbation(X, fam, 0.3, 0.0, 2.0)


# ---------------------------------------------------------------------------
# series reconstruction
# ---------------------------------------------------------------------------

def test_series_identity_case():
    fam = EvolutionFamily(np.zeros((3, 3)), horizon=1.0)
    rep = log_representation(fam, 0.2, 0.2, 2.0)
    result = series_reconstruction(rep)
    assert result.residual <= 1e-13


def test_series_rotation():
    rep = log_representation(rot2d_family(), 0.3, 0.0, 2.0)
    result = series_reconstruction(rep)
    assert result.passed
    assert result.residual <= 1e-10


def test_series_truncation_monotone_past_threshold():
    # strictly decreasing until the round-off floor (~1e-14) is reached
    rep = log_representation(rot2d_family(n=8), 0.3, 0.0, 2.0)
    residuals = [series_reconstruction(rep, n_terms=N).residual for N in (3, 5, 8, 10, 12)]
    assert all(b < a for a, b in zip(residuals, residuals[1:]))
    assert series_reconstruction(rep, n_terms=16).residual <= 1e-10


# ---------------------------------------------------------------------------
# semigroup violation of exp(a)
# ---------------------------------------------------------------------------

def test_semigroup_violation_rotation():
    check = semigroup_violation_of_exp_a(rot2d_family(), 2.0, (0.4, 0.15, 0.0))
    assert check.violation_detected
    assert check.violation.residual > 1e-3
    assert check.control.passed
    assert check.control.residual <= 1e-10


def test_semigroup_violation_trivial_family():
    # A = 0: each factor exp(a) = (1+kappa) I, so the defect is |kappa(1+kappa)|
    kappa = 2.0
    fam = EvolutionFamily(np.zeros((2, 2)), horizon=1.0)
    check = semigroup_violation_of_exp_a(fam, kappa, (0.4, 0.2, 0.0))
    assert check.violation.residual == pytest.approx(abs(kappa * (1 + kappa)), rel=1e-12)
    assert check.control.residual <= 1e-14


# ---------------------------------------------------------------------------
# sum decomposition
# ---------------------------------------------------------------------------

def test_sum_decomposition_reconstructs_rotation():
    grid = make_grid(2, 16, L)
    result = sum_decomposition(grid, 0.2, 0.0, 2.0)
    assert result.total.passed, result.total
    assert result.total.residual <= 1e-5
    assert len(result.term_bounds) == 3
    for bound in result.term_bounds:
        assert bound.passed, bound


def test_sum_decomposition_at_equal_times():
    grid = make_grid(2, 16, L)
    result = sum_decomposition(grid, 0.0, 0.0, 2.0)
    assert result.total.passed
    for bound in result.term_bounds:
        assert bound.residual == 0.0


def test_sum_decomposition_kappa_zero_rejected():
    with pytest.raises(BranchCutError):
        sum_decomposition(make_grid(2, 16, L), 0.2, 0.0, 0.0)


# ---------------------------------------------------------------------------
# boundedness contrast
# ---------------------------------------------------------------------------

def test_log_norm_flat_while_generator_grows():
    a_norms, gen_norms = [], []
    for n in (8, 16, 32):
        gen = angular_momentum_matrix(make_grid(2, n, L), "z")
        fam = EvolutionFamily(gen, horizon=1.0)
        rep = log_representation(fam, 0.3, 0.0, 2.0)
        a_norms.append(np.linalg.norm(rep.a_matrix.entries, 2))
        gen_norms.append(np.linalg.norm(gen.entries, 2))
    assert max(a_norms) / min(a_norms) < 2.0
    assert all(b / a >= 1.8 for a, b in zip(gen_norms, gen_norms[1:]))
