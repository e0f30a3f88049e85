"""Matrix functional calculus: exp, both logarithms, resolvent, spectrum."""

import math

import numpy as np
import pytest

from rotlog.funcalc import (
    BranchCutError,
    ContourError,
    ResolventError,
    branch_cut_check,
    expm,
    logm_contour,
    logm_principal,
    resolvent,
    spectrum,
)
from rotlog.gridops import make_grid, operator_norm, upwind_derivative


def _series_expm(A, terms=30):
    """Brute-force oracle: partial sums of the defining power series."""
    out = np.eye(A.shape[0], dtype=complex)
    term = np.eye(A.shape[0], dtype=complex)
    for k in range(1, terms + 1):
        term = term @ A / k
        out += term
    return out


def _random_skew(rng, n):
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (G - G.conj().T) / 2.0


# ---------------------------------------------------------------------------
# expm
# ---------------------------------------------------------------------------

def test_expm_zero():
    np.testing.assert_array_equal(expm(np.zeros((3, 3))), np.eye(3))


def test_expm_diagonal():
    theta = np.array([0.3, -1.2, 2.5])
    E = expm(np.diag(1j * theta))
    np.testing.assert_allclose(np.diag(E), np.exp(1j * theta), atol=1e-14)


def test_expm_rotation_block_closed_form():
    theta = 0.7
    A = np.array([[0.0, -theta], [theta, 0.0]])
    expected = np.array(
        [[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]]
    )
    np.testing.assert_allclose(expm(A), expected, atol=1e-14)
    np.testing.assert_allclose(expm(A), _series_expm(A), atol=1e-14)


def test_expm_series_oracle_random():
    rng = np.random.default_rng(2)
    for _ in range(5):
        A = 0.5 * _random_skew(rng, 6)
        np.testing.assert_allclose(expm(A), _series_expm(A, terms=40), atol=1e-13)


def test_expm_skew_gives_unitary():
    rng = np.random.default_rng(4)
    A = _random_skew(rng, 16)
    U = expm(A)
    assert np.linalg.norm(U @ U.conj().T - np.eye(16), 2) <= 1e-12


def test_expm_rejects_nonfinite():
    with pytest.raises(ValueError):
        expm(np.array([[np.nan, 0.0], [0.0, 1.0]]))
    with pytest.raises(OverflowError):
        expm(np.array([[1e300, 0.0], [0.0, 1.0]]))


# ---------------------------------------------------------------------------
# principal logarithm
# ---------------------------------------------------------------------------

def test_logm_identity():
    np.testing.assert_allclose(logm_principal(np.eye(4)), np.zeros((4, 4)), atol=1e-14)


def test_logm_positive_diagonal():
    M = np.diag([math.e, math.e**2])
    np.testing.assert_allclose(logm_principal(M), np.diag([1.0, 2.0]), atol=1e-13)


def test_logm_round_trip_random():
    rng = np.random.default_rng(6)
    for n in (4, 16, 64):
        M = expm(_random_skew(rng, n)) + 2.0 * np.eye(n)
        back = expm(logm_principal(M))
        assert np.linalg.norm(back - M, 2) <= 1e-10 * np.linalg.norm(M, 2)


def test_logm_branch_cut_rejected():
    with pytest.raises(BranchCutError):
        logm_principal(np.diag([-1.0, 2.0]))


# ---------------------------------------------------------------------------
# contour logarithm (independent oracle)
# ---------------------------------------------------------------------------

def test_contour_scalar_cases():
    assert abs(logm_contour(np.array([[2.0]]))[0, 0] - math.log(2.0)) <= 1e-10
    np.testing.assert_allclose(logm_contour(np.eye(3)), np.zeros((3, 3)), atol=1e-10)


def test_contour_agrees_with_principal():
    rng = np.random.default_rng(8)
    for _ in range(5):
        M = expm(_random_skew(rng, 6)) + 2.0 * np.eye(6)
        diff = np.linalg.norm(logm_contour(M) - logm_principal(M), 2)
        assert diff <= 1e-8


def test_contour_complex_spectrum():
    M = np.diag([1.0 + 2.0j, 3.0 - 1.0j, 0.5])
    L = logm_contour(M)
    np.testing.assert_allclose(np.diag(L), np.log(np.diag(M)), atol=1e-10)


def test_contour_geometry_error():
    # admissible eigenvalues that no cut-avoiding circle can enclose
    with pytest.raises(ContourError):
        logm_contour(np.diag([-1.0 + 0.5j, -1.0 - 0.5j]))


def test_contour_rejects_cut():
    with pytest.raises(BranchCutError):
        logm_contour(np.diag([-2.0, 1.0]))


# ---------------------------------------------------------------------------
# resolvent
# ---------------------------------------------------------------------------

def test_resolvent_simple():
    np.testing.assert_allclose(resolvent(np.zeros((3, 3)), 2.0), 0.5 * np.eye(3), atol=1e-15)
    np.testing.assert_allclose(resolvent(np.eye(2), 3.0), 0.5 * np.eye(2), atol=1e-15)


def test_resolvent_upwind_contraction_bound():
    D = upwind_derivative(make_grid(1, 64, math.pi), "x")
    R = resolvent(D, 1.0)
    assert operator_norm(R) <= 1.0 + 1e-9


def test_resolvent_power_bound():
    D = upwind_derivative(make_grid(1, 32, math.pi), "x")
    for lam in (0.5, 1.0, 2.0):
        R = resolvent(D, lam)
        Rk = np.eye(32, dtype=complex)
        for n in range(1, 5):
            Rk = Rk @ R
            assert operator_norm(Rk) <= (1.0 / lam) ** n * (1.0 + 1e-9)


def test_resolvent_identity_property():
    rng = np.random.default_rng(10)
    A = rng.standard_normal((8, 8))
    l1, l2 = 5.0 + 1.0j, 7.0 - 2.0j
    R1, R2 = resolvent(A, l1), resolvent(A, l2)
    lhs = R1 - R2
    rhs = (l2 - l1) * (R1 @ R2)
    assert np.linalg.norm(lhs - rhs, 2) <= 1e-9 * max(1.0, np.linalg.norm(lhs, 2))


def test_resolvent_singular_rejected():
    with pytest.raises(ResolventError):
        resolvent(np.eye(3), 1.0)
    with pytest.raises(ResolventError):
        resolvent(np.diag([1.0, 2.0]), 1.0 + 1e-14)


# ---------------------------------------------------------------------------
# spectrum and branch-cut geometry
# ---------------------------------------------------------------------------

def test_spectrum_diagonal():
    s = spectrum(np.diag([1.0, 2.0, 3.0]), source="diag")
    np.testing.assert_allclose(sorted(s.eigenvalues.real), [1.0, 2.0, 3.0], atol=1e-12)
    assert s.source == "diag"


def test_spectrum_skew_on_imaginary_axis():
    rng = np.random.default_rng(12)
    s = spectrum(_random_skew(rng, 20))
    assert np.abs(s.eigenvalues.real).max() <= 1e-10


def test_spectrum_unitary_on_circle():
    rng = np.random.default_rng(14)
    s = spectrum(expm(_random_skew(rng, 20)))
    assert np.abs(np.abs(s.eigenvalues) - 1.0).max() <= 1e-10


def test_branch_cut_shifted_unitary():
    rng = np.random.default_rng(16)
    U = expm(_random_skew(rng, 32))
    report = branch_cut_check(U + 2.0 * np.eye(32))
    assert report.admissible
    assert report.min_distance >= 1.0 - 1e-9


def test_branch_cut_kappa_zero_rotation_pi():
    # a rotation block through pi has eigenvalue -1, exactly on the cut
    U = np.array([[math.cos(math.pi), -math.sin(math.pi)],
                  [math.sin(math.pi), math.cos(math.pi)]])
    report = branch_cut_check(U)
    assert not report.admissible
    assert report.min_distance <= 1e-12


def test_branch_cut_identity_shift():
    for kappa in (0.0, 1.0, 3.0):
        report = branch_cut_check(np.eye(5) + kappa * np.eye(5))
        assert report.min_distance == pytest.approx(1.0 + kappa, abs=1e-12)
