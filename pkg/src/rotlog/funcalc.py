"""Dense matrix functional calculus.

Exponential and principal logarithm use the standard backward-stable
double-precision schedules (order-13 Pade scaling-and-squaring for exp,
complex Schur form with inverse scaling-and-squaring for log) as provided
by scipy.  The holomorphic-calculus contour integral

    Log(M) = (1/2 pi i) \oint Log(lambda) (lambda I - M)^(-1) d lambda

is implemented here from scratch as an independent validation oracle and is
never used as the default path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .gridops import as_matrix


class BranchCutError(ValueError):
    """Spectrum too close to the ray (-inf, 0] for a principal logarithm."""

    def __init__(self, message: str, report: "BranchCutReport | None" = None):
        super().__init__(message)
        self.report = report


class ContourError(RuntimeError):
    """No admissible circular contour, or the quadrature failed to converge."""


class ResolventError(RuntimeError):
    """(lambda I - M) is singular or numerically singular."""


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (with multiplicity) of an operator, tagged with its label."""

    eigenvalues: np.ndarray
    source: str = "matrix"


@dataclass(frozen=True)
class BranchCutReport:
    """Distance of a spectrum to the branch cut of the principal logarithm."""

    min_distance: float
    admissible: bool
    eps_cut: float


def expm(M) -> np.ndarray:
    """Matrix exponential (Pade scaling-and-squaring)."""
    A = as_matrix(M)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix exponential requires finite entries")
    E = scipy.linalg.expm(A)
    if not np.all(np.isfinite(E)):
        raise OverflowError("matrix exponential overflowed (norm beyond the scaling cap)")
    return E


def spectrum(M, source: str | None = None) -> Spectrum:
    """Eigenvalues read off the diagonal of the complex Schur factor."""
    A = as_matrix(M)
    T, _ = scipy.linalg.schur(A.astype(complex), output="complex")
    label = source if source is not None else getattr(M, "label", "matrix")
    return Spectrum(eigenvalues=np.diag(T).copy(), source=label)


def _cut_distance(eigenvalues: np.ndarray) -> float:
    """Distance from the closest eigenvalue to the ray (-inf, 0]."""
    re = eigenvalues.real
    im = eigenvalues.imag
    d = np.where(re > 0, np.hypot(re, im), np.abs(im))
    return float(d.min())


def branch_cut_check(M, eps_cut: float | None = None) -> BranchCutReport:
    """Admissibility of the principal logarithm for M.

    eps_cut defaults to 1e-6 * (1 + ||M||_F): the logarithm is declared
    admissible only with a concrete margin from the cut, not merely
    nonsingularity.
    """
    A = as_matrix(M)
    if eps_cut is None:
        eps_cut = 1e-6 * (1.0 + float(np.linalg.norm(A, "fro")))
    d = _cut_distance(np.linalg.eigvals(A))
    return BranchCutReport(min_distance=d, admissible=d > eps_cut, eps_cut=float(eps_cut))


def _logm_schur(A: np.ndarray) -> np.ndarray:
    """Principal logarithm without the admissibility check (internal)."""
    F, errest = scipy.linalg.logm(A.astype(complex), disp=False)
    scale = 1.0 + float(np.linalg.norm(A, "fro"))
    if not np.all(np.isfinite(F)) or errest > 1e-6 * scale:
        raise BranchCutError(
            f"principal logarithm is unreliable (error estimate {errest:.3e})"
        )
    return np.asarray(F)


def logm_principal(M, eps_cut: float | None = None) -> np.ndarray:
    """Principal matrix logarithm (Schur + inverse scaling-and-squaring).

    Raises BranchCutError when an eigenvalue sits within eps_cut of the ray
    (-inf, 0]; the round trip expm(logm_principal(M)) recovers M to ~1e-10
    relative for well-separated spectra.
    """
    A = as_matrix(M)
    report = branch_cut_check(A, eps_cut)
    if not report.admissible:
        raise BranchCutError(
            f"eigenvalue within {report.eps_cut:.3e} of the branch cut "
            f"(closest distance {report.min_distance:.3e})",
            report,
        )
    return _logm_schur(A)


def resolvent(M, lam: complex) -> np.ndarray:
    """(lambda I - M)^(-1) by LU factorization with partial pivoting.

    Raises ResolventError when lambda is (numerically) in the spectrum,
    judged by an exact 1-norm condition number above 1e12.
    """
    A = as_matrix(M)
    n = A.shape[0]
    B = lam * np.eye(n) - A
    try:
        X = np.linalg.solve(B, np.eye(n, dtype=complex))
    except np.linalg.LinAlgError as exc:
        raise ResolventError(f"lambda = {lam} is in the spectrum: {exc}") from exc
    if not np.all(np.isfinite(X)):
        raise ResolventError(f"lambda = {lam} is numerically in the spectrum")
    cond1 = float(np.linalg.norm(B, 1) * np.linalg.norm(X, 1))
    if cond1 > 1e12:
        raise ResolventError(
            f"lambda = {lam} is spectrum-adjacent (condition estimate {cond1:.3e})"
        )
    return X


def _point_cut_distance(c: complex) -> float:
    return float(np.hypot(c.real, c.imag)) if c.real > 0 else abs(c.imag)


def _ternary_min(f, lo: float, hi: float, iters: int = 80) -> float:
    for _ in range(iters):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if f(m1) < f(m2):
            hi = m2
        else:
            lo = m1
    return 0.5 * (lo + hi)


def _contour_circle(eigenvalues: np.ndarray, radius_margin: float) -> tuple[complex, float]:
    """Center and radius of a spectrum-enclosing circle avoiding (-inf, 0].

    The center maximizes the slack dist(center, cut) - max|lambda - center|
    by coordinate-wise ternary search; the radius pads the enclosing one by
    radius_margin but never spends more than half the available slack, so
    the circle stays strictly clear of the cut.
    """
    def neg_slack(c: complex) -> float:
        return float(np.abs(eigenvalues - c).max()) - _point_cut_distance(c)

    spread = float(np.abs(eigenvalues).max()) + 1.0
    cx = float(eigenvalues.real.mean())
    cy = float(eigenvalues.imag.mean())
    for _ in range(8):
        cx = _ternary_min(lambda v: neg_slack(complex(v, cy)), cx - spread, cx + spread)
        cy = _ternary_min(lambda v: neg_slack(complex(cx, v)), cy - spread, cy + spread)
    center = complex(cx, cy)
    enclosing = float(np.abs(eigenvalues - center).max())
    slack = _point_cut_distance(center) - enclosing
    floor = 1e-6 * (1.0 + enclosing)
    if slack <= 2.0 * floor:
        raise ContourError(
            "spectrum geometry admits no circular contour avoiding the branch cut "
            f"(best center {center:.3e}, enclosing radius {enclosing:.3e}, slack {slack:.3e})"
        )
    pad = min(radius_margin * (1.0 + enclosing), 0.5 * slack)
    return center, enclosing + max(pad, floor)


def logm_contour(M, radius_margin: float = 0.1, tol: float = 1e-10,
                 max_nodes: int = 1 << 15) -> np.ndarray:
    """Principal logarithm via trapezoidal quadrature of the contour integral.

    Nodes on the circle are doubled until two successive quadratures agree to
    tol in the Frobenius norm (trapezoid rule converges geometrically for the
    periodic analytic integrand).  Validation oracle only: cost grows with
    the spectral spread.
    """
    A = as_matrix(M).astype(complex)
    eig = np.linalg.eigvals(A)
    report = branch_cut_check(A)
    if not report.admissible:
        raise BranchCutError("matrix is not admissible for a principal logarithm", report)
    c, R = _contour_circle(eig, radius_margin)
    n = A.shape[0]
    I = np.eye(n, dtype=complex)
    prev = None
    m = 32
    while m <= max_nodes:
        theta = 2.0 * np.pi * np.arange(m) / m
        lams = c + R * np.exp(1j * theta)
        F = np.zeros((n, n), dtype=complex)
        for lam in lams:
            # dlambda/(2 pi i) = (lam - c) dtheta / (2 pi)
            F += np.log(lam) * np.linalg.solve(lam * I - A, I) * (lam - c)
        F /= m
        if prev is not None and np.linalg.norm(F - prev, "fro") < tol:
            return F
        prev = F
        m *= 2
    raise ContourError(f"quadrature did not converge to {tol} within {max_nodes} nodes")
