"""Evolution families and the logarithmic representation of their generators.

For a time-independent generator A the two-parameter family U(t,s) =
expm((t-s) A) satisfies the group laws U(t,r)U(r,s) = U(t,s), U(s,s) = I.
With a nonzero shift constant kappa the bounded operator

    a(t,s) = Log(U(t,s) + kappa I)

recovers the (possibly norm-growing) generator through

    A = (I + kappa U(s,t)) d/dt a(t,s),

and U itself is rebuilt from the convergent series sum_n a^n/n! - kappa I.
This module computes a(t,s) and verifies the identity, its product and sum
perturbations, the series reconstruction, and the failure of the semigroup
property for exp(a) when kappa != 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from . import extprec
from .funcalc import (
    BranchCutError,
    BranchCutReport,
    _logm_schur,
    branch_cut_check,
    expm,
    logm_principal,
)
from .gridops import Grid, OperatorMatrix, as_matrix, commutation_defect

_EPS = float(np.finfo(np.float64).eps)

COMMUTATION_TOL = 1e-10


class CommutationError(ValueError):
    """A factor assumed to commute with the evolution operator does not."""


def _opnorm(A: np.ndarray) -> float:
    return float(np.linalg.norm(A, 2))


@dataclass(frozen=True)
class IdentityResidual:
    """Outcome of one operator-identity check (operator-norm residual)."""

    lhs_label: str
    rhs_label: str
    residual: float
    tolerance: float
    passed: bool
    info: Mapping[str, float] | None = None

    @classmethod
    def check(cls, lhs_label, rhs_label, residual, tolerance, info=None) -> "IdentityResidual":
        residual = float(residual)
        tolerance = float(tolerance)
        return cls(lhs_label, rhs_label, residual, tolerance, residual <= tolerance, info)


class EvolutionFamily:
    """U(t,s) = expm((t-s) A) for a fixed generator A on [-T, +T].

    The family is immutable apart from an internal exponential cache keyed by
    t-s; all verification operations on it are pure.
    """

    def __init__(self, generator, horizon: float = 1.0, label: str | None = None):
        if isinstance(generator, OperatorMatrix):
            self.generator = generator
        else:
            self.generator = OperatorMatrix(None, np.asarray(generator), label or "generator")
        if label is not None:
            self.generator.label = label
        if not horizon > 0:
            raise ValueError("horizon must be positive")
        self.horizon = float(horizon)
        self._cache: dict[float, np.ndarray] = {}

    @property
    def matrix(self) -> np.ndarray:
        return self.generator.entries

    @property
    def dim(self) -> int:
        return self.generator.dim

    def _check_times(self, *times: float):
        for v in times:
            if abs(v) > self.horizon * (1.0 + 1e-12):
                raise ValueError(f"time {v} outside the interval [-{self.horizon}, {self.horizon}]")

    def evolution_matrix(self, t: float, s: float) -> np.ndarray:
        self._check_times(t, s)
        dt = float(t) - float(s)
        U = self._cache.get(dt)
        if U is None:
            U = expm(dt * self.matrix)
            U.setflags(write=False)
            self._cache[dt] = U
        return U

    def evolution(self, t: float, s: float) -> OperatorMatrix:
        return OperatorMatrix(
            self.generator.grid,
            self.evolution_matrix(t, s),
            label=f"U({t:g},{s:g}) of {self.generator.label}",
        )


def evolution(family: EvolutionFamily, t: float, s: float) -> OperatorMatrix:
    """The two-parameter group element U(t,s); U(s,s) is the identity."""
    return family.evolution(t, s)


@dataclass(frozen=True)
class LogRep:
    """a(t,s) = Log(U(t,s) + kappa I) plus its admissibility report."""

    kappa: complex
    t: float
    s: float
    a_matrix: OperatorMatrix
    branch_report: BranchCutReport
    u_matrix: OperatorMatrix


def log_representation(family: EvolutionFamily, t: float, s: float, kappa: complex) -> LogRep:
    """Compute the bounded logarithm a(t,s); raises BranchCutError when the
    shifted spectrum touches the cut (e.g. kappa = 0 with a rotation by pi)."""
    U = family.evolution_matrix(t, s)
    B = U + complex(kappa) * np.eye(family.dim)
    report = branch_cut_check(B)
    if not report.admissible:
        raise BranchCutError(
            f"kappa = {kappa} is inadmissible (cut distance {report.min_distance:.3e})",
            report,
        )
    a = _logm_schur(B)
    grid = family.generator.grid
    return LogRep(
        kappa=complex(kappa),
        t=float(t),
        s=float(s),
        a_matrix=OperatorMatrix(grid, a, label=f"Log(U({t:g},{s:g}) + {kappa}I)"),
        branch_report=report,
        u_matrix=OperatorMatrix(grid, U, label=f"U({t:g},{s:g})"),
    )


def _require_commuting(label_a: str, A: np.ndarray, label_b: str, B: np.ndarray):
    defect = commutation_defect(A, B)
    if defect > COMMUTATION_TOL:
        raise CommutationError(
            f"{label_a} does not commute with {label_b} "
            f"(defect {defect:.3e} > {COMMUTATION_TOL}); the factor must lie in the "
            "commuting bounded algebra for the representation to apply"
        )


def dt_log_representation(family: EvolutionFamily, t: float, s: float, kappa: complex,
                          method: str = "exact", fd_step: float = 1e-5) -> OperatorMatrix:
    """d/dt Log(U(t,s) + kappa I).

    exact:   (U + kappa I)^(-1) A U, valid because A commutes with U
             (commutation is verified, not assumed).
    central-difference:  Richardson-extrapolated central differences of
             a(t,s) with step fd_step; cross-check for the exact form.
    """
    kappa = complex(kappa)
    if method == "exact":
        A = np.asarray(family.matrix, dtype=complex)
        U = family.evolution_matrix(t, s)
        _require_commuting("the generator", A, "U(t,s)", U)
        B = U + kappa * np.eye(family.dim)
        report = branch_cut_check(B)
        if not report.admissible:
            raise BranchCutError(
                f"kappa = {kappa} is inadmissible (cut distance {report.min_distance:.3e})",
                report,
            )
        out = np.linalg.solve(B, A @ U)
    elif method == "central-difference":
        def a_of(tt: float) -> np.ndarray:
            return log_representation(family, tt, s, kappa).a_matrix.entries

        h = fd_step
        coarse = (a_of(t + h) - a_of(t - h)) / (2.0 * h)
        fine = (a_of(t + h / 2.0) - a_of(t - h / 2.0)) / h
        out = (4.0 * fine - coarse) / 3.0
    else:
        raise ValueError(f"method must be 'exact' or 'central-difference', not {method!r}")
    return OperatorMatrix(family.generator.grid, out, label=f"∂t Log(U(t,s) + {kappa}I)")


def _reconstruction_residual(A: np.ndarray, L: np.ndarray | None, dt: float,
                             kappa: complex, U: np.ndarray, Us: np.ndarray,
                             tol: float) -> tuple[float, bool]:
    """Residual of (I + kappa U(s,t)) L dt_a against L A, with precision escalation.

    Returns (residual, relative): relative is False only in the degenerate
    L A = 0 case, where the absolute residual is reported.  When the
    predicted double-precision evaluation noise (eps scaled by the backward
    factor kappa U(s,t)) exceeds tol/10, the whole chain is recomputed in
    long double so the reported residual reflects the identity rather than
    round-off.
    """
    n = A.shape[0]
    I = np.eye(n)
    dta = np.linalg.solve(U + kappa * I, A @ U)
    ldta = dta if L is None else L @ dta
    lhs = ldta + kappa * (Us @ ldta)
    target = A if L is None else L @ A
    denom = _opnorm(target)
    if denom == 0.0:
        return _opnorm(lhs), False
    residual = _opnorm(lhs - target) / denom
    # noise floor estimate uses cheap Frobenius norms (conservative upper bounds)
    fro = lambda X: float(np.linalg.norm(X, "fro"))
    noise = _EPS * (1.0 + abs(kappa) * fro(Us)) * max(fro(ldta), 1.0) / denom
    if noise > tol / 10.0 and extprec.EPS_LONG < _EPS:
        Al = A.astype(np.clongdouble)
        Il = np.eye(n, dtype=np.clongdouble)
        kl = np.clongdouble(kappa)
        Ul = extprec.expm(np.clongdouble(dt) * Al)
        Usl = extprec.expm(-np.clongdouble(dt) * Al)
        dtal = extprec.solve(Ul + kl * Il, Al @ Ul)
        ldtal = dtal if L is None else L.astype(np.clongdouble) @ dtal
        lhsl = ldtal + kl * (Usl @ ldtal)
        targetl = Al if L is None else L.astype(np.clongdouble) @ Al
        residual = _opnorm((lhsl - targetl).astype(complex)) / denom
    return residual, True


def reconstruct_generator(family: EvolutionFamily, t: float, s: float, kappa: complex,
                          tol: float = 1e-8) -> IdentityResidual:
    """Check A = (I + kappa U(s,t)) d/dt Log(U(t,s) + kappa I).

    Relative operator-norm residual against ||A|| (absolute for A = 0).
    """
    kappa = complex(kappa)
    A = np.asarray(family.matrix, dtype=complex)
    U = family.evolution_matrix(t, s)
    Us = family.evolution_matrix(s, t)
    _require_commuting("the generator", A, "U(t,s)", U)
    report = branch_cut_check(U + kappa * np.eye(family.dim))
    if not report.admissible:
        raise BranchCutError(
            f"kappa = {kappa} is inadmissible (cut distance {report.min_distance:.3e})", report
        )
    residual, relative = _reconstruction_residual(A, None, t - s, kappa, U, Us, tol)
    return IdentityResidual.check(
        lhs_label=f"(I + {kappa}·U(s,t)) ∂t Log(U(t,s) + {kappa}I)",
        rhs_label=family.generator.label,
        residual=residual,
        tolerance=tol,
        info={"relative": float(relative)},
    )


def product_perturbation(L, family: EvolutionFamily, t: float, s: float, kappa: complex,
                         tol: float = 1e-8) -> IdentityResidual:
    """Check L A = (I + kappa U(s,t)) d/dt [L Log(U(t,s) + kappa I)].

    L must be time-independent and commute with U(t,s) (verified to 1e-10);
    this is the product form that realizes mixed terms like r_i d_j.
    """
    kappa = complex(kappa)
    Lm = np.asarray(as_matrix(L), dtype=complex)
    A = np.asarray(family.matrix, dtype=complex)
    U = family.evolution_matrix(t, s)
    Us = family.evolution_matrix(s, t)
    label_l = getattr(L, "label", "L")
    _require_commuting(label_l, Lm, "U(t,s)", U)
    report = branch_cut_check(U + kappa * np.eye(family.dim))
    if not report.admissible:
        raise BranchCutError(
            f"kappa = {kappa} is inadmissible (cut distance {report.min_distance:.3e})", report
        )
    residual, relative = _reconstruction_residual(A, Lm, t - s, kappa, U, Us, tol)
    return IdentityResidual.check(
        lhs_label=f"(I + {kappa}·U(s,t)) ∂t [{label_l}·Log(U + {kappa}I)]",
        rhs_label=f"{label_l}·{family.generator.label}",
        residual=residual,
        tolerance=tol,
        info={"relative": float(relative)},
    )


def series_reconstruction(rep: LogRep, n_terms: int | None = None, tol: float = 1e-10,
                          term_cutoff: float = 1e-16) -> IdentityResidual:
    """Check U(t,s) = sum_n a^n/n! - kappa I by direct series summation.

    With n_terms None the truncation order is chosen by the term-norm cutoff
    ||a^N/N!|| < term_cutoff; the residual is the absolute operator norm of
    the difference (||U|| is O(1) for the families under test).
    """
    a = np.asarray(rep.a_matrix.entries, dtype=complex)
    U = np.asarray(rep.u_matrix.entries, dtype=complex)
    n = a.shape[0]
    total = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    used = 0
    cap = n_terms if n_terms is not None else 400
    for k in range(1, cap + 1):
        term = term @ a / k
        total += term
        used = k
        # Frobenius dominates the spectral norm, so the cutoff is conservative
        if n_terms is None and float(np.linalg.norm(term, "fro")) < term_cutoff:
            break
    residual = _opnorm((total - rep.kappa * np.eye(n)) - U)
    return IdentityResidual.check(
        lhs_label=f"Σ a^n/n! - {rep.kappa}I (N={used})",
        rhs_label=f"U({rep.t:g},{rep.s:g})",
        residual=residual,
        tolerance=tol,
        info={"terms": float(used)},
    )


@dataclass(frozen=True)
class SemigroupCheck:
    """Violation of the semigroup law by exp(a) next to the U control."""

    violation: IdentityResidual
    control: IdentityResidual

    @property
    def violation_detected(self) -> bool:
        return self.violation.residual > self.violation.tolerance


def semigroup_violation_of_exp_a(family: EvolutionFamily, kappa: complex,
                                 times: Sequence[float] = (0.4, 0.2, 0.0),
                                 detect_threshold: float = 1e-6,
                                 control_tol: float = 1e-10) -> SemigroupCheck:
    """exp(a(t,r)) exp(a(r,s)) differs from exp(a(t,s)) whenever kappa != 0.

    The violation record is expected NOT to pass (its residual should exceed
    detect_threshold); the paired control verifies that U itself satisfies
    the semigroup law to control_tol.
    """
    t, r, s = map(float, times)
    kappa = complex(kappa)
    if kappa == 0:
        raise BranchCutError("the semigroup-violation check requires kappa != 0", None)
    exp_a = {
        pair: expm(log_representation(family, *pair, kappa).a_matrix.entries)
        for pair in ((t, r), (r, s), (t, s))
    }
    violation = _opnorm(exp_a[(t, r)] @ exp_a[(r, s)] - exp_a[(t, s)])
    U_tr = family.evolution_matrix(t, r)
    U_rs = family.evolution_matrix(r, s)
    U_ts = family.evolution_matrix(t, s)
    control = _opnorm(U_tr @ U_rs - U_ts)
    return SemigroupCheck(
        violation=IdentityResidual.check(
            "exp(a(t,r))·exp(a(r,s))", "exp(a(t,s))", violation, detect_threshold
        ),
        control=IdentityResidual.check("U(t,r)·U(r,s)", "U(t,s)", control, control_tol),
    )


# ---------------------------------------------------------------------------
# sum decomposition of the rotation generator
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SumDecomposition:
    """Three-term reconstruction of x d_y - y d_x plus per-term integral bounds."""

    total: IdentityResidual
    term_bounds: tuple[IdentityResidual, ...]


def _richardson_dt(f: Callable[[float], np.ndarray], t: float, h: float) -> np.ndarray:
    coarse = (f(t + h) - f(t - h)) / (2.0 * h)
    fine = (f(t + h / 2.0) - f(t - h / 2.0)) / h
    return (4.0 * fine - coarse) / 3.0


def sum_decomposition(grid2d: Grid, t: float, s: float, kappa: complex,
                      tol: float = 1e-5, fd_step: float = 1e-4,
                      quad_nodes: int = 16) -> SumDecomposition:
    """Rebuild the rotation generator from shift-group logarithms.

    x D_y - y D_x equals T1 + T2 + T3 with

        T1 = P(t) d/dt [ x (Log(e^{(t-s)Dy} + kI) - Log(e^{-(t-s)Dx} + kI)) ]
        T2 = P(t) d/dt [ (x+y) Log(e^{-(t-s)Dx} + kI) ]
        T3 = (Q(t) - P(t)) d/dt [ y Log(e^{-(t-s)Dx} + kI) ]

    where P(t) = I + k e^{(s-t)Dy} and Q(t) = I + k e^{(t-s)Dx}; the first
    piece represents x D_y through the forward y-shift, the rest move -y D_x
    into the same bounded-prefactor form.  Time derivatives are Richardson
    central differences (the identity itself is exact; the residual is
    differencing-limited).  Each term also gets the integrated boundedness
    check: || int_s^t term dtau ||  <=  sup ||G|| * || bracket(t) - bracket(s) ||.
    """
    if grid2d.dim != 2:
        raise ValueError("sum decomposition is formulated on a 2D grid")
    kappa = complex(kappa)
    if kappa == 0:
        raise BranchCutError("kappa must be nonzero", None)
    from .gridops import angular_momentum_matrix, make_grid, spectral_derivative

    n = grid2d.n
    line = make_grid(1, n, grid2d.half_width)
    D1 = spectral_derivative(line, "x").entries
    I_n = np.eye(n)
    I_N = np.eye(n * n)
    x_flat = grid2d.coordinates("x")
    y_flat = grid2d.coordinates("y")

    block_cache: dict[tuple[str, float], np.ndarray] = {}

    def shift(sign: float, dt: float) -> np.ndarray:
        key = ("f" if sign > 0 else "b", dt)
        out = block_cache.get(key)
        if out is None:
            out = expm(sign * dt * D1)
            block_cache[key] = out
        return out

    # Log(I (x) M + kappa I) = I (x) Log(M + kappa I) exactly (block-diagonal
    # principal logarithm), so the logs cost n x n instead of n^2 x n^2
    log_cache: dict[tuple[str, float], np.ndarray] = {}

    def G1(tau: float) -> np.ndarray:
        key = ("y", tau)
        out = log_cache.get(key)
        if out is None:
            out = np.kron(I_n, logm_principal(shift(+1.0, tau - s) + kappa * I_n))
            log_cache[key] = out
        return out

    def G2(tau: float) -> np.ndarray:
        key = ("x", tau)
        out = log_cache.get(key)
        if out is None:
            out = np.kron(logm_principal(shift(-1.0, tau - s) + kappa * I_n), I_n)
            log_cache[key] = out
        return out

    def P(tau: float) -> np.ndarray:
        return I_N + kappa * np.kron(I_n, shift(+1.0, s - tau))

    def Q(tau: float) -> np.ndarray:
        return I_N + kappa * np.kron(shift(+1.0, tau - s), I_n)

    brackets = (
        lambda tau: x_flat[:, None] * (G1(tau) - G2(tau)),
        lambda tau: (x_flat + y_flat)[:, None] * G2(tau),
        lambda tau: y_flat[:, None] * G2(tau),
    )
    prefactors = (P, P, lambda tau: Q(tau) - P(tau))

    terms = [
        pre(t) @ _richardson_dt(br, t, fd_step) for pre, br in zip(prefactors, brackets)
    ]
    target = angular_momentum_matrix(grid2d, "z").entries
    residual = _opnorm(sum(terms) - target) / _opnorm(target)
    total = IdentityResidual.check(
        "T1 + T2 + T3 (shift-group logarithms)", "x∂y - y∂x", residual, tol
    )

    bounds = []
    if t != s:
        lo, hi = sorted((s, t))
        nodes, weights = np.polynomial.legendre.leggauss(quad_nodes)
        taus = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
        scale = 0.5 * (hi - lo)
        for k, (pre, br) in enumerate(zip(prefactors, brackets), start=1):
            integral = np.zeros((n * n, n * n), dtype=complex)
            sup_g = 0.0
            for w, tau in zip(weights, taus):
                g = pre(tau)
                sup_g = max(sup_g, _opnorm(g))
                dbr = (br(tau + fd_step) - br(tau - fd_step)) / (2.0 * fd_step)
                integral += w * (g @ dbr)
            integral *= scale
            bound = sup_g * _opnorm(br(hi) - br(lo))
            bounds.append(
                IdentityResidual.check(
                    f"‖∫ term {k} dτ‖", "sup‖G‖·‖bracket(t) - bracket(s)‖",
                    _opnorm(integral), bound,
                )
            )
    else:
        for k in range(1, 4):
            bounds.append(IdentityResidual.check(f"‖∫ term {k} dτ‖", "0 (t = s)", 0.0, 0.0))
    return SumDecomposition(total=total, term_bounds=tuple(bounds))
