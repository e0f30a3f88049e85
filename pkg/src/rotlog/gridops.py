"""Periodic tensor-product grids and dense discretizations of the generators.

The torus [-L, L)^d stands in for R^d: differentiation by trigonometric
interpolation is exactly skew-adjoint and the shift groups it generates are
exactly unitary, while coordinate multiplication is a real diagonal matrix.
Test fields are Gaussians (times polynomials) narrow enough that the
periodic wrap-around is below the tolerances being verified.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import reduce
from typing import Mapping, Sequence

import numpy as np

AXIS_INDEX = {"x": 0, "y": 1, "z": 2}

# dense functional calculus (expm/logm) is kept to matrices of this size;
# larger 3D work goes through the matrix-free appliers below
DENSE_CAP = 4096


class PowerIterationError(RuntimeError):
    """Power iteration failed to reach the requested tolerance."""


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [-L, L) per axis with n (even) points."""

    dim: int
    n: int
    half_width: float

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, not {self.dim}")
        if self.n < 4 or self.n % 2:
            raise ValueError(f"n must be even and >= 4, not {self.n}")
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.n

    @property
    def size(self) -> int:
        return self.n**self.dim

    def axis_nodes(self) -> np.ndarray:
        """Node coordinates along one axis: -L + k*(2L/n)."""
        return -self.half_width + self.spacing * np.arange(self.n)

    def meshes(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays of shape (n,)*dim, 'ij' indexing."""
        nodes = self.axis_nodes()
        return np.meshgrid(*([nodes] * self.dim), indexing="ij")

    def coordinates(self, axis) -> np.ndarray:
        """Flat coordinate array for one axis, matching raveled field order."""
        return self.meshes()[_axis_index(axis, self.dim)].ravel()


def make_grid(dim: int, n: int, half_width: float) -> Grid:
    return Grid(dim, n, float(half_width))


def _axis_index(axis, dim: int) -> int:
    idx = AXIS_INDEX.get(axis, axis) if not isinstance(axis, (int, np.integer)) else int(axis)
    if not isinstance(idx, int) or not 0 <= idx < dim:
        raise ValueError(f"axis {axis!r} not valid for a {dim}-dimensional grid")
    return idx


@dataclass
class StateVector:
    """A complex field sampled on a grid, with the weighted L2 norm."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values).ravel()
        if self.values.shape != (self.grid.size,):
            raise ValueError(
                f"field has {self.values.size} samples, grid has {self.grid.size} nodes"
            )

    def norm(self) -> float:
        return float(np.sqrt(self.grid.spacing**self.grid.dim * np.sum(np.abs(self.values) ** 2)))

    def inner(self, other: "StateVector") -> complex:
        return complex(self.grid.spacing**self.grid.dim * np.vdot(self.values, other.values))


def field_norm(grid: Grid, values: np.ndarray) -> float:
    return float(np.sqrt(grid.spacing**grid.dim * np.sum(np.abs(values) ** 2)))


@dataclass
class OperatorMatrix:
    """Dense square matrix tagged with the grid it acts on (None = synthetic)."""

    grid: Grid | None
    entries: np.ndarray
    label: str = "matrix"

    def __post_init__(self):
        self.entries = np.asarray(self.entries)
        if self.entries.ndim != 2 or self.entries.shape[0] != self.entries.shape[1]:
            raise ValueError("operator entries must form a square matrix")
        if self.grid is not None and self.entries.shape[0] != self.grid.size:
            raise ValueError(
                f"matrix dimension {self.entries.shape[0]} != grid dimension {self.grid.size}"
            )
        self.entries.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def apply(self, u):
        if isinstance(u, StateVector):
            return StateVector(u.grid, self.entries @ u.values)
        return self.entries @ np.asarray(u).ravel()


def as_matrix(M) -> np.ndarray:
    """Accept either an OperatorMatrix or a bare ndarray."""
    return np.asarray(getattr(M, "entries", M))


def _require_dense(grid: Grid):
    if grid.size > DENSE_CAP:
        raise ValueError(
            f"dense assembly capped at dimension {DENSE_CAP}; "
            f"grid has {grid.size} nodes (use the matrix-free appliers)"
        )


# ---------------------------------------------------------------------------
# 1D building blocks
# ---------------------------------------------------------------------------

def _spectral_block(n: int, half_width: float) -> np.ndarray:
    """Periodic trigonometric differentiation matrix (n even, Nyquist zeroed).

    Circulant with first column c[m] = 0.5 (-1)^m cot(m h/2) scaled by pi/L;
    entries are filled antisymmetrically (c[n-m] = -c[m] exactly) so the
    matrix is exactly skew-symmetric in floating point.
    """
    h = 2.0 * np.pi / n
    c = np.zeros(n)
    for m in range(1, n // 2):
        v = 0.5 * (-1.0) ** m / np.tan(0.5 * m * h)
        c[m] = v
        c[n - m] = -v
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return c[idx] * (np.pi / half_width)


def _upwind_block(n: int, half_width: float) -> np.ndarray:
    """Forward difference (S - I)/h with S the one-step periodic shift."""
    h = 2.0 * half_width / n
    S = np.zeros((n, n))
    S[np.arange(n), (np.arange(n) + 1) % n] = 1.0
    return (S - np.eye(n)) / h


def _embed(grid: Grid, block: np.ndarray, axis_idx: int) -> np.ndarray:
    mats = [np.eye(grid.n)] * grid.dim
    mats[axis_idx] = block
    return reduce(np.kron, mats)


# ---------------------------------------------------------------------------
# operator constructors
# ---------------------------------------------------------------------------

def spectral_derivative(grid: Grid, axis="x") -> OperatorMatrix:
    """Exact differentiation of trigonometric interpolants along one axis.

    Diagonal in the discrete Fourier basis with eigenvalues i k pi/L for
    k = -n/2+1 .. n/2-1 and 0 at the Nyquist mode; exactly skew-symmetric.
    """
    _require_dense(grid)
    idx = _axis_index(axis, grid.dim)
    block = _spectral_block(grid.n, grid.half_width)
    name = "xyz"[idx]
    return OperatorMatrix(grid, _embed(grid, block, idx), label=f"spectral ∂{name}")


def upwind_derivative(grid: Grid, axis="x") -> OperatorMatrix:
    """Dissipative forward-difference derivative: Re<Mu, u> <= 0 for all u."""
    _require_dense(grid)
    idx = _axis_index(axis, grid.dim)
    block = _upwind_block(grid.n, grid.half_width)
    name = "xyz"[idx]
    return OperatorMatrix(grid, _embed(grid, block, idx), label=f"upwind ∂{name}")


def coordinate_operator(grid: Grid, axis="x") -> OperatorMatrix:
    """Real diagonal multiplication by the node coordinate; self-adjoint."""
    _require_dense(grid)
    idx = _axis_index(axis, grid.dim)
    name = "xyz"[idx]
    return OperatorMatrix(grid, np.diag(grid.coordinates(idx)), label=f"diag({name})")


_CYCLIC_AXES = {"x": ("y", "z"), "y": ("z", "x"), "z": ("x", "y")}


def angular_momentum_matrix(grid: Grid, axis="z") -> OperatorMatrix:
    """Real rotation generator r_i D_j - r_j D_i for the cyclic pair of axis.

    Exactly skew-symmetric: D_j acts within slices of constant r_i, so the
    diagonal coordinate factors commute entrywise with the tensor structure.
    """
    _require_dense(grid)
    axis = "xyz"[_axis_index(axis, 3)] if not isinstance(axis, str) else axis
    if grid.dim < 2:
        raise ValueError("rotation generators need a 2D or 3D grid")
    if grid.dim == 2 and axis != "z":
        raise ValueError("a 2D grid supports only the z rotation generator")
    i_name, j_name = _CYCLIC_AXES[axis]
    ri = grid.coordinates(i_name)
    rj = grid.coordinates(j_name)
    Di = spectral_derivative(grid, i_name).entries
    Dj = spectral_derivative(grid, j_name).entries
    M = ri[:, None] * Dj - rj[:, None] * Di
    return OperatorMatrix(grid, M, label=f"{i_name}∂{j_name} - {j_name}∂{i_name}")


# ---------------------------------------------------------------------------
# matrix-free application (for grids past the dense cap)
# ---------------------------------------------------------------------------

def axis_derivative_apply(grid: Grid, axis, values: np.ndarray) -> np.ndarray:
    """Apply the spectral derivative along one axis without assembling it."""
    idx = _axis_index(axis, grid.dim)
    block = _spectral_block(grid.n, grid.half_width)
    shaped = np.asarray(values).reshape((grid.n,) * grid.dim)
    out = np.tensordot(block, np.moveaxis(shaped, idx, 0), axes=(1, 0))
    return np.moveaxis(out, 0, idx).reshape(values.shape)


def angular_momentum_apply(grid: Grid, axis, values: np.ndarray) -> np.ndarray:
    """Matrix-free action of the rotation generator about one axis."""
    axis = "xyz"[_axis_index(axis, 3)] if not isinstance(axis, str) else axis
    if grid.dim < 2 or (grid.dim == 2 and axis != "z"):
        raise ValueError("rotation generators need a 2D grid (z) or a 3D grid")
    i_name, j_name = _CYCLIC_AXES[axis]
    flat = np.asarray(values).ravel()
    ri = grid.coordinates(i_name)
    rj = grid.coordinates(j_name)
    return ri * axis_derivative_apply(grid, j_name, flat) - rj * axis_derivative_apply(
        grid, i_name, flat
    )


# ---------------------------------------------------------------------------
# norms and structure checks
# ---------------------------------------------------------------------------

def operator_norm(M, rtol: float = 1e-10, max_iter: int = 10_000, seed: int = 0) -> float:
    """Spectral norm by power iteration on M*M.

    Converges when the Rayleigh quotient is stable to rtol; raises
    PowerIterationError after max_iter sweeps.  The estimate approaches the
    true norm from below.
    """
    A = as_matrix(M)
    if not np.any(A):
        return 0.0
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(A.shape[0]) + 1j * rng.standard_normal(A.shape[0])
    v /= np.linalg.norm(v)
    lam_old = 0.0
    AH = A.conj().T
    for _ in range(max_iter):
        w = A @ v
        lam = float(np.linalg.norm(w) ** 2)
        if lam == 0.0:
            # v happened to be in the kernel; restart from a fresh direction
            v = rng.standard_normal(A.shape[0]) + 1j * rng.standard_normal(A.shape[0])
            v /= np.linalg.norm(v)
            continue
        if abs(lam - lam_old) <= rtol * lam:
            return float(np.sqrt(lam))
        lam_old = lam
        bv = AH @ w
        v = bv / np.linalg.norm(bv)
    raise PowerIterationError(f"no convergence to rtol={rtol} within {max_iter} iterations")


def skew_defect(M) -> float:
    """||M + M*|| / ||M|| (zero for skew-adjoint operators)."""
    A = as_matrix(M)
    denom = np.linalg.norm(A, 2)
    if denom == 0:
        return 0.0
    return float(np.linalg.norm(A + A.conj().T, 2) / denom)


def commutation_defect(A, B) -> float:
    """||AB - BA||_F / (||A||_F ||B||_F) (zero iff the operators commute)."""
    A = as_matrix(A)
    B = as_matrix(B)
    denom = np.linalg.norm(A, "fro") * np.linalg.norm(B, "fro")
    if denom == 0:
        return 0.0
    return float(np.linalg.norm(A @ B - B @ A, "fro") / denom)


# ---------------------------------------------------------------------------
# test fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GaussianField:
    """Polynomial times isotropic Gaussian: p(r) * exp(-|r|^2 / (2 sigma^2)).

    poly maps exponent tuples (one entry per axis) to real coefficients.
    The default width sigma = L/7 keeps the boundary values of plain
    Gaussians near 2e-11 so periodic wrap-around stays below the identity
    tolerances.
    """

    sigma: float
    poly: Mapping[tuple[int, ...], float] = field(default_factory=lambda: {(): 1.0})

    def evaluate(self, *coords: np.ndarray) -> np.ndarray:
        r2 = sum(c**2 for c in coords)
        out = np.zeros_like(coords[0], dtype=float)
        for exps, coeff in self.poly.items():
            term = np.full_like(coords[0], float(coeff), dtype=float)
            for ax, e in enumerate(exps):
                if e:
                    term = term * coords[ax] ** e
            out += term
        return out * np.exp(-r2 / (2.0 * self.sigma**2))

    def sample(self, grid: Grid) -> np.ndarray:
        return self.evaluate(*grid.meshes()).ravel()

    def sample_rotated(self, grid: Grid, theta: float) -> np.ndarray:
        """Sample f∘R_theta on a 2D grid (R_theta counterclockwise)."""
        if grid.dim != 2:
            raise ValueError("rotated sampling is defined on 2D grids")
        X, Y = grid.meshes()
        xr = X * np.cos(theta) - Y * np.sin(theta)
        yr = X * np.sin(theta) + Y * np.cos(theta)
        return self.evaluate(xr, yr).ravel()

    def boundary_max(self, grid: Grid) -> float:
        """Largest |f| over the nodes on the domain boundary (wrap estimate)."""
        mesh = grid.meshes()
        vals = np.abs(self.evaluate(*mesh))
        mask = np.zeros_like(vals, dtype=bool)
        for ax in range(grid.dim):
            sl = [slice(None)] * grid.dim
            sl[ax] = 0
            mask[tuple(sl)] = True
        return float(vals[mask].max())


def radial_gaussian(sigma: float) -> GaussianField:
    return GaussianField(sigma=sigma)


def coordinate_gaussian(axis: int, sigma: float, dim: int) -> GaussianField:
    """r_axis * exp(-|r|^2 / (2 sigma^2)) on a dim-dimensional grid."""
    exps = [0] * dim
    exps[axis] = 1
    return GaussianField(sigma=sigma, poly={tuple(exps): 1.0})


# ---------------------------------------------------------------------------
# CSV exchange
# ---------------------------------------------------------------------------

def save_matrix_csv(path, M) -> None:
    """Row-major CSV with interleaved re,im pairs per cell."""
    A = as_matrix(M).astype(complex)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in A:
            flat = []
            for cell in row:
                flat.extend((repr(float(cell.real)), repr(float(cell.imag))))
            writer.writerow(flat)


def load_matrix_csv(path, grid: Grid | None = None, label: str = "imported") -> OperatorMatrix:
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            vals = [float(v) for v in row]
            rows.append([complex(vals[k], vals[k + 1]) for k in range(0, len(vals), 2)])
    return OperatorMatrix(grid, np.array(rows), label=label)


def save_field_csv(path, state: StateVector) -> None:
    """Columns: one coordinate per axis, then re, im."""
    grid = state.grid
    coords = [grid.coordinates(ax) for ax in range(grid.dim)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for k in range(grid.size):
            row = [repr(float(c[k])) for c in coords]
            row += [repr(float(state.values[k].real)), repr(float(state.values[k].imag))]
            writer.writerow(row)


def load_field_csv(path, grid: Grid) -> StateVector:
    values = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if len(row) != grid.dim + 2:
                raise ValueError(f"expected {grid.dim + 2} columns, got {len(row)}")
            values.append(complex(float(row[-2]), float(row[-1])))
    return StateVector(grid, np.array(values))
