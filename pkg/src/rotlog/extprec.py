"""Extended-precision (long double) kernels for ill-conditioned residuals.

Reconstruction identities involve the backward evolution U(s,t), whose norm
grows like exp(||A|| |t-s|) for dissipative generators.  Once
eps * |kappa| * ||U(s,t)|| crosses the residual tolerance, double precision
can no longer distinguish a true identity from evaluation noise, so the
residual chain is recomputed here in numpy's long double (80-bit on x86;
falls back to double on platforms without a wider type, where the escalation
is a no-op).
"""

from __future__ import annotations

import numpy as np

EPS_LONG = float(np.finfo(np.longdouble).eps)


def solve(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve A X = B by LU with partial pivoting in clongdouble."""
    A = np.array(A, dtype=np.clongdouble)
    X = np.array(B, dtype=np.clongdouble)
    n = A.shape[0]
    for k in range(n):
        p = k + int(np.argmax(np.abs(A[k:, k])))
        if A[p, k] == 0:
            raise np.linalg.LinAlgError("singular matrix in long-double solve")
        if p != k:
            A[[k, p]] = A[[p, k]]
            X[[k, p]] = X[[p, k]]
        A[k + 1:, k] /= A[k, k]
        A[k + 1:, k + 1:] -= np.outer(A[k + 1:, k], A[k, k + 1:])
        X[k + 1:] -= np.outer(A[k + 1:, k], X[k])
    for k in range(n - 1, -1, -1):
        X[k] -= A[k, k + 1:] @ X[k + 1:]
        X[k] /= A[k, k]
    return X


def expm(A: np.ndarray, max_terms: int = 120) -> np.ndarray:
    """Matrix exponential by scaling and Taylor summation in clongdouble.

    The scaled block has norm <= 1/4, so the series reaches long-double eps
    well within max_terms; squaring undoes the scaling.
    """
    A = np.array(A, dtype=np.clongdouble)
    n = A.shape[0]
    norm = float(np.abs(A).sum(axis=1).max())
    squarings = max(0, int(np.ceil(np.log2(max(norm, 1e-300) / 0.25))))
    B = A / np.clongdouble(2.0) ** squarings
    X = np.eye(n, dtype=np.clongdouble)
    term = np.eye(n, dtype=np.clongdouble)
    for j in range(1, max_terms):
        term = term @ B / np.clongdouble(j)
        X = X + term
        if float(np.abs(term).max()) < EPS_LONG * float(np.abs(X).max()):
            break
    for _ in range(squarings):
        X = X @ X
    return X
