"""Matrix functions on symmetric matrices.

log/exp/sqrt/inverse-sqrt are computed through the eigendecomposition of the
(symmetric) input. The directional derivative of the matrix logarithm is
computed from the (1,2) block of the log of a block upper-triangular matrix,
which requires a general dense matrix logarithm (inverse scaling-and-squaring
with Pade approximation, as provided by scipy).
"""

import numpy as np
import scipy.linalg

from .errors import NonSymmetricError, NotPositiveDefiniteError, NoConvergenceError

SYM_RTOL = 1e-10


def check_symmetric(A, name="matrix"):
    """Raise NonSymmetricError unless A is square and symmetric to tolerance."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise NonSymmetricError(f"{name} must be square, got shape {A.shape}")
    scale = max(1.0, float(np.max(np.abs(A))) if A.size else 1.0)
    if float(np.max(np.abs(A - A.T))) > SYM_RTOL * scale:
        raise NonSymmetricError(f"{name} is not symmetric within tolerance")
    return A


def symmetrize(A):
    return 0.5 * (A + A.T)


def pd_floor(X):
    """Scale-aware eigenvalue floor below which X is rejected as non-PD."""
    n = X.shape[0]
    return 1e-12 * max(1.0, float(np.trace(X)) / n)


def sym_eig(A):
    """Eigendecomposition of a symmetric matrix.

    Returns (w, Q) with eigenvalues w ascending and orthogonal Q such that
    A = Q diag(w) Q^T.
    """
    A = check_symmetric(A)
    try:
        w, Q = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise NoConvergenceError(f"symmetric eigensolver failed: {exc}") from exc
    return w, Q


def _spd_eig(X, name="matrix"):
    w, Q = sym_eig(X)
    if w[0] <= pd_floor(X):
        raise NotPositiveDefiniteError(
            f"{name} has min eigenvalue {w[0]:.3e} at or below the PD floor"
        )
    return w, Q


def spd_log(X):
    """Principal matrix logarithm of a positive definite matrix."""
    w, Q = _spd_eig(X)
    return symmetrize((Q * np.log(w)) @ Q.T)


def spd_exp(H):
    """Matrix exponential of a symmetric matrix."""
    w, Q = sym_eig(H)
    return symmetrize((Q * np.exp(w)) @ Q.T)


def spd_sqrt(X):
    """Principal square root of a positive definite matrix."""
    w, Q = _spd_eig(X)
    return symmetrize((Q * np.sqrt(w)) @ Q.T)


def spd_inv_sqrt(X):
    """Inverse of the principal square root of a positive definite matrix."""
    w, Q = _spd_eig(X)
    return symmetrize((Q / np.sqrt(w)) @ Q.T)


def spd_sqrt_pair(X):
    """(X^{1/2}, X^{-1/2}) from a single eigendecomposition."""
    w, Q = _spd_eig(X)
    s = np.sqrt(w)
    return symmetrize((Q * s) @ Q.T), symmetrize((Q / s) @ Q.T)


def dlog(X, H):
    """Directional derivative of the matrix log at X along a symmetric H.

    Evaluates log([[X, H], [0, X]]) and reads off the (1,2) block. The block
    matrix is not symmetric, so a general dense log is required.
    """
    X = np.asarray(X, dtype=float)
    H = check_symmetric(H, "direction")
    _spd_eig(X, "base point")
    if H.shape != X.shape:
        raise NonSymmetricError(
            f"direction shape {H.shape} does not match base point {X.shape}"
        )
    n = X.shape[0]
    B = np.zeros((2 * n, 2 * n))
    B[:n, :n] = X
    B[:n, n:] = H
    B[n:, n:] = X
    try:
        L, errest = scipy.linalg.logm(B, disp=False)
    except Exception as exc:
        raise NoConvergenceError(f"dense matrix log failed: {exc}") from exc
    if not np.all(np.isfinite(L)) or not np.isfinite(errest) or errest > 1e-6:
        raise NoConvergenceError(
            f"dense matrix log did not converge (error estimate {errest:.3e})"
        )
    if np.iscomplexobj(L):
        scale = max(1.0, float(np.max(np.abs(L.real))))
        if float(np.max(np.abs(L.imag))) > 1e-8 * scale:
            raise NoConvergenceError("dense matrix log left the real axis")
        L = L.real
    return symmetrize(L[:n, n:])
