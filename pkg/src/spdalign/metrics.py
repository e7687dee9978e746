"""SPD geometries: squared distances, Gaussian similarities, and the
dimension-reducing congruence map.

Three squared distances are supported on positive definite matrices:

- affine-invariant: ||log(X1^{-1/2} X2 X1^{-1/2})||_F^2
- Stein divergence: ln det((X1+X2)/2) - (1/2) ln det(X1 X2)
- log-Euclidean:    ||log X1 - log X2||_F^2

The Stein divergence is used directly as a squared distance (no square root
is ever taken). Distances below DIST_CLAMP are treated as exact coincidence
before exponentiation so that identical samples get similarity exactly 1.
"""

from enum import Enum

import numpy as np

from . import matfun
from .errors import (
    DegenerateInputError,
    DimMismatchError,
    NotPositiveDefiniteError,
    RankDeficientError,
    ValidationError,
)

RANK_RTOL = 1e-10
DIST_CLAMP = 1e-14


class MetricKind(Enum):
    """Closed enumeration of the supported SPD geometries."""

    AIM = "aim"
    STEIN = "stein"
    LEM = "lem"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            valid = ", ".join(k.value for k in cls)
            raise ValidationError(
                f"unknown metric {name!r}; expected one of: {valid}"
            ) from None


def check_transform(W, n=None):
    """Validate a reducing transform: 2-D, tall, full column rank."""
    W = np.asarray(W, dtype=float)
    if W.ndim != 2:
        raise ValidationError(f"transform must be a 2-D array, got shape {W.shape}")
    rows, cols = W.shape
    if cols < 1 or rows < cols:
        raise ValidationError(
            f"transform must have at least as many rows as columns, got {W.shape}"
        )
    if n is not None and rows != n:
        raise DimMismatchError(f"transform has {rows} rows, samples have dim {n}")
    sv = np.linalg.svd(W, compute_uv=False)
    if sv[-1] <= RANK_RTOL * sv[0]:
        raise RankDeficientError(
            f"transform is rank deficient (sv ratio {sv[-1]:.3e}/{sv[0]:.3e})"
        )
    return W


def map_down(X, W):
    """Congruence W^T X W taking an SPD matrix to the target dimension."""
    X = matfun.check_symmetric(X, "sample")
    W = check_transform(W, n=X.shape[0])
    return matfun.symmetrize(W.T @ X @ W)


def pd_eigvalsh(X, name="matrix"):
    """Eigenvalues of a positive definite matrix, rejecting floored spectra."""
    w = np.linalg.eigvalsh(X)
    if w[0] <= matfun.pd_floor(X):
        raise NotPositiveDefiniteError(
            f"{name} has min eigenvalue {w[0]:.3e} at or below the PD floor"
        )
    return w


def chol_logdet(X, name="matrix"):
    """log det of a positive definite matrix via its Cholesky factor."""
    try:
        c = np.linalg.cholesky(X)
    except np.linalg.LinAlgError:
        raise NotPositiveDefiniteError(f"{name} is not positive definite") from None
    return 2.0 * float(np.sum(np.log(np.diagonal(c))))


def _aim_dist2(X1, X2):
    P = matfun.spd_inv_sqrt(X1)
    w = pd_eigvalsh(matfun.symmetrize(P @ X2 @ P), "whitened operand")
    return float(np.sum(np.log(w) ** 2))


def _stein_dist2(ld1, ld2, mid_logdet):
    # symmetric form: computed value is exactly invariant to argument order
    return max(mid_logdet - 0.5 * (ld1 + ld2), 0.0)


def dist2(metric, X1, X2):
    """Squared distance between two SPD matrices under the chosen geometry."""
    metric = MetricKind.parse(metric)
    X1 = matfun.check_symmetric(X1, "first operand")
    X2 = matfun.check_symmetric(X2, "second operand")
    if X1.shape != X2.shape:
        raise DimMismatchError(f"operand dims differ: {X1.shape} vs {X2.shape}")
    if np.array_equal(X1, X2):
        # coincident operands are exactly at distance zero; the AIM route
        # would otherwise leave rounding noise from the whitening product
        pd_eigvalsh(X1, "first operand")
        return 0.0
    if metric is MetricKind.AIM:
        return _aim_dist2(X1, X2)
    if metric is MetricKind.STEIN:
        mid = chol_logdet(0.5 * (X1 + X2), "midpoint")
        return _stein_dist2(chol_logdet(X1, "first operand"),
                            chol_logdet(X2, "second operand"), mid)
    D = matfun.spd_log(X1) - matfun.spd_log(X2)
    return float(np.sum(D * D))


def transformed_dist2(metric, X_i, X_j, W):
    """dist2 between the two samples after mapping both through W."""
    return dist2(metric, map_down(X_i, W), map_down(X_j, W))


def kernel_sim(metric, X_i, X_j, W, beta):
    """Gaussian similarity exp(-beta * transformed_dist2) in (0, 1]."""
    if not beta > 0:
        raise ValidationError(f"beta must be positive, got {beta}")
    d = transformed_dist2(metric, X_i, X_j, W)
    if d < DIST_CLAMP:
        d = 0.0
    return float(np.exp(-beta * d))


def pairwise_dist2(metric, samples):
    """All pairwise squared distances within a stack of SPD matrices.

    Per-sample factors (inverse square roots, Cholesky log-determinants, or
    matrix logs) are computed once, so the cost is one factorization per
    sample plus one cheap solve per pair.
    """
    metric = MetricKind.parse(metric)
    samples = np.asarray(samples, dtype=float)
    N = samples.shape[0]
    D = np.zeros((N, N))
    if metric is MetricKind.AIM:
        isq = [matfun.spd_inv_sqrt(X) for X in samples]
        for i in range(N):
            for j in range(i + 1, N):
                M = matfun.symmetrize(isq[i] @ samples[j] @ isq[i])
                D[i, j] = D[j, i] = np.sum(np.log(pd_eigvalsh(M)) ** 2)
    elif metric is MetricKind.STEIN:
        ld = [chol_logdet(X, f"sample {i}") for i, X in enumerate(samples)]
        for i in range(N):
            for j in range(i + 1, N):
                mid = chol_logdet(0.5 * (samples[i] + samples[j]), "midpoint")
                D[i, j] = D[j, i] = _stein_dist2(ld[i], ld[j], mid)
    else:
        logs = [matfun.spd_log(X) for X in samples]
        for i in range(N):
            for j in range(i + 1, N):
                E = logs[i] - logs[j]
                D[i, j] = D[j, i] = np.sum(E * E)
    return D


def cross_dist2(metric, rows, cols):
    """Squared distances between every row-stack and column-stack sample."""
    metric = MetricKind.parse(metric)
    rows = np.asarray(rows, dtype=float)
    cols = np.asarray(cols, dtype=float)
    if rows.shape[1:] != cols.shape[1:]:
        raise DimMismatchError(
            f"sample dims differ: {rows.shape[1:]} vs {cols.shape[1:]}"
        )
    D = np.zeros((rows.shape[0], cols.shape[0]))
    if metric is MetricKind.AIM:
        isq = [matfun.spd_inv_sqrt(X) for X in rows]
        for i in range(rows.shape[0]):
            for j in range(cols.shape[0]):
                M = matfun.symmetrize(isq[i] @ cols[j] @ isq[i])
                D[i, j] = np.sum(np.log(pd_eigvalsh(M)) ** 2)
    elif metric is MetricKind.STEIN:
        ld_r = [chol_logdet(X, f"row sample {i}") for i, X in enumerate(rows)]
        ld_c = [chol_logdet(X, f"col sample {j}") for j, X in enumerate(cols)]
        for i in range(rows.shape[0]):
            for j in range(cols.shape[0]):
                mid = chol_logdet(0.5 * (rows[i] + cols[j]), "midpoint")
                D[i, j] = _stein_dist2(ld_r[i], ld_c[j], mid)
    else:
        log_r = [matfun.spd_log(X) for X in rows]
        log_c = [matfun.spd_log(X) for X in cols]
        for i in range(rows.shape[0]):
            for j in range(cols.shape[0]):
                E = log_r[i] - log_c[j]
                D[i, j] = np.sum(E * E)
    return D


def default_beta(metric, samples):
    """Similarity bandwidth 1/sigma^2 with sigma the mean pairwise distance.

    sigma is fixed once from the training samples on their original manifold
    and is not recomputed as the transform changes.
    """
    samples = np.asarray(samples, dtype=float)
    N = samples.shape[0]
    if N < 2:
        raise ValidationError("need at least two samples to set the bandwidth")
    D = pairwise_dist2(metric, samples)
    iu = np.triu_indices(N, k=1)
    sigma = float(np.mean(np.sqrt(D[iu])))
    if sigma <= 0.0:
        raise DegenerateInputError(
            "all training samples coincide; similarity bandwidth is undefined"
        )
    return 1.0 / sigma**2
