"""Distances between PSD matrices built from their square roots.

All distances are Frobenius norms of differences of some square root ``S`` with
``D = S.T @ S``: the matrices themselves (Euclidean), upper Cholesky factors (Cholesky),
positive square roots (Euclidean root), or the positive root of ``D1`` against the
closest rotated root of ``D2`` (Procrustes size-and-shape). The affine-invariant
Riemannian distance is included for comparison.
"""

from enum import Enum

import numpy as np

from .exceptions import NotPSDError, SingularInputError
from .linalg_core import (
    as_sym_matrix,
    cholesky_psd_numba,
    eig_sym,
    eigvals_sym,
    is_psd,
    polar,
    sqrtm_psd,
)


class MetricKind(Enum):
    """Distances (and their geodesics) between PSD matrices."""

    EUCLIDEAN = "euclidean"
    CHOLESKY = "cholesky"
    EUCLIDEAN_ROOT = "euclidean-root"
    PROCRUSTES = "procrustes"
    RIEMANNIAN = "riemannian"


def check_psd_pair(D1, D2):
    """Symmetrise two matrices and make sure they are PSD and of equal dimension."""
    D1 = as_sym_matrix(D1)
    D2 = as_sym_matrix(D2)
    if D1.shape != D2.shape:
        raise ValueError(f"shape mismatch: {D1.shape} vs {D2.shape}")
    for name, D in (("D1", D1), ("D2", D2)):
        if not is_psd(D):
            raise NotPSDError(f"{name} is not positive semidefinite")
    return D1, D2


def cholesky_factor(D):
    """Upper triangular ``S`` with non-negative diagonal and ``D = S.T @ S``.

    Zero pivots of rank-deficient ``D`` leave zero rows in ``S``.
    """
    return cholesky_psd_numba(np.ascontiguousarray(as_sym_matrix(D)))


def roots_and_polar_factor(D1, D2):
    """Positive square roots ``Q1``, ``Q2`` and the orthogonal polar factor of ``Q2 Q1``."""
    Q1 = sqrtm_psd(D1)
    Q2 = sqrtm_psd(D2)
    return Q1, Q2, polar(Q2 @ Q1, perturbation=Q1 + Q2).orthogonal


def unscaled_polar_factor(D1, D2):
    """Orthogonal factor ``U`` of the polar decomposition ``Q2 Q1 = U |Q2 Q1|``.

    ``Q1`` and ``Q2`` are the positive square roots of ``D1`` and ``D2``. Positive
    rescalings of ``Q1`` and ``Q2`` leave ``U`` unchanged. When ``Q2 Q1`` is singular,
    ``U`` on its null space is the limit of the factor for ``(Q2 + eps I)(Q1 + eps I)``.

    Parameters
    ----------
    D1, D2: array_like
        PSD matrices.

    Returns
    -------
    numpy.ndarray
        Orthogonal matrix.

    """
    return roots_and_polar_factor(D1, D2)[2]


def procrustes_rotation(D1, D2):
    """Orthogonal ``R = U.T`` minimising ``||Q1 - R Q2||_F``."""
    return unscaled_polar_factor(D1, D2).T


def distance_euclidean(D1, D2):
    """Frobenius distance of the matrices themselves."""
    return float(np.linalg.norm(D1 - D2))


def distance_cholesky(D1, D2):
    """Frobenius distance of the upper Cholesky factors."""
    return float(np.linalg.norm(cholesky_factor(D1) - cholesky_factor(D2)))


def distance_euclidean_root(D1, D2):
    """Frobenius distance of the positive square roots."""
    return float(np.linalg.norm(sqrtm_psd(D1) - sqrtm_psd(D2)))


def distance_procrustes(D1, D2):
    """Procrustes size-and-shape distance ``min_R ||Q1 - R Q2||_F`` in closed form."""
    Q1, Q2, U = roots_and_polar_factor(D1, D2)
    return float(np.linalg.norm(Q1 - U.T @ Q2))


def is_numerically_singular(D):
    """True if ``lambda_min(D) <= n * machine_eps * lambda_max(D)``."""
    w = eigvals_sym(D)
    return bool(w[-1] <= len(w) * np.finfo(float).eps * max(w[0], np.finfo(float).tiny))


def distance_riemannian(D1, D2):
    """Affine-invariant distance ``||log(D1^(-1/2) D2 D1^(-1/2))||_F``.

    Raises
    ------
    SingularInputError
        If an endpoint is numerically singular; such matrices are infinitely far from
        everything else.

    """
    for name, D in (("D1", D1), ("D2", D2)):
        if is_numerically_singular(D):
            raise SingularInputError(f"{name} is singular; the Riemannian distance is infinite")
    w, V = eig_sym(D1)
    D1_inv_half = (V / np.sqrt(w)) @ V.T
    mu = eigvals_sym(D1_inv_half @ D2 @ D1_inv_half)
    mu = np.maximum(mu, np.finfo(float).tiny)
    return float(np.sqrt(np.sum(np.log(mu) ** 2)))


_DISTANCES = {
    MetricKind.EUCLIDEAN: distance_euclidean,
    MetricKind.CHOLESKY: distance_cholesky,
    MetricKind.EUCLIDEAN_ROOT: distance_euclidean_root,
    MetricKind.PROCRUSTES: distance_procrustes,
    MetricKind.RIEMANNIAN: distance_riemannian,
}


def distance(kind, D1, D2):
    """Distance of the given kind between two PSD matrices.

    Parameters
    ----------
    kind: MetricKind or str
        Which distance.
    D1, D2: array_like
        PSD matrices of equal dimension.

    Returns
    -------
    float
        Non-negative distance.

    Raises
    ------
    NotPSDError
        If an input is not PSD.
    SingularInputError
        For the Riemannian distance with a singular endpoint.

    """
    D1, D2 = check_psd_pair(D1, D2)
    return _DISTANCES[MetricKind(kind)](D1, D2)
