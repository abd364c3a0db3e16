"""Dense real linear algebra on small square matrices.

Symmetric eigendecomposition by cyclic Jacobi rotations, matrix functions through the
eigensystem, the polar decomposition, determinants and the Frobenius norm.
"""

import logging

from typing import NamedTuple

import numpy as np

from numba import jit

from .exceptions import DomainViolationError, NonConvergenceError, SingularInputError


logger = logging.getLogger(__name__)

PSD_RTOL = 1e-10
JACOBI_RTOL = 1e-14
JACOBI_MAX_SWEEPS = 64


class EigenDecomposition(NamedTuple):
    """Eigenvalues (non-ascending) and orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


class PolarDecomposition(NamedTuple):
    """Right polar decomposition ``X = orthogonal @ modulus``."""

    orthogonal: np.ndarray
    modulus: np.ndarray


def as_square_matrix(X):
    """Coerce to a finite float64 square matrix.

    Parameters
    ----------
    X: array_like
        Candidate matrix.

    Returns
    -------
    numpy.ndarray
        Copy of ``X`` as a 2-D float64 array.

    Raises
    ------
    ValueError
        If ``X`` is not a non-empty square 2-D array or has non-finite entries.

    """
    X = np.array(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1] or X.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("matrix has non-finite entries")
    return X


def as_sym_matrix(X):
    """Coerce to a finite, exactly symmetric float64 matrix.

    The symmetric part ``(X + X.T) / 2`` is returned, which is symmetric to the last bit.
    """
    X = as_square_matrix(X)
    return 0.5 * (X + X.T)


def jacobi_eigh(a, rtol=JACOBI_RTOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Cyclic Jacobi eigenvalue iteration for a symmetric matrix.

    Pure Python/Numpy implementation, compiled below with numba.

    Parameters
    ----------
    a: numpy.ndarray
        Symmetric float64 matrix. Not modified.
    rtol: float
        Sweeps stop once the off-diagonal Frobenius norm is at most
        ``rtol * ||a||_F``.
    max_sweeps: int
        Sweep budget.

    Returns
    -------
    tuple
        Unsorted eigenvalues, eigenvector matrix (columns), number of sweeps
        used and a convergence flag.

    """
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n)
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale += a[i, j] * a[i, j]
    scale = np.sqrt(scale)

    converged = False
    sweeps = 0
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    off += a[i, j] * a[i, j]
        if np.sqrt(off) <= rtol * scale:
            converged = True
            break
        if sweep == max_sweeps:
            break
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq

    w = np.empty(n)
    for i in range(n):
        w[i] = a[i, i]
    return w, v, sweeps, converged


jacobi_eigh_numba = jit(nopython=True)(jacobi_eigh)


def eig_sym(A):
    """Eigendecomposition of a symmetric matrix.

    Parameters
    ----------
    A: array_like
        Symmetric matrix (symmetrised on input).

    Returns
    -------
    EigenDecomposition
        Eigenvalues sorted non-ascending, eigenvectors as columns.

    Raises
    ------
    NonConvergenceError
        If the Jacobi iteration does not converge within its sweep budget.

    """
    A = np.ascontiguousarray(as_sym_matrix(A))
    w, v, sweeps, converged = jacobi_eigh_numba(A, JACOBI_RTOL, JACOBI_MAX_SWEEPS)
    if not converged:
        raise NonConvergenceError(
            f"Jacobi iteration did not converge in {JACOBI_MAX_SWEEPS} sweeps"
        )
    order = np.argsort(-w, kind="stable")
    return EigenDecomposition(eigenvalues=w[order], eigenvectors=v[:, order])


def eigvals_sym(A):
    """Eigenvalues of a symmetric matrix, non-ascending."""
    return eig_sym(A).eigenvalues


def lambda_max(A):
    """Largest eigenvalue of a symmetric matrix."""
    return eigvals_sym(A)[0]


def psd_tolerance(eigenvalues):
    """Absolute tolerance below zero up to which eigenvalues count as zero."""
    return PSD_RTOL * max(1.0, float(np.max(eigenvalues)))


def matrix_function(A, f, domain_floor=0.0):
    """Apply a scalar function to a symmetric matrix through its eigensystem.

    Parameters
    ----------
    A: array_like
        Symmetric matrix.
    f: callable
        Vectorised scalar function (e.g. ``numpy.sqrt``).
    domain_floor: float
        Smallest eigenvalue ``f`` accepts. Eigenvalues in
        ``[-psd_tolerance, domain_floor)`` are clamped to ``domain_floor``. Use
        ``-numpy.inf`` for functions defined on all of the real line.

    Returns
    -------
    numpy.ndarray
        ``V diag(f(clamp(lambda))) V.T``, symmetric.

    Raises
    ------
    DomainViolationError
        If an eigenvalue lies below ``min(domain_floor, 0) - psd_tolerance``.

    """
    w, V = eig_sym(A)
    tol = psd_tolerance(w)
    lowest = min(domain_floor, 0.0) - tol
    if w[-1] < lowest:
        raise DomainViolationError(
            f"eigenvalue {w[-1]:.3e} is below the domain floor {domain_floor} "
            f"(tolerance {tol:.1e})"
        )
    w = np.maximum(w, domain_floor)
    F = (V * f(w)) @ V.T
    return 0.5 * (F + F.T)


def sqrtm_psd(A):
    """Positive square root of a PSD matrix."""
    return matrix_function(A, np.sqrt, 0.0)


def powm_psd(A, power):
    """Non-negative real power of a PSD matrix."""
    if power < 0:
        raise ValueError("use invsqrtm_pd or matrix_function for negative powers")
    return matrix_function(A, lambda w: w ** power, 0.0)


def invsqrtm_pd(A):
    """Inverse positive square root of a positive definite matrix."""
    w = eigvals_sym(A)
    if w[-1] <= psd_tolerance(w):
        raise SingularInputError(f"smallest eigenvalue {w[-1]:.3e} is not positive")
    return matrix_function(A, lambda w: 1.0 / np.sqrt(w), 0.0)


def logm_pd(A):
    """Logarithm of a positive definite matrix."""
    return matrix_function(A, np.log, np.finfo(float).tiny)


def polar(X, perturbation=None):
    """Right polar decomposition ``X = U |X|``.

    Computed from the SVD ``X = W S V.T`` as ``U = W V.T`` and ``|X| = V S V.T``.

    Parameters
    ----------
    X: array_like
        Square matrix.
    perturbation: array_like, optional
        Direction ``E``. If ``X`` is numerically singular, the orthogonal factor on its
        null space is chosen as the limit of the polar factor of ``X + eps * E`` for
        ``eps -> 0``, i.e. the orthogonal factor of the compression of ``E`` onto the
        left and right null spaces of ``X``. Without it, the SVD completion is used.

    Returns
    -------
    PolarDecomposition

    """
    X = as_square_matrix(X)
    n = X.shape[0]
    W, s, Vt = np.linalg.svd(X)
    U = W @ Vt
    modulus = (Vt.T * s) @ Vt
    modulus = 0.5 * (modulus + modulus.T)

    if perturbation is not None:
        rank = int(np.sum(s > PSD_RTOL * s[0])) if s[0] > 0 else 0
        if rank < n:
            E = as_square_matrix(perturbation)
            Wn = W[:, rank:]
            Vn = Vt[rank:, :].T
            Wc, _, Vct = np.linalg.svd(Wn.T @ E @ Vn)
            U = W[:, :rank] @ Vt[:rank, :] + Wn @ (Wc @ Vct) @ Vn.T
            logger.debug("completed polar factor on a %d-dim null space", n - rank)

    return PolarDecomposition(orthogonal=U, modulus=modulus)


def determinant(X):
    """Determinant by LU factorisation with partial pivoting (LAPACK)."""
    return float(np.linalg.det(as_square_matrix(X)))


def frobenius_norm(X):
    """Frobenius norm, the matrix 2-norm of the vectorised entries."""
    return float(np.linalg.norm(as_square_matrix(X), "fro"))


def is_psd(A, tol=PSD_RTOL):
    """Check positive semidefiniteness.

    Parameters
    ----------
    A: array_like
        Symmetric matrix.
    tol: float
        Relative tolerance. Defaults to 1e-10.

    Returns
    -------
    bool
        True iff ``lambda_min >= -tol * max(1, lambda_max)``.

    """
    w = eigvals_sym(A)
    return bool(w[-1] >= -tol * max(1.0, w[0]))


def cholesky_psd(d, rtol=PSD_RTOL):
    """Upper triangular semidefinite Cholesky factor ``S`` with ``d = S.T @ S``.

    Pure Python/Numpy implementation, compiled below with numba. Pivots at or below
    ``rtol * max(1, max(diag(d)))`` are treated as zero and their row of ``S`` is zero.
    """
    n = d.shape[0]
    S = np.zeros((n, n))
    dmax = 1.0
    for i in range(n):
        if d[i, i] > dmax:
            dmax = d[i, i]
    tol = rtol * dmax
    for j in range(n):
        pivot = d[j, j]
        for k in range(j):
            pivot -= S[k, j] * S[k, j]
        if pivot <= tol:
            continue
        S[j, j] = np.sqrt(pivot)
        for i in range(j + 1, n):
            acc = d[j, i]
            for k in range(j):
                acc -= S[k, j] * S[k, i]
            S[j, i] = acc / S[j, j]
    return S


cholesky_psd_numba = jit(nopython=True)(cholesky_psd)
