"""The matrix geometric mean ``A # B`` and its characterising properties."""

import logging

from dataclasses import dataclass
from typing import NamedTuple, Tuple

import numpy as np

from .exceptions import HypothesisViolatedError, NotPSDError
from .linalg_core import (
    PSD_RTOL,
    EigenDecomposition,
    as_sym_matrix,
    eig_sym,
    eigvals_sym,
    is_psd,
    lambda_max,
    powm_psd,
    sqrtm_psd,
)


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GeoMeanConfig:
    """Parameters of the geometric mean for (nearly) rank-deficient inputs.

    Parameters
    ----------
    regularisation_eps: float
        Eigenvalues at or below ``regularisation_eps * max(lambda_max(A), lambda_max(B))``
        count as zero. The defining formula is used directly if one factor has none of
        those. Defaults to 1e-12.
    eps_ladder: tuple of float
        Strictly decreasing relative shifts of :func:`regularised_geometric_mean`. Rung
        ``e`` evaluates ``(A + eps I) # (B + eps I)`` with
        ``eps = e * (1 + max(lambda_max(A), lambda_max(B)))``.
    intersection_tol: float
        Singular values of the stacked null-space bases at or below this value mark
        directions that lie in both ranges. Defaults to 1e-6.

    """

    regularisation_eps: float = 1e-12
    eps_ladder: Tuple[float, ...] = (1e-6, 1e-8, 1e-10)
    intersection_tol: float = 1e-6

    def __post_init__(self):
        """Reject invalid tolerances and ladders."""
        ladder = tuple(float(e) for e in self.eps_ladder)
        object.__setattr__(self, "eps_ladder", ladder)
        if not self.regularisation_eps > 0:
            raise ValueError("regularisation_eps must be positive")
        if not self.intersection_tol > 0:
            raise ValueError("intersection_tol must be positive")
        if len(ladder) < 2:
            raise ValueError("eps_ladder needs at least two rungs")
        if any(e <= 0 for e in ladder):
            raise ValueError("eps_ladder entries must be positive")
        if any(b >= a for a, b in zip(ladder, ladder[1:])):
            raise ValueError("eps_ladder must be strictly decreasing")


DEFAULT_CONFIG = GeoMeanConfig()


class RegularisedMean(NamedTuple):
    """Geometric mean evaluated through the eps ladder."""

    mean: np.ndarray
    gap: float
    eps: float


def _require_psd(A, name):
    A = as_sym_matrix(A)
    if not is_psd(A):
        raise NotPSDError(f"{name} is not positive semidefinite")
    return A


def _conditioning(e):
    w = e.eigenvalues
    return w[-1] / w[0] if w[0] > 0 else 0.0


def _direct_mean(ea, eb, zero=0.0):
    """``A # B`` from the eigensystems of an invertible ``A`` and a PSD ``B``.

    With ``A = F F.T``, ``F = V diag(sqrt(w))``, the mean is ``F (F^-1 B F^-T)^(1/2) F.T``.
    The root is taken from the SVD ``F^-1 B^(1/2) = W S X.T`` as ``W S W.T``, so no
    product of inverse square roots is ever formed. Eigenvalues of ``B`` at or below
    ``zero`` are set to zero.
    """
    w, V = ea
    root = np.sqrt(w)
    factor_b = eb.eigenvectors * np.sqrt(np.where(eb.eigenvalues > zero, eb.eigenvalues, 0.0))
    W, s, _ = np.linalg.svd((V.T @ factor_b) / root[:, None])
    H = (V * root) @ (W * np.sqrt(s))
    G = H @ H.T
    return 0.5 * (G + G.T)


def _full_rank_mean(ea, eb):
    if _conditioning(eb) > _conditioning(ea):
        ea, eb = eb, ea
    return _direct_mean(ea, eb)


def _shorted(e, rank, Z):
    """``(Z.T A^+ Z)^(-1)``: the shorted operator of ``A`` on the span of ``Z``."""
    K = Z.T @ e.eigenvectors[:, :rank]
    w, V = eig_sym((K / e.eigenvalues[:rank]) @ K.T)
    S = (V / w) @ V.T
    return 0.5 * (S + S.T)


def _limit_mean(ea, rank_a, eb, rank_b, cfg):
    """``lim (A + eps I) # (B + eps I)`` for two singular factors.

    The limit lives on ``M = range(A) & range(B)``, the orthogonal complement of the sum
    of the null spaces. With ``Z`` an orthonormal basis of ``M`` it is
    ``Z (A_M # B_M) Z.T`` where ``A_M = (Z.T A^+ Z)^(-1)`` is the shorted operator.
    """
    n = len(ea.eigenvalues)
    kernels = np.hstack([ea.eigenvectors[:, rank_a:], eb.eigenvectors[:, rank_b:]])
    W, s, _ = np.linalg.svd(kernels)
    Z = W[:, int(np.sum(s > cfg.intersection_tol)):]
    logger.debug("geometric mean of singular factors on a %d-dim intersection", Z.shape[1])
    if Z.shape[1] == 0:
        return np.zeros((n, n))
    inner = _full_rank_mean(eig_sym(_shorted(ea, rank_a, Z)), eig_sym(_shorted(eb, rank_b, Z)))
    G = Z @ inner @ Z.T
    return 0.5 * (G + G.T)


def _shifted(e, shift):
    return EigenDecomposition(
        eigenvalues=np.maximum(e.eigenvalues + shift, np.finfo(float).tiny),
        eigenvectors=e.eigenvectors,
    )


def regularised_geometric_mean(A, B, cfg=DEFAULT_CONFIG):
    """Geometric mean of ``A + eps I`` and ``B + eps I`` down the eps ladder.

    A numerical approximation of the limit computed exactly by :func:`geometric_mean`.
    Every rung of ``cfg.eps_ladder`` evaluates ``(A + eps I) # (B + eps I)``; the mean
    of the last rung is returned. The sequence decreases monotonically to the limit.

    Parameters
    ----------
    A, B: array_like
        PSD matrices of equal dimension.
    cfg: GeoMeanConfig
        Ladder configuration.

    Returns
    -------
    RegularisedMean
        The mean of the last rung, the Frobenius distance between the last two rungs
        (the accuracy estimate) and the absolute shift of the last rung.

    Raises
    ------
    NotPSDError
        If either input is not PSD within tolerance.

    """
    ea = eig_sym(_require_psd(A, "A"))
    eb = eig_sym(_require_psd(B, "B"))
    scale = 1.0 + max(ea.eigenvalues[0], eb.eigenvalues[0], 0.0)
    eps = [e * scale for e in cfg.eps_ladder]
    rungs = [_full_rank_mean(_shifted(ea, e), _shifted(eb, e)) for e in eps]
    gap = float(np.linalg.norm(rungs[-1] - rungs[-2]))
    logger.debug("regularised geometric mean: eps=%.1e gap=%.3e", eps[-1], gap)
    return RegularisedMean(mean=rungs[-1], gap=gap, eps=eps[-1])


def geometric_mean(A, B, cfg=DEFAULT_CONFIG):
    """Matrix geometric mean ``A # B``.

    ``A # B = A^(1/2) (A^(-1/2) B A^(-1/2))^(1/2) A^(1/2)``. The mean is symmetric in its
    arguments, so the better conditioned invertible factor is the one inverted. If both
    factors are singular, the result is the limit of ``(A + eps I) # (B + eps I)`` for
    ``eps -> 0``, evaluated in closed form on the intersection of the ranges; it is zero
    if the ranges intersect trivially.

    Parameters
    ----------
    A, B: array_like
        PSD matrices of equal dimension.
    cfg: GeoMeanConfig
        Rank tolerances. Defaults to ``GeoMeanConfig()``.

    Returns
    -------
    numpy.ndarray
        Symmetric PSD matrix.

    Raises
    ------
    NotPSDError
        If either input is not PSD within tolerance.

    """
    A = _require_psd(A, "A")
    B = _require_psd(B, "B")
    if A.shape != B.shape:
        raise ValueError(f"shape mismatch: {A.shape} vs {B.shape}")
    n = A.shape[0]
    ea = eig_sym(A)
    eb = eig_sym(B)
    zero = cfg.regularisation_eps * max(ea.eigenvalues[0], eb.eigenvalues[0], 0.0)
    rank_a = int(np.sum(ea.eigenvalues > zero))
    rank_b = int(np.sum(eb.eigenvalues > zero))
    if rank_a < n and rank_b < n:
        return _limit_mean(ea, rank_a, eb, rank_b, cfg)
    if rank_a < n or (rank_b == n and _conditioning(eb) > _conditioning(ea)):
        ea, eb = eb, ea
    return _direct_mean(ea, eb, zero)


def naive_geometric_mean(A, B):
    """The product of positive square roots ``A^(1/2) B^(1/2)`` (not symmetric in general)."""
    A = _require_psd(A, "A")
    B = _require_psd(B, "B")
    return sqrtm_psd(A) @ sqrtm_psd(B)


def naive_mean_eigenvalues(A, B):
    """Eigenvalues of ``A^(1/2) B^(1/2)``, non-ascending.

    ``XY`` and ``YX`` have the same characteristic polynomial, so with
    ``X = A^(1/2) B^(1/4)`` and ``Y = B^(1/4)`` the spectrum is that of the symmetric PSD
    matrix ``B^(1/4) A^(1/2) B^(1/4)``, also for singular ``B``. Values are clipped at 0.
    """
    A = _require_psd(A, "A")
    B = _require_psd(B, "B")
    B_quarter = powm_psd(B, 0.25)
    return np.maximum(eigvals_sym(B_quarter @ sqrtm_psd(A) @ B_quarter), 0.0)


def commuting_mean(eigenvalues_a, eigenvalues_b, basis):
    """Geometric mean of ``V diag(a) V.T`` and ``V diag(b) V.T``: ``V diag(sqrt(ab)) V.T``."""
    M = (basis * np.sqrt(np.asarray(eigenvalues_a) * np.asarray(eigenvalues_b))) @ basis.T
    return 0.5 * (M + M.T)


def _input_scale(A, B):
    return max(lambda_max(A), lambda_max(B), 0.0)


def _mean_top(A, B, cfg):
    """``lambda_max(A # B)``, or None if the mean vanishes at the scale of the inputs."""
    top = lambda_max(geometric_mean(A, B, cfg))
    if top <= cfg.regularisation_eps * _input_scale(A, B):
        return None
    return top


def _power_mean_top(A, B, r, cfg):
    return lambda_max(geometric_mean(powm_psd(A, r), powm_psd(B, r), cfg))


def block_psd_margin(A, B, X):
    """Smallest eigenvalue of ``[[A, X], [X, B]]`` over ``max(1, largest eigenvalue)``."""
    A = as_sym_matrix(A)
    B = as_sym_matrix(B)
    X = as_sym_matrix(X)
    w = eigvals_sym(np.block([[A, X], [X, B]]))
    return float(w[-1] / max(1.0, w[0]))


def hiai_margin(A, B, r, cfg=DEFAULT_CONFIG):
    """Slack of ``A # B <= I  =>  A^r # B^r <= I`` after rescaling to ``lambda_max(A # B) = 1``.

    Parameters
    ----------
    A, B: array_like
        PSD matrices.
    r: float
        Power, at least 1.
    cfg: GeoMeanConfig
        Geometric mean configuration.

    Returns
    -------
    float
        ``1 - lambda_max(A^r # B^r)`` for the rescaled pair. If ``A # B`` vanishes (see
        :func:`rescale_to_unit_mean`) every rescaling satisfies the hypothesis, so
        ``A^r # B^r`` has to vanish too; the margin is then
        ``-lambda_max(A^r # B^r) / max(1, lambda_max(A), lambda_max(B)) ** r``.

    """
    if r < 1:
        raise ValueError(f"r must be at least 1, got {r}")
    A = as_sym_matrix(A)
    B = as_sym_matrix(B)
    top = _mean_top(A, B, cfg)
    if top is None:
        return float(-_power_mean_top(A, B, r, cfg) / max(1.0, _input_scale(A, B)) ** r)
    return float(1.0 - _power_mean_top(A / top, B / top, r, cfg))


def monotonicity_margin(A, B1, B2, cfg=DEFAULT_CONFIG):
    """``lambda_min(A # B2 - A # B1)`` over ``1 + max(lambda_max(A), lambda_max(B2))``."""
    diff = geometric_mean(A, B2, cfg) - geometric_mean(A, B1, cfg)
    return float(eigvals_sym(diff)[-1] / (1.0 + _input_scale(A, B2)))


def scaling_identity_margin(A, B, a, b, cfg=DEFAULT_CONFIG):
    """``-||(aA) # (bB) - sqrt(ab) (A # B)||_F`` relative to ``sqrt(ab) (1 + max lambda_max)``."""
    A = as_sym_matrix(A)
    B = as_sym_matrix(B)
    root = np.sqrt(a * b)
    err = np.linalg.norm(geometric_mean(a * A, b * B, cfg) - root * geometric_mean(A, B, cfg))
    return float(-err / (root * (1.0 + _input_scale(A, B))))


def check_block_maximality(A, B, X, tol=PSD_RTOL):
    """Check whether the block matrix ``[[A, X], [X, B]]`` is PSD within ``tol``."""
    return block_psd_margin(A, B, X) >= -tol


def check_hiai_power(A, B, r, tol=1e-9, cfg=DEFAULT_CONFIG):
    """Check that ``A # B <= I`` implies ``A^r # B^r <= I`` for ``r >= 1``.

    Parameters
    ----------
    A, B: array_like
        PSD matrices with ``lambda_max(A # B) <= 1 + tol``.
    r: float
        Power, at least 1.
    tol: float
        Absolute tolerance on the largest eigenvalues.

    Returns
    -------
    bool
        True iff ``lambda_max(A^r # B^r) <= 1 + tol``.

    Raises
    ------
    HypothesisViolatedError
        If ``lambda_max(A # B) > 1 + tol``.

    """
    if r < 1:
        raise ValueError(f"r must be at least 1, got {r}")
    top = lambda_max(geometric_mean(A, B, cfg))
    if top > 1 + tol:
        raise HypothesisViolatedError(f"lambda_max(A # B) = {top:.6g} exceeds 1")
    return bool(_power_mean_top(A, B, r, cfg) <= 1 + tol)


def check_monotonicity(A, B1, B2, tol=1e-8, cfg=DEFAULT_CONFIG):
    """Check ``A # B1 <= A # B2`` for ``0 <= B1 <= B2``.

    Raises
    ------
    HypothesisViolatedError
        If ``B2 - B1`` is not PSD.

    """
    B1 = as_sym_matrix(B1)
    B2 = as_sym_matrix(B2)
    if not is_psd(B2 - B1):
        raise HypothesisViolatedError("B1 <= B2 does not hold")
    return monotonicity_margin(A, B1, B2, cfg) >= -tol


def check_scaling_identity(A, B, a, b, tol=1e-8, cfg=DEFAULT_CONFIG):
    """Check ``(aA) # (bB) = sqrt(ab) (A # B)`` for ``a, b > 0``."""
    return scaling_identity_margin(A, B, a, b, cfg) >= -tol


def rescale_to_unit_mean(A, B, cfg=DEFAULT_CONFIG):
    """Rescale ``A`` and ``B`` by ``1 / lambda_max(A # B)`` so that ``lambda_max`` of their mean is 1.

    Uses ``(aA) # (aB) = a (A # B)``. The mean vanishes if its largest eigenvalue is at
    most ``cfg.regularisation_eps * max(lambda_max(A), lambda_max(B))``; the inputs are
    then returned unchanged.
    """
    A = as_sym_matrix(A)
    B = as_sym_matrix(B)
    top = _mean_top(A, B, cfg)
    if top is None:
        return A, B
    return A / top, B / top
