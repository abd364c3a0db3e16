"""Interpolation and extrapolation paths between two PSD matrices."""

import logging

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import pandas as pd

from .exceptions import NotPSDError, SingularInputError
from .linalg_core import determinant, eig_sym, is_psd, matrix_function, sqrtm_psd
from .metrics import (
    MetricKind,
    check_psd_pair,
    cholesky_factor,
    is_numerically_singular,
    unscaled_polar_factor,
)


logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GeodesicSpec:
    """A path ``p -> D(p)`` of the given kind with ``D(1) = endpoint_a`` and ``D(0) = endpoint_b``.

    Parameters
    ----------
    metric: MetricKind or str
        Which geodesic.
    endpoint_a: array_like
        PSD matrix ``D1``, reached at ``p = 1``.
    endpoint_b: array_like
        PSD matrix ``D2``, reached at ``p = 0``.

    """

    metric: MetricKind
    endpoint_a: np.ndarray
    endpoint_b: np.ndarray

    def __post_init__(self):
        """Symmetrise and check the endpoints."""
        D1, D2 = check_psd_pair(self.endpoint_a, self.endpoint_b)
        object.__setattr__(self, "metric", MetricKind(self.metric))
        object.__setattr__(self, "endpoint_a", D1)
        object.__setattr__(self, "endpoint_b", D2)

    @property
    def dim(self):
        return self.endpoint_a.shape[0]

    @cached_property
    def root_a(self):
        return sqrtm_psd(self.endpoint_a)

    @cached_property
    def root_b(self):
        return sqrtm_psd(self.endpoint_b)

    @cached_property
    def polar_factor(self):
        """Orthogonal polar factor of ``root_b @ root_a``, see :func:`unscaled_polar_factor`."""
        return unscaled_polar_factor(self.endpoint_a, self.endpoint_b)

    @cached_property
    def cholesky_a(self):
        return cholesky_factor(self.endpoint_a)

    @cached_property
    def cholesky_b(self):
        return cholesky_factor(self.endpoint_b)


def _modulus_square(Y):
    D = Y.T @ Y
    return 0.5 * (D + D.T)


def _euclidean_path(spec, p):
    D = p * spec.endpoint_a + (1 - p) * spec.endpoint_b
    if not 0 <= p <= 1 and not is_psd(D):
        raise NotPSDError(f"the Euclidean path leaves the PSD cone at p = {p}")
    return D


def _cholesky_path(spec, p):
    return _modulus_square(p * spec.cholesky_a + (1 - p) * spec.cholesky_b)


def _euclidean_root_path(spec, p):
    return _modulus_square(p * spec.root_a + (1 - p) * spec.root_b)


def _procrustes_path(spec, p):
    return _modulus_square(p * spec.root_a + (1 - p) * spec.polar_factor.T @ spec.root_b)


def _riemannian_path(spec, p):
    for name, D in (("endpoint_a", spec.endpoint_a), ("endpoint_b", spec.endpoint_b)):
        if is_numerically_singular(D):
            raise SingularInputError(f"{name} is singular; the Riemannian geodesic is undefined")
    w, V = eig_sym(spec.endpoint_a)
    A_half = (V * np.sqrt(w)) @ V.T
    A_inv_half = (V / np.sqrt(w)) @ V.T
    inner = matrix_function(
        A_inv_half @ spec.endpoint_b @ A_inv_half,
        lambda mu: mu ** (1 - p),
        np.finfo(float).tiny,
    )
    D = A_half @ inner @ A_half
    return 0.5 * (D + D.T)


_PATHS = {
    MetricKind.EUCLIDEAN: _euclidean_path,
    MetricKind.CHOLESKY: _cholesky_path,
    MetricKind.EUCLIDEAN_ROOT: _euclidean_root_path,
    MetricKind.PROCRUSTES: _procrustes_path,
    MetricKind.RIEMANNIAN: _riemannian_path,
}


def path_point(spec, p):
    """Evaluate a geodesic at parameter ``p``.

    The Euclidean-root path is ``|p Q1 + (1 - p) Q2|^2`` and the Procrustes path is
    ``|p Q1 + (1 - p) U.T Q2|^2``, with ``Q1, Q2`` the positive square roots of the
    endpoints and ``U`` the polar factor of the unscaled product ``Q2 Q1``. Both are PSD
    for every real ``p``. The Cholesky path squares the linear path of upper Cholesky
    factors, the Euclidean path is linear in the matrices, and the Riemannian path is the
    affine-invariant geodesic ``D1^(1/2) (D1^(-1/2) D2 D1^(-1/2))^(1-p) D1^(1/2)``.

    Parameters
    ----------
    spec: GeodesicSpec
        Path kind and endpoints.
    p: float
        Path parameter. ``[0, 1]`` interpolates, anything else extrapolates.

    Returns
    -------
    numpy.ndarray
        Symmetric matrix ``D(p)``.

    Raises
    ------
    NotPSDError
        For the Euclidean path if it leaves the PSD cone outside ``[0, 1]``.
    SingularInputError
        For the Riemannian path with a singular endpoint.

    """
    return _PATHS[spec.metric](spec, float(p))


def swelling_profile(spec, steps, p_min=0.0, p_max=1.0):
    """Determinant root along a path, the swelling criterion for tensor interpolation.

    Parameters
    ----------
    spec: GeodesicSpec
        Path kind and endpoints.
    steps: int
        Number of equispaced parameters, at least 2.
    p_min, p_max: float
        Parameter range. Defaults to the interpolation range ``[0, 1]``.

    Returns
    -------
    pandas.Series
        ``det(D(p)) ** (1 / dim)`` (negative round-off clipped to 0), indexed by ``p``.
        For 3x3 tensors this is the cube root of the determinant.

    """
    if steps < 2:
        raise ValueError(f"steps must be at least 2, got {steps}")
    p = p_min + (p_max - p_min) * (np.arange(steps) / (steps - 1))
    values = np.array(
        [max(determinant(path_point(spec, pk)), 0.0) ** (1.0 / spec.dim) for pk in p]
    )
    logger.debug("swelling profile of %d points along %s path", steps, spec.metric.value)
    return pd.Series(values, index=pd.Index(p, name="p"), name="det_root")
