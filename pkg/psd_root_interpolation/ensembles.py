"""Seeded random PSD matrices for the verification campaigns."""

from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Tuple

import numpy as np

from scipy.stats import ortho_group

from .exceptions import ValidationError


MIN_DIM = 2
MAX_DIM = 8


class RankMode(Enum):
    """Rank of the random draws of an ensemble."""

    FULL = "full"
    DEFICIENT = "deficient"
    MIXED = "mixed"


@dataclass(frozen=True)
class EnsembleSpec:
    """Ensemble of random PSD matrices.

    Parameters
    ----------
    dim: int
        Matrix dimension, 2 to 8.
    trials: int
        Number of trials of a campaign.
    seed: int
        Unsigned 64 bit seed. Every matrix is a function of ``(seed, index, stream)``.
    rank_mode: RankMode or str
        ``full``, ``deficient`` (half of the Gram factor's columns are zero) or ``mixed``.
    scale_range: tuple of float
        ``(lo, hi)``, the range of the log-uniform overall scale.

    """

    dim: int = 3
    trials: int = 1000
    seed: int = 42
    rank_mode: RankMode = RankMode.FULL
    scale_range: Tuple[float, float] = (0.1, 10.0)

    def __post_init__(self):
        """Normalise the fields and reject inconsistent settings."""
        object.__setattr__(self, "rank_mode", RankMode(self.rank_mode))
        object.__setattr__(self, "scale_range", tuple(float(s) for s in self.scale_range))
        if not MIN_DIM <= self.dim <= MAX_DIM:
            raise ValidationError(f"dim must be in {MIN_DIM}..{MAX_DIM}, got {self.dim}")
        if self.trials < 1:
            raise ValidationError(f"trials must be positive, got {self.trials}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValidationError(f"seed must be an unsigned 64 bit integer, got {self.seed}")
        lo, hi = self.scale_range
        if not 0 < lo < hi:
            raise ValidationError(f"scale_range must satisfy 0 < lo < hi, got {self.scale_range}")


class CommutingPair(NamedTuple):
    """Simultaneously diagonalisable pair ``A = V diag(a) V.T``, ``B = V diag(b) V.T``."""

    A: np.ndarray
    B: np.ndarray
    eigenvalues_a: np.ndarray
    eigenvalues_b: np.ndarray
    basis: np.ndarray


def _check_index(spec, index):
    if not 0 <= index < spec.trials:
        raise ValueError(f"index {index} outside 0..{spec.trials - 1}")


def is_deficient(spec, index, stream):
    """Whether matrix ``stream`` of trial ``index`` is drawn rank deficient."""
    if spec.rank_mode is RankMode.MIXED:
        return bool((index >> stream) & 1)
    return spec.rank_mode is RankMode.DEFICIENT


def _log_uniform(rng, lo, hi, size=None):
    return np.exp(rng.uniform(np.log(lo), np.log(hi), size=size))


def generate_psd(spec, index, stream=0):
    """Random PSD matrix ``s G G.T / dim`` with standard normal ``G``.

    Parameters
    ----------
    spec: EnsembleSpec
        The ensemble.
    index: int
        Trial index, ``0 <= index < spec.trials``.
    stream: int
        Independent matrix within the trial (the first endpoint is stream 0, the second
        stream 1).

    Returns
    -------
    numpy.ndarray
        Symmetric PSD matrix. Rank deficient draws have ``ceil(dim / 2)`` columns of
        ``G`` zeroed, so their rank is at most ``dim // 2``. With ``rank_mode = mixed``
        stream ``s`` of trial ``i`` is rank deficient iff bit ``s`` of ``i`` is set.

    """
    _check_index(spec, index)
    rng = np.random.default_rng([spec.seed, index, stream])
    G = rng.standard_normal((spec.dim, spec.dim))
    s = _log_uniform(rng, *spec.scale_range)
    if is_deficient(spec, index, stream):
        dropped = rng.choice(spec.dim, size=-(-spec.dim // 2), replace=False)
        G[:, dropped] = 0.0
    D = s * (G @ G.T) / spec.dim
    return 0.5 * (D + D.T)


def generate_commuting_pair(spec, index):
    """Random simultaneously diagonalisable PSD pair sharing a random orthogonal basis.

    Rank deficiency follows ``spec.rank_mode`` as in :func:`generate_psd`; deficient
    members get ``ceil(dim / 2)`` zero eigenvalues.
    """
    _check_index(spec, index)
    rng = np.random.default_rng([spec.seed, index, 0, 1])
    V = ortho_group.rvs(spec.dim, random_state=rng)
    eigenvalues = []
    for stream in (0, 1):
        w = _log_uniform(rng, *spec.scale_range, size=spec.dim)
        if is_deficient(spec, index, stream):
            w[rng.choice(spec.dim, size=-(-spec.dim // 2), replace=False)] = 0.0
        eigenvalues.append(w)
    a, b = eigenvalues
    A = (V * a) @ V.T
    B = (V * b) @ V.T
    return CommutingPair(
        A=0.5 * (A + A.T), B=0.5 * (B + B.T), eigenvalues_a=a, eigenvalues_b=b, basis=V
    )
