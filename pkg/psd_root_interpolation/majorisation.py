"""Majorisation relations between real vectors, the isotone function Phi and compound matrices."""

from itertools import combinations
from typing import NamedTuple, Optional

import numpy as np

from scipy.special import expit

from .exceptions import InvalidOrderError, LengthMismatchError, NegativeEntryError
from .linalg_core import as_square_matrix


TOL_REL = 1e-9


class MajorisationVerdict(NamedTuple):
    """Outcome of a majorisation test.

    ``worst_margin`` is the smallest normalised slack over all partial sums (or
    products); it is negative where the relation is violated. ``violating_k`` is the
    1-based index of the worst partial sum if the relation fails, else None.
    """

    relation_holds: bool
    worst_margin: float
    violating_k: Optional[int]


def _as_vector(x):
    x = np.array(x, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("expected a non-empty vector")
    if not np.all(np.isfinite(x)):
        raise ValueError("vector has non-finite entries")
    return x


def _as_pair(x, y):
    x = _as_vector(x)
    y = _as_vector(y)
    if x.size != y.size:
        raise LengthMismatchError(f"lengths differ: {x.size} vs {y.size}")
    return x, y


def _verdict(margins, tol):
    k = int(np.argmin(margins))
    worst = float(margins[k])
    holds = worst >= -tol
    return MajorisationVerdict(
        relation_holds=holds, worst_margin=worst, violating_k=None if holds else k + 1
    )


def sort_desc(x):
    """Entries of ``x`` in non-ascending order."""
    return -np.sort(-_as_vector(x))


def weakly_majorises(x, y, tol=TOL_REL):
    """Does ``x`` weakly majorise ``y``?

    Checks ``sum(y_desc[:k]) <= sum(x_desc[:k])`` for all ``k``. The margin of each ``k``
    is the slack divided by ``1 + |sum(x_desc[:k])|``.

    Parameters
    ----------
    x, y: array_like
        Real vectors of equal length.
    tol: float
        Tolerance on the normalised margins. Defaults to 1e-9.

    Returns
    -------
    MajorisationVerdict

    Raises
    ------
    LengthMismatchError
        If ``x`` and ``y`` differ in length.

    """
    x, y = _as_pair(x, y)
    return _verdict(_weak_margins(x, y), tol)


def _weak_margins(x, y):
    sx = np.cumsum(sort_desc(x))
    sy = np.cumsum(sort_desc(y))
    return (sx - sy) / (1.0 + np.abs(sx))


def majorises(x, y, tol=TOL_REL):
    """Does ``x`` majorise ``y``, i.e. weakly majorise it with equal totals?"""
    x, y = _as_pair(x, y)
    margins = _weak_margins(x, y)
    total_x = np.sum(x)
    margins[-1] = min(margins[-1], -abs(total_x - np.sum(y)) / (1.0 + abs(total_x)))
    return _verdict(margins, tol)


def log_majorises(x, y, tol=TOL_REL, weak=False, zero_floor=0.0):
    """Does ``x`` (weakly) log-majorise ``y``?

    Compares the partial products of the non-ascending entries. With only positive
    entries the margins are differences of partial sums of logarithms, which is a
    relative comparison of the products. If any entry is at most ``zero_floor * m``, ``m``
    being the largest entry, the partial products of ``x / m`` and ``y / m`` are compared
    directly instead.
    Unless ``weak``, the full products must agree as well.

    Parameters
    ----------
    x, y: array_like
        Non-negative vectors of equal length.
    tol: float
        Tolerance on the margins. Defaults to 1e-9.
    weak: bool
        Only check the partial-product inequalities.
    zero_floor: float
        Relative size below which entries count as zeros. Defaults to 0.

    Returns
    -------
    MajorisationVerdict

    Raises
    ------
    LengthMismatchError
        If ``x`` and ``y`` differ in length.
    NegativeEntryError
        If an entry is negative.

    """
    x, y = _as_pair(x, y)
    if np.any(x < 0) or np.any(y < 0):
        raise NegativeEntryError("log-majorisation needs non-negative entries")
    xd = sort_desc(x)
    yd = sort_desc(y)
    m = max(xd[0], yd[0], np.finfo(float).tiny)
    if min(xd[-1], yd[-1]) > zero_floor * m:
        margins = np.cumsum(np.log(xd)) - np.cumsum(np.log(yd))
    else:
        margins = np.cumprod(xd / m) - np.cumprod(yd / m)
    if not weak:
        margins[-1] = min(margins[-1], -abs(margins[-1]))
    return _verdict(margins, tol)


def phi_isotone(x):
    """``sum(log(1 + exp(x_i)))`` without overflow for large entries."""
    return float(np.sum(np.logaddexp(0.0, _as_vector(x))))


def phi_gradient(x):
    """Gradient of :func:`phi_isotone`, the logistic function ``1 / (1 + exp(-x_i))``."""
    return expit(_as_vector(x))


def pinch(x, rng, n_transforms=10):
    """Apply random T-transforms to ``x``, giving a vector majorised by ``x``.

    Each transform picks two positions ``i != j`` and a weight ``t`` in ``[0, 1]`` and
    replaces ``(x_i, x_j)`` by ``(t x_i + (1 - t) x_j, t x_j + (1 - t) x_i)``.

    Parameters
    ----------
    x: array_like
        Real vector.
    rng: numpy.random.Generator
        Source of randomness.
    n_transforms: int
        Number of T-transforms.

    Returns
    -------
    numpy.ndarray
        ``y`` with ``y`` majorised by ``x``.

    """
    y = _as_vector(x).copy()
    if y.size < 2:
        return y
    for _ in range(n_transforms):
        i, j = rng.choice(y.size, size=2, replace=False)
        t = rng.uniform()
        y[i], y[j] = t * y[i] + (1 - t) * y[j], t * y[j] + (1 - t) * y[i]
    return y


def compound_matrix(A, k):
    """The ``k``-th compound (antisymmetric tensor power) of a square matrix.

    Entry ``(I, J)`` is the minor of ``A`` with rows ``I`` and columns ``J``, where ``I``
    and ``J`` run over the ``k``-subsets of ``range(n)`` in lexicographic order.

    Parameters
    ----------
    A: array_like
        Square matrix of dimension ``n``.
    k: int
        Order, ``1 <= k <= n``.

    Returns
    -------
    numpy.ndarray
        ``C(n, k) x C(n, k)`` matrix.

    Raises
    ------
    InvalidOrderError
        If ``k`` is out of range.

    """
    A = as_square_matrix(A)
    n = A.shape[0]
    if int(k) != k or not 1 <= k <= n:
        raise InvalidOrderError(f"order k={k} outside 1..{n}")
    idx = np.array(list(combinations(range(n), int(k))))
    minors = A[idx[:, None, :, None], idx[None, :, None, :]]
    return np.linalg.det(minors)
