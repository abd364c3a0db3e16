import numpy as np
import pytest

from hypothesis import given
from hypothesis.strategies import floats, integers, lists
from numpy.testing import assert_allclose

from psd_root_interpolation.exceptions import (
    InvalidOrderError,
    LengthMismatchError,
    NegativeEntryError,
)
from psd_root_interpolation.majorisation import (
    compound_matrix,
    log_majorises,
    majorises,
    phi_gradient,
    phi_isotone,
    pinch,
    sort_desc,
    weakly_majorises,
)


def test_sort_desc():
    assert_allclose(sort_desc([1, 3, 2]), [3, 2, 1])
    with pytest.raises(ValueError):
        sort_desc([])
    with pytest.raises(ValueError):
        sort_desc([1.0, np.inf])


def test_weakly_majorises_examples():
    assert weakly_majorises([3, 1], [2, 1]).relation_holds
    verdict = weakly_majorises([1, 1], [3, 0])
    assert not verdict.relation_holds
    assert verdict.violating_k == 1
    verdict = weakly_majorises([5, 2, 7], [2, 7, 5])
    assert verdict.relation_holds
    assert verdict.worst_margin == 0
    assert verdict.violating_k is None


def test_majorises_examples():
    assert majorises([3, 1], [2, 2]).relation_holds
    verdict = majorises([3, 1], [2, 1])
    assert not verdict.relation_holds
    assert verdict.violating_k == 2
    assert majorises([0.5, -1.0, 2.0], [2.0, 0.5, -1.0]).relation_holds


def test_log_majorises_examples():
    verdict = log_majorises([4, 1], [2, 2])
    assert verdict.relation_holds
    assert verdict.worst_margin == pytest.approx(0.0, abs=1e-15)
    verdict = log_majorises([2, 2], [4, 1])
    assert not verdict.relation_holds
    assert verdict.violating_k == 1
    # equal totals are only required for the strong relation
    assert not log_majorises([4, 2], [2, 2]).relation_holds
    assert log_majorises([4, 2], [2, 2], weak=True).relation_holds


def test_log_majorises_with_zeros():
    assert log_majorises([1.0, 0.0], [1.0, 0.0]).relation_holds
    # both full products vanish
    assert log_majorises([3.0, 0.0], [2.0, 0.0]).relation_holds
    verdict = log_majorises([2.0, 0.0], [1.0, 1.0], weak=True)
    assert not verdict.relation_holds
    assert verdict.violating_k == 2
    # tiny entries switch to plain products once below the floor
    assert log_majorises([1.0, 1e-10], [1.0, 2e-10], weak=True, zero_floor=1e-6).relation_holds
    assert not log_majorises([1.0, 1e-10], [1.0, 2e-10], weak=True).relation_holds


def test_majorisation_rejects():
    with pytest.raises(LengthMismatchError):
        weakly_majorises([1, 2], [1])
    with pytest.raises(LengthMismatchError):
        majorises([1, 2], [1, 2, 3])
    with pytest.raises(NegativeEntryError):
        log_majorises([1, -1], [1, 1])


@given(lists(floats(min_value=-100, max_value=100), min_size=1, max_size=8), integers(0, 2 ** 32 - 1))
def test_pinch_gives_majorised_vector(x, seed):
    y = pinch(x, np.random.default_rng(seed))
    assert majorises(x, y).relation_holds
    assert weakly_majorises(x, y).relation_holds
    phi_x = phi_isotone(x)
    assert phi_isotone(y) <= phi_x + 1e-10 * (1 + abs(phi_x))


@given(lists(floats(min_value=-5, max_value=5), min_size=1, max_size=8), integers(0, 2 ** 32 - 1))
def test_log_majorisation_implies_weaker_relations(v, seed):
    x = np.exp(v)
    y = np.exp(pinch(v, np.random.default_rng(seed)))
    assert log_majorises(x, y).relation_holds
    assert log_majorises(x, y, weak=True).relation_holds
    assert weakly_majorises(x, y).relation_holds


def test_phi_isotone():
    assert phi_isotone([0, 0]) == pytest.approx(2 * np.log(2))
    assert phi_isotone([1000.0]) == pytest.approx(1000.0)
    assert phi_isotone([-1000.0]) == pytest.approx(0.0, abs=1e-300)
    assert_allclose(phi_gradient([0.0, 1000.0, -1000.0]), [0.5, 1.0, 0.0])


def test_phi_gradient_against_finite_differences():
    rng = np.random.default_rng(0)
    z = rng.normal(0, 3, size=5)
    h = 1e-6
    fd = [(phi_isotone(z + e) - phi_isotone(z - e)) / (2 * h) for e in h * np.eye(5)]
    assert_allclose(phi_gradient(z), fd, rtol=1e-6, atol=1e-7)


def test_compound_matrix_examples():
    A = np.array([[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]])
    assert_allclose(compound_matrix(A, 1), A)
    assert_allclose(compound_matrix(A, 3), [[np.linalg.det(A)]])
    assert_allclose(compound_matrix(np.diag([3.0, 2.0, 1.0]), 2), np.diag([6.0, 3.0, 2.0]))
    assert compound_matrix(np.eye(5), 2).shape == (10, 10)


@pytest.mark.parametrize("k", [0, 4, 1.5])
def test_compound_matrix_rejects(k):
    with pytest.raises(InvalidOrderError):
        compound_matrix(np.eye(3), k)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_compound_matrix_identities(k):
    rng = np.random.default_rng(k)
    X = rng.standard_normal((4, 4))
    Y = rng.standard_normal((4, 4))
    assert_allclose(
        compound_matrix(X @ Y, k), compound_matrix(X, k) @ compound_matrix(Y, k), atol=1e-10
    )
    A = X @ X.T
    w = np.sort(np.linalg.eigvalsh(A))[::-1]
    top = np.linalg.eigvalsh(compound_matrix(A, k))[-1]
    assert top == pytest.approx(np.prod(w[:k]), rel=1e-9)
