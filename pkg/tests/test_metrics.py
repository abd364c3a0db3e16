import numpy as np
import pytest

from numpy.testing import assert_allclose
from scipy.stats import ortho_group

from psd_root_interpolation.ensembles import EnsembleSpec, generate_psd
from psd_root_interpolation.exceptions import NotPSDError, SingularInputError
from psd_root_interpolation.metrics import (
    MetricKind,
    check_psd_pair,
    cholesky_factor,
    distance,
    distance_procrustes,
    procrustes_rotation,
    unscaled_polar_factor,
)


def eigh_sqrt(D):
    w, V = np.linalg.eigh(D)
    return (V * np.sqrt(np.maximum(w, 0))) @ V.T


def random_pd(rng, n):
    X = rng.standard_normal((n, n))
    return X @ X.T + 0.5 * np.eye(n)


@pytest.mark.parametrize("kind", list(MetricKind))
def test_distance_to_itself(kind):
    D = np.array([[2.0, 1.0, 0.0], [1.0, 2.0, 0.5], [0.0, 0.5, 1.0]])
    assert distance(kind, D, D) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("kind", [k.value for k in MetricKind])
def test_distance_is_symmetric(kind):
    rng = np.random.default_rng(0)
    D1 = random_pd(rng, 3)
    D2 = random_pd(rng, 3)
    assert distance(kind, D1, D2) == pytest.approx(distance(kind, D2, D1), rel=1e-10)


def test_distance_examples():
    assert distance("euclidean", np.eye(2), 3 * np.eye(2)) == pytest.approx(2 * np.sqrt(2))
    assert distance("euclidean-root", np.eye(2), 4 * np.eye(2)) == pytest.approx(np.sqrt(2))
    assert distance("cholesky", np.diag([1.0, 4.0]), np.diag([4.0, 1.0])) == pytest.approx(
        np.sqrt(2)
    )
    assert distance("riemannian", np.eye(3), np.exp(2) * np.eye(3)) == pytest.approx(
        2 * np.sqrt(3)
    )


def test_riemannian_blows_up_near_singular():
    for eps in (1e-2, 1e-4, 1e-8):
        d = distance("riemannian", np.eye(3), np.diag([eps, 1.0, 1.0]))
        assert d == pytest.approx(abs(np.log(eps)))
    with pytest.raises(SingularInputError):
        distance("riemannian", np.eye(3), np.diag([0.0, 1.0, 1.0]))


def test_procrustes_against_svd():
    D1 = np.diag([1.0, 4.0])
    D2 = np.array([[2.0, 1.0], [1.0, 2.0]])
    Q1 = eigh_sqrt(D1)
    Q2 = eigh_sqrt(D2)
    W, _, Vt = np.linalg.svd(Q2 @ Q1)
    U = W @ Vt
    assert_allclose(unscaled_polar_factor(D1, D2), U, atol=1e-12)
    assert_allclose(procrustes_rotation(D1, D2), U.T, atol=1e-12)
    assert distance_procrustes(D1, D2) == pytest.approx(np.linalg.norm(Q1 - U.T @ Q2))


@pytest.mark.parametrize("rank_mode", ["full", "deficient", "mixed"])
def test_procrustes_ordering(rank_mode):
    spec = EnsembleSpec(dim=3, trials=30, seed=1, rank_mode=rank_mode)
    for index in range(spec.trials):
        D1 = generate_psd(spec, index, 0)
        D2 = generate_psd(spec, index, 1)
        d_s = distance("procrustes", D1, D2)
        slack = 1e-10 * (1 + np.linalg.norm(D1) + np.linalg.norm(D2))
        assert 0 <= d_s <= distance("euclidean-root", D1, D2) + slack
        assert d_s <= distance("cholesky", D1, D2) + slack


def test_procrustes_is_minimal_over_rotations():
    rng = np.random.default_rng(2)
    D1 = random_pd(rng, 3)
    D2 = random_pd(rng, 3)
    Q1 = eigh_sqrt(D1)
    Q2 = eigh_sqrt(D2)
    d_s = distance_procrustes(D1, D2)
    for R in ortho_group.rvs(3, size=200, random_state=3):
        assert d_s <= np.linalg.norm(Q1 - R @ Q2) + 1e-12


def test_unscaled_polar_factor():
    rng = np.random.default_rng(4)
    D = random_pd(rng, 3)
    assert_allclose(unscaled_polar_factor(D, D), np.eye(3), atol=1e-12)
    assert_allclose(
        unscaled_polar_factor(np.diag([1.0, 2.0]), np.diag([5.0, 3.0])), np.eye(2), atol=1e-14
    )

    D1 = random_pd(rng, 3)
    D2 = random_pd(rng, 3)
    U = unscaled_polar_factor(D1, D2)
    assert_allclose(U.T @ U, np.eye(3), atol=1e-12)
    assert_allclose(unscaled_polar_factor(0.3 * D1, 7.0 * D2), U, atol=1e-10)
    # U.T Q2 Q1 is the modulus of Q2 Q1, hence symmetric
    M = U.T @ eigh_sqrt(D2) @ eigh_sqrt(D1)
    assert_allclose(M, M.T, atol=1e-10)


def test_unscaled_polar_factor_singular_product():
    # Q2 Q1 = diag(1, 0); the perturbed factor of (Q2 + eps)(Q1 + eps) is I
    U = unscaled_polar_factor(np.diag([1.0, 0.0]), np.eye(2))
    assert_allclose(U, np.eye(2), atol=1e-14)
    assert np.linalg.det(np.diag([1.0, 0.0]) + U.T) == pytest.approx(2.0)


def test_cholesky_factor():
    rng = np.random.default_rng(5)
    D = random_pd(rng, 4)
    assert_allclose(cholesky_factor(D), np.linalg.cholesky(D).T, atol=1e-12)
    S = cholesky_factor(np.diag([4.0, 0.0, 9.0]))
    assert_allclose(S, np.diag([2.0, 0.0, 3.0]))


def test_check_psd_pair():
    D1, D2 = check_psd_pair([[1, 2], [0, 5]], np.eye(2))
    assert_allclose(D1, [[1, 1], [1, 5]])
    with pytest.raises(ValueError):
        check_psd_pair(np.eye(2), np.eye(3))
    with pytest.raises(NotPSDError):
        check_psd_pair(np.eye(2), np.diag([1.0, -1.0]))
    with pytest.raises(ValueError):
        distance("hyperbolic", np.eye(2), np.eye(2))
