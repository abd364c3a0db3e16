import numpy as np
import pytest

from numpy.testing import assert_allclose

from psd_root_interpolation.ensembles import EnsembleSpec, generate_psd
from psd_root_interpolation.exceptions import NotPSDError, SingularInputError
from psd_root_interpolation.geodesics import GeodesicSpec, path_point, swelling_profile
from psd_root_interpolation.linalg_core import is_psd
from psd_root_interpolation.matrix_means import geometric_mean
from psd_root_interpolation.metrics import MetricKind


def eigh_sqrt(D):
    w, V = np.linalg.eigh(D)
    return (V * np.sqrt(np.maximum(w, 0))) @ V.T


def random_pair(seed, dim=3, rank_mode="full"):
    spec = EnsembleSpec(dim=dim, trials=1, seed=seed, rank_mode=rank_mode)
    return generate_psd(spec, 0, 0), generate_psd(spec, 0, 1)


@pytest.mark.parametrize("metric", list(MetricKind))
def test_endpoints(metric):
    D1, D2 = random_pair(0)
    spec = GeodesicSpec(metric, D1, D2)
    assert_allclose(path_point(spec, 1.0), D1, rtol=1e-8, atol=1e-10 * np.linalg.norm(D1))
    assert_allclose(path_point(spec, 0.0), D2, rtol=1e-8, atol=1e-10 * np.linalg.norm(D2))


@pytest.mark.parametrize("metric", list(MetricKind))
def test_constant_path(metric):
    D = np.array([[2.0, 0.5, 0.0], [0.5, 1.0, 0.2], [0.0, 0.2, 3.0]])
    spec = GeodesicSpec(metric, D, D)
    for p in (0.0, 0.25, 0.5, 1.0):
        assert_allclose(path_point(spec, p), D, atol=1e-12)


def test_euclidean_root_midpoint():
    spec = GeodesicSpec("euclidean-root", np.diag([4.0, 1.0]), np.diag([1.0, 4.0]))
    assert_allclose(path_point(spec, 0.5), np.diag([2.25, 2.25]))


def test_procrustes_against_svd():
    D1 = np.array([[2.0, 1.0], [1.0, 1.0]])
    D2 = np.diag([1.0, 4.0])
    Q1 = eigh_sqrt(D1)
    Q2 = eigh_sqrt(D2)
    W, _, Vt = np.linalg.svd(Q2 @ Q1)
    U = W @ Vt
    spec = GeodesicSpec(MetricKind.PROCRUSTES, D1, D2)
    for p in (-1.0, 0.5, 2.0):
        Y = p * Q1 + (1 - p) * U.T @ Q2
        assert_allclose(path_point(spec, p), Y.T @ Y, atol=1e-12)


def test_riemannian_midpoint_is_geometric_mean():
    spec = GeodesicSpec("riemannian", np.eye(2), 4 * np.eye(2))
    assert_allclose(path_point(spec, 0.5), 2 * np.eye(2))
    D1, D2 = random_pair(1)
    G = path_point(GeodesicSpec("riemannian", D1, D2), 0.5)
    assert_allclose(G, geometric_mean(D1, D2), rtol=1e-8, atol=1e-10 * np.linalg.norm(G))


@pytest.mark.parametrize("metric", ["euclidean-root", "procrustes", "cholesky"])
@pytest.mark.parametrize("rank_mode", ["full", "deficient"])
def test_paths_stay_in_cone(metric, rank_mode):
    for seed in range(5):
        spec = GeodesicSpec(metric, *random_pair(seed, rank_mode=rank_mode))
        for p in np.linspace(-2.0, 3.0, 51):
            assert is_psd(path_point(spec, p))


def test_euclidean_extrapolation_leaves_cone():
    spec = GeodesicSpec("euclidean", np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
    assert_allclose(path_point(spec, 0.25), np.diag([0.25, 0.75]))
    for p in (-1.0, 2.0):
        with pytest.raises(NotPSDError):
            path_point(spec, p)


def test_riemannian_rejects_singular_endpoints():
    spec = GeodesicSpec("riemannian", np.diag([1.0, 0.0]), np.eye(2))
    with pytest.raises(SingularInputError):
        path_point(spec, 0.5)


def test_spec_rejects():
    with pytest.raises(NotPSDError):
        GeodesicSpec("procrustes", np.diag([1.0, -1.0]), np.eye(2))
    with pytest.raises(ValueError):
        GeodesicSpec("geodesic", np.eye(2), np.eye(2))
    with pytest.raises(ValueError):
        GeodesicSpec("procrustes", np.eye(2), np.eye(3))


def test_swelling_profile():
    profile = swelling_profile(GeodesicSpec("procrustes", np.eye(3), np.eye(3)), 5)
    assert profile.index.name == "p"
    assert_allclose(profile.index, [0.0, 0.25, 0.5, 0.75, 1.0])
    assert_allclose(profile.values, 1.0)

    D1 = np.diag([1.0, 8.0, 27.0])
    D2 = np.diag([8.0, 8.0, 8.0])
    profile = swelling_profile(GeodesicSpec("euclidean-root", D1, D2), 4, p_min=-1.0, p_max=2.0)
    assert_allclose(profile.index, [-1.0, 0.0, 1.0, 2.0])
    assert profile.iloc[1] == pytest.approx(8.0)
    assert profile.iloc[2] == pytest.approx(6.0)

    with pytest.raises(ValueError):
        swelling_profile(GeodesicSpec("procrustes", D1, D2), 1)


@pytest.mark.parametrize("rank_mode", ["full", "mixed"])
def test_procrustes_swells_less_than_root(rank_mode):
    spec = EnsembleSpec(dim=3, trials=20, seed=8, rank_mode=rank_mode)
    for index in range(spec.trials):
        D1 = generate_psd(spec, index, 0)
        D2 = generate_psd(spec, index, 1)
        procrustes = swelling_profile(GeodesicSpec("procrustes", D1, D2), 11)
        root = swelling_profile(GeodesicSpec("euclidean-root", D1, D2), 11)
        scale = max(np.linalg.norm(D1), np.linalg.norm(D2)) ** 3
        det_s = procrustes.values ** 3
        det_h = root.values ** 3
        assert np.all(det_s <= det_h + 1e-9 * (det_h + scale))
