import numpy as np
import pytest

from numpy.testing import assert_allclose

from psd_root_interpolation.ensembles import (
    EnsembleSpec,
    RankMode,
    generate_commuting_pair,
    generate_psd,
    is_deficient,
)
from psd_root_interpolation.exceptions import ValidationError
from psd_root_interpolation.linalg_core import is_psd


def test_generate_psd_is_deterministic():
    spec = EnsembleSpec(dim=4, trials=10, seed=123)
    for index in range(spec.trials):
        assert np.array_equal(generate_psd(spec, index, 1), generate_psd(spec, index, 1))
    assert not np.array_equal(generate_psd(spec, 0, 0), generate_psd(spec, 0, 1))
    assert not np.array_equal(generate_psd(spec, 0, 0), generate_psd(spec, 1, 0))
    other = EnsembleSpec(dim=4, trials=10, seed=124)
    assert not np.array_equal(generate_psd(spec, 0, 0), generate_psd(other, 0, 0))


def test_draws_do_not_depend_on_trial_count():
    short = EnsembleSpec(dim=3, trials=5, seed=9)
    long = EnsembleSpec(dim=3, trials=500, seed=9)
    assert np.array_equal(generate_psd(short, 4, 0), generate_psd(long, 4, 0))


@pytest.mark.parametrize("dim", [2, 3, 5, 8])
@pytest.mark.parametrize("rank_mode", list(RankMode))
def test_generate_psd(dim, rank_mode):
    spec = EnsembleSpec(dim=dim, trials=8, seed=1, rank_mode=rank_mode)
    for index in range(spec.trials):
        for stream in (0, 1):
            D = generate_psd(spec, index, stream)
            assert D.shape == (dim, dim)
            assert np.array_equal(D, D.T)
            assert is_psd(D)
            rank = np.linalg.matrix_rank(D, tol=1e-10 * np.linalg.norm(D))
            if is_deficient(spec, index, stream):
                assert rank <= dim // 2
            else:
                assert rank == dim


def test_mixed_rank_pattern():
    spec = EnsembleSpec(trials=4, rank_mode="mixed")
    pattern = [(is_deficient(spec, i, 0), is_deficient(spec, i, 1)) for i in range(4)]
    assert pattern == [(False, False), (True, False), (False, True), (True, True)]
    assert not is_deficient(EnsembleSpec(), 3, 0)
    assert is_deficient(EnsembleSpec(rank_mode="deficient"), 0, 0)


def test_generate_commuting_pair():
    spec = EnsembleSpec(dim=4, trials=4, seed=2, rank_mode="mixed")
    for index in range(spec.trials):
        pair = generate_commuting_pair(spec, index)
        assert_allclose(pair.basis.T @ pair.basis, np.eye(4), atol=1e-12)
        assert_allclose(pair.A @ pair.B, pair.B @ pair.A, atol=1e-10 * np.linalg.norm(pair.A @ pair.B))
        for D, w, stream in ((pair.A, pair.eigenvalues_a, 0), (pair.B, pair.eigenvalues_b, 1)):
            assert_allclose(np.sort(np.linalg.eigvalsh(D)), np.sort(w), atol=1e-12 * w.max())
            assert np.count_nonzero(w == 0) == (2 if is_deficient(spec, index, stream) else 0)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"dim": 1},
        {"dim": 9},
        {"trials": 0},
        {"seed": -1},
        {"scale_range": (1.0, 1.0)},
        {"scale_range": (0.0, 1.0)},
    ],
)
def test_ensemble_spec_rejects(kwargs):
    with pytest.raises(ValidationError):
        EnsembleSpec(**kwargs)


def test_ensemble_spec_rejects_unknown_rank_mode():
    with pytest.raises(ValueError):
        EnsembleSpec(rank_mode="sparse")


def test_index_out_of_range():
    spec = EnsembleSpec(trials=3)
    with pytest.raises(ValueError):
        generate_psd(spec, 3)
    with pytest.raises(ValueError):
        generate_commuting_pair(spec, -1)
