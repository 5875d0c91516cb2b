import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lcpabe.commit import SuccinctFold, TrapdoorMock, tree_depth
from lcpabe.gauss import GaussParam
from lcpabe.succinct import CapacityError, gen_pp
from lcpabe.zq import Rng, ZqMatrix, sample_uniform


@pytest.fixture(scope="module")
def fold_setup():
    pp, td = gen_pp(Rng(100), 1, 8, 13, 128, GaussParam(5.0))
    return pp, td, SuccinctFold(pp)


def test_tree_depth():
    assert tree_depth(1, 8) == 1
    assert tree_depth(16, 8) == 1
    assert tree_depth(17, 8) == 2
    assert tree_depth(64, 8) == 3
    assert tree_depth(100, 8) == 4


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 130), st.integers(0, 2**32))
def test_commitment_identity_any_width(fold_setup, L, seed):
    pp, _, fold = fold_setup
    M = sample_uniform(Rng(seed), 1, L, 13)
    opening = fold.opening(M)
    assert opening.C.shape == (1, 8)
    assert opening.V.shape == (8, L)
    assert opening.Z.shape == (8, L)
    assert opening.holds(M, pp.B)


def test_single_fold_half_identity(fold_setup):
    pp, _, fold = fold_setup
    X = sample_uniform(Rng(1), 1, 16, 13).data
    D = ZqMatrix(fold.digest(X), 13)
    for h, (V, Z) in enumerate(zip(fold.half_matrices, fold.half_openings(X))):
        half = ZqMatrix(X[:, h * 8 : (h + 1) * 8], 13)
        assert D @ ZqMatrix(np.mod(V, 13), 13) == half - pp.B @ ZqMatrix(np.mod(Z, 13), 13)


def test_zero_matrix_commits_to_zero(fold_setup):
    _, _, fold = fold_setup
    M = ZqMatrix.zeros(1, 40, 13)
    assert fold.commit(M).is_zero()
    assert not np.any(fold.open(M).data)


def test_verification_depends_only_on_width(fold_setup):
    _, _, fold = fold_setup
    assert fold.verification_matrix(24) == fold.verification_matrix(24)
    assert fold.opening(sample_uniform(Rng(2), 1, 24, 13)).V == fold.opening(sample_uniform(Rng(3), 1, 24, 13)).V


def test_commit_is_deterministic(fold_setup):
    _, _, fold = fold_setup
    M = sample_uniform(Rng(4), 1, 30, 13)
    assert fold.commit(M) == fold.commit(M)
    assert fold.open(M) == fold.open(M)


def test_capacity_error_for_small_pp():
    pp, _ = gen_pp(Rng(5), 1, 8, 13, 4, GaussParam(5.0))
    with pytest.raises(CapacityError):
        SuccinctFold(pp)


def test_norm_ledger_fields(fold_setup):
    _, _, fold = fold_setup
    ledger = fold.norm_ledger(100)
    assert ledger["depth"] == 4
    assert ledger["v_half"] > 0 and ledger["z_half"] > 0
    assert ledger["v_composed_estimate"] == pytest.approx((8 * ledger["v_half"]) ** 4)


def test_mock_backend(fold_setup):
    pp, td, _ = fold_setup
    mock = TrapdoorMock(pp, td, GaussParam(4.0))
    M = sample_uniform(Rng(6), 1, 20, 13)
    opening = mock.opening(M)
    assert opening.C.is_zero() and opening.V.is_zero()
    assert opening.holds(M, pp.B)
    assert mock.open(M) == mock.open(M)
    with pytest.raises(ValueError):
        TrapdoorMock(pp, None, GaussParam(4.0)).open(M)
