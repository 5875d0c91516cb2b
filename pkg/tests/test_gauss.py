import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lcpabe.gauss import GaussParam, check_tail, pmf, sample_array, sample_matrix, sample_z, smudging_distance
from lcpabe.zq import IntMatrix, Rng


def test_pmf_sums_to_one_and_is_symmetric():
    support, probs = pmf(GaussParam(3.0))
    assert probs.sum() == pytest.approx(1.0)
    assert np.allclose(probs, probs[::-1])
    assert support[0] == -support[-1]


@settings(max_examples=20)
@given(st.floats(0.5, 50.0), st.integers(0, 2**32))
def test_samples_stay_within_tail_cut(sigma, seed):
    p = GaussParam(sigma)
    x = sample_array(Rng(seed), p, (500,))
    assert np.abs(x).max() <= p.bound


def test_degenerate_width_gives_zero():
    p = GaussParam(1e-4)
    assert p.degenerate
    assert not np.any(sample_array(Rng(1), p, (100,)))


def test_empirical_variance():
    x = sample_array(Rng(2), GaussParam(4.0), (20000,))
    assert abs(x.mean()) < 0.15
    assert x.var() == pytest.approx(16.0, rel=0.05)


def test_sample_z_and_matrix_shapes():
    assert isinstance(sample_z(Rng(3), GaussParam(2.0)), int)
    assert sample_matrix(Rng(3), GaussParam(2.0), 3, 5).shape == (3, 5)


def test_tail_check_counts_violations():
    p = GaussParam(1.0)
    big = IntMatrix([[100], [0], [0], [0]])
    small = IntMatrix([[1], [0], [0], [0]])
    report = check_tail([big, small, small, small], p)
    assert report.violations == 1
    assert report.fraction == 0.25
    with pytest.raises(ValueError):
        check_tail([], p)


def test_tail_rate_at_sigma_three():
    p = GaussParam(3.0)
    report = check_tail([sample_matrix(Rng(4), p, 64, 1) for _ in range(300)], p)
    assert report.fraction <= 0.01


def test_smudging_zero_shift():
    assert smudging_distance(0, 10.0, 1000, Rng(5)) == 0.0


def test_smudging_large_in_non_smudging_regime():
    assert smudging_distance(3, 3.0, 20000, Rng(6)) > 0.05


def test_smudging_monotone_in_sigma():
    d = [smudging_distance(1, s, 50000, Rng(7)) for s in (2.0, 8.0, 64.0)]
    assert d[0] > d[1] > d[2]


def test_smudging_rejects_bad_trials():
    with pytest.raises(ValueError):
        smudging_distance(1, 2.0, 0, Rng(8))
