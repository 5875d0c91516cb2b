import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lcpabe.gauss import GaussParam
from lcpabe.trapdoor import (
    KIND_GADGET,
    TrapdoorError,
    check_tensor_trapdoor,
    gadget_preimage,
    sample_pre,
    sample_pre_block,
    sample_pre_tensor,
    tensor_handle,
    trap_gen,
)
from lcpabe.zq import IntMatrix, Rng, ZqMatrix, gadget, gadget_length, kron, sample_sign, sample_uniform


@settings(max_examples=15, deadline=None)
@given(st.integers(1, 2), st.sampled_from([13, 17, 257]), st.integers(0, 2**32))
def test_sample_pre_hits_target(n, q, seed):
    rng = Rng(seed)
    m = 2 * n * gadget_length(q)
    A, td = trap_gen(rng, n, m, q)
    assert td.kind == KIND_GADGET
    y = sample_uniform(rng, n, 3, q)
    x = sample_pre(rng, A, td, y, GaussParam(6.0))
    assert A @ x == y


def test_trapdoor_identity():
    rng = Rng(1)
    n, m, q = 1, 10, 13
    A, td = trap_gen(rng, n, m, q)
    w = n * gadget_length(q)
    R_stack = IntMatrix(np.vstack([td.matrix.data, np.eye(w, dtype=np.int64)]))
    assert A @ R_stack == gadget(n, w, q)


def test_tagged_allows_square_gadget_width():
    A, td = trap_gen(Rng(2), 1, 4, 13, tagged=True)
    x = sample_pre(Rng(3), A, td, ZqMatrix([[5, 7]], 13), GaussParam(4.0))
    assert A @ x == ZqMatrix([[5, 7]], 13)


def test_width_too_small_rejected():
    with pytest.raises((TrapdoorError, ValueError)):
        trap_gen(Rng(4), 1, 4, 13)


def test_gadget_preimage_randomized_but_exact():
    q = 13
    t = np.array([[3, 9, 12]])
    a = gadget_preimage(Rng(5), t, q, width=8)
    b = gadget_preimage(Rng(6), t, q, width=8)
    G = gadget(1, 8, q)
    assert G @ IntMatrix(a) == ZqMatrix(t, q)
    assert G @ IntMatrix(b) == ZqMatrix(t, q)


def test_below_quality_warns_once(caplog):
    A, td = trap_gen(Rng(7), 1, 8, 13)
    logging.getLogger("lcpabe").setLevel(logging.WARNING)
    with caplog.at_level(logging.WARNING, logger="lcpabe"):
        for _ in range(3):
            sample_pre(Rng(8), A, td, ZqMatrix([[1]], 13), GaussParam(1.0))
    assert td.below_quality(GaussParam(1.0))
    assert sum("insecure toy parameters" in r.message for r in caplog.records) == 1


def test_block_sampler():
    rng = Rng(9)
    n, m, q, k = 1, 8, 13, 3
    B, td = trap_gen(rng, n, m, q)
    W = sample_uniform(rng, k * n, m, q)
    Y = sample_uniform(rng, k * n, 5, q)
    x = sample_pre_block(rng, B, td, W, k, Y, GaussParam(5.0))
    big = ZqMatrix(np.hstack([np.kron(np.eye(k, dtype=np.int64), B.data), W.data]), q)
    assert big @ x == Y


def _tensor_instance(seed, H_rows):
    rng = Rng(seed)
    n, m, q = 1, 8, 13
    B, td = trap_gen(rng, n, m, q)
    H = ZqMatrix(H_rows, q)
    k, t = H.shape
    # A = [I_k (x) B | W] with W = (H (x) G) - (I_k (x) B) R_top, R = [R_top; I]
    R_top = sample_sign(rng, k * m, t * m)
    HG = kron(H, gadget(n, m, q))
    IB = ZqMatrix(np.kron(np.eye(k, dtype=np.int64), B.data), q)
    W = HG - IB @ R_top
    A = ZqMatrix(np.hstack([IB.data, W.data]), q)
    R = IntMatrix(np.vstack([R_top.data, np.eye(t * m, dtype=np.int64)]))
    return A, R, H, rng


def test_tensor_sampler():
    A, R, H, rng = _tensor_instance(10, [[1, 2, 0], [0, 1, 5]])
    G = check_tensor_trapdoor(A, R, H)
    assert G.shape == (1, 8)
    y = sample_uniform(rng, A.rows, 2, 13)
    x = sample_pre_tensor(rng, A, R, H, y, GaussParam(4.0))
    assert A @ x == y
    assert tensor_handle(R, H).kind == "tensor"


def test_tensor_rank_deficient_rejected():
    A, R, H, rng = _tensor_instance(11, [[1, 2], [2, 4]])
    with pytest.raises(TrapdoorError):
        sample_pre_tensor(rng, A, R, H, sample_uniform(rng, A.rows, 1, 13), GaussParam(4.0))


def test_tensor_bad_trapdoor_rejected():
    A, R, H, rng = _tensor_instance(12, [[1, 0], [0, 1]])
    broken = IntMatrix(R.data + np.eye(*R.shape, dtype=np.int64))
    with pytest.raises(TrapdoorError):
        check_tensor_trapdoor(A, broken, H)
