import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lcpabe.zq import (
    IntMatrix,
    Rng,
    ZqMatrix,
    bit_decompose,
    gadget,
    gadget_length,
    g_inverse,
    is_probable_prime,
    kron,
    rank_mod,
    right_inverse_mod,
    sample_sign,
    sample_uniform,
    solve_mod,
)

PRIMES = [2, 3, 13, 257, 65537, (1 << 61) - 1]


def matrices(q, rows=3, cols=4):
    return st.lists(st.integers(0, q - 1), min_size=rows * cols, max_size=rows * cols).map(
        lambda xs: ZqMatrix(np.array(xs, dtype=object if q > 1 << 31 else np.int64).reshape(rows, cols), q)
    )


def test_gadget_length():
    assert gadget_length(13) == 4
    assert gadget_length(16) == 4
    assert gadget_length(17) == 5
    assert gadget_length(65537) == 17


def test_constructor_reduces():
    M = ZqMatrix([[-1, 14], [13, 26]], 13)
    assert M.tolist() == [[12, 1], [0, 0]]


def test_lift_range():
    M = ZqMatrix([[0, 6, 7, 12]], 13)
    assert M.lift().tolist() == [[0, 6, -6, -1]]
    E = ZqMatrix([[0, 1, 2, 3]], 4)
    assert E.lift().tolist() == [[0, 1, 2, -1]]


@given(matrices(13), matrices(13))
def test_add_sub_inverse(a, b):
    assert (a + b) - b == a
    assert a - a == ZqMatrix.zeros(3, 4, 13)
    assert -(-a) == a


@given(matrices(65537, 2, 3), matrices(65537, 3, 2))
def test_matmul_matches_python_ints(a, b):
    expected = [[sum(int(a.data[i, k]) * int(b.data[k, j]) for k in range(3)) % 65537 for j in range(2)] for i in range(2)]
    assert (a @ b).tolist() == expected


@settings(max_examples=20)
@given(matrices((1 << 61) - 1, 2, 3), matrices((1 << 61) - 1, 3, 2))
def test_matmul_wide_modulus(a, b):
    q = (1 << 61) - 1
    expected = [[sum(int(a.data[i, k]) * int(b.data[k, j]) for k in range(3)) % q for j in range(2)] for i in range(2)]
    assert (a @ b).tolist() == expected


def test_kron_mixed_product():
    rng = Rng(1)
    A, B = sample_uniform(rng, 2, 3, 13), sample_uniform(rng, 2, 2, 13)
    C, D = sample_uniform(rng, 3, 2, 13), sample_uniform(rng, 2, 3, 13)
    assert kron(A, B) @ kron(C, D) == kron(A @ C, B @ D)


def test_gadget_shape_and_values():
    G = gadget(2, 10, 13)
    assert G.shape == (2, 10)
    assert G.tolist()[0][:4] == [1, 2, 4, 8]
    assert G.tolist()[1][4:8] == [1, 2, 4, 8]
    assert G.tolist()[0][8:] == [0, 0]
    with pytest.raises(ValueError):
        gadget(2, 7, 13)


@given(st.integers(1, 3), st.integers(0, 4), st.sampled_from([13, 257, 65537]), st.integers(0, 2**32))
def test_g_inverse_round_trip(n, extra, q, seed):
    m = n * gadget_length(q) + extra
    t = sample_uniform(Rng(seed), n, 3, q)
    x = g_inverse(t, n, m)
    assert set(np.unique(x.data)) <= {0, 1}
    assert gadget(n, m, q) @ x == t


def test_bit_decompose_order():
    bits = bit_decompose(np.array([[5], [12]]), 13)
    assert bits[:, 0].tolist() == [1, 0, 1, 0, 0, 0, 1, 1]


def test_intmatrix_arithmetic_and_mod():
    A = IntMatrix([[1, -2], [3, 4]])
    assert (A + A).tolist() == [[2, -4], [6, 8]]
    assert A.norm_inf() == 4
    assert A.mod(5).tolist() == [[1, 3], [3, 4]]
    Z = ZqMatrix([[1, 1]], 5)
    assert (Z @ A).tolist() == [[4, 2]]


def test_rng_determinism_and_children():
    a, b = Rng(7), Rng(7)
    assert np.array_equal(a.integers(0, 100, 10), b.integers(0, 100, 10))
    assert not np.array_equal(Rng(7).child("x").integers(0, 1 << 30, 4), Rng(7).child("y").integers(0, 1 << 30, 4))
    assert np.array_equal(Rng(b"seed").integers(0, 9, 5), Rng(b"seed").integers(0, 9, 5))


def test_sample_sign_entries():
    R = sample_sign(Rng(3), 20, 20)
    assert set(np.unique(R.data)) <= {-1, 0, 1}


def test_rank_and_solve():
    assert rank_mod([[1, 2], [2, 4]], 13) == 1
    assert rank_mod([[1, 2], [2, 5]], 13) == 2
    x = solve_mod([[1, 2], [3, 4]], [5, 6], 13)
    assert [(1 * x[0] + 2 * x[1]) % 13, (3 * x[0] + 4 * x[1]) % 13] == [5, 6]
    assert solve_mod([[1, 1], [1, 1]], [0, 1], 13) is None


@given(st.integers(0, 2**32))
def test_right_inverse(seed):
    H = sample_uniform(Rng(seed), 2, 4, 13)
    if rank_mod(H) < 2:
        with pytest.raises(ValueError):
            right_inverse_mod(H)
    else:
        assert H @ right_inverse_mod(H) == ZqMatrix.identity(2, 13)


@pytest.mark.parametrize("q", PRIMES)
def test_primes_accepted(q):
    assert is_probable_prime(q)


@pytest.mark.parametrize("q", [1, 4, 15, 65535, 561])
def test_composites_rejected(q):
    assert not is_probable_prime(q)
