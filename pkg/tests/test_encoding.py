import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lcpabe import encoding
from lcpabe.cpabe import compile_for, encrypt, keygen_for
from lcpabe.zq import IntMatrix, Rng, ZqMatrix


@given(st.integers(0, 5), st.integers(0, 5), st.integers(0, 2**32))
def test_matrix_round_trip(rows, cols, seed):
    rng = np.random.default_rng(seed)
    Z = ZqMatrix(rng.integers(0, 65537, (rows, cols)), 65537)
    I = IntMatrix(rng.integers(-(2**40), 2**40, (rows, cols)))
    for M in (Z, I):
        raw = encoding.encode_matrix(M)
        assert len(raw) == 24 + 8 * rows * cols
        back, end = encoding.decode_matrix(raw, 0, 65537)
        assert end == len(raw)
        assert back == M
        assert type(back) is type(M)


def test_matrix_header_layout():
    raw = encoding.encode_matrix(IntMatrix([[-1]]))
    assert raw[:4] == b"LCPA"
    assert raw[4:6] == b"\x01\x00"
    assert raw[6] == 8 and raw[7] == 1
    assert raw[24:] == b"\xff" * 8


def test_matrix_errors():
    raw = encoding.encode_matrix(ZqMatrix([[5]], 13))
    with pytest.raises(encoding.FormatError):
        encoding.decode_matrix(raw, 0, None)
    with pytest.raises(encoding.FormatError):
        encoding.decode_matrix(raw, 0, 5)
    with pytest.raises(encoding.FormatError):
        encoding.decode_matrix(raw[:-1], 0, 13)
    with pytest.raises(encoding.FormatError):
        encoding.decode_matrix(b"XXXX" + raw[4:], 0, 13)


def test_container_round_trips(toy):
    pk, msk = toy
    params = pk.params
    assert encoding.decode_pk(encoding.encode_pk(pk)) == pk
    assert encoding.decode_msk(encoding.encode_msk(msk)) == msk
    sk = keygen_for(Rng(1), msk, ["a", "c"])
    assert encoding.decode_sk(encoding.encode_sk(sk, params)) == (sk, params)
    policy = compile_for(pk, "a & !(b | c)")
    ct = encrypt(Rng(2), pk, 1, policy)
    assert encoding.decode_ct(encoding.encode_ct(ct, params)) == (ct, params)
    assert encoding.decode_policy(encoding.encode_policy(policy, params)) == (policy, params)
    assert encoding.decode_pp(encoding.encode_pp(pk.pp, params)) == (pk.pp, params)
    assert encoding.decode_trapdoor(encoding.encode_trapdoor(msk.td_B, params)) == (msk.td_B, params)
    f = encoding.CiphertextFile(policy, (ct, ct))
    assert encoding.decode_ct_file(encoding.encode_ct_file(f, params)) == (f, params)


def test_commitment_round_trip(toy):
    from lcpabe.commit import SuccinctFold

    pk, _ = toy
    M = ZqMatrix(np.arange(20).reshape(1, 20), 13)
    op = SuccinctFold(pk.pp).opening(M)
    c = encoding.Commitment("succinct-fold", op.C, op.V, op.Z)
    assert encoding.decode_commitment(encoding.encode_commitment(c, pk.params)) == (c, pk.params)


def test_role_mismatch_and_trailing_bytes(toy):
    pk, msk = toy
    sk = keygen_for(Rng(3), msk, ["a"])
    raw = encoding.encode_sk(sk, pk.params)
    with pytest.raises(encoding.FormatError, match="expected a PK"):
        encoding.decode_pk(raw)
    with pytest.raises(encoding.FormatError, match="trailing"):
        encoding.decode_sk(raw + b"\x00")
    with pytest.raises(encoding.FormatError):
        encoding.decode_sk(raw[:-3])
    with pytest.raises(encoding.FormatError):
        encoding.read_header(b"LCPC\x01\x00\x63")


def test_ciphertext_length_fixed_by_shape(toy):
    pk, _ = toy
    a = encrypt(Rng(4), pk, 0, compile_for(pk, "a"))
    b = encrypt(Rng(5), pk, 1, compile_for(pk, "(a & b) | (c & !d)"))
    assert len(encoding.encode_ct(a, pk.params)) == len(encoding.encode_ct(b, pk.params))
