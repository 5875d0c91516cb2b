"""Binary encodings for matrices and the key, ciphertext and policy containers.

A matrix is ``"LCPA" | version u16 | width u8 (=8) | flags u8 | rows u64 |
cols u64`` followed by row-major 64-bit little-endian entries. Flag bit 0
marks a signed (two's complement) matrix. Unsigned matrices hold reduced
Z_q representatives and take their modulus from the enclosing container.

A container is ``"LCPC" | version u16 | role u8`` then a fixed-width
SchemeParams block and a role-specific payload.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .commit import SUCCINCT_FOLD, TRAPDOOR_MOCK
from .cpabe import GAUSSIAN_NOISE, ZERO_NOISE, Ciphertext, MasterSecretKey, PublicKey, SchemeParams, SecretKey
from .gauss import GaussParam
from .lsss import Policy, compile_policy, parse_policy
from .succinct import SuccinctPP
from .trapdoor import KIND_BLOCK, KIND_GADGET, KIND_TENSOR, TrapdoorHandle
from .zq import IntMatrix, ZqMatrix

MATRIX_MAGIC = b"LCPA"
CONTAINER_MAGIC = b"LCPC"
VERSION = 1
ELEMENT_WIDTH = 8
FLAG_SIGNED = 1

ROLE_PK, ROLE_MSK, ROLE_SK, ROLE_CT, ROLE_PP, ROLE_POLICY, ROLE_COMMIT, ROLE_TRAPDOOR, ROLE_CT_FILE = range(1, 10)
ROLE_NAMES = {
    ROLE_PK: "PK",
    ROLE_MSK: "MSK",
    ROLE_SK: "SK",
    ROLE_CT: "CT",
    ROLE_PP: "PP",
    ROLE_POLICY: "POLICY",
    ROLE_COMMIT: "COMMIT",
    ROLE_TRAPDOOR: "TRAPDOOR",
    ROLE_CT_FILE: "CT-FILE",
}

_KINDS = [KIND_GADGET, KIND_BLOCK, KIND_TENSOR]
_NOISE = [ZERO_NOISE, GAUSSIAN_NOISE]
_BACKENDS = [SUCCINCT_FOLD, TRAPDOOR_MOCK]
_PARAMS = struct.Struct("<QQQQddddQQBBd")
_MATRIX_HEADER = struct.Struct("<4sHBBQQ")


class FormatError(ValueError):
    pass


def encode_matrix(M: ZqMatrix | IntMatrix) -> bytes:
    signed = isinstance(M, IntMatrix)
    rows, cols = M.shape
    header = _MATRIX_HEADER.pack(MATRIX_MAGIC, VERSION, ELEMENT_WIDTH, FLAG_SIGNED if signed else 0, rows, cols)
    body = np.ascontiguousarray(M.data, dtype="<i8" if signed else "<u8").tobytes()
    return header + body


def decode_matrix(buf: bytes, offset: int = 0, q: int | None = None) -> tuple[ZqMatrix | IntMatrix, int]:
    if len(buf) < offset + _MATRIX_HEADER.size:
        raise FormatError("truncated matrix header")
    magic, version, width, flags, rows, cols = _MATRIX_HEADER.unpack_from(buf, offset)
    if magic != MATRIX_MAGIC:
        raise FormatError(f"bad matrix magic {magic!r}")
    if version != VERSION or width != ELEMENT_WIDTH:
        raise FormatError(f"unsupported matrix version {version} or width {width}")
    offset += _MATRIX_HEADER.size
    end = offset + rows * cols * ELEMENT_WIDTH
    if len(buf) < end:
        raise FormatError("truncated matrix body")
    signed = bool(flags & FLAG_SIGNED)
    data = np.frombuffer(buf, dtype="<i8" if signed else "<u8", count=rows * cols, offset=offset).reshape(rows, cols)
    if signed:
        return IntMatrix(data.astype(np.int64)), end
    if q is None:
        raise FormatError("an unsigned matrix needs a modulus")
    if rows * cols and int(data.max()) >= q:
        raise FormatError("unsigned matrix entry not reduced")
    return ZqMatrix(data.astype(np.int64), q), end


class _Writer:
    def __init__(self):
        self.parts: list[bytes] = []

    def u8(self, v: int) -> None:
        self.parts.append(struct.pack("<B", v))

    def u64(self, v: int) -> None:
        self.parts.append(struct.pack("<Q", v))

    def f64(self, v: float) -> None:
        self.parts.append(struct.pack("<d", v))

    def text(self, s: str) -> None:
        raw = s.encode()
        self.u64(len(raw))
        self.parts.append(raw)

    def matrix(self, M) -> None:
        self.parts.append(encode_matrix(M))

    def optional(self, M) -> None:
        self.u8(M is not None)
        if M is not None:
            self.matrix(M)

    def getvalue(self) -> bytes:
        return b"".join(self.parts)


class _Reader:
    def __init__(self, buf: bytes, offset: int, q: int | None):
        self.buf, self.pos, self.q = buf, offset, q

    def _unpack(self, fmt: str):
        size = struct.calcsize(fmt)
        if len(self.buf) < self.pos + size:
            raise FormatError("truncated container")
        (v,) = struct.unpack_from(fmt, self.buf, self.pos)
        self.pos += size
        return v

    def u8(self) -> int:
        return self._unpack("<B")

    def u64(self) -> int:
        return self._unpack("<Q")

    def f64(self) -> float:
        return self._unpack("<d")

    def text(self) -> str:
        size = self.u64()
        raw = self.buf[self.pos : self.pos + size]
        if len(raw) != size:
            raise FormatError("truncated string")
        self.pos += size
        return raw.decode()

    def matrix(self):
        M, self.pos = decode_matrix(self.buf, self.pos, self.q)
        return M

    def optional(self):
        return self.matrix() if self.u8() else None

    def done(self) -> None:
        if self.pos != len(self.buf):
            raise FormatError(f"{len(self.buf) - self.pos} trailing bytes")


def _pack_params(p: SchemeParams) -> bytes:
    return _PARAMS.pack(
        p.n, p.m, p.q, p.ell_pp, p.sigma, p.chi, p.chi1, p.chi_s, p.n_base, p.s_max,
        _NOISE.index(p.noise_mode), _BACKENDS.index(p.backend), p.budget,
    )


def _unpack_params(buf: bytes, offset: int) -> SchemeParams:
    if len(buf) < offset + _PARAMS.size:
        raise FormatError("truncated parameter block")
    f = _PARAMS.unpack_from(buf, offset)
    try:
        noise, backend = _NOISE[f[10]], _BACKENDS[f[11]]
    except IndexError:
        raise FormatError("unknown noise mode or backend byte") from None
    return SchemeParams(*f[:10], noise, backend, f[12])


def _container(role: int, params: SchemeParams, payload: bytes) -> bytes:
    return CONTAINER_MAGIC + struct.pack("<HB", VERSION, role) + _pack_params(params) + payload


def read_header(buf: bytes) -> tuple[int, SchemeParams]:
    if len(buf) < 7 or buf[:4] != CONTAINER_MAGIC:
        raise FormatError("not a container")
    version, role = struct.unpack_from("<HB", buf, 4)
    if version != VERSION:
        raise FormatError(f"unsupported container version {version}")
    if role not in ROLE_NAMES:
        raise FormatError(f"unknown role byte {role}")
    return role, _unpack_params(buf, 7)


def _open(buf: bytes, role: int) -> tuple[SchemeParams, _Reader]:
    found, params = read_header(buf)
    if found != role:
        raise FormatError(f"expected a {ROLE_NAMES[role]} container, found {ROLE_NAMES[found]}")
    return params, _Reader(buf, 7 + _PARAMS.size, params.q)


# payload writers and readers, shared between containers


def _write_trapdoor(w: _Writer, td: TrapdoorHandle) -> None:
    w.u8(_KINDS.index(td.kind))
    w.optional(td.matrix)
    w.optional(td.tag)
    w.f64(td.quality)
    w.u64(td.blocks)
    w.u8(td.inner is not None)
    if td.inner is not None:
        _write_trapdoor(w, td.inner)


def _read_trapdoor(r: _Reader) -> TrapdoorHandle:
    kind = r.u8()
    if kind >= len(_KINDS):
        raise FormatError(f"unknown trapdoor kind byte {kind}")
    matrix, tag, quality, blocks = r.optional(), r.optional(), r.f64(), r.u64()
    inner = _read_trapdoor(r) if r.u8() else None
    return TrapdoorHandle(_KINDS[kind], matrix, tag, quality, inner, blocks)


def _write_pp(w: _Writer, pp: SuccinctPP) -> None:
    w.u64(pp.ell)
    w.f64(pp.sigma.sigma)
    w.f64(pp.sigma.tail_cut)
    for M in (pp.B, pp.W, pp.T):
        w.matrix(M)


def _read_pp(r: _Reader) -> SuccinctPP:
    ell, sigma, tail = r.u64(), r.f64(), r.f64()
    B, W, T = r.matrix(), r.matrix(), r.matrix()
    return SuccinctPP(B, W, T, ell, GaussParam(sigma, tail))


def _write_pk(w: _Writer, pk: PublicKey) -> None:
    w.u64(len(pk.universe))
    for name in pk.universe:
        w.text(name)
    _write_pp(w, pk.pp)
    w.matrix(pk.A)
    for group in (pk.B_cols, pk.D, pk.Q):
        w.u64(len(group))
        for M in group:
            w.matrix(M)
    w.matrix(pk.y)


def _read_pk(r: _Reader, params: SchemeParams) -> PublicKey:
    universe = tuple(r.text() for _ in range(r.u64()))
    pp = _read_pp(r)
    A = r.matrix()
    B_cols, D, Q = (tuple(r.matrix() for _ in range(r.u64())) for _ in range(3))
    return PublicKey(params, universe, pp, A, B_cols, D, Q, r.matrix())


def _write_policy(w: _Writer, policy: Policy) -> None:
    w.u64(policy.s_max)
    w.u64(len(policy.formula.names))
    for name in policy.formula.names:
        w.text(name)
    w.text(str(policy.formula))


def _read_policy(r: _Reader) -> Policy:
    s_max = r.u64()
    names = tuple(r.text() for _ in range(r.u64()))
    return compile_policy(parse_policy(r.text(), names), s_max)


def _write_ct(w: _Writer, ct: Ciphertext) -> None:
    for M in (ct.c1, ct.c2, ct.c3):
        w.matrix(M)


def _read_ct(r: _Reader) -> Ciphertext:
    return Ciphertext(r.matrix(), r.matrix(), r.matrix())


# public entry points


def encode_pk(pk: PublicKey) -> bytes:
    w = _Writer()
    _write_pk(w, pk)
    return _container(ROLE_PK, pk.params, w.getvalue())


def decode_pk(buf: bytes) -> PublicKey:
    params, r = _open(buf, ROLE_PK)
    pk = _read_pk(r, params)
    r.done()
    return pk


def encode_msk(msk: MasterSecretKey) -> bytes:
    w = _Writer()
    _write_pk(w, msk.pk)
    _write_trapdoor(w, msk.td_B)
    return _container(ROLE_MSK, msk.pk.params, w.getvalue())


def decode_msk(buf: bytes) -> MasterSecretKey:
    params, r = _open(buf, ROLE_MSK)
    pk = _read_pk(r, params)
    msk = MasterSecretKey(pk, _read_trapdoor(r))
    r.done()
    return msk


def encode_sk(sk: SecretKey, params: SchemeParams) -> bytes:
    w = _Writer()
    w.u64(len(sk.labels))
    for u in sk.labels:
        w.u64(u)
        w.matrix(sk.k[u])
    w.matrix(sk.t)
    return _container(ROLE_SK, params, w.getvalue())


def decode_sk(buf: bytes) -> tuple[SecretKey, SchemeParams]:
    params, r = _open(buf, ROLE_SK)
    keys = {}
    for _ in range(r.u64()):
        u = r.u64()
        keys[u] = r.matrix()
    t = r.matrix()
    r.done()
    return SecretKey(tuple(keys), keys, t), params


def encode_ct(ct: Ciphertext, params: SchemeParams) -> bytes:
    """Ciphertext alone; its length depends only on (n, m, q)."""
    w = _Writer()
    _write_ct(w, ct)
    return _container(ROLE_CT, params, w.getvalue())


def decode_ct(buf: bytes) -> tuple[Ciphertext, SchemeParams]:
    params, r = _open(buf, ROLE_CT)
    ct = _read_ct(r)
    r.done()
    return ct, params


def encode_policy(policy: Policy, params: SchemeParams) -> bytes:
    w = _Writer()
    _write_policy(w, policy)
    return _container(ROLE_POLICY, params, w.getvalue())


def decode_policy(buf: bytes) -> tuple[Policy, SchemeParams]:
    params, r = _open(buf, ROLE_POLICY)
    policy = _read_policy(r)
    r.done()
    return policy, params


def encode_pp(pp: SuccinctPP, params: SchemeParams) -> bytes:
    w = _Writer()
    _write_pp(w, pp)
    return _container(ROLE_PP, params, w.getvalue())


def decode_pp(buf: bytes) -> tuple[SuccinctPP, SchemeParams]:
    params, r = _open(buf, ROLE_PP)
    pp = _read_pp(r)
    r.done()
    return pp, params


def encode_trapdoor(td: TrapdoorHandle, params: SchemeParams) -> bytes:
    w = _Writer()
    _write_trapdoor(w, td)
    return _container(ROLE_TRAPDOOR, params, w.getvalue())


def decode_trapdoor(buf: bytes) -> tuple[TrapdoorHandle, SchemeParams]:
    params, r = _open(buf, ROLE_TRAPDOOR)
    td = _read_trapdoor(r)
    r.done()
    return td, params


@dataclass(frozen=True)
class Commitment:
    backend: str
    C: ZqMatrix
    V: ZqMatrix
    Z: IntMatrix


def encode_commitment(c: Commitment, params: SchemeParams) -> bytes:
    w = _Writer()
    w.u8(_BACKENDS.index(c.backend))
    for M in (c.C, c.V, c.Z):
        w.matrix(M)
    return _container(ROLE_COMMIT, params, w.getvalue())


def decode_commitment(buf: bytes) -> tuple[Commitment, SchemeParams]:
    params, r = _open(buf, ROLE_COMMIT)
    kind = r.u8()
    if kind >= len(_BACKENDS):
        raise FormatError(f"unknown backend byte {kind}")
    c = Commitment(_BACKENDS[kind], r.matrix(), r.matrix(), r.matrix())
    r.done()
    return c, params


@dataclass(frozen=True)
class CiphertextFile:
    """What the command line writes: the policy plus one ciphertext per message bit."""

    policy: Policy
    cts: tuple[Ciphertext, ...]


def encode_ct_file(f: CiphertextFile, params: SchemeParams) -> bytes:
    w = _Writer()
    _write_policy(w, f.policy)
    w.u64(len(f.cts))
    for ct in f.cts:
        _write_ct(w, ct)
    return _container(ROLE_CT_FILE, params, w.getvalue())


def decode_ct_file(buf: bytes) -> tuple[CiphertextFile, SchemeParams]:
    params, r = _open(buf, ROLE_CT_FILE)
    policy = _read_policy(r)
    cts = tuple(_read_ct(r) for _ in range(r.u64()))
    r.done()
    return CiphertextFile(policy, cts), params
