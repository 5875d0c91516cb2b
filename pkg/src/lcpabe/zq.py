"""Exact matrix arithmetic over Z_q and over unreduced integers.

Matrices wrap numpy arrays. Moduli below 2**31 use int64 storage with
chunked accumulation in products; wider moduli fall back to Python ints
(object arrays), which are exact at any size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

_INT64_MAX = (1 << 63) - 1
_NARROW_LIMIT = 1 << 31


@dataclass(frozen=True)
class Modulus:
    q: int

    def __post_init__(self) -> None:
        if self.q < 2:
            raise ValueError(f"modulus must be at least 2, got {self.q}")

    @property
    def bits(self) -> int:
        return gadget_length(self.q)


def gadget_length(q: int) -> int:
    """Smallest k with 2**k >= q."""
    return max(1, (q - 1).bit_length())


def _dtype(q: int):
    return np.int64 if q <= _NARROW_LIMIT else object


def _reduce(data: np.ndarray, q: int) -> np.ndarray:
    dt = _dtype(q)
    if dt is object:
        arr = np.asarray(data, dtype=object)
        return np.vectorize(lambda v: int(v) % q, otypes=[object])(arr) if arr.size else arr
    arr = np.asarray(data)
    if arr.dtype == object:
        return np.array([[int(v) % q for v in row] for row in arr], dtype=np.int64).reshape(arr.shape)
    return np.mod(arr.astype(np.int64, copy=False), q)


def matmul_mod(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    """(a @ b) mod q for reduced operands, without int64 overflow."""
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    if _dtype(q) is object:
        out = np.asarray(a, dtype=object) @ np.asarray(b, dtype=object)
        return _reduce(out, q)
    inner = a.shape[1]
    chunk = max(1, _INT64_MAX // max(1, (q - 1) ** 2))
    if inner <= chunk:
        return np.mod(a @ b, q)
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for start in range(0, inner, chunk):
        stop = min(inner, start + chunk)
        out = np.mod(out + np.mod(a[:, start:stop] @ b[start:stop, :], q), q)
    return out


class ZqMatrix:
    """Dense matrix with entries reduced into [0, q)."""

    __slots__ = ("data", "q")

    def __init__(self, data, q: int):
        arr = np.asarray(data)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-d array, got shape {arr.shape}")
        self.data = _reduce(arr, q)
        self.data.setflags(write=False)
        self.q = int(q)

    @classmethod
    def zeros(cls, rows: int, cols: int, q: int) -> "ZqMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int64), q)

    @classmethod
    def identity(cls, n: int, q: int) -> "ZqMatrix":
        return cls(np.eye(n, dtype=np.int64), q)

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def T(self) -> "ZqMatrix":
        return ZqMatrix(self.data.T, self.q)

    def _other(self, other) -> np.ndarray:
        if isinstance(other, ZqMatrix):
            if other.q != self.q:
                raise ValueError(f"modulus mismatch: {self.q} vs {other.q}")
            return other.data
        if isinstance(other, IntMatrix):
            return _reduce(other.data, self.q)
        raise TypeError(f"cannot combine ZqMatrix with {type(other).__name__}")

    def __add__(self, other) -> "ZqMatrix":
        rhs = self._other(other)
        if rhs.shape != self.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {rhs.shape}")
        return ZqMatrix(self.data + rhs, self.q)

    __radd__ = __add__

    def __sub__(self, other) -> "ZqMatrix":
        rhs = self._other(other)
        if rhs.shape != self.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {rhs.shape}")
        return ZqMatrix(self.data - rhs, self.q)

    def __rsub__(self, other) -> "ZqMatrix":
        return ZqMatrix(self._other(other) - self.data, self.q)

    def __neg__(self) -> "ZqMatrix":
        return ZqMatrix(-self.data, self.q)

    def __matmul__(self, other) -> "ZqMatrix":
        return ZqMatrix(matmul_mod(self.data, self._other(other), self.q), self.q)

    def __rmatmul__(self, other) -> "ZqMatrix":
        return ZqMatrix(matmul_mod(self._other(other), self.data, self.q), self.q)

    def scale(self, c: int) -> "ZqMatrix":
        return ZqMatrix(self.data * (int(c) % self.q), self.q)

    def __getitem__(self, key) -> "ZqMatrix":
        sub = self.data[key]
        if sub.ndim != 2:
            raise IndexError("slicing must keep both axes; use ranges")
        return ZqMatrix(sub, self.q)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ZqMatrix):
            return NotImplemented
        return self.q == other.q and self.shape == other.shape and bool(np.all(self.data == other.data))

    def __hash__(self):
        return hash((self.q, self.shape, self.data.tobytes()))

    def lift(self) -> "IntMatrix":
        """Centered representatives in (-q/2, q/2]."""
        half = self.q // 2
        arr = self.data
        return IntMatrix(np.where(arr > half, arr - self.q, arr))

    def tolist(self) -> list[list[int]]:
        return [[int(v) for v in row] for row in self.data]

    def is_zero(self) -> bool:
        return not bool(np.any(self.data))

    def __repr__(self) -> str:
        return f"ZqMatrix(q={self.q}, shape={self.shape})"


class IntMatrix:
    """Dense signed integer matrix, not reduced modulo anything."""

    __slots__ = ("data",)

    def __init__(self, data):
        arr = np.asarray(data)
        if arr.ndim != 2:
            raise ValueError(f"expected a 2-d array, got shape {arr.shape}")
        if arr.dtype != object:
            arr = arr.astype(np.int64, copy=False)
        self.data = arr
        self.data.setflags(write=False)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(np.zeros((rows, cols), dtype=np.int64))

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(self.data.T)

    def __add__(self, other) -> "IntMatrix":
        if isinstance(other, ZqMatrix):
            return other + self
        return IntMatrix(self.data + other.data)

    def __sub__(self, other) -> "IntMatrix":
        if isinstance(other, ZqMatrix):
            return (-other) + self
        return IntMatrix(self.data - other.data)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(-self.data)

    def __matmul__(self, other):
        if isinstance(other, ZqMatrix):
            return other.__rmatmul__(self)
        return IntMatrix(self.data @ other.data)

    def __getitem__(self, key) -> "IntMatrix":
        sub = self.data[key]
        if sub.ndim != 2:
            raise IndexError("slicing must keep both axes; use ranges")
        return IntMatrix(sub)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.all(self.data == other.data))

    def __hash__(self):
        return hash((self.shape, self.data.tobytes()))

    def mod(self, q: int) -> ZqMatrix:
        return ZqMatrix(self.data, q)

    def norm_inf(self) -> int:
        return norm_inf(self)

    def tolist(self) -> list[list[int]]:
        return [[int(v) for v in row] for row in self.data]

    def __repr__(self) -> str:
        return f"IntMatrix(shape={self.shape})"


class Rng:
    """Seeded randomness. The stream depends only on the seed bytes."""

    algorithm = "pcg64-sha256"

    def __init__(self, seed: int | bytes):
        if isinstance(seed, int):
            seed = seed.to_bytes(32, "little", signed=False) if seed >= 0 else (-seed).to_bytes(32, "little") + b"-"
        import hashlib

        self.seed = hashlib.sha256(bytes(seed)).digest()
        words = [int.from_bytes(self.seed[i : i + 4], "little") for i in range(0, 32, 4)]
        self.gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(words)))

    def child(self, label: str | bytes) -> "Rng":
        """Independent stream derived from this seed and a label."""
        if isinstance(label, str):
            label = label.encode()
        return Rng(self.seed + b"/" + label)

    def integers(self, low: int, high: int, size) -> np.ndarray:
        if high <= _INT64_MAX:
            return self.gen.integers(low, high, size=size, dtype=np.int64)
        # wide moduli: assemble from 62-bit limbs
        span = high - low
        limbs = (span.bit_length() + 61) // 62 + 1
        out = np.zeros(size, dtype=object)
        flat = out.reshape(-1)
        for idx in range(flat.size):
            v = 0
            for _ in range(limbs):
                v = (v << 62) | int(self.gen.integers(0, 1 << 62))
            flat[idx] = low + v % span
        return out


def mat_mul(a: ZqMatrix, b: ZqMatrix) -> ZqMatrix:
    return a @ b


def kron(a: ZqMatrix, b: ZqMatrix) -> ZqMatrix:
    if a.q != b.q:
        raise ValueError(f"modulus mismatch: {a.q} vs {b.q}")
    return ZqMatrix(np.kron(a.data, b.data), a.q)


def hstack(parts: Sequence) -> ZqMatrix | IntMatrix:
    first = parts[0]
    if isinstance(first, ZqMatrix):
        return ZqMatrix(np.hstack([first._other(p) for p in parts]), first.q)
    return IntMatrix(np.hstack([p.data for p in parts]))


def vstack(parts: Sequence) -> ZqMatrix | IntMatrix:
    first = parts[0]
    if isinstance(first, ZqMatrix):
        return ZqMatrix(np.vstack([first._other(p) for p in parts]), first.q)
    return IntMatrix(np.vstack([p.data for p in parts]))


def gadget_vector(q: int) -> np.ndarray:
    return np.array([1 << t for t in range(gadget_length(q))], dtype=object if q > _NARROW_LIMIT else np.int64)


def gadget(n: int, m: int, q: int) -> ZqMatrix:
    """G = [I_n (x) g^T | 0], zero-padded to width m."""
    k = gadget_length(q)
    if m < n * k:
        raise ValueError(f"width {m} too small for gadget with n={n}, k={k}")
    g = gadget_vector(q).reshape(1, k)
    core = np.kron(np.eye(n, dtype=g.dtype), g)
    pad = np.zeros((n, m - n * k), dtype=core.dtype)
    return ZqMatrix(np.hstack([core, pad]), q)


def bit_decompose(values: np.ndarray, q: int) -> np.ndarray:
    """Binary digits of each reduced entry of an (n, c) array, stacked to (n*k, c)."""
    k = gadget_length(q)
    n, c = values.shape
    out = np.zeros((n, k, c), dtype=np.int64)
    if values.dtype == object:
        for t in range(k):
            out[:, t, :] = np.vectorize(lambda v: (int(v) >> t) & 1, otypes=[np.int64])(values) if values.size else 0
    else:
        for t in range(k):
            out[:, t, :] = (values >> t) & 1
    return out.reshape(n * k, c)


def g_inverse(target: ZqMatrix, n: int, m: int) -> IntMatrix:
    """Deterministic binary preimage x with gadget(n, m, q) @ x = target."""
    if target.rows != n:
        raise ValueError(f"target has {target.rows} rows, expected {n}")
    k = gadget_length(target.q)
    if m < n * k:
        raise ValueError(f"width {m} too small for gadget with n={n}, k={k}")
    bits = bit_decompose(target.data, target.q)
    pad = np.zeros((m - n * k, target.cols), dtype=np.int64)
    return IntMatrix(np.vstack([bits, pad]))


def norm_inf(x: IntMatrix | ZqMatrix) -> int:
    data = x.data
    if data.size == 0:
        return 0
    if data.dtype == object:
        return max(abs(int(v)) for v in data.reshape(-1))
    return int(np.max(np.abs(data)))


def sample_uniform(rng: Rng, rows: int, cols: int, q: int) -> ZqMatrix:
    return ZqMatrix(rng.integers(0, q, (rows, cols)), q)


def sample_sign(rng: Rng, rows: int, cols: int) -> IntMatrix:
    return IntMatrix(2 * rng.gen.integers(0, 2, size=(rows, cols), dtype=np.int64) - 1)


# Linear algebra over a prime field, on small matrices held as Python ints.


def _rref(rows: list[list[int]], q: int) -> tuple[list[list[int]], list[int]]:
    mat = [[v % q for v in row] for row in rows]
    pivots: list[int] = []
    r = 0
    ncols = len(mat[0]) if mat else 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = pow(mat[r][c], -1, q)
        mat[r] = [(v * inv) % q for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [(a - f * b) % q for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat, pivots


def rank_mod(a: ZqMatrix | Sequence[Sequence[int]], q: int | None = None) -> int:
    rows, q = _as_rows(a, q)
    if not rows or not rows[0]:
        return 0
    return len(_rref(rows, q)[1])


def solve_mod(a: ZqMatrix | Sequence[Sequence[int]], b: Sequence[int], q: int | None = None) -> list[int] | None:
    """Some x with a @ x = b (mod q), free variables set to zero; None if inconsistent."""
    rows, q = _as_rows(a, q)
    ncols = len(rows[0])
    aug = [row + [bv % q] for row, bv in zip(rows, b)]
    red, pivots = _rref(aug, q)
    if ncols in pivots:
        return None
    x = [0] * ncols
    for i, c in enumerate(pivots):
        x[c] = red[i][ncols]
    return x


def right_inverse_mod(h: ZqMatrix) -> ZqMatrix:
    """X with h @ X = I, for h of full row rank over a prime field."""
    k = h.rows
    cols = []
    for i in range(k):
        e = [0] * k
        e[i] = 1
        x = solve_mod(h, e)
        if x is None:
            raise ValueError("matrix is not of full row rank modulo q")
        cols.append(x)
    return ZqMatrix(np.array(cols, dtype=np.int64).T.reshape(h.cols, k), h.q)


def _as_rows(a, q):
    if isinstance(a, ZqMatrix):
        return [[int(v) for v in row] for row in a.data], a.q
    if q is None:
        raise ValueError("modulus required for plain integer rows")
    return [[int(v) for v in row] for row in a], q


def is_probable_prime(q: int) -> bool:
    if q < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if q % p == 0:
            return q == p
    d, s = q - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, q)
        if x in (1, q - 1):
            continue
        for _ in range(s - 1):
            x = x * x % q
            if x == q - 1:
                break
        else:
            return False
    return True


def ceil_log2(x: int) -> int:
    return math.ceil(math.log2(x)) if x > 1 else 0
