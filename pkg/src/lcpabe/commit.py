"""Deterministic matrix commitments with C V_L = M - B Z.

Two backends share one interface:

``SuccinctFold`` compresses pairs of n x m blocks through the public
parameters. A block pair X is bit-decomposed into slots b, its digest is
sum_j b_j W_j, and the pp identity turns the bottom rows of T into fixed
verification matrices for the left and right halves. A binary tree of such
folds handles any width.

``TrapdoorMock`` is for noisy tests only: C = 0, V = 0 and Z is a Gaussian
preimage of M under B. It needs the trapdoor of B.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .gauss import GaussParam
from .succinct import CapacityError, SuccinctPP
from .trapdoor import TrapdoorHandle, sample_pre
from .zq import IntMatrix, Rng, ZqMatrix, bit_decompose, gadget_length, matmul_mod

SUCCINCT_FOLD = "succinct-fold"
TRAPDOOR_MOCK = "trapdoor-mock"

# widest commitment accepted, in blocks of m columns
MAX_LEAVES = 1 << 12


@dataclass(frozen=True)
class Opening:
    C: ZqMatrix
    V: ZqMatrix
    Z: IntMatrix

    def holds(self, M: ZqMatrix, B: ZqMatrix) -> bool:
        return self.C @ self.V == M - (B @ self.Z)


def tree_depth(L: int, m: int) -> int:
    blocks = max(1, math.ceil(L / m))
    return max(1, math.ceil(math.log2(blocks)))


class SuccinctFold:
    kind = SUCCINCT_FOLD

    def __init__(self, pp: SuccinctPP):
        n, m, q = pp.n, pp.m, pp.q
        self.k = gadget_length(q)
        self.slots = 2 * n * m * self.k
        if pp.ell < self.slots:
            raise CapacityError(f"fold needs {self.slots} slots but pp has ell={pp.ell}")
        self.pp = pp
        self.n, self.m, self.q = n, m, q
        # slot j <-> (row r, column c in [0, 2m), bit t), lexicographic
        r, c, t = np.meshgrid(np.arange(n), np.arange(2 * m), np.arange(self.k), indexing="ij")
        self._slot_row = r.reshape(-1)
        self._slot_col = c.reshape(-1)
        self._slot_gcol = (r * self.k + t).reshape(-1)  # the column of G^{-1}(E_j) carrying the 1

    @cached_property
    def _top(self) -> np.ndarray:
        """Top blocks of T used by the slots, as [i, row, j, col]."""
        m, s = self.m, self.slots
        top = self.pp.T.data[: s * m, : s * m]
        return top.reshape(s, m, s, m)

    @cached_property
    def half_matrices(self) -> tuple[np.ndarray, np.ndarray]:
        """Unreduced V^left and V^right, each m x m."""
        m = self.m
        out = np.zeros((2, m, m), dtype=np.int64)
        bottom = self.pp.T.data[self.pp.ell * m :]
        for j in range(self.slots):
            col = self._slot_col[j]
            out[col // m, :, col % m] += bottom[:, j * m + self._slot_gcol[j]]
        return out[0], out[1]

    def _bits(self, X: np.ndarray) -> np.ndarray:
        n, m, k = self.n, self.m, self.k
        bits = bit_decompose(X, self.q).reshape(n, k, 2 * m)
        return bits.transpose(0, 2, 1).reshape(-1)

    def digest(self, X: np.ndarray) -> np.ndarray:
        """Digest of an n x 2m block pair."""
        b = self._bits(X)
        W = self.pp.W.data[: self.slots * self.n].reshape(self.slots, self.n, self.m)
        return np.mod(np.einsum("j,jnm->nm", b, W), self.q)

    def half_openings(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Unreduced Z^left, Z^right with digest(X) V^h = X_h - B Z^h."""
        m = self.m
        b = self._bits(X)
        weighted = np.einsum("i,iajb->ajb", b, self._top)  # sum_i b_i T_{i,j}
        out = np.zeros((2, m, m), dtype=np.int64)
        for j in range(self.slots):
            col = self._slot_col[j]
            out[col // m, :, col % m] += weighted[:, j, self._slot_gcol[j]]
        return out[0], out[1]

    def _leaves(self, M: ZqMatrix) -> tuple[list[np.ndarray], int]:
        n, m = self.n, self.m
        L = M.cols
        d = tree_depth(L, m)
        if (1 << d) > MAX_LEAVES:
            raise CapacityError(f"width {L} needs {1 << d} leaves, above {MAX_LEAVES}")
        padded = np.zeros((n, (1 << d) * m), dtype=np.int64)
        padded[:, :L] = M.data
        return [padded[:, p * m : (p + 1) * m] for p in range(1 << d)], d

    def _levels(self, M: ZqMatrix) -> list[list[np.ndarray]]:
        """Node values per level, leaves last; level 0 holds the root digest."""
        leaves, d = self._leaves(M)
        levels = [leaves]
        cur = leaves
        for _ in range(d):
            cur = [self.digest(np.hstack([cur[2 * i], cur[2 * i + 1]])) for i in range(len(cur) // 2)]
            levels.append(cur)
        levels.reverse()
        return levels

    def commit(self, M: ZqMatrix) -> ZqMatrix:
        return ZqMatrix(self._levels(M)[0][0], self.q)

    def verification_matrix(self, L: int) -> ZqMatrix:
        m, q = self.m, self.q
        d = tree_depth(L, m)
        halves = [np.mod(h, q) for h in self.half_matrices]
        blocks = []
        for p in range(math.ceil(L / m)):
            acc = np.eye(m, dtype=np.int64)
            for level in range(d):
                direction = (p >> (d - 1 - level)) & 1
                acc = matmul_mod(acc, halves[direction], q)
            blocks.append(acc)
        return ZqMatrix(np.hstack(blocks)[:, :L], q)

    def open(self, M: ZqMatrix) -> IntMatrix:
        m, q = self.m, self.q
        L = M.cols
        levels = self._levels(M)
        d = len(levels) - 1
        halves = [np.mod(h, q) for h in self.half_matrices]
        blocks = []
        for p in range(math.ceil(L / m)):
            acc = np.zeros((m, m), dtype=np.int64)
            for level in range(d):
                node = p >> (d - level)
                direction = (p >> (d - 1 - level)) & 1
                children = np.hstack([levels[level + 1][2 * node], levels[level + 1][2 * node + 1]])
                z_half = self.half_openings(children)[direction]
                acc = np.mod(matmul_mod(acc, halves[direction], q) + z_half, q)
            blocks.append(acc)
        return ZqMatrix(np.hstack(blocks)[:, :L], q).lift()

    def opening(self, M: ZqMatrix) -> Opening:
        return Opening(self.commit(M), self.verification_matrix(M.cols), self.open(M))

    def norm_ledger(self, L: int) -> dict[str, float]:
        """Measured single-level norms next to the composed growth and cited bounds."""
        m, q = self.m, self.q
        d = tree_depth(L, m)
        v_half = max(int(np.abs(h).max()) for h in self.half_matrices)
        ones = np.full((self.n, 2 * m), q - 1, dtype=np.int64)
        z_half = max(int(np.abs(h).max()) for h in self.half_openings(ones))
        t_norm = int(np.abs(self.pp.T.data).max())
        logq = math.log2(q)
        return {
            "depth": d,
            "v_half": v_half,
            "z_half": z_half,
            "v_composed_estimate": float(m * v_half) ** d,
            "z_composed_estimate": d * float(m * v_half) ** max(0, d - 1) * z_half,
            "t_norm": t_norm,
            "cited_v_bound": float(t_norm) ** 4 * m**4 * logq,
            "cited_z_bound": float(t_norm) * m**7 * logq * math.log2(max(2, L)),
        }


class TrapdoorMock:
    """Test-only backend: zero commitment, Gaussian openings through td_B."""

    kind = TRAPDOOR_MOCK

    def __init__(self, pp: SuccinctPP, td_B: TrapdoorHandle, width: GaussParam, seed: bytes = b"mock-open"):
        self.pp = pp
        self.td_B = td_B
        self.width = width
        self.seed = seed

    def commit(self, M: ZqMatrix) -> ZqMatrix:
        return ZqMatrix.zeros(self.pp.n, self.pp.m, self.pp.q)

    def verification_matrix(self, L: int) -> ZqMatrix:
        return ZqMatrix.zeros(self.pp.m, L, self.pp.q)

    def open(self, M: ZqMatrix) -> IntMatrix:
        if self.td_B is None:
            raise ValueError("trapdoor-mock openings need the trapdoor of B")
        # seeded by the matrix itself so repeated openings agree
        digest = hashlib.sha256(self.seed + M.data.astype("<i8").tobytes() + str(M.shape).encode()).digest()
        return sample_pre(Rng(digest), self.pp.B, self.td_B, M, self.width)

    def opening(self, M: ZqMatrix) -> Opening:
        return Opening(self.commit(M), self.verification_matrix(M.cols), self.open(M))
