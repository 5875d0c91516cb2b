"""Public parameters (B, W, T) with [I_ell (x) B | W] T = I_ell (x) G."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gauss import GaussParam, sample_array
from .trapdoor import TrapdoorHandle, sample_pre, sample_pre_block, trap_gen
from .zq import IntMatrix, Rng, ZqMatrix, gadget, gadget_length, matmul_mod, sample_uniform

DEFAULT_ENTRY_BUDGET = 1 << 27


class CapacityError(ValueError):
    pass


@dataclass(frozen=True)
class SuccinctPP:
    B: ZqMatrix
    W: ZqMatrix
    T: IntMatrix
    ell: int
    sigma: GaussParam

    @property
    def n(self) -> int:
        return self.B.rows

    @property
    def m(self) -> int:
        return self.B.cols

    @property
    def q(self) -> int:
        return self.B.q

    def top_block(self, i: int, j: int) -> np.ndarray:
        """The m x m block of T in block-row i, block-column j (B side)."""
        m = self.m
        return self.T.data[i * m : (i + 1) * m, j * m : (j + 1) * m]

    def bottom_block(self, j: int) -> np.ndarray:
        """The m x m block of the last m rows of T in block-column j (W side)."""
        m = self.m
        return self.T.data[self.ell * m :, j * m : (j + 1) * m]

    def W_block(self, i: int) -> np.ndarray:
        n = self.n
        return self.W.data[i * n : (i + 1) * n]


@dataclass(frozen=True)
class PPCheck:
    ok: bool
    failing_block: int | None = None

    def __bool__(self) -> bool:
        return self.ok


def identity_gadget(ell: int, n: int, m: int, q: int) -> ZqMatrix:
    return ZqMatrix(np.kron(np.eye(ell, dtype=np.int64), gadget(n, m, q).data), q)


def _guard(ell: int, m: int, budget: int) -> None:
    entries = ell * m * (ell + 1) * m
    if entries > budget:
        raise CapacityError(f"T would hold {entries} entries, above the budget of {budget}")


def gen_pp(
    rng: Rng, n: int, m: int, q: int, ell: int, sigma: GaussParam, entry_budget: int = DEFAULT_ENTRY_BUDGET
) -> tuple[SuccinctPP, TrapdoorHandle]:
    """Sample pp and return it with the trapdoor of B (the master secret)."""
    if ell < 1:
        raise ValueError(f"ell must be positive, got {ell}")
    _guard(ell, m, entry_budget)
    B, td_B = trap_gen(rng, n, m, q)
    W = sample_uniform(rng, ell * n, m, q)
    T = sample_pre_block(rng, B, td_B, W, ell, identity_gadget(ell, n, m, q), sigma)
    return SuccinctPP(B, W, T, ell, sigma), td_B


def verify_pp(pp: SuccinctPP) -> PPCheck:
    """Exact check of the defining block equation, one block-row at a time."""
    n, m, q, ell = pp.n, pp.m, pp.q, pp.ell
    T = pp.T.data
    if pp.W.shape != (ell * n, m) or T.shape != ((ell + 1) * m, ell * m):
        return PPCheck(False, 0)
    G = gadget(n, m, q).data
    bottom = np.mod(T[ell * m :], q)
    w_part = matmul_mod(pp.W.data, bottom, q)
    for i in range(ell):
        lhs = matmul_mod(pp.B.data, np.mod(T[i * m : (i + 1) * m], q), q)
        lhs = np.mod(lhs + w_part[i * n : (i + 1) * n], q)
        expected = np.zeros((n, ell * m), dtype=np.int64)
        expected[:, i * m : (i + 1) * m] = G
        if not np.array_equal(lhs, expected):
            return PPCheck(False, i)
    return PPCheck(True)


@dataclass(frozen=True)
class SplitTrapdoors:
    B1: ZqMatrix
    B2: ZqMatrix
    td1: TrapdoorHandle
    td2: TrapdoorHandle


def _half_trapdoor(rng: Rng, n: int, half: int, q: int) -> tuple[ZqMatrix, TrapdoorHandle]:
    # a tag keeps the half random when it is no wider than the gadget
    tagged = half < n * gadget_length(q) + 1
    return trap_gen(rng, n, half, q, tagged=tagged)


def gen_pp_split(
    rng: Rng, n: int, m: int, q: int, ell: int, sigma: GaussParam, entry_budget: int = DEFAULT_ENTRY_BUDGET
) -> tuple[SuccinctPP, SplitTrapdoors]:
    """Alternative sampler: B = [B1 | B2], T assembled block by block.

    The bottom rows and the upper half of every B-block are free Gaussians;
    the lower half of each block is a preimage under B2 of what remains of
    e_i^T (x) G.
    """
    if m % 2:
        raise ValueError(f"m must be even, got {m}")
    if ell < 1:
        raise ValueError(f"ell must be positive, got {ell}")
    _guard(ell, m, entry_budget)
    half = m // 2
    B1, td1 = _half_trapdoor(rng, n, half, q)
    B2, td2 = _half_trapdoor(rng, n, half, q)
    B = ZqMatrix(np.hstack([B1.data, B2.data]), q)
    W = sample_uniform(rng, ell * n, m, q)
    cols = ell * m
    bottom = sample_array(rng, sigma, (m, cols))
    ups = sample_array(rng, sigma, (ell, half, cols))
    w_bottom = matmul_mod(W.data, np.mod(bottom, q), q)
    target_all = identity_gadget(ell, n, m, q).data
    targets = []
    for i in range(ell):
        t = target_all[i * n : (i + 1) * n] - w_bottom[i * n : (i + 1) * n]
        t = t - matmul_mod(B1.data, np.mod(ups[i], q), q)
        targets.append(np.mod(t, q))
    downs = sample_pre(rng, B2, td2, ZqMatrix(np.hstack(targets), q), sigma).data
    blocks = []
    for i in range(ell):
        blocks.append(ups[i])
        blocks.append(downs[:, i * cols : (i + 1) * cols])
    blocks.append(bottom)
    T = IntMatrix(np.vstack(blocks))
    return SuccinctPP(B, W, T, ell, sigma), SplitTrapdoors(B1, B2, td1, td2)


def split_preimage(rng: Rng, split: SplitTrapdoors, z: ZqMatrix, chi: GaussParam) -> IntMatrix:
    """Short s with [B1 | B2] s = z: the first half free, the second through B2's trapdoor."""
    s1 = sample_array(rng, chi, (split.B1.cols, z.cols))
    rest = z - (split.B1 @ IntMatrix(s1))
    s2 = sample_pre(rng, split.B2, split.td2, rest, chi)
    return IntMatrix(np.vstack([s1, s2.data]))
