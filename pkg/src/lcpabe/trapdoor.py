"""Gadget trapdoors and preimage sampling.

Three trapdoor kinds are supported:

* ``gadget``: A = [A_bar | H G_w - A_bar R_bar] with A [R_bar; I_w] = H G_w
  (H is the identity unless a tag was requested);
* ``block``: a gadget trapdoor for B reused across [I_k (x) B | W];
* ``tensor``: any pair (R, H) with A R = H (x) G for the padded gadget G.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .gauss import GaussParam, sample_array
from .zq import (
    IntMatrix,
    Rng,
    ZqMatrix,
    bit_decompose,
    gadget,
    gadget_length,
    kron,
    matmul_mod,
    rank_mod,
    right_inverse_mod,
    sample_sign,
    sample_uniform,
)

log = logging.getLogger(__name__)

KIND_GADGET = "gadget"
KIND_BLOCK = "block"
KIND_TENSOR = "tensor"

# Width of the kernel coefficients that randomize gadget preimages. Kept
# narrow so the spherical perturbation dominates the output covariance.
GADGET_RANDOMIZATION = GaussParam(0.3)


class TrapdoorError(ValueError):
    pass


@dataclass(frozen=True)
class TrapdoorHandle:
    kind: str
    matrix: IntMatrix | None = None  # R_bar for gadget kind, R for tensor kind
    tag: ZqMatrix | None = None  # H for gadget and tensor kinds
    quality: float = 1.0
    inner: "TrapdoorHandle | None" = None  # block kind: the trapdoor of B
    blocks: int = 1

    def below_quality(self, sigma: GaussParam) -> bool:
        """True when sampling at this width is outside the trapdoor's guarantee."""
        return sigma.sigma < self.quality


_warned: set[int] = set()


def _gadget_kernel(q: int) -> np.ndarray:
    """Short basis of the integer kernel of g^T modulo q, as columns."""
    k = gadget_length(q)
    basis = np.zeros((k, k), dtype=np.int64)
    for i in range(k - 1):
        basis[i, i] = 2
        basis[i + 1, i] = -1
    if q == 1 << k:
        basis[k - 1, k - 1] = 2
    else:
        for t in range(k):
            basis[t, k - 1] = (q >> t) & 1
    return basis


def gadget_preimage(rng: Rng, target: np.ndarray, q: int, width: int | None = None) -> np.ndarray:
    """Randomized short z with (I_n (x) g^T) z = target (mod q), zero-padded to ``width`` rows."""
    n, c = target.shape
    k = gadget_length(q)
    bits = bit_decompose(target, q).reshape(n, k, c)
    coeffs = sample_array(rng, GADGET_RANDOMIZATION, (n, k, c))
    z = bits + np.einsum("ab,nbc->nac", _gadget_kernel(q), coeffs)
    z = z.reshape(n * k, c)
    if width is not None and width > n * k:
        z = np.vstack([z, np.zeros((width - n * k, c), dtype=np.int64)])
    return z


def trap_gen(rng: Rng, n: int, m: int, q: int, tagged: bool = False) -> tuple[ZqMatrix, TrapdoorHandle]:
    """Uniform-looking B of width m together with a gadget trapdoor.

    With ``tagged`` a random invertible tag H replaces the identity, which
    keeps B random even when m equals the gadget width.
    """
    w = n * gadget_length(q)
    if m < w + (0 if tagged else 1):
        raise TrapdoorError(f"width m={m} too small: need at least {w + (0 if tagged else 1)} for n={n}, q={q}")
    b_bar = sample_uniform(rng, n, m - w, q)
    r_bar = sample_sign(rng, m - w, w)
    tag = _random_invertible(rng, n, q) if tagged else ZqMatrix.identity(n, q)
    g_w = tag @ gadget(n, w, q)
    right = g_w - (b_bar @ r_bar)
    B = ZqMatrix(np.hstack([b_bar.data, right.data]), q)
    # sign entries give ||R_bar|| = 1 whenever R_bar is nonempty
    quality = 1.0 + w * (1 if m > w else 0)
    td = TrapdoorHandle(KIND_GADGET, matrix=r_bar, tag=tag, quality=float(quality))
    check_gadget_trapdoor(B, td)
    return B, td


def _random_invertible(rng: Rng, n: int, q: int) -> ZqMatrix:
    while True:
        h = sample_uniform(rng, n, n, q)
        if rank_mod(h) == n:
            return h


def check_gadget_trapdoor(B: ZqMatrix, td: TrapdoorHandle) -> None:
    w = td.matrix.cols
    n = B.rows
    stacked = IntMatrix(np.vstack([td.matrix.data, np.eye(w, dtype=np.int64)]))
    if B @ stacked != td.tag @ gadget(n, w, B.q):
        raise TrapdoorError("gadget trapdoor equation fails")


def _warn_quality(td: TrapdoorHandle, sigma: GaussParam) -> None:
    if td.below_quality(sigma) and id(td) not in _warned:
        _warned.add(id(td))
        log.warning("sampling width %.3g below trapdoor quality %.3g: insecure toy parameters", sigma.sigma, td.quality)


def sample_pre(rng: Rng, A: ZqMatrix, td: TrapdoorHandle, y: ZqMatrix, sigma: GaussParam) -> IntMatrix:
    """Short x with A x = y (mod q), one column per column of y."""
    if y.rows != A.rows:
        raise TrapdoorError(f"target has {y.rows} rows, matrix has {A.rows}")
    if td.kind == KIND_GADGET:
        return _sample_pre_gadget(rng, A, td, y, sigma)
    if td.kind == KIND_BLOCK:
        k = td.blocks
        n = A.rows // k
        width_b = td.inner.matrix.rows + td.inner.matrix.cols
        B = A[0:n, 0:width_b]
        W = A[:, k * width_b :]
        return sample_pre_block(rng, B, td.inner, W, k, y, sigma)
    if td.kind == KIND_TENSOR:
        return sample_pre_tensor(rng, A, td.matrix, td.tag, y, sigma)
    raise TrapdoorError(f"unknown trapdoor kind {td.kind!r}")


def block_handle(td_B: TrapdoorHandle, k: int) -> TrapdoorHandle:
    return TrapdoorHandle(KIND_BLOCK, inner=td_B, blocks=k, quality=td_B.quality)


def tensor_handle(R: IntMatrix, H: ZqMatrix, quality: float | None = None) -> TrapdoorHandle:
    if quality is None:
        quality = float(R.cols) * float(max(1, R.norm_inf()))
    return TrapdoorHandle(KIND_TENSOR, matrix=R, tag=H, quality=quality)


def _sample_pre_gadget(rng: Rng, A: ZqMatrix, td: TrapdoorHandle, y: ZqMatrix, sigma: GaussParam) -> IntMatrix:
    _warn_quality(td, sigma)
    q = A.q
    n, m = A.shape
    r_bar = td.matrix.data
    w = r_bar.shape[1]
    if m != r_bar.shape[0] + w:
        raise TrapdoorError(f"trapdoor shape {td.matrix.shape} does not fit a matrix of width {m}")
    c = y.cols
    p = sample_array(rng, sigma, (m, c))
    residual = np.mod(y.data - matmul_mod(A.data, np.mod(p, q), q), q)
    if td.tag is not None and not np.array_equal(td.tag.data, np.eye(n, dtype=np.int64)):
        residual = matmul_mod(right_inverse_mod(td.tag).data, residual, q)
    z = gadget_preimage(rng, residual, q)
    top = p[: m - w] + r_bar @ z
    bottom = p[m - w :] + z
    return IntMatrix(np.vstack([top, bottom]))


def sample_pre_block(
    rng: Rng, B: ZqMatrix, td_B: TrapdoorHandle, W: ZqMatrix, k: int, Y: ZqMatrix, sigma: GaussParam
) -> IntMatrix:
    """Short x with [I_k (x) B | W] x = Y.

    The W-part is drawn first as a free Gaussian; each B-block then absorbs
    its residual through the trapdoor of B.
    """
    n, m = B.shape
    if W.rows != k * n or Y.rows != k * n:
        raise TrapdoorError(f"expected {k * n} rows in W and Y, got {W.rows} and {Y.rows}")
    c = Y.cols
    q = B.q
    x_w = sample_array(rng, sigma, (W.cols, c))
    if W.cols:
        residual = np.mod(Y.data - matmul_mod(W.data, np.mod(x_w, q), q), q)
    else:
        residual = Y.data
    # blocks side by side: one batched call to the plain sampler
    targets = np.hstack([residual[i * n : (i + 1) * n] for i in range(k)])
    x_b = sample_pre(rng, B, td_B, ZqMatrix(targets, q), sigma).data
    parts = [x_b[:, i * c : (i + 1) * c] for i in range(k)]
    return IntMatrix(np.vstack(parts + [x_w]))


def check_tensor_trapdoor(A: ZqMatrix, R: IntMatrix, H: ZqMatrix) -> ZqMatrix:
    """Returns the padded gadget G after confirming A R = H (x) G."""
    k, t = H.shape
    if A.rows % k or R.cols % t:
        raise TrapdoorError(f"incompatible shapes A{A.shape}, R{R.shape}, H{H.shape}")
    n = A.rows // k
    m = R.cols // t
    G = gadget(n, m, A.q)
    if A @ R != kron(H, G):
        raise TrapdoorError("tensor trapdoor equation A R = H (x) G fails")
    return G


def sample_pre_tensor(
    rng: Rng, A: ZqMatrix, R: IntMatrix, H: ZqMatrix, y: ZqMatrix, sigma: GaussParam, check: bool = True
) -> IntMatrix:
    """Short x with A x = y, given A R = H (x) G for H of full row rank."""
    if check:
        check_tensor_trapdoor(A, R, H)
    k, t = H.shape
    n = A.rows // k
    m = R.cols // t
    q = A.q
    c = y.cols
    try:
        h_inv = right_inverse_mod(H)
    except ValueError as exc:
        raise TrapdoorError("H is rank deficient modulo q") from exc
    p = sample_array(rng, sigma, (A.cols, c))
    residual = np.mod(y.data - matmul_mod(A.data, np.mod(p, q), q), q)
    s = matmul_mod(kron(h_inv, ZqMatrix.identity(n, q)).data, residual, q)
    u = np.vstack([gadget_preimage(rng, s[j * n : (j + 1) * n], q, width=m) for j in range(t)])
    return IntMatrix(p + R.data @ u)
