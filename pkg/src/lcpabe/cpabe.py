"""Ciphertext-policy ABE with constant-size ciphertexts, plus a broadcast wrapper.

Labels in [0, N) with N = 2 * n_base name the public per-attribute matrices
D_u and Q_u; keys are issued for completed label sets (see ``lsss``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .commit import SUCCINCT_FOLD, TRAPDOOR_MOCK, SuccinctFold, TrapdoorMock
from .gauss import GaussParam, sample_array
from .lsss import Policy, compile_policy, complete_set, parse_policy, recon_coeffs
from .succinct import SuccinctPP, gen_pp
from .trapdoor import TrapdoorHandle, sample_pre, trap_gen
from .zq import IntMatrix, Rng, ZqMatrix, gadget_length, is_probable_prime, sample_uniform

ZERO_NOISE = "zero"
GAUSSIAN_NOISE = "gaussian"

# tail multiplier turning the error standard deviation into a budget;
# a centered Gaussian exceeds 4 standard deviations with probability < 1e-4
BUDGET_TAIL = 4.0
_DEGENERATE = 1e-4


class CryptoError(ValueError):
    pass


class BudgetError(ValueError):
    pass


def width(sigma: float) -> GaussParam:
    """Sampling width, where 0 means no noise at all."""
    return GaussParam(sigma if sigma > 0 else _DEGENERATE)


@dataclass(frozen=True)
class SchemeParams:
    n: int
    m: int
    q: int
    ell_pp: int
    sigma: float
    chi: float
    chi1: float
    chi_s: float
    n_base: int
    s_max: int
    noise_mode: str = ZERO_NOISE
    backend: str = SUCCINCT_FOLD
    budget: float = 0.0

    @property
    def N(self) -> int:
        return 2 * self.n_base

    @property
    def half_q(self) -> int:
        """Nearest integer to q/2."""
        return (self.q + 1) // 2

    def validate(self) -> None:
        k = gadget_length(self.q)
        if self.m < self.n * k + 1:
            raise ValueError(f"m={self.m} below n*ceil(log q)+1={self.n * k + 1}")
        if self.backend == SUCCINCT_FOLD and self.ell_pp < 2 * self.n * self.m * k:
            raise ValueError(f"ell_pp={self.ell_pp} below the fold slot count {2 * self.n * self.m * k}")
        if self.noise_mode not in (ZERO_NOISE, GAUSSIAN_NOISE):
            raise ValueError(f"unknown noise mode {self.noise_mode!r}")
        if self.backend not in (SUCCINCT_FOLD, TRAPDOOR_MOCK):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.s_max < 2 or self.n_base < 1:
            raise ValueError("need s_max >= 2 and n_base >= 1")


def _probe_norms(params: SchemeParams) -> dict[str, float]:
    """Mean squares of V, Z and sampled key parts on a throwaway instance."""
    rng = Rng(b"budget-probe")
    n, m, q = params.n, params.m, params.q
    L = (m + 1) * params.N
    if params.backend == SUCCINCT_FOLD:
        pp, td = gen_pp(rng, n, m, q, params.ell_pp, width(params.sigma))
        fold = SuccinctFold(pp)
        M = sample_uniform(rng, n, L, q)
        V = fold.verification_matrix(L).lift().data.astype(np.float64)
        Z = fold.open(M).data.astype(np.float64)
        B = pp.B
    else:
        B, td = trap_gen(rng, n, m, q)
        V = np.zeros((m, L))
        Z = sample_pre(rng, B, td, sample_uniform(rng, n, L, q), width(params.chi1)).data.astype(np.float64)
    k_tilde = sample_pre(rng, B, td, sample_uniform(rng, n, 64, q), width(params.chi1)).data.astype(np.float64)
    return {
        "v_ms": float(np.mean(V**2)),
        "z_ms": float(np.mean(Z**2)),
        "k_ms": float(np.mean(k_tilde**2)) + params.chi_s**2,
        "v_norm": float(np.abs(V).max()),
        "z_norm": float(np.abs(Z).max()),
    }


def error_budget(params: SchemeParams, norms: dict[str, float]) -> float:
    """High-probability bound on |e3 - sum_i w_i((e2 V + e1 Z) t - e1 k)|.

    Every term is a sum of independent centered products, so variances add;
    the bound is BUDGET_TAIL standard deviations with at most n_base rows
    in the reconstruction (one per formula attribute).
    """
    if params.noise_mode == ZERO_NOISE:
        return 0.0
    m = params.m
    chi, chi_s = params.chi, params.chi_s
    t_sq = 1.0 + m * chi**2
    var_row = (
        chi_s**2 * m * norms["v_ms"] * t_sq
        + chi**2 * m * norms["z_ms"] * t_sq
        + chi**2 * m * norms["k_ms"]
    )
    var = chi_s**2 + params.n_base * var_row
    return BUDGET_TAIL * math.sqrt(var)


def select_params(
    n: int,
    q: int,
    n_base: int,
    s_max: int,
    noise_mode: str = ZERO_NOISE,
    backend: str = SUCCINCT_FOLD,
    m: int | None = None,
    ell_pp: int | None = None,
    sigma: float = 5.0,
    chi: float = 0.0,
    chi1: float = 5.0,
    chi_s: float = 0.0,
) -> SchemeParams:
    """Fill in defaults and, for noisy modes, check the decryption error budget."""
    if not is_probable_prime(q):
        raise ValueError(f"q={q} must be prime")
    k = gadget_length(q)
    if m is None:
        m = 2 * n * k
    if ell_pp is None:
        ell_pp = 2 * n * m * k if backend == SUCCINCT_FOLD else 1
    params = SchemeParams(n, m, q, ell_pp, sigma, chi, chi1, chi_s, n_base, s_max, noise_mode, backend)
    params.validate()
    if noise_mode == ZERO_NOISE:
        return params
    budget = error_budget(params, _probe_norms(params))
    if budget >= q / 4:
        hint = " (the fold backend's V and Z norms are far too large; use the trapdoor-mock backend)" if backend == SUCCINCT_FOLD else ""
        raise BudgetError(f"error budget {budget:.1f} is not below q/4 = {q / 4:.1f}{hint}")
    return replace(params, budget=budget)


def preset(name: str) -> SchemeParams:
    if name == "toy-exact":
        return select_params(1, 13, n_base=4, s_max=5, ell_pp=128)
    if name == "noisy-mock":
        return select_params(
            2, 65537, n_base=2, s_max=3, noise_mode=GAUSSIAN_NOISE, backend=TRAPDOOR_MOCK,
            sigma=3.0, chi=3.0, chi1=3.0, chi_s=48.0,
        )
    if name == "harness":
        return select_params(1, 13, n_base=4, s_max=5, ell_pp=128, chi=2.0, chi_s=4.0)
    raise ValueError(f"unknown preset {name!r}")


PRESETS = ("toy-exact", "noisy-mock", "harness")


def default_universe(n_base: int) -> tuple[str, ...]:
    letters = "abcdefghijklmnopqrstuvwxyz"
    if n_base <= len(letters):
        return tuple(letters[:n_base])
    return tuple(f"a{i}" for i in range(n_base))


@dataclass(frozen=True)
class PublicKey:
    params: SchemeParams
    universe: tuple[str, ...]
    pp: SuccinctPP
    A: ZqMatrix
    B_cols: tuple[ZqMatrix, ...]  # B_2 .. B_{s_max}
    D: tuple[ZqMatrix, ...]
    Q: tuple[ZqMatrix, ...]
    y: ZqMatrix


@dataclass(frozen=True)
class MasterSecretKey:
    pk: PublicKey
    td_B: TrapdoorHandle


@dataclass(frozen=True)
class SecretKey:
    labels: tuple[int, ...]
    k: dict[int, IntMatrix] = field(compare=False)
    t: IntMatrix = field(compare=False)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SecretKey):
            return NotImplemented
        return (
            self.labels == other.labels
            and self.t == other.t
            and all(self.k[u] == other.k[u] for u in self.labels)
        )


@dataclass(frozen=True)
class Ciphertext:
    c1: ZqMatrix
    c2: ZqMatrix
    c3: ZqMatrix


@dataclass(frozen=True)
class EncryptionTrace:
    s: ZqMatrix
    e1: IntMatrix
    e2: IntMatrix
    e3: IntMatrix


def make_backend(pk: PublicKey, td_B: TrapdoorHandle | None = None):
    if pk.params.backend == SUCCINCT_FOLD:
        return SuccinctFold(pk.pp)
    return TrapdoorMock(pk.pp, td_B, width(pk.params.chi1))


def setup(rng: Rng, params: SchemeParams, universe: Sequence[str] | None = None) -> tuple[PublicKey, MasterSecretKey]:
    params.validate()
    universe = tuple(universe) if universe is not None else default_universe(params.n_base)
    if len(universe) != params.n_base or len(set(universe)) != len(universe):
        raise ValueError(f"universe must list {params.n_base} distinct names")
    n, m, q = params.n, params.m, params.q
    pp, td_B = gen_pp(rng, n, m, q, params.ell_pp, width(params.sigma))
    A = sample_uniform(rng, n, m, q)
    B_cols = tuple(sample_uniform(rng, n, m + 1, q) for _ in range(params.s_max - 1))
    D = tuple(sample_uniform(rng, n, m + 1, q) for _ in range(params.N))
    Q = tuple(sample_uniform(rng, n, m + 1, q) for _ in range(params.N))
    y = sample_uniform(rng, n, 1, q)
    pk = PublicKey(params, universe, pp, A, B_cols, D, Q, y)
    return pk, MasterSecretKey(pk, td_B)


def _slice(V: ZqMatrix | IntMatrix, u: int, m: int):
    return V[:, u * (m + 1) : (u + 1) * (m + 1)]


def key_equation_holds(pk: PublicKey, sk: SecretKey, V: ZqMatrix) -> bool:
    m = pk.params.m
    B = pk.pp.B
    for u in sk.labels:
        lhs = B @ sk.k[u]
        rhs = (pk.A @ _slice(V, u, m) + pk.Q[u]) @ sk.t
        if lhs != rhs:
            return False
    return True


def keygen(rng: Rng, msk: MasterSecretKey, labels: Iterable[int], backend=None) -> SecretKey:
    pk = msk.pk
    params = pk.params
    labels = tuple(sorted(set(labels)))
    if not labels:
        raise ValueError("attribute set must be nonempty")
    if any(not 0 <= u < params.N for u in labels):
        raise ValueError(f"labels must lie in [0, {params.N})")
    backend = backend or make_backend(pk, msk.td_B)
    m = params.m
    V = backend.verification_matrix((m + 1) * params.N)
    t_hat = sample_array(rng, width(params.chi), (m, 1))
    t = IntMatrix(np.vstack([[[1]], t_hat]))
    B = pk.pp.B
    keys: dict[int, IntMatrix] = {}
    for u in labels:
        k_hat = IntMatrix(sample_array(rng, width(params.chi_s), (m, 1)))
        target = (pk.A @ _slice(V, u, m) + pk.Q[u]) @ t - (B @ k_hat)
        k_tilde = sample_pre(rng, B, msk.td_B, target, width(params.chi1))
        keys[u] = k_hat + k_tilde
    sk = SecretKey(labels, keys, t)
    if not key_equation_holds(pk, sk, V):
        raise CryptoError("issued key violates the key equation")
    return sk


def attribute_indices(pk: PublicKey, names: Iterable[str]) -> list[int]:
    out = []
    for name in names:
        if name not in pk.universe:
            raise ValueError(f"unknown attribute {name!r}")
        out.append(pk.universe.index(name))
    return out


def keygen_for(rng: Rng, msk: MasterSecretKey, names: Iterable[str], backend=None) -> SecretKey:
    """Key for a set of held base attributes, issued on its completed label set."""
    held = attribute_indices(msk.pk, names)
    return keygen(rng, msk, complete_set(held, msk.pk.params.n_base), backend)


def compile_for(pk: PublicKey, text: str) -> Policy:
    return compile_policy(parse_policy(text, pk.universe), pk.params.s_max)


def policy_matrices(pk: PublicKey, policy: Policy) -> ZqMatrix:
    """U = [U_1 | ... | U_N], the matrix committed to in a ciphertext."""
    params = pk.params
    if policy.n_base != params.n_base or policy.s_max != params.s_max:
        raise ValueError("policy does not match the public key's universe or s_max")
    n, m, q = params.n, params.m, params.q
    blocks = [pk.Q[u] + pk.D[u] for u in range(params.N)]
    y_pad = ZqMatrix(np.hstack([pk.y.data, np.zeros((n, m), dtype=np.int64)]), q)
    for i, u in enumerate(policy.rho):
        row = policy.M[i]
        acc = pk.Q[u] + y_pad.scale(int(row[0]))
        for j in range(1, params.s_max):
            if row[j]:
                acc = acc + pk.B_cols[j - 1].scale(int(row[j]))
        blocks[u] = acc
    return ZqMatrix(np.hstack([b.data for b in blocks]), q)


def encrypt_traced(rng: Rng, pk: PublicKey, msg: int, policy: Policy, backend=None) -> tuple[Ciphertext, EncryptionTrace]:
    if msg not in (0, 1):
        raise ValueError("message must be a single bit")
    params = pk.params
    n, m, q = params.n, params.m, params.q
    backend = backend or make_backend(pk)
    C = backend.commit(policy_matrices(pk, policy))
    s = sample_uniform(rng, n, 1, q)
    if params.noise_mode == ZERO_NOISE:
        e1, e2, e3 = IntMatrix.zeros(1, m), IntMatrix.zeros(1, m), IntMatrix.zeros(1, 1)
    else:
        e1 = IntMatrix(sample_array(rng, width(params.chi), (1, m)))
        e2 = IntMatrix(sample_array(rng, width(params.chi_s), (1, m)))
        e3 = IntMatrix(sample_array(rng, width(params.chi_s), (1, 1)))
    st = s.T
    c1 = st @ pk.pp.B + e1
    c2 = st @ (pk.A + C) + e2
    c3 = st @ pk.y + ZqMatrix([[msg * params.half_q]], q) + e3
    return Ciphertext(c1, c2, c3), EncryptionTrace(s, e1, e2, e3)


def encrypt(rng: Rng, pk: PublicKey, msg: int, policy: Policy, backend=None) -> Ciphertext:
    return encrypt_traced(rng, pk, msg, policy, backend)[0]


def _per_row(pk, sk, policy, backend, left1, left2, right) -> tuple[ZqMatrix, list[int]] | None:
    """sum_i w_i [(left2 V_u + left1 Z_u) t - right k_u] over reconstruction rows."""
    params = pk.params
    coeffs = recon_coeffs(policy, sk.labels, params.q)
    if coeffs is None:
        return None
    m = params.m
    U = policy_matrices(pk, policy)
    V = backend.verification_matrix(U.cols)
    Z = backend.open(U)
    acc = ZqMatrix.zeros(1, 1, params.q)
    for i in coeffs.rows:
        u = policy.rho[i]
        inner = (left2 @ _slice(V, u, m) + left1 @ _slice(Z, u, m)) @ sk.t
        acc = acc + (inner - (right @ sk.k[u])).scale(coeffs.w[i])
    return acc, coeffs.rows


def decryption_value(pk: PublicKey, sk: SecretKey, policy: Policy, ct: Ciphertext, backend=None) -> int | None:
    """mu in (-q/2, q/2], or None when the key cannot satisfy the policy."""
    backend = backend or make_backend(pk)
    out = _per_row(pk, sk, policy, backend, ct.c1, ct.c2, ct.c1)
    if out is None:
        return None
    mu = ct.c3 - out[0]
    return int(mu.lift().data[0, 0])


def decrypt(pk: PublicKey, sk: SecretKey, policy: Policy, ct: Ciphertext, backend=None) -> int | None:
    mu = decryption_value(pk, sk, policy, ct, backend)
    if mu is None:
        return None
    q = pk.params.q
    return 0 if -q / 4 < mu < q / 4 else 1


def error_term(pk: PublicKey, sk: SecretKey, policy: Policy, trace: EncryptionTrace, backend=None) -> int | None:
    """e3 - sum_i w_i((e2 V_u + e1 Z_u) t - e1 k_u), evaluated from recorded noise."""
    backend = backend or make_backend(pk)
    q = pk.params.q
    e1, e2 = trace.e1.mod(q), trace.e2.mod(q)
    out = _per_row(pk, sk, policy, backend, e1, e2, e1)
    if out is None:
        return None
    return int((trace.e3.mod(q) - out[0]).lift().data[0, 0])


# Broadcast encryption: user i holds base attribute i.


def be_setup(rng: Rng, n_users: int, base: SchemeParams | None = None) -> tuple[PublicKey, MasterSecretKey]:
    base = base or preset("toy-exact")
    params = replace(base, n_base=n_users, s_max=n_users + 1)
    return setup(rng, params, tuple(f"u{i}" for i in range(n_users)))


def be_keygen(rng: Rng, msk: MasterSecretKey, user: int) -> SecretKey:
    return keygen(rng, msk, complete_set({user}, msk.pk.params.n_base))


def membership_policy(pk: PublicKey, members: Iterable[int]) -> Policy:
    members = sorted(set(members))
    if not members:
        raise ValueError("broadcast set must be nonempty")
    return compile_for(pk, " | ".join(pk.universe[i] for i in members))


def be_encrypt(rng: Rng, pk: PublicKey, msg: int, members: Iterable[int]) -> Ciphertext:
    return encrypt(rng, pk, msg, membership_policy(pk, members))


def be_decrypt(pk: PublicKey, sk: SecretKey, members: Iterable[int], ct: Ciphertext) -> int | None:
    return decrypt(pk, sk, membership_policy(pk, members), ct)


def size_report(pk: PublicKey, sk: SecretKey | None = None, ct: Ciphertext | None = None) -> dict[str, int]:
    """Number of Z_q (or integer) elements held by each object."""
    p = pk.params
    n, m = p.n, p.m
    report = {
        "pk.pp": n * m + p.ell_pp * n * m + (p.ell_pp + 1) * m * p.ell_pp * m,
        "pk.A": n * m,
        "pk.B_i": (p.s_max - 1) * n * (m + 1),
        "pk.D_u": p.N * n * (m + 1),
        "pk.Q_u": p.N * n * (m + 1),
        "pk.y": n,
    }
    report["pk"] = sum(report.values())
    if sk is not None:
        report["sk"] = len(sk.labels) * m + (m + 1)
    if ct is not None:
        report["ct"] = ct.c1.cols + ct.c2.cols + ct.c3.cols
    return report
