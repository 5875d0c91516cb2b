"""Constructive objects from the selective-security argument, checked exactly.

``simulate_setup`` builds a public key whose matrices are planted through
sign matrices and commitments to unit blocks u_k (x) G. For an unauthorized
label set, ``build_proof_trapdoor`` assembles a trapdoor for
[I_{g+h} (x) B | W'] from those commitments alone, and ``simulated_keygen``
uses it to issue keys without the trapdoor of B.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .commit import SuccinctFold
from .cpabe import PublicKey, SchemeParams, SecretKey, key_equation_holds, width
from .gauss import GaussParam, sample_array
from .lsss import LsssError, Policy, recon_coeffs
from .succinct import gen_pp, gen_pp_split, split_preimage, verify_pp
from .trapdoor import check_tensor_trapdoor, sample_pre_tensor
from .zq import IntMatrix, Rng, ZqMatrix, gadget, kron, rank_mod, sample_sign, sample_uniform


def unit_row(k: int, s: int, q: int) -> ZqMatrix:
    e = np.zeros((1, s), dtype=np.int64)
    e[0, k] = 1
    return ZqMatrix(e, q)


@dataclass(frozen=True)
class SimulatedSetup:
    params: SchemeParams
    policy: Policy
    pk: PublicKey
    fold: SuccinctFold = field(repr=False)
    R: IntMatrix
    R_u: tuple[IntMatrix, ...]
    r: IntMatrix
    R_col: tuple[IntMatrix, ...]  # R'_i for i = 2..s_max
    R_attr: tuple[IntMatrix, ...]  # R''_u
    C_col: tuple[ZqMatrix, ...]  # commitments to u_{i-1} (x) G
    C_attr: tuple[ZqMatrix, ...]  # commitments to u_{u+s_max-1} (x) G
    Z_col: tuple[IntMatrix, ...]
    Z_attr: tuple[IntMatrix, ...]
    V_units: ZqMatrix  # verification matrix for the unit-block width s*m
    b_prime: tuple[ZqMatrix, ...]
    d_prime: tuple[ZqMatrix, ...]
    B_prime: tuple[ZqMatrix, ...]
    D_prime: tuple[ZqMatrix, ...]
    U: ZqMatrix
    C: ZqMatrix
    V: ZqMatrix  # verification matrix for the width (m+1)N
    Z: IntMatrix  # opening of U
    n_vec: dict[int, ZqMatrix]
    N_mat: dict[int, ZqMatrix]

    @property
    def s(self) -> int:
        return self.params.N + self.params.s_max - 1

    def unit_block(self, k: int) -> ZqMatrix:
        p = self.params
        return kron(unit_row(k, self.s, p.q), gadget(p.n, p.m, p.q))

    def checks(self) -> list[tuple[str, bool]]:
        """Every defining equation of the simulated setup, re-derived."""
        p = self.params
        m, q = p.m, p.q
        B = self.pk.pp.B
        out = [("pp-identity", bool(verify_pp(self.pk.pp)))]
        out.append(("A-plus-C-equals-BR", self.pk.A + self.C == B @ self.R))
        out.append(("y-equals-Br", self.pk.y == B @ self.r))
        units = list(zip(self.C_col + self.C_attr, self.Z_col + self.Z_attr))
        out.append((
            "unit-block-openings",
            all(C @ self.V_units == self.unit_block(k) - (B @ Z) for k, (C, Z) in enumerate(units)),
        ))
        out.append((
            "B-prime-definition",
            all(self.B_prime[j] == B @ self.R_col[j] + self.C_col[j] for j in range(p.s_max - 1)),
        ))
        out.append((
            "D-prime-definition",
            all(self.D_prime[u] == B @ self.R_attr[u] + self.C_attr[u] for u in range(p.N)),
        ))
        out.append(("U-equals-BR_u", all(self._U(u) == B @ self.R_u[u] for u in range(p.N))))
        out.append((
            "commitment-slices",
            all(self.C @ self._cols(self.V, u) == self._U(u) - (B @ self._cols(self.Z, u)) for u in range(p.N)),
        ))
        out.append(("Q-definition", all(self.pk.Q[u] == self._expected_Q(u) for u in range(p.N))))
        del m, q
        return out

    def _cols(self, X, u: int):
        m = self.params.m
        return X[:, u * (m + 1) : (u + 1) * (m + 1)]

    def _U(self, u: int) -> ZqMatrix:
        return self._cols(self.U, u)

    def _expected_Q(self, u: int) -> ZqMatrix:
        p = self.params
        rows = self.policy.row_of()
        if u not in rows:
            return self._U(u) - self.pk.D[u]
        row = self.policy.M[rows[u]]
        y_pad = ZqMatrix(np.hstack([self.pk.y.data, np.zeros((p.n, p.m), dtype=np.int64)]), p.q)
        acc = y_pad.scale(int(row[0]))
        for j in range(1, p.s_max):
            acc = acc + self.pk.B_cols[j - 1].scale(int(row[j]))
        return self._U(u) - acc


def simulate_setup(rng: Rng, params: SchemeParams, policy: Policy, universe: tuple[str, ...] | None = None) -> SimulatedSetup:
    from .cpabe import default_universe

    n, m, q = params.n, params.m, params.q
    N, s_max = params.N, params.s_max
    if policy.n_base != params.n_base or policy.s_max != s_max:
        raise ValueError("policy does not match the parameters")
    s = N + s_max - 1
    pp, _ = gen_pp(rng, n, m, q, params.ell_pp, width(params.sigma))
    fold = SuccinctFold(pp)
    B = pp.B
    G = gadget(n, m, q)

    R = sample_sign(rng, m, m)
    R_u = tuple(sample_sign(rng, m, m + 1) for _ in range(N))
    r = sample_sign(rng, m, 1)
    R_col = tuple(sample_sign(rng, m, m) for _ in range(s_max - 1))
    R_attr = tuple(sample_sign(rng, m, m) for _ in range(N))

    units = [kron(unit_row(k, s, q), G) for k in range(s)]
    commits = [fold.commit(X) for X in units]
    openings = [fold.open(X) for X in units]
    V_units = fold.verification_matrix(s * m)
    C_col, C_attr = tuple(commits[: s_max - 1]), tuple(commits[s_max - 1 :])
    Z_col, Z_attr = tuple(openings[: s_max - 1]), tuple(openings[s_max - 1 :])

    b_prime = tuple(sample_uniform(rng, n, 1, q) for _ in range(s_max - 1))
    d_prime = tuple(sample_uniform(rng, n, 1, q) for _ in range(N))
    B_prime = tuple(B @ R_col[j] + C_col[j] for j in range(s_max - 1))
    D_prime = tuple(B @ R_attr[u] + C_attr[u] for u in range(N))
    B_cols = tuple(ZqMatrix(np.hstack([b_prime[j].data, B_prime[j].data]), q) for j in range(s_max - 1))
    D = tuple(ZqMatrix(np.hstack([d_prime[u].data, D_prime[u].data]), q) for u in range(N))

    y = B @ r
    U_blocks = [B @ R_u[u] for u in range(N)]
    U = ZqMatrix(np.hstack([b.data for b in U_blocks]), q)
    y_pad = ZqMatrix(np.hstack([y.data, np.zeros((n, m), dtype=np.int64)]), q)
    rows = policy.row_of()
    Q = []
    n_vec: dict[int, ZqMatrix] = {}
    N_mat: dict[int, ZqMatrix] = {}
    for u in range(N):
        if u not in rows:
            Q.append(U_blocks[u] - D[u])
            continue
        row = policy.M[rows[u]]
        acc = y_pad.scale(int(row[0]))
        nu = y.scale(int(row[0]))
        Nu = ZqMatrix.zeros(n, m, q)
        for j in range(1, s_max):
            c = int(row[j])
            acc = acc + B_cols[j - 1].scale(c)
            nu = nu + b_prime[j - 1].scale(c)
            Nu = Nu + B_prime[j - 1].scale(c)
        Q.append(U_blocks[u] - acc)
        n_vec[u], N_mat[u] = nu, Nu

    C = fold.commit(U)
    A = (B @ R) - C
    pk = PublicKey(params, universe or default_universe(params.n_base), pp, A, B_cols, D, tuple(Q), y)
    return SimulatedSetup(
        params, policy, pk, fold, R, R_u, r, R_col, R_attr, C_col, C_attr, Z_col, Z_attr, V_units,
        b_prime, d_prime, B_prime, D_prime, U, C, fold.verification_matrix(U.cols), fold.open(U), n_vec, N_mat,
    )


@dataclass(frozen=True)
class ProofTrapdoor:
    labels: tuple[int, ...]  # row order: policy labels first, then the rest
    g: int
    M_U: ZqMatrix
    W_prime: ZqMatrix
    A_big: ZqMatrix
    td: IntMatrix

    @property
    def h(self) -> int:
        return len(self.labels) - self.g

    def holds(self, params: SchemeParams) -> bool:
        G = gadget(params.n, params.m, params.q)
        return self.A_big @ self.td == kron(self.M_U, G)


def build_proof_trapdoor(sim: SimulatedSetup, labels: Iterable[int]) -> ProofTrapdoor:
    """Trapdoor for [I_{g+h} (x) B | W'] built from commitment openings only."""
    p = sim.params
    n, m, q = p.n, p.m, p.q
    s_max, N, s = p.s_max, p.N, sim.s
    labels = set(labels)
    if recon_coeffs(sim.policy, labels, q) is not None:
        raise LsssError("label set is authorized for the challenge policy")
    rows = sim.policy.row_of()
    inside = sorted(u for u in labels if u in rows)
    outside = sorted(u for u in labels if u not in rows)
    M_U = np.zeros((len(inside) + len(outside), s), dtype=np.int64)
    for a, u in enumerate(inside):
        M_U[a, : s_max - 1] = sim.policy.M[rows[u], 1:]
    for b, u in enumerate(outside):
        M_U[len(inside) + b, s_max - 1 + u] = 1
    M_U = ZqMatrix(M_U, q)
    if rank_mod(M_U) != M_U.rows:
        raise AssertionError("M_U is not of full row rank for an unauthorized set")

    B = sim.pk.pp.B
    C_stack = ZqMatrix(np.vstack([c.data for c in sim.C_col + sim.C_attr]), q)
    Z_stack = IntMatrix(np.vstack([z.data for z in sim.Z_col + sim.Z_attr]))
    R_stack = IntMatrix(np.vstack([r.data for r in sim.R_col + sim.R_attr]))
    BR = ZqMatrix(np.vstack([(B @ r).data for r in sim.R_col + sim.R_attr]), q)
    W_prime = kron(M_U, ZqMatrix.identity(n, q)) @ (BR + C_stack)
    top = kron(M_U, ZqMatrix.identity(m, q)) @ (Z_stack - (R_stack @ sim.V_units))
    td = IntMatrix(np.vstack([top.lift().data, sim.V_units.lift().data]))
    k = M_U.rows
    A_big = ZqMatrix(np.hstack([np.kron(np.eye(k, dtype=np.int64), B.data), W_prime.data]), q)
    ptd = ProofTrapdoor(tuple(inside + outside), len(inside), M_U, W_prime, A_big, td)
    check_tensor_trapdoor(A_big, td, M_U)
    del N
    return ptd


def simulated_keygen(rng: Rng, sim: SimulatedSetup, ptd: ProofTrapdoor) -> SecretKey:
    """Key for ptd.labels issued through the proof trapdoor, without the trapdoor of B."""
    p = sim.params
    n, m, q = p.n, p.m, p.q
    B = sim.pk.pp.B
    t_hat = IntMatrix(sample_array(rng, width(p.chi), (m, 1)))
    k_hat = {}
    targets = []
    for a, u in enumerate(ptd.labels):
        k_hat[u] = IntMatrix(sample_array(rng, width(p.chi_s), (m, 1)))
        if a < ptd.g:
            shift, lin = sim.n_vec[u], sim.N_mat[u]
        else:
            shift, lin = sim.d_prime[u], sim.D_prime[u]
        targets.append(-(shift + lin @ t_hat + B @ k_hat[u]))
    y = ZqMatrix(np.vstack([t.data for t in targets]), q)
    x = sample_pre_tensor(rng, ptd.A_big, ptd.td, ptd.M_U, y, width(p.chi1), check=False)
    t_tilde = x[len(ptd.labels) * m :, :]
    t = IntMatrix(np.vstack([[[1]], (t_hat + t_tilde).data]))
    keys = {}
    for a, u in enumerate(ptd.labels):
        k_tilde = x[a * m : (a + 1) * m, :]
        V_u = sim.V[:, u * (m + 1) : (u + 1) * (m + 1)].lift()
        Z_u = sim.Z[:, u * (m + 1) : (u + 1) * (m + 1)]
        keys[u] = k_hat[u] + k_tilde + sim.R @ (V_u @ t) + Z_u @ t
    sk = SecretKey(tuple(sorted(ptd.labels)), keys, t)
    del n
    return sk


def simulated_key_valid(sim: SimulatedSetup, sk: SecretKey) -> bool:
    return key_equation_holds(sim.pk, sk, sim.V)


@dataclass(frozen=True)
class EquivalenceReport:
    plain_ok: bool
    split_ok: bool
    preimages_ok: int
    queries: int
    variance_plain: float
    variance_split: float

    @property
    def variance_ratio(self) -> float:
        hi = max(self.variance_plain, self.variance_split)
        lo = min(self.variance_plain, self.variance_split)
        return hi / lo if lo else float("inf")

    @property
    def ok(self) -> bool:
        return self.plain_ok and self.split_ok and self.preimages_ok == self.queries and self.variance_ratio <= 3.0


def lhl_trap_equivalence(
    rng: Rng, n: int, m: int, q: int, ell: int, sigma: GaussParam, queries: int = 200, chi: GaussParam | None = None
) -> EquivalenceReport:
    """Both pp samplers on matched seeds, plus preimage queries answered in split mode."""
    chi = chi or sigma
    plain, _ = gen_pp(rng.child("plain"), n, m, q, ell, sigma)
    split_pp, split = gen_pp_split(rng.child("plain"), n, m, q, ell, sigma)
    z = sample_uniform(rng, n, queries, q)
    s = split_preimage(rng, split, z, chi)
    good = int(np.sum(np.all((split_pp.B @ s).data == z.data, axis=0)))
    return EquivalenceReport(
        bool(verify_pp(plain)),
        bool(verify_pp(split_pp)),
        good,
        queries,
        float(plain.T.data.var()),
        float(split_pp.T.data.var()),
    )


def harness_report(seed: int, params: SchemeParams, policy: Policy, label_sets: Iterable[Iterable[int]], keys_per_set: int = 1) -> list[str]:
    """Line-oriented report: one 'PASS|FAIL identity seed' line per check."""
    rng = Rng(seed)
    sim = simulate_setup(rng.child("setup"), params, policy)
    lines = [f"{'PASS' if ok else 'FAIL'} {name} {seed}" for name, ok in sim.checks()]
    for idx, labels in enumerate(label_sets):
        labels = sorted(labels)
        tag = "{" + ",".join(map(str, labels)) + "}"
        try:
            ptd = build_proof_trapdoor(sim, labels)
        except (AssertionError, LsssError, ValueError) as exc:
            lines.append(f"FAIL proof-trapdoor{tag} {seed} ({exc})")
            continue
        lines.append(f"{'PASS' if ptd.holds(params) else 'FAIL'} proof-trapdoor{tag} {seed}")
        full_rank = rank_mod(ptd.M_U) == ptd.M_U.rows
        lines.append(f"{'PASS' if full_rank else 'FAIL'} full-row-rank{tag} {seed}")
        for j in range(keys_per_set):
            sk = simulated_keygen(rng.child(f"key-{idx}-{j}"), sim, ptd)
            ok = simulated_key_valid(sim, sk)
            lines.append(f"{'PASS' if ok else 'FAIL'} simulated-key-equation{tag} {seed}")
    return lines
