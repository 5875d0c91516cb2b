"""Policy formulas and their compilation into {0,1}-reconstructable LSSS matrices.

Attributes are indexed from 0. A key for base set S carries the completed
label set S_hat = S + {n_base + i : i not in S}, so every base attribute
contributes exactly one label: i when held, n_base + i when not.

Compilation gives every formula attribute two rows, one per label. Each
subformula is compiled against a pair of target vectors (v, w): the rows
present for an assignment reconstruct v with 0/1 weights when the
subformula holds and w when it fails, the present rows are always linearly
independent, and their span meets span{v, w} in exactly one of the two
lines. With fresh columns c:

* AND(X, Y) under (v, w): X gets (v + e_c, w + e_c), Y gets (-e_c, w);
* OR(X, Y) under (v, w): X gets (v, -e_c), Y gets (v + e_c, w + e_c).

The root uses (e_1, e_2), so unauthorized label sets have independent rows
and no combination reaching e_1.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .zq import rank_mod, solve_mod


class PolicyError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        super().__init__(message if position is None else f"{message} at position {position}")


class LsssError(ValueError):
    pass


@dataclass(frozen=True)
class Lit:
    index: int
    positive: bool = True


@dataclass(frozen=True)
class And:
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Or:
    left: "Node"
    right: "Node"


Node = Union[Lit, And, Or]


def negate(node: Node) -> Node:
    if isinstance(node, Lit):
        return Lit(node.index, not node.positive)
    if isinstance(node, And):
        return Or(negate(node.left), negate(node.right))
    return And(negate(node.left), negate(node.right))


def leaves(node: Node) -> list[Lit]:
    if isinstance(node, Lit):
        return [node]
    return leaves(node.left) + leaves(node.right)


def evaluate(node: Node, held: Iterable[int]) -> bool:
    held = set(held)

    def go(x: Node) -> bool:
        if isinstance(x, Lit):
            return (x.index in held) == x.positive
        if isinstance(x, And):
            return go(x.left) and go(x.right)
        return go(x.left) or go(x.right)

    return go(node)


def show(node: Node, names: Sequence[str]) -> str:
    if isinstance(node, Lit):
        return names[node.index] if node.positive else "!" + names[node.index]
    op = " & " if isinstance(node, And) else " | "
    return f"({show(node.left, names)}{op}{show(node.right, names)})"


@dataclass(frozen=True)
class Formula:
    root: Node
    names: tuple[str, ...]

    @property
    def n_base(self) -> int:
        return len(self.names)

    def evaluate(self, held: Iterable[int]) -> bool:
        return evaluate(self.root, held)

    def __str__(self) -> str:
        return show(self.root, self.names)


_TOKEN = re.compile(r"\s*(?:([A-Za-z_][A-Za-z0-9_.:-]*)|(.))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        match = _TOKEN.match(text, pos)
        start = match.start(1) if match.group(1) else match.start(2)
        if match.group(1):
            tokens.append(("name", match.group(1), start))
        elif match.group(2) in "!&|()":
            tokens.append((match.group(2), match.group(2), start))
        else:
            raise PolicyError(f"unexpected character {match.group(2)!r}", start)
        pos = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, universe: Sequence[str] | None):
        self.tokens = _tokenize(text)
        self.i = 0
        self.universe = list(universe) if universe is not None else None
        self.names: list[str] = list(universe) if universe is not None else []
        self.seen: set[int] = set()

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self, kind: str) -> tuple[str, str, int]:
        tok = self.peek()
        if tok[0] != kind:
            expected = "attribute" if kind == "name" else repr(kind)
            found = "end of input" if tok[0] == "end" else repr(tok[1])
            raise PolicyError(f"expected {expected}, found {found}", tok[2])
        self.i += 1
        return tok

    def expr(self) -> Node:
        node = self.term()
        while self.peek()[0] == "|":
            self.i += 1
            node = Or(node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.peek()[0] == "&":
            self.i += 1
            node = And(node, self.factor())
        return node

    def factor(self) -> Node:
        kind, _, _ = self.peek()
        if kind == "!":
            self.i += 1
            return negate(self.factor())
        if kind == "(":
            self.i += 1
            node = self.expr()
            self.take(")")
            return node
        _, name, pos = self.take("name")
        return Lit(self.intern(name, pos))

    def intern(self, name: str, pos: int) -> int:
        if name in self.names:
            index = self.names.index(name)
        elif self.universe is not None:
            raise PolicyError(f"unknown attribute {name!r}", pos)
        else:
            self.names.append(name)
            index = len(self.names) - 1
        if index in self.seen:
            raise PolicyError(f"attribute {name!r} used more than once (formulas must be read-once)", pos)
        self.seen.add(index)
        return index


def parse_policy(text: str, universe: Sequence[str] | None = None) -> Formula:
    """Parse a policy; '!' binds tightest, then '&', then '|'.

    Attribute names are interned in order of appearance unless a universe
    fixes their indices.
    """
    parser = _Parser(text, universe)
    root = parser.expr()
    parser.take("end")
    return Formula(root, tuple(parser.names))


def label(index: int, positive: bool, n_base: int) -> int:
    return index if positive else n_base + index


def complete_set(held: Iterable[int], n_base: int) -> frozenset[int]:
    held = frozenset(held)
    if any(not 0 <= i < n_base for i in held):
        raise ValueError(f"attribute index out of range for n_base={n_base}")
    return held | frozenset(n_base + i for i in range(n_base) if i not in held)


@dataclass(frozen=True)
class Policy:
    M: np.ndarray
    rho: tuple[int, ...]
    s_max: int
    formula: Formula
    leaf_rows: dict[int, tuple[int, int]] = field(compare=False)

    @property
    def ell(self) -> int:
        return self.M.shape[0]

    @property
    def n_base(self) -> int:
        return self.formula.n_base

    @property
    def N(self) -> int:
        return 2 * self.n_base

    def __eq__(self, other) -> bool:
        if not isinstance(other, Policy):
            return NotImplemented
        return (
            np.array_equal(self.M, other.M)
            and self.rho == other.rho
            and self.s_max == other.s_max
            and self.formula == other.formula
        )

    def __hash__(self) -> int:
        return hash((self.M.tobytes(), self.rho, self.s_max))

    def row_of(self) -> dict[int, int]:
        return {lab: i for i, lab in enumerate(self.rho)}

    def rows_for(self, labels: Iterable[int]) -> list[int]:
        present = set(labels)
        return [i for i, lab in enumerate(self.rho) if lab in present]


def columns_needed(formula: Formula) -> int:
    return len(leaves(formula.root)) + 1


def compile_policy(formula: Formula, s_max: int) -> Policy:
    need = columns_needed(formula)
    if need > s_max:
        raise LsssError(f"policy needs {need} columns, above s_max={s_max}")
    n_base = formula.n_base
    rows: list[np.ndarray] = []
    rho: list[int] = []
    leaf_rows: dict[int, tuple[int, int]] = {}
    counter = [2]

    def unit(c: int) -> np.ndarray:
        e = np.zeros(s_max, dtype=np.int64)
        e[c] = 1
        return e

    def go(node: Node, v: np.ndarray, w: np.ndarray) -> None:
        if isinstance(node, Lit):
            leaf_rows[node.index] = (len(rows), len(rows) + 1)
            rows.extend([v, w])
            rho.extend([label(node.index, node.positive, n_base), label(node.index, not node.positive, n_base)])
            return
        e = unit(counter[0])
        counter[0] += 1
        if isinstance(node, And):
            go(node.left, v + e, w + e)
            go(node.right, -e, w)
        else:
            go(node.left, v, -e)
            go(node.right, v + e, w + e)

    go(formula.root, unit(0), unit(1))
    M = np.array(rows, dtype=np.int64)
    M.setflags(write=False)
    return Policy(M, tuple(rho), s_max, formula, leaf_rows)


@dataclass(frozen=True)
class ReconCoeffs:
    w: dict[int, int]

    @property
    def rows(self) -> list[int]:
        return sorted(i for i, c in self.w.items() if c)


def _target(s_max: int) -> np.ndarray:
    e = np.zeros(s_max, dtype=np.int64)
    e[0] = 1
    return e


def _combination_ok(policy: Policy, rows: Iterable[int], q: int | None) -> bool:
    rows = list(rows)
    total = policy.M[rows].sum(axis=0) if rows else np.zeros(policy.s_max, dtype=np.int64)
    target = _target(policy.s_max)
    if q is None:
        return bool(np.array_equal(total, target))
    return bool(np.array_equal(np.mod(total, q), target))


def _guided(policy: Policy, present: set[int]) -> list[int] | None:
    """Rows reconstructing e_1, following the formula; None if it fails or is unclear."""
    n_base = policy.n_base

    def go(node: Node) -> tuple[bool, list[int]] | None:
        if isinstance(node, Lit):
            true_row, false_row = policy.leaf_rows[node.index]
            if label(node.index, node.positive, n_base) in present:
                return True, [true_row]
            if label(node.index, not node.positive, n_base) in present:
                return False, [false_row]
            return None
        left, right = go(node.left), go(node.right)
        if left is None or right is None:
            return None
        (tx, rx), (ty, ry) = left, right
        if isinstance(node, And):
            if tx and ty:
                return True, rx + ry
            if tx:
                return False, ry
            return False, rx + ry if ty else ry
        if tx:
            return True, rx
        return ty, rx + ry

    result = go(policy.formula.root)
    if result is None or not result[0]:
        return None
    return result[1]


def brute_force_recon(policy: Policy, labels: Iterable[int], q: int | None = None) -> list[int] | None:
    """First 0/1 subset of the present rows summing to e_1, by size then order."""
    rows = policy.rows_for(labels)
    for size in range(1, len(rows) + 1):
        for subset in itertools.combinations(rows, size):
            if _combination_ok(policy, subset, q):
                return list(subset)
    return None


BRUTE_FORCE_LIMIT = 16


def recon_coeffs(policy: Policy, labels: Iterable[int], q: int | None = None) -> ReconCoeffs | None:
    labels = set(labels)
    rows = _guided(policy, labels)
    if rows is not None and _combination_ok(policy, rows, q):
        return ReconCoeffs({i: 1 for i in rows})
    if len(policy.rows_for(labels)) <= BRUTE_FORCE_LIMIT:
        found = brute_force_recon(policy, labels, q)
        if found is not None:
            return ReconCoeffs({i: 1 for i in found})
    return None


def unauthorized_witness(policy: Policy, labels: Iterable[int], q: int) -> list[int]:
    """d with d_1 = 1 and M_S d = 0 (mod q) for an unauthorized label set."""
    labels = set(labels)
    if recon_coeffs(policy, labels, q) is not None:
        raise LsssError("label set is authorized; no witness exists")
    rows = policy.rows_for(labels)
    d = [1] + [0] * (policy.s_max - 1)
    if not rows:
        return d
    sub = [[int(v) for v in policy.M[i]] for i in rows]
    if rank_mod(sub, q) != len(rows):
        raise LsssError("rows of the unauthorized set are linearly dependent")
    rest = solve_mod([r[1:] for r in sub], [-r[0] for r in sub], q)
    if rest is None:
        raise LsssError("e_1 lies in the row span of an unauthorized set")
    return [1] + rest
