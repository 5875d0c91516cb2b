import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lcpabe.lsss import (
    And,
    Lit,
    LsssError,
    Or,
    PolicyError,
    brute_force_recon,
    columns_needed,
    compile_policy,
    complete_set,
    parse_policy,
    recon_coeffs,
    unauthorized_witness,
)

Q = 13


def test_parse_precedence():
    f = parse_policy("a | b & !c")
    assert f.root == Or(Lit(0), And(Lit(1), Lit(2, False)))
    assert str(f) == "(a | (b & !c))"


def test_negated_group_pushes_down():
    f = parse_policy("!(a & b)")
    assert f.root == Or(Lit(0, False), Lit(1, False))


@pytest.mark.parametrize(
    "text, position",
    [("a &", 3), ("a & & b", 4), ("(a | b", 6), ("a $ b", 2), ("a b", 2), ("", 0)],
)
def test_syntax_errors_carry_positions(text, position):
    with pytest.raises(PolicyError) as info:
        parse_policy(text)
    assert info.value.position == position


def test_unknown_attribute_rejected_with_universe():
    with pytest.raises(PolicyError) as info:
        parse_policy("a & z", ["a", "b"])
    assert info.value.position == 4


def test_repeated_attribute_rejected():
    with pytest.raises(PolicyError, match="read-once"):
        parse_policy("a & (b | a)")


def test_compiled_matrix_for_conjunction():
    policy = compile_policy(parse_policy("a & b"), 4)
    assert policy.M.tolist() == [[1, 0, 1, 0], [0, 1, 1, 0], [0, 0, -1, 0], [0, 1, 0, 0]]
    assert policy.rho == (0, 2, 1, 3)


def test_columns_guard():
    f = parse_policy("a & b & c")
    assert columns_needed(f) == 4
    with pytest.raises(LsssError):
        compile_policy(f, 3)


def test_complete_set():
    assert complete_set({0, 2}, 3) == frozenset({0, 2, 4})
    with pytest.raises(ValueError):
        complete_set({3}, 3)


def _random_formula(draw_ops, draw_neg, k):
    names = "abcdef"[:k]
    text = names[0]
    for i in range(1, k):
        lit = ("!" if draw_neg[i] else "") + names[i]
        text = f"({text} {draw_ops[i]} {lit})"
    return ("!" if draw_neg[0] else "") + text


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 6),
    st.lists(st.sampled_from("&|"), min_size=6, max_size=6),
    st.lists(st.booleans(), min_size=6, max_size=6),
    st.integers(0, 63),
)
def test_recon_iff_satisfied(k, ops, negs, mask):
    formula = parse_policy(_random_formula(ops, negs, k))
    policy = compile_policy(formula, k + 1)
    held = {i for i in range(k) if (mask >> i) & 1}
    labels = complete_set(held, k)
    coeffs = recon_coeffs(policy, labels, Q)
    assert (coeffs is not None) == formula.evaluate(held)
    rows = policy.rows_for(labels)
    if coeffs is not None:
        assert set(coeffs.w.values()) == {1}
        assert np.array_equal(sum(policy.M[i] for i in coeffs.rows), np.eye(k + 1, dtype=np.int64)[0])
    else:
        d = unauthorized_witness(policy, labels, Q)
        assert d[0] == 1
        assert not np.any(np.mod(policy.M[rows] @ np.array(d), Q))


def test_guided_and_brute_force_agree():
    formula = parse_policy("(a & !b) | (c & d)")
    policy = compile_policy(formula, 5)
    for r in range(5):
        for held in itertools.combinations(range(4), r):
            labels = complete_set(held, 4)
            assert (brute_force_recon(policy, labels, Q) is not None) == (recon_coeffs(policy, labels, Q) is not None)


def test_witness_refuses_authorized_set():
    policy = compile_policy(parse_policy("a | b"), 3)
    with pytest.raises(LsssError):
        unauthorized_witness(policy, complete_set({0}, 2), Q)


def test_policy_equality():
    a = compile_policy(parse_policy("a & !b"), 4)
    b = compile_policy(parse_policy("a&!b"), 4)
    assert a == b
    assert a != compile_policy(parse_policy("a | !b"), 4)
