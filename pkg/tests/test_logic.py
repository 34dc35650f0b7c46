import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eigenmark.errors import ConfigurationError, EvaluationError, ParseError
from eigenmark.logic import (
    And,
    Iff,
    Implies,
    KnowledgeBase,
    Not,
    Or,
    Var,
    entails,
    evaluate,
    free_variables,
    parse,
    parse_kb,
    to_text,
    truth_table,
)

from reference import brute_force_entails

A, B, C, D, E = map(Var, "ABCDE")
ALPHA = parse_kb("A => B; B => C")
FIVE_VARS = list("ABCDE")


def formulas(names="ABCD", max_leaves=12):
    leaves = st.sampled_from([Var(n) for n in names])
    return st.recursive(
        leaves,
        lambda kids: st.one_of(
            kids.map(Not),
            st.tuples(kids, kids).map(lambda p: And(*p)),
            st.tuples(kids, kids).map(lambda p: Or(*p)),
            st.tuples(kids, kids).map(lambda p: Implies(*p)),
            st.tuples(kids, kids).map(lambda p: Iff(*p)),
        ),
        max_leaves=max_leaves,
    )


def depth(f):
    if isinstance(f, Var):
        return 0
    if isinstance(f, Not):
        return 1 + depth(f.child)
    return 1 + max(depth(f.left), depth(f.right))


class TestParse:
    def test_implication(self):
        assert parse("A => B") == Implies(A, B)

    def test_precedence_of_chained_implication(self):
        assert parse("A => B & B => C") == Implies(A, Implies(And(B, B), C))

    def test_negated_group(self):
        assert parse("!(A & B)") == Not(And(A, B))

    def test_and_binds_tighter_than_or(self):
        assert parse("A | B & C") == Or(A, And(B, C))

    def test_iff_loosest_and_left_assoc(self):
        assert parse("A <-> B <-> C") == Iff(Iff(A, B), C)
        assert parse("A -> B <-> C") == Iff(Implies(A, B), C)

    def test_left_assoc_and(self):
        assert parse("A & B & C") == And(And(A, B), C)

    @pytest.mark.parametrize("text", ["¬A ∧ B ⇒ C", "~A && B -> C", "!A & B => C"])
    def test_aliases(self, text):
        assert parse(text) == Implies(And(Not(A), B), C)

    def test_unicode_iff(self):
        assert parse("A ⇔ B") == Iff(A, B)

    @pytest.mark.parametrize("text,pos", [("A &", 3), ("(A | B", 6), ("A $ B", 2), ("", 0), ("A B", 2)])
    def test_errors_carry_position(self, text, pos):
        with pytest.raises(ParseError) as info:
            parse(text)
        assert info.value.position == pos

    def test_kb_splits_and_skips_comments(self):
        kb = parse_kb("# rules\nA => B; B => C\n\n# done\n")
        assert kb.sentences == (Implies(A, B), Implies(B, C))

    def test_kb_error_position_is_global(self):
        with pytest.raises(ParseError) as info:
            parse_kb("A => B; B =>")
        assert info.value.position == 12

    def test_empty_kb(self):
        with pytest.raises(ParseError):
            parse_kb("# nothing\n")

    @settings(max_examples=200, deadline=None)
    @given(formulas(max_leaves=40))
    def test_round_trip(self, f):
        assert parse(to_text(f)) == f

    def test_round_trip_reaches_depth_eight(self):
        f = A
        for k in range(8):
            f = Implies(f, Not(B)) if k % 2 else And(Or(f, C), f)
        assert depth(f) >= 8
        assert parse(to_text(f)) == f


class TestEvaluate:
    def test_implication_false_case(self):
        assert evaluate(Implies(A, B), {"A": True, "B": False}) is False

    def test_alpha_all_true(self):
        assert evaluate(ALPHA.formula(), dict(A=True, B=True, C=True)) is True

    def test_beta2_false_when_a_and_c(self):
        assert evaluate(parse("A => !C"), dict(A=True, C=True)) is False

    def test_unbound_variable_named(self):
        with pytest.raises(EvaluationError, match="'B'"):
            evaluate(And(A, B), {"A": True})

    @settings(max_examples=100, deadline=None)
    @given(formulas("AB", 6), formulas("AB", 6))
    def test_de_morgan(self, p, q):
        for a, b in itertools.product([False, True], repeat=2):
            env = {"A": a, "B": b}
            assert evaluate(Not(And(p, q)), env) == evaluate(Or(Not(p), Not(q)), env)


class TestFreeVariables:
    def test_order(self):
        assert free_variables(parse("A => B")) == ["A", "B"]

    def test_kb_then_query(self):
        assert free_variables(parse_kb("(A=>B);(B=>C)"), parse("D=>E")) == FIVE_VARS

    def test_dedup(self):
        assert free_variables(parse("A & A")) == ["A"]


class TestTruthTable:
    def test_single_var(self):
        np.testing.assert_array_equal(truth_table(A, ["A"]), [False, True])

    def test_and_single_true_row(self):
        t = truth_table(And(A, B), ["A", "B"])
        assert t.sum() == 1 and t[3]

    def test_bit_convention(self):
        # variable k is bit k of the row index
        np.testing.assert_array_equal(truth_table(B, ["A", "B"]), [False, False, True, True])

    def test_alpha_entails_beta1_all_true(self):
        f = Or(Not(ALPHA.formula()), parse("A => C"))
        # brute force with Python booleans; index bits are A=bit0, B=bit1, C=bit2
        expected = []
        for i in range(8):
            a, b, c = bool(i & 1), bool(i & 2), bool(i & 4)
            expected.append((not ((not a or b) and (not b or c))) or (not a or c))
        assert all(expected)
        np.testing.assert_array_equal(truth_table(f, ["A", "B", "C"]), expected)

    def test_matches_evaluate(self):
        f = parse("(A <-> !B) | (C & A)")
        vs = ["A", "B", "C"]
        t = truth_table(f, vs)
        for i in range(8):
            env = {v: bool(i >> k & 1) for k, v in enumerate(vs)}
            assert t[i] == evaluate(f, env)

    def test_cap(self):
        vs = [f"v{i}" for i in range(21)]
        with pytest.raises(ConfigurationError):
            truth_table(Var("v0"), vs)


BETAS = {
    "beta1": ("A => C", lambda a: not a["A"] or a["C"]),
    "beta2": ("A => !C", lambda a: not a["A"] or not a["C"]),
    "beta3": ("D => E", lambda a: not a["D"] or a["E"]),
    "beta4": ("D => !E", lambda a: not a["D"] or not a["E"]),
}


def alpha_fn(a):
    return (not a["A"] or a["B"]) and (not a["B"] or a["C"])


class TestEntails:
    def test_beta1_entailed(self):
        res = entails(ALPHA, parse("A => C"))
        assert res.entailed and res.violations == []

    def test_beta2_violation_row(self):
        res = entails(ALPHA, parse("A => !C"))
        assert not res.entailed
        assert {"A": True, "B": True, "C": True} in res.violations

    def test_beta3_example_violation(self):
        res = entails(ALPHA, parse("D => E"))
        assert not res.entailed
        assert dict(A=True, B=True, C=True, D=True, E=False) in res.violations

    @pytest.mark.parametrize("name", list(BETAS))
    def test_matches_brute_force_over_five_vars(self, name):
        text, fn = BETAS[name]
        res = entails(ALPHA, parse(text), FIVE_VARS)
        expected = brute_force_entails(alpha_fn, fn, FIVE_VARS)

        def key(a):
            return tuple(a[v] for v in FIVE_VARS)

        assert sorted(map(key, res.violations)) == sorted(map(key, expected))
        assert res.entailed == (name == "beta1")

    @settings(max_examples=80, deadline=None)
    @given(formulas("ABC", 6), formulas("ABC", 6))
    def test_equivalent_to_truth_table(self, kb, q):
        vs = ["A", "B", "C"]
        res = entails(kb, q, vs)
        assert res.entailed == (not truth_table(And(kb, Not(q)), vs).any())

    def test_missing_variable_rejected(self):
        with pytest.raises(ConfigurationError):
            entails(ALPHA, parse("A => C"), ["A", "B"])

    def test_kb_accepts_formula(self):
        assert entails(And(A, B), A).entailed

    def test_knowledge_base_type(self):
        kb = KnowledgeBase([A, B])
        assert kb.formula() == And(A, B)
