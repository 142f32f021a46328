"""Formula parsing, normalization, and automaton correctness.

The central check holds the tableau translation to the independent
fixpoint evaluation of formulas over lasso words: for a battery of formulas
and every lasso up to a fixed size over the atom alphabet, the automaton
accepts exactly the words the semantics says it should.
"""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tickcheck.ltl import (
    And,
    Atom,
    Always,
    Eventually,
    FalseF,
    Implies,
    Next,
    Not,
    Or,
    Release,
    TrueF,
    Until,
    accepts_lasso,
    formula_atoms,
    nnf,
    parse_ltl,
    render_formula,
    to_buchi,
)
from tickcheck.parser import ParseError

from oracles import eval_lasso_formula

P = "p == 1"
Q = "q == 1"


def f(text):
    return parse_ltl(text)


# --- parsing ------------------------------------------------------------------


def test_parse_shapes():
    assert isinstance(f("p == 1"), Atom)
    # precedence: -> is loosest and right-associative
    g = f("p == 1 -> q == 1 -> p == 2")
    assert isinstance(g, Implies) and isinstance(g.right, Implies)
    # U binds tighter than && and ||, and associates right
    g = f("p == 1 U q == 1 && p == 2 U q == 2")
    assert isinstance(g, And)
    assert isinstance(g.left, Until) and isinstance(g.right, Until)
    g = f("p == 1 U q == 1 U p == 2")
    assert isinstance(g, Until) and isinstance(g.right, Until)
    # prefix operators chain
    g = f("G F p == 1")
    assert isinstance(g, Always) and isinstance(g.operand, Eventually)
    g = f("! X (p == 1)")
    assert isinstance(g, Not) and isinstance(g.operand, Next)
    # atoms are whole comparisons of arithmetic expressions
    g = f("x + 1 == y * 2")
    assert isinstance(g, Atom) and g.key == "x + 1 == y * 2"
    g = f("(x + 1) mod 2 == 0")
    assert isinstance(g, Atom)


def test_parse_round_trip_via_render():
    for text in (
        "G (p == 1 -> F (q == 1))",
        "p == 1 U (q == 1 U p == 2)",
        "!(p == 1 && q == 1) || X (p == 2)",
        "F (x + 1 == 2)",
        "true U p == 1",
    ):
        g = f(text)
        assert f(render_formula(g)) == g


def test_parse_errors():
    for bad in ("", "G", "p ==", "p == 1 U", "(p == 1", "p == 1 &&", "G (p)", "x + 1"):
        with pytest.raises(ParseError):
            f(bad)


def test_temporal_letters_reserved_as_variables():
    with pytest.raises(ParseError):
        f("U == 1")
    with pytest.raises(ParseError):
        f("G (F == 0)")


def test_atom_universe_is_sorted_and_deduplicated():
    g = f("q == 1 U (p == 1 && q == 1)")
    assert [a.key for a in formula_atoms(g)] == ["p == 1", "q == 1"]


# --- negation normal form ---------------------------------------------------


def test_nnf_cases():
    p, q = f("p == 1"), f("q == 1")
    assert nnf(Not(Always(p))) == Until(TrueF(), Not(p))
    assert nnf(Not(Eventually(p))) == Release(FalseF(), Not(p))
    assert nnf(Not(Until(p, q))) == Release(Not(p), Not(q))
    assert nnf(Not(Next(p))) == Next(Not(p))
    assert nnf(Implies(p, q)) == Or(Not(p), q)
    assert nnf(Not(Not(p))) == p
    assert nnf(Not(TrueF())) == FalseF()


# --- canonical automaton sizes ----------------------------------------------
# These are the textbook minimal sizes for the standard patterns; anything
# bigger means the simplification regressed.

SIZES = [
    ("true", 1),
    ("false", 0),
    ("p == 1", 1),
    ("!(p == 1)", 1),
    ("G (p == 1)", 1),
    ("F (p == 1)", 2),
    ("p == 1 U q == 1", 2),
    ("X (p == 1)", 2),
    ("G F (p == 1)", 2),
    ("G (p == 1 -> F (q == 1))", 2),
]


@pytest.mark.parametrize("text,size", SIZES)
def test_automaton_sizes(text, size):
    assert to_buchi(f(text)).n_states == size


# --- full agreement with the lasso semantics -----------------------------------

FORMULAS = [
    "p == 1",
    "!(p == 1)",
    "p == 1 && q == 1",
    "p == 1 || q == 1",
    "p == 1 -> q == 1",
    "X (p == 1)",
    "X X (p == 1)",
    "G (p == 1)",
    "F (p == 1)",
    "p == 1 U q == 1",
    "G F (p == 1)",
    "F G (p == 1)",
    "G (p == 1 -> F (q == 1))",
    "G (p == 1 -> X (q == 1))",
    "F (p == 1 && X (q == 1))",
    "!(p == 1 U q == 1)",
    "G (p == 1) || F (q == 1)",
    "p == 1 U (q == 1 U p == 1)",
    "true U p == 1",
    "p == 1 U true",
    "G (p == 1 && q == 1 -> X (!(p == 1) U q == 1))",
]

LETTERS = [frozenset(), frozenset({P}), frozenset({Q}), frozenset({P, Q})]


def all_lassos(max_stem, max_cycle):
    for ns in range(max_stem + 1):
        for nc in range(1, max_cycle + 1):
            for stem in itertools.product(LETTERS, repeat=ns):
                for cycle in itertools.product(LETTERS, repeat=nc):
                    yield list(stem), list(cycle)


@pytest.mark.parametrize("text", FORMULAS)
def test_automaton_agrees_with_semantics_on_all_small_lassos(text):
    g = f(text)
    ba = to_buchi(g)
    neg = to_buchi(Not(g))
    for stem, cycle in all_lassos(2, 2):
        want = eval_lasso_formula(g, stem, cycle)
        assert accepts_lasso(ba, stem, cycle) == want, (text, stem, cycle)
        # the checker always runs the negated automaton, so hold it to the
        # complement on the same words
        assert accepts_lasso(neg, stem, cycle) == (not want), (text, stem, cycle)


# --- randomized agreement -------------------------------------------------------


def formulas(depth=3):
    leaf = st.sampled_from([f("p == 1"), f("q == 1"), TrueF(), FalseF()])
    unary = [Not, Next, Always, Eventually]
    binary = [And, Or, Implies, Until]
    return st.recursive(
        leaf,
        lambda sub: st.one_of(
            st.tuples(st.sampled_from(unary), sub).map(lambda t: t[0](t[1])),
            st.tuples(st.sampled_from(binary), sub, sub).map(lambda t: t[0](t[1], t[2])),
        ),
        max_leaves=6,
    )


@settings(max_examples=150, deadline=None)
@given(
    formulas(),
    st.lists(st.sampled_from(LETTERS), min_size=0, max_size=3),
    st.lists(st.sampled_from(LETTERS), min_size=1, max_size=3),
)
def test_random_formulas_agree_with_semantics(g, stem, cycle):
    ba = to_buchi(g)
    assert accepts_lasso(ba, stem, cycle) == eval_lasso_formula(g, stem, cycle)
