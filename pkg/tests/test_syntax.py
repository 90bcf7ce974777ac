import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from focusmu.corpus import random_formula
from focusmu.syntax import (Action, FormulaError, ParseError, atom, closure, dia, is_alternation_free, lor, natom,
                            negate, negation_closed_context, parse_formula, pretty, render, unfold)

PHI1 = "mu x.(<a'>x | p)"
PSI1 = "nu y.([a]y & mu x.(<a'>x | p))"
PHI2 = "nu x.<a><a'>x"


def P(text):
    return parse_formula(text)


def texts(fs):
    return {render(f) for f in fs}


def test_action_involution():
    a = Action("a")
    assert a.converse.converse == a
    assert a.converse != a
    assert str(a.converse) == "a'"


def test_double_prime_normalises():
    assert P("<a''>p") == P("<a>p")
    assert P("[a''']p") == P("[a']p")


def test_parse_example_formula():
    f = P(PHI1)
    assert f.kind == "mu"
    assert f == P("mu z. (<a'> z | p)")  # bound names do not matter
    assert render(f) == "mu x0. <a'>x0 | p"


def test_top_is_nu_x_x():
    f = P("nu x. x")
    assert f.kind == "nu" and unfold(f) == f


@pytest.mark.parametrize("text", ["mu x. nu y.(x & y)", "nu x. mu y. (<a>y | x)"])
def test_alternation_rejected(text):
    with pytest.raises(FormulaError):
        P(text)


@pytest.mark.parametrize("text,pos", [("p &", 3), ("<a p", 3), ("mu . p", 3), ("p | q)", 5)])
def test_parse_errors_have_positions(text, pos):
    with pytest.raises(ParseError) as exc:
        P(text)
    assert exc.value.pos == pos


def test_negated_bound_variable_rejected():
    with pytest.raises(FormulaError):
        P("mu x. ~x")


def test_negation_of_closed_subformula():
    assert P("~(p | q)") == P("~p & ~q")
    assert P("~(" + PHI2 + ")") == P("mu x.[a][a']x")


def test_negate_examples():
    assert negate(P(PHI2)) == P("mu x.[a][a']x")
    assert negate(P("p | q")) == P("~p & ~q")
    assert negate(natom("p")) == atom("p")


def test_unfold_examples():
    assert unfold(P(PHI1)) == P(f"<a'>({PHI1}) | p")
    psi = P(PSI1)
    assert unfold(psi) == P(f"[a]({PSI1}) & {PHI1}")
    with pytest.raises(FormulaError):
        unfold(P("p"))


def test_closure_examples():
    assert texts(closure(P(PHI2))) == texts([P(PHI2), P(f"<a><a'>({PHI2})"), P(f"<a'>({PHI2})")])
    assert closure(P("p")) == {P("p")}
    assert texts(closure(P(PHI1))) == texts([P(PHI1), P(f"<a'>({PHI1}) | p"), P(f"<a'>({PHI1})"), P("p")])


def test_psi_context():
    ctx = negation_closed_context([P(PHI1), P(PSI1)])
    phi, psi = P(PHI1), P(PSI1)
    expected = [phi, unfold(phi), dia("a'", phi), P("p"), psi, unfold(psi), P(f"[a]({PSI1})"),
                negate(phi), negate(unfold(phi)), negate(dia("a'", phi)), P("~p"), negate(psi),
                negate(unfold(psi)), negate(P(f"[a]({PSI1})"))]
    assert len(ctx) == 14
    assert set(ctx) == set(expected)


def test_diamond_loop_context():
    ctx = negation_closed_context(["<a>p", PHI2])
    phi = P(PHI2)
    expected = [P("<a>p"), P("p"), phi, unfold(phi), P(f"<a'>({PHI2})"), P("[a]~p"), P("~p"), negate(phi),
                negate(unfold(phi)), negate(P(f"<a'>({PHI2})"))]
    assert len(ctx) == 10
    assert set(ctx) == set(expected)


def test_context_pairs_negations():
    ctx = negation_closed_context([PSI1])
    for i, f in enumerate(ctx):
        assert ctx.neg[i] == i ^ 1
        assert negate(f) == ctx[i ^ 1]
    assert negation_closed_context(["p"]).formulas == (P("p"), P("~p"))


def test_alternation_free_flags():
    assert is_alternation_free(P(PHI2))
    assert is_alternation_free(P(PSI1))


def test_pretty_uses_symbols():
    assert pretty(P("<a'>p & [a]~p")) == "\u27e8a\u0306\u27e9p \u2227 [a]p\u0304"


def _formulas(seed, count=60, depth=3):
    rng = random.Random(seed)
    return [random_formula(rng, depth) for _ in range(count)]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_render_parse_round_trip(seed):
    f = random_formula(random.Random(seed), 3, atoms=("p", "q", "x"))
    assert P(render(f)) == f


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_negation_involution_and_closure_properties(seed):
    f = random_formula(random.Random(seed), 3)
    assert negate(negate(f)) == f
    assert is_alternation_free(negate(f))
    cl = closure(f)
    for g in cl:
        assert is_alternation_free(g)
        assert not g.fv
        assert closure(g) <= cl
        if g.kind in ("mu", "nu"):
            assert unfold(g) in cl


def test_hash_consing_identity():
    assert P("p | q") is lor(atom("p"), atom("q"))
