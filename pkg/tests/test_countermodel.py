import json

import pytest

from focusmu.calculus import parse_sequent
from focusmu.corpus import GOLDEN
from focusmu.countermodel import (SATURATION_BULLETS, Certificate, RefutationError, StrategyGraph, Unverified,
                                  build_states, completed_label, derive_fT, label_spot_checks, refute,
                                  saturation_check, verified_refute)
from focusmu.search import FULL, Proof, RefuterWitness, build_search_game, prove
from focusmu.semantics import model_check
from focusmu.syntax import parse_formula


def witness(text):
    calc, g = parse_sequent(text)
    out = prove(calc, g)
    assert isinstance(out, RefuterWitness), text
    return calc, g, out


def test_atom_gives_one_state():
    calc, g, w = witness("p [f]")
    cert = verified_refute(w)
    assert isinstance(cert, Certificate)
    assert len(cert.model) == 1
    assert cert.model.to_json()["edges"] == []
    assert not model_check(cert.model, cert.root, "p")
    states = build_states(StrategyGraph(w.search), 4)
    assert len(states) == 1


def test_diamond_top_root_has_no_successor():
    calc, g, w = witness("<a>(nu x. x) [f]")
    cert = verified_refute(w)
    assert isinstance(cert, Certificate)
    act = parse_formula("<a>p").action
    assert cert.model.successors(act, cert.model.sid[cert.root]) == []


def test_depth_zero_has_no_transitions():
    calc, g, w = witness("<a>p | [a]q [f]")
    states = build_states(StrategyGraph(w.search), 0)
    assert len(states) == 1 and states[0].children == []


def test_box_atom_needs_a_successor():
    calc, g, w = witness("[a]p [f]")
    sg = StrategyGraph(w.search)
    states = build_states(sg, 1)
    assert len(states) >= 2
    assert all(st.action == parse_formula("<a>p").action for st in states[1:])
    cert = verified_refute(w)
    assert isinstance(cert, Certificate)
    assert cert.depth >= 1


def test_unverified_outcome_is_explicit():
    calc, g, w = witness("[a]p [f]")
    out = verified_refute(w, cap=0)
    assert isinstance(out, Unverified)
    assert str(out).startswith("refutation unverified at depth 0")


def test_provable_sequent_has_no_certificate():
    calc, g = parse_sequent(GOLDEN[0].sequent)
    assert isinstance(prove(calc, g), Proof)
    with pytest.raises(RefutationError):
        refute(calc, g)


def test_full_mode_search_rejected():
    calc, g = parse_sequent("p [f]")
    search = build_search_game(calc, g, FULL)
    with pytest.raises(RefutationError):
        StrategyGraph(search)


def test_certificate_json():
    calc, g, w = witness("<a>[a']p [f]")
    cert = verified_refute(w)
    data = json.loads(cert.dumps())
    assert set(data) == {"model", "root", "falsified", "verification", "depth", "method", "trace_cut_scope"}
    for verdict in data["verification"].values():
        assert verdict == {"model_check": False, "fixpoint_oracle": False}


# -- saturation ------------------------------------------------------------------

def test_bullet_count():
    assert len(SATURATION_BULLETS) == 10


def test_complementary_u_pair_violates():
    calc, g = parse_sequent("p [u], ~p [u]")
    bad = saturation_check(calc, completed_label(calc, g))
    assert SATURATION_BULLETS[1] in bad


def test_unexpanded_nu_violates():
    calc, g = parse_sequent("nu x. x [u]")
    bad = saturation_check(calc, completed_label(calc, g))
    assert SATURATION_BULLETS[7] in bad


def test_completion_only_adds_positive_atoms():
    calc, g = parse_sequent("p [u], p !~> ~p")
    full = completed_label(calc, g)
    assert full & g == g
    assert calc.ntraces(full) == calc.ntraces(g)
    assert calc.traces(full) | calc.ntraces(full) == calc.NN


@pytest.mark.parametrize("case", [c for c in GOLDEN if not c.provable], ids=lambda c: c.name)
def test_golden_refutations(case):
    calc, g, w = witness(case.sequent)
    sg = StrategyGraph(w.search)
    for node in sg.nodes.values():
        assert saturation_check(calc, node.label) == []
    cert = verified_refute(w)
    assert isinstance(cert, Certificate)
    states = build_states(sg, cert.depth)
    roots = sorted(calc.formulas(sg.root))
    report = label_spot_checks(calc, states, roots)
    assert report.ok, (report.outside_sequent, report.loop_violations)
    assert report.positions > 0


# -- the universal strategy ---------------------------------------------------------

def test_fT_conjunct_and_box_choices():
    calc, g, w = witness("<a>~p & [a]q [f]")
    sg = StrategyGraph(w.search)
    states = build_states(sg, 2)
    f = derive_fT(calc, states)
    ctx = calc.ctx
    conj = ctx.idx("<a>~p & [a]q")
    assert (conj, 0) in f
    chosen, where = f[(conj, 0)]
    assert where == 0 and chosen in (ctx.left[conj], ctx.right[conj])
    for st in states[1:]:
        i = st.box >> 1
        body, child = f[(i, st.parent)]
        assert body == ctx.left[i]
        assert child in states[st.parent].children and states[child].box >> 1 == i


def test_fT_unique_modal_child():
    calc, g, w = witness("[a]p [f]")
    states = build_states(StrategyGraph(w.search), 1)
    f = derive_fT(calc, states)
    box = calc.ctx.idx("[a]p")
    assert f[(box, 0)] == (calc.ctx.idx("p"), 1)
