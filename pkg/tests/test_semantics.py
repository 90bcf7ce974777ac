import json
import random

import pytest

from focusmu.corpus import random_formula, random_model
from focusmu.graphs import tarjan_scc
from focusmu.syntax import MU, NU, negation_closed_context, parse_formula
from focusmu.semantics import (EXISTS, FORALL, EvaluationGame, KripkeModel, ModelError, enumerate_ops,
                               fixpoint_oracle, model_check, satisfies_trace_atom, satisfies_under)

PHI1 = "mu x.(<a'>x | p)"
PSI1 = "nu y.([a]y & mu x.(<a'>x | p))"


def loop_model():
    return KripkeModel(["s"], [("a", "s", "s")], {})


def test_converse_edges_synthesised():
    m = KripkeModel(["s", "t"], [("a", "s", "t")], {"p": ["s"]})
    assert m.is_regular()
    assert m.successors(parse_formula("<a'>p").action, 1) == [0]
    assert m.forward_edges() == [("a", "s", "t")]


def test_json_round_trip(tmp_path):
    m = KripkeModel(["s", "t"], [("a", "s", "t"), ("b'", "t", "t")], {"p": ["t"]})
    path = tmp_path / "m.json"
    path.write_text(m.dumps())
    back = KripkeModel.load(path)
    assert back.to_json() == m.to_json()
    assert json.loads(m.dumps())["edges"][0] == {"action": "a", "from": "s", "to": "t"}


@pytest.mark.parametrize("data", [
    {"states": ["s", "s"]},
    {"states": ["s"], "edges": [{"action": "a", "from": "s", "to": "u"}]},
    {"states": ["s"], "valuation": {"p": ["u"]}},
    {"edges": []},
])
def test_bad_models(data):
    with pytest.raises(ModelError):
        KripkeModel.from_json(data)


def test_board_owners():
    m = KripkeModel(["s"], [], {"p": ["s"]})
    ctx = negation_closed_context(["p", "<a>p", "nu x. x"])
    ev = EvaluationGame(ctx, m)
    g = ev.game
    v = ev.pos(ctx.idx("p"), 0)
    assert g.owner[v] == FORALL and g.edges[v] == []
    v = ev.pos(ctx.idx("<a>p"), 0)
    assert g.owner[v] == EXISTS and g.edges[v] == []
    v = ev.pos(ctx.idx("nu x. x"), 0)
    assert g.edges[v] == [v] and g.priority[v] == 2
    assert ev.true_at(ctx.idx("p"), 0) and not ev.true_at(ctx.idx("<a>p"), 0)


def test_model_check_examples():
    assert model_check(loop_model(), "s", "nu x.<a><a'>x")
    assert not model_check(KripkeModel(["s"], [], {}), "s", "<a>p")
    two = KripkeModel(["s", "t"], [("a", "s", "t")], {"p": ["s"]})
    assert model_check(two, "s", PSI1)
    assert fixpoint_oracle(two, PHI1) == {"s", "t"}


def test_oracle_trivia():
    m = random_model(random.Random(3), 4)
    assert fixpoint_oracle(m, "nu x. x") == set(m.states)
    assert fixpoint_oracle(m, "mu x. x") == set()


def test_unknown_state():
    with pytest.raises(ModelError):
        model_check(loop_model(), "nowhere", "p")


def test_non_regular_rejected():
    m = loop_model()
    m.rel[parse_formula("<a>p").action] = {(0, 0)}
    m.rel[parse_formula("<a'>p").action] = set()
    with pytest.raises(ModelError):
        EvaluationGame(negation_closed_context(["p"]), m)


def test_model_check_agrees_with_oracle():
    rng = random.Random(11)
    for _ in range(200):
        m = random_model(rng, rng.randint(1, 5), actions=("a", "b"))
        phi = random_formula(rng, 3, actions=("a", "a'", "b"), max_closure=10)
        truth = fixpoint_oracle(m, phi)
        ctx = negation_closed_context([phi])
        ev = EvaluationGame(ctx, m)
        i = ctx.idx(phi)
        assert {m.states[s] for s in range(len(m)) if ev.true_at(i, s)} == truth


def test_truth_iff_every_ops_fails():
    rng = random.Random(4)
    for _ in range(60):
        m = random_model(rng, rng.randint(1, 3))
        phi = random_formula(rng, 2, max_closure=8)
        ctx = negation_closed_context([phi])
        ev = EvaluationGame(ctx, m)
        opss = ev.ops()
        assert opss
        i = ctx.idx(phi)
        for s in range(len(m)):
            assert ev.true_at(i, s) == all(ev.holds_under(f, i, s) for f in opss)


def test_satisfies_under_examples():
    m = KripkeModel(["s"], [], {"p": ["s"]})
    assert not satisfies_under(m, {}, "s", "~p")
    assert satisfies_under(m, {}, "s", "[a]~p")  # universal player stuck


def test_satisfies_under_rejects_inadmissible():
    m = KripkeModel(["s"], [], {"p": ["s"], "q": ["s"]})
    with pytest.raises(ModelError):
        satisfies_under(m, {}, "s", "p & q")
    with pytest.raises(ModelError):
        satisfies_under(m, {("p & q", "s"): ("~p", "s")}, "s", "p & q",
                        ctx=negation_closed_context(["p & q"]))


def test_trace_atoms():
    m = KripkeModel(["s", "t"], [("a", "s", "t")], {"p": ["t"]})
    f = {("[a]~p", "s"): ("~p", "t")}
    assert satisfies_trace_atom(m, f, "s", "<a>p", "<a>p")
    assert not satisfies_trace_atom(m, f, "s", "<a>p", "p")
    loop = KripkeModel(["s"], [("a", "s", "s")], {})
    ctx = negation_closed_context(["nu x.<a><a'>x", "mu x.<a>x"])
    f = enumerate_ops(ctx, loop)[0]

    def trace(a, b):
        return satisfies_trace_atom(loop, f, "s", a, b, ctx=ctx)

    assert trace("nu x.<a><a'>x", "<a'>(nu x.<a><a'>x)")
    # least fixpoints block a trace before its end
    assert not trace("mu x.<a>x", "<a>(mu x.<a>x)")
    assert trace("<a>(mu x.<a>x)", "mu x.<a>x")


def test_trace_atoms_compose():
    rng = random.Random(8)
    for _ in range(30):
        m = random_model(rng, 3)
        phi = random_formula(rng, 2, max_closure=8)
        ctx = negation_closed_context([phi])
        ev = EvaluationGame(ctx, m)
        f = ev.ops()[0]
        n = len(ctx)
        for s in range(len(m)):
            rel = [[ev.trace_holds(f, i, j, s) for j in range(n)] for i in range(n)]
            for i in range(n):
                assert rel[i][i]
                for j in range(n):
                    if rel[i][j] and ctx.kind[j] != MU:
                        for k in range(n):
                            if rel[j][k]:
                                assert rel[i][k]


def test_valid_but_not_strongly_valid():
    m = KripkeModel(["s"], [], {"p": ["s"], "q": ["s"]})
    ctx = negation_closed_context(["p & q"])
    ev = EvaluationGame(ctx, m)
    pq, p, q = ctx.idx("p & q"), ctx.idx("p"), ctx.idx("q")
    opss = ev.ops()
    assert len(opss) == 2
    left = [ev.trace_holds(f, pq, p, 0) for f in opss]
    right = [ev.trace_holds(f, pq, q, 0) for f in opss]
    assert all(a or b for a, b in zip(left, right))
    assert not all(left) and not all(right)
    assert len(enumerate_ops(ctx, m)) == 2


def test_no_cycle_mixes_fixpoint_kinds():
    rng = random.Random(21)
    for _ in range(80):
        m = random_model(rng, rng.randint(1, 4))
        phi = random_formula(rng, 3, max_closure=12)
        ctx = negation_closed_context([phi])
        ev = EvaluationGame(ctx, m)
        g = ev.game
        for comp in tarjan_scc(range(g.n), lambda v: g.edges[v]):
            if len(comp) == 1 and comp[0] not in g.edges[comp[0]]:
                continue
            kinds = {ctx.kind[ev.split(v)[0]] for v in comp}
            assert not (MU in kinds and NU in kinds)


def test_ops_guard():
    m = KripkeModel([f"s{i}" for i in range(6)], [("a", f"s{i}", f"s{j}") for i in range(6) for j in range(6)], {})
    with pytest.raises(ModelError):
        enumerate_ops(negation_closed_context(["[a][a]p & [a]q"]), m, limit=10)
