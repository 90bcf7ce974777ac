"""One test per acceptance criterion; each prints a PASS/FAIL line before asserting."""
import random
import time

import pytest

from cases import PSI_ROOT, LOOP_ROOT, MODAL_STEPS, lasso_cases, lasso_winner
from focusmu import paritygames
from focusmu.calculus import Calculus, RuleInstance, bits, parse_sequent
from focusmu.corpus import GOLDEN, random_formula, random_model, random_sequents
from focusmu.countermodel import (Certificate, StrategyGraph, build_states, saturation_check, verified_refute)
from focusmu.paritygames import brute_force_winner, random_game, solve
from focusmu.search import PROVER, REFUTER, Proof, build_search_game, instance_priority, prove, verify_proof
from focusmu.semantics import EvaluationGame, KripkeModel, fixpoint_oracle
from focusmu.syntax import closure, negation_closed_context

TIME_LIMIT_S = 10.0
GAMES = 600
MODEL_PAIRS = 200
PROVABLE_TARGET = 100
MODELS_PER_SEQUENT = 20
CORPUS_SEED, CORPUS_SIZE = 2024, 150
DEPTH_CAP = 8


@pytest.fixture
def report(capsys):
    def emit(number: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\nACCEPTANCE {number}: {'PASS' if ok else 'FAIL'} - {detail}")
    return emit


def test_1_examples_have_verified_proofs(report):
    lines, ok = [], True
    for name, text in (("p -> psi", PSI_ROOT), ("<a>p -> phi", LOOP_ROOT)):
        t0 = time.perf_counter()
        calc, g = parse_sequent(text)
        out = prove(calc, g)
        good = isinstance(out, Proof) and verify_proof(out, g).ok
        dt = time.perf_counter() - t0
        ok &= good and dt < TIME_LIMIT_S
        lines.append(f"{name}: {'verified proof' if good else 'NO PROOF'} in {dt:.2f}s")
    report(1, ok, "; ".join(lines))
    assert ok


def test_2_reference_modal_steps_match(report):
    mismatched = []
    for name, calc, conclusion, principal, premiss in MODAL_STEPS:
        g = calc.parse(conclusion)
        m = next(bits(calc.parse(principal)))
        got, want = calc.jump(g, m), calc.parse(premiss)
        if got != want:
            mismatched.append(f"{name}: got {calc.render(got)}")
    report(2, not mismatched, f"{len(MODAL_STEPS) - len(mismatched)}/{len(MODAL_STEPS)} modal steps equal "
                              f"the reference premisses" + (f" ({mismatched})" if mismatched else ""))
    assert not mismatched


def test_3_solver_matches_brute_force(report):
    rng = random.Random(3)
    bad = 0
    for k in range(GAMES):
        g = random_game(rng, rng.randint(1, 8), max_priority=2 if k % 2 else 3)
        expected = brute_force_winner(g)
        for backend in ("python", paritygames.BACKEND):
            if solve(g, backend).winner != expected:
                bad += 1
    report(3, bad == 0, f"{GAMES} games up to 8 positions, backends python+{paritygames.BACKEND}, "
                        f"{bad} disagreements with brute force")
    assert bad == 0


def test_4_model_checker_matches_fixpoints(report):
    rng = random.Random(4)
    bad = biggest = 0
    for _ in range(MODEL_PAIRS):
        model = random_model(rng, rng.randint(1, 5), actions=("a", "b"))
        phi = random_formula(rng, 4, actions=("a", "a'", "b", "b'"), max_closure=20)
        biggest = max(biggest, len(closure(phi)))
        ctx = negation_closed_context([phi])
        ev = EvaluationGame(ctx, model)
        i = ctx.idx(phi)
        game = {model.states[s] for s in range(len(model)) if ev.true_at(i, s)}
        bad += game != fixpoint_oracle(model, phi)
    ok = bad == 0 and biggest <= 20
    report(4, ok, f"{MODEL_PAIRS} pairs (max closure {biggest}), {bad} disagreements")
    assert ok


def _random_regular_models(rng, count):
    return [random_model(rng, rng.randint(1, 4), atoms=("p",), actions=("a",), density=rng.choice((0.2, 0.4, 0.6)))
            for _ in range(count)]


def test_5_proved_sequents_are_valid(report):
    rng = random.Random(5)
    proved = checked = 0
    counterexamples = []
    seed = 0
    while proved < PROVABLE_TARGET and seed < 20:
        for text in random_sequents(500 + seed, 40):
            if proved >= PROVABLE_TARGET:
                break
            calc, g = parse_sequent(text)
            out = prove(calc, g)
            if not isinstance(out, Proof):
                continue
            assert verify_proof(out, g).ok, text
            proved += 1
            forms = sorted(calc.formulas(g))
            for model in _random_regular_models(rng, MODELS_PER_SEQUENT):
                ev = EvaluationGame(calc.ctx, model)
                for s in range(len(model)):
                    checked += 1
                    if not any(ev.true_at(i, s) for i in forms):
                        counterexamples.append((text, model.dumps(), model.states[s]))
        seed += 1
    ok = proved >= PROVABLE_TARGET and not counterexamples
    report(5, ok, f"{proved} proved sequents x {MODELS_PER_SEQUENT} models, {checked} state checks, "
                  f"{len(counterexamples)} counterexamples")
    assert ok, counterexamples[:3]


@pytest.fixture(scope="module")
def refuted_corpus():
    """Refuter wins on the refutable golden cases and a seeded random batch, with certificates."""
    texts = [c.sequent for c in GOLDEN if not c.provable] + random_sequents(CORPUS_SEED, CORPUS_SIZE)
    rows = []
    for text in texts:
        calc, g = parse_sequent(text)
        out = prove(calc, g)
        if isinstance(out, Proof):
            continue
        sg = StrategyGraph(out.search)
        rows.append((text, calc, sg, verified_refute(out, cap=DEPTH_CAP)))
    return rows


def test_6_refutations_are_certified(report, refuted_corpus):
    unverified, oracle_bad = [], []
    for text, calc, sg, cert in refuted_corpus:
        if not isinstance(cert, Certificate):
            unverified.append(text)
            continue
        for f in cert.falsified:
            if cert.root in fixpoint_oracle(cert.model, f):
                oracle_bad.append(text)
        assert cert.depth <= DEPTH_CAP
    ok = not unverified and not oracle_bad
    detail = (f"{len(refuted_corpus)} refuted sequents, {len(refuted_corpus) - len(unverified)} certified "
              f"at depth <= {DEPTH_CAP}, {len(oracle_bad)} oracle failures")
    if unverified:
        detail += "; unverified: " + " | ".join(unverified)
    report(6, ok, detail)
    assert ok


def test_7_state_labels_are_saturated(report, refuted_corpus):
    labels = violations = 0
    examples = []
    for text, calc, sg, cert in refuted_corpus:
        depth = cert.depth if isinstance(cert, Certificate) else DEPTH_CAP
        for st in build_states(sg, depth):
            labels += 1
            bad = saturation_check(calc, st.label)
            if bad:
                violations += 1
                examples.append((text, bad))
    report(7, violations == 0, f"{labels} state labels checked, {violations} violate a saturation condition")
    assert violations == 0, examples[:3]


def test_8_valid_but_not_strongly_valid(report):
    ctx = negation_closed_context(["p & q"])
    calc = Calculus(ctx)
    model = KripkeModel(["both", "neither"], [], {"p": ["both"], "q": ["both"]})
    ev = EvaluationGame(ctx, model)
    gamma = calc.parse("(p & q) ~> p, (p & q) ~> q")
    members = list(bits(gamma))
    opss = ev.ops()
    valid = all(calc.holds(ev, f, gamma, s) for f in opss for s in range(len(model)))
    single = [m for m in members if all(calc.member_holds(ev, f, m, s) for f in opss for s in range(len(model)))]
    ok = valid and not single and len(opss) > 1
    report(8, ok, f"{len(opss)} optimal strategies; sequent holds under all: {valid}; "
                  f"members holding under all: {len(single)}")
    assert ok


def test_9_priority_encoding(report):
    calc, _ = parse_sequent("[a]p [f], q [u]")
    omega = [
        instance_priority(calc, RuleInstance(calc.parse("p [u], q [u]"), "cut", (), 0)) == 3,
        instance_priority(calc, RuleInstance(calc.parse("[a]p [f]"), "R_box", ())) == 2,
        instance_priority(calc, RuleInstance(calc.parse("[a]p [f], q [u]"), "cut", (), 0)) == 1,
    ]
    search = build_search_game(calc, calc.parse("[a]p [f]"))
    lassos = []
    for name, lcalc, prefix, cycle, prover_wins in lasso_cases():
        lassos.append(lasso_winner(lcalc, prefix, cycle) == (PROVER if prover_wins else REFUTER))
    ok = all(omega) and all(lassos) and len(lassos) == 6 and search.priority[search.root] == 1
    report(9, ok, f"{sum(omega)}/3 priority cases, {sum(lassos)}/{len(lassos)} lasso winners as prescribed")
    assert ok
