"""Command-line driver.

Exit codes: 0 provable / check passed / formula true, 1 check failed /
formula false, 2 input error, 3 search budget exceeded, 10 refuted with a
verified countermodel, 11 refuted but no countermodel verified, 70 internal
invariant violated.
"""
from __future__ import annotations

import json
import sys
import time

import click

from .calculus import parse_sequent
from .countermodel import Certificate, RefutationError, verified_refute
from .corpus import GOLDEN, random_sequents
from .search import FULL, PHASED, Proof, SearchBudgetExceeded, formula_sequent, prove, verify_proof
from .semantics import KripkeModel, ModelError, fixpoint_oracle, model_check
from .syntax import FormulaError, lor, negate, parse_formula, render

EXIT_PROVED, EXIT_FALSE, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3
EXIT_REFUTED, EXIT_UNVERIFIED, EXIT_INTERNAL = 10, 11, 70


class Internal(click.ClickException):
    exit_code = EXIT_INTERNAL


class BadInput(click.ClickException):
    exit_code = EXIT_INPUT


def _write(path: str | None, text: str) -> None:
    if path is None:
        return
    if path == "-":
        click.echo(text, nl=not text.endswith("\n"))
        return
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _dumps(data) -> str:
    return json.dumps(data, indent=1, sort_keys=True, ensure_ascii=False) + "\n"


mode_opt = click.option("--mode", type=click.Choice([PHASED, FULL]), default=PHASED, show_default=True,
                        envvar="MU2_MODE", help="Prover strategy space.")
depth_opt = click.option("--depth", type=click.IntRange(0), default=8, show_default=True, envvar="MU2_DEPTH",
                         help="Modal depth cap for countermodel construction.")
dot_opt = click.option("--dot", "dot_path", type=click.Path(dir_okay=False), envvar="MU2_DOT",
                       help="Write the proof graph or countermodel in DOT format.")
json_opt = click.option("--json", "json_path", type=click.Path(dir_okay=False), default="-", show_default=True,
                        envvar="MU2_JSON", help="Where to write the JSON result ('-' for stdout).")
scope_opt = click.option("--tc-scope", type=click.Choice(["relevant", "all"]), default="relevant",
                         show_default=True, envvar="MU2_TC_SCOPE", help="Trace-atom pairs Prover may cut on.")
budget_opt = click.option("--max-positions", type=click.IntRange(1), default=None, envvar="MU2_MAX_POSITIONS",
                          help="Abort the search game beyond this many positions.")


def _decide(calc, gamma, mode, depth, dot_path, json_path, tc_scope, max_positions) -> int:
    try:
        out = prove(calc, gamma, mode, tc_scope, max_positions)
    except SearchBudgetExceeded as exc:
        click.echo(f"search budget exceeded: {exc}", err=True)
        return EXIT_BUDGET
    if isinstance(out, Proof):
        check = verify_proof(out, gamma)
        if not check.ok:
            raise Internal("extracted proof rejected by the checker: " + "; ".join(check.errors[:5]))
        data = {"result": "provable", **out.to_json()}
        _write(json_path, _dumps(data))
        if dot_path:
            _write(dot_path, out.to_dot())
        click.echo(f"provable: proof with {len(out)} nodes", err=True)
        return EXIT_PROVED
    if mode != PHASED:
        # countermodels come from the phased game; rerun it there
        out = prove(calc, gamma, PHASED, tc_scope, max_positions)
        if isinstance(out, Proof):
            raise Internal("full and phased search disagree on provability")
    try:
        cert = verified_refute(out, cap=depth)
    except RefutationError as exc:
        raise Internal(str(exc)) from None
    if isinstance(cert, Certificate):
        _write(json_path, _dumps({"result": "refuted", **cert.to_json()}))
        if dot_path:
            _write(dot_path, cert.model.to_dot(root=cert.root))
        click.echo(f"refuted: countermodel with {len(cert.model)} states verified", err=True)
        return EXIT_REFUTED
    _write(json_path, _dumps({"result": "unverified", "depth": cert.depth, "reason": cert.reason}))
    click.echo(str(cert), err=True)
    return EXIT_UNVERIFIED


@click.group()
@click.version_option(package_name="artifact")
def main() -> None:
    """Cyclic proof search and countermodels for the two-way alternation-free mu-calculus."""


@main.command("prove")
@click.argument("formula")
@click.option("--imp", "antecedent", default=None, envvar="MU2_IMP",
              help="Prove ANTECEDENT -> FORMULA, entered as ~ANTECEDENT | FORMULA.")
@mode_opt
@depth_opt
@dot_opt
@json_opt
@scope_opt
@budget_opt
def prove_cmd(formula, antecedent, mode, depth, dot_path, json_path, tc_scope, max_positions):
    """Prove FORMULA or refute it with a countermodel."""
    try:
        phi = parse_formula(formula)
        if antecedent is not None:
            phi = lor(negate(parse_formula(antecedent)), phi)
        calc, gamma = formula_sequent(phi)
    except FormulaError as exc:
        raise BadInput(str(exc)) from None
    sys.exit(_decide(calc, gamma, mode, depth, dot_path, json_path, tc_scope, max_positions))


@main.command("prove-seq")
@click.argument("sequent")
@mode_opt
@depth_opt
@dot_opt
@json_opt
@scope_opt
@budget_opt
def prove_seq_cmd(sequent, mode, depth, dot_path, json_path, tc_scope, max_positions):
    """Decide an annotated sequent such as "~p [f], [a]p [u], p ~> q"."""
    try:
        calc, gamma = parse_sequent(sequent)
    except FormulaError as exc:
        raise BadInput(str(exc)) from None
    sys.exit(_decide(calc, gamma, mode, depth, dot_path, json_path, tc_scope, max_positions))


@main.command("check")
@click.argument("proof_file", type=click.Path(exists=True, dir_okay=False))
def check_cmd(proof_file):
    """Exit 0 iff PROOF_FILE holds a correct cyclic proof."""
    try:
        with open(proof_file, encoding="utf-8") as fh:
            proof = Proof.from_json(json.load(fh))
    except (ValueError, KeyError, TypeError, FormulaError) as exc:
        raise BadInput(f"cannot read proof: {exc}") from None
    res = verify_proof(proof)
    if res.ok:
        click.echo(f"ok: {len(proof)} nodes")
        sys.exit(EXIT_PROVED)
    for e in res.errors:
        click.echo(e)
    sys.exit(EXIT_FALSE)


@main.command("modelcheck")
@click.argument("model_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("formula")
@click.option("--state", required=True, envvar="MU2_STATE", help="State at which to evaluate.")
@click.option("--oracle", is_flag=True, envvar="MU2_ORACLE", help="Cross-check with fixpoint iteration.")
def modelcheck_cmd(model_file, formula, state, oracle):
    """Exit 0 if FORMULA holds at --state of MODEL_FILE, else 1."""
    try:
        model = KripkeModel.load(model_file)
        phi = parse_formula(formula)
        truth = model_check(model, state, phi)
    except (ModelError, FormulaError, ValueError) as exc:
        raise BadInput(str(exc)) from None
    if oracle and (state in fixpoint_oracle(model, phi)) != truth:
        raise Internal(f"evaluation game and fixpoint iteration disagree on {render(phi)} at {state}")
    click.echo("true" if truth else "false")
    sys.exit(EXIT_PROVED if truth else EXIT_FALSE)


@main.group("corpus")
def corpus_grp() -> None:
    """Built-in test corpora."""


@corpus_grp.command("run")
@click.option("--seed", type=int, default=0, show_default=True, envvar="MU2_SEED")
@click.option("--count", type=click.IntRange(0), default=50, show_default=True, envvar="MU2_COUNT",
              help="Number of random sequents.")
@depth_opt
def corpus_run(seed, count, depth):
    """Run the golden sequents and a seeded random batch; exit 1 on any failure."""
    failures = 0
    cases = [(c.name, c.sequent, c.provable) for c in GOLDEN]
    cases += [(f"random-{seed}-{k}", s, None) for k, s in enumerate(random_sequents(seed, count))]
    for name, text, expected in cases:
        t0 = time.perf_counter()
        calc, gamma = parse_sequent(text)
        try:
            out = prove(calc, gamma)
        except SearchBudgetExceeded:
            click.echo(f"BUDGET {name}")
            failures += 1
            continue
        if isinstance(out, Proof):
            verdict, ok = "provable", verify_proof(out, gamma).ok
        else:
            cert = verified_refute(out, cap=depth)
            verdict, ok = ("refuted", True) if isinstance(cert, Certificate) else ("unverified", False)
        if expected is not None and expected != (verdict == "provable"):
            ok = False
        failures += not ok
        click.echo(f"{'PASS' if ok else 'FAIL'} {name:28s} {verdict:10s} {time.perf_counter() - t0:6.2f}s  {text}")
    click.echo(f"{len(cases) - failures}/{len(cases)} passed")
    sys.exit(EXIT_FALSE if failures else EXIT_PROVED)


if __name__ == "__main__":  # pragma: no cover
    main()
