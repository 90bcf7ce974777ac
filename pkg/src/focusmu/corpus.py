"""Golden sequents and seeded random generators for formulas, models and sequents."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .semantics import KripkeModel
from .syntax import FormulaError, Formula, closure, negate, parse_formula, render


@dataclass(frozen=True)
class GoldenCase:
    name: str
    sequent: str
    provable: bool


PSI1 = "nu y.([a]y & mu x.(<a'>x | p))"
PHI2 = "nu x.<a><a'>x"

GOLDEN: tuple[GoldenCase, ...] = (
    GoldenCase("p-implies-psi", f"~p [f], {PSI1} [f]", True),
    GoldenCase("box-not-p-or-phi", f"[a]~p [f], {PHI2} [f]", True),
    GoldenCase("excluded-middle", "p | ~p [f]", True),
    GoldenCase("nu-top", "nu x. x [f]", True),
    GoldenCase("back-and-forth", "~p | [a]<a'>p [f]", True),
    GoldenCase("converse-box", "[a]<a'>~p | p [f]", True),
    GoldenCase("box-distributes", "<a>(~p | ~q) | [a]p [f]", True),
    GoldenCase("invariant-step", "mu x.(~p | <a>x) | [a]p [f]", True),
    GoldenCase("mu-or-dual", "mu x.(p | <a>x) | nu x.(~p & [a]x) [f]", True),
    GoldenCase("nu-unfold", "~(nu x.(p & [a]x)) | p & [a](nu x.(p & [a]x)) [f]", True),
    GoldenCase("atom", "p [f]", False),
    GoldenCase("diamond-top", "<a>(nu x. x) [f]", False),
    GoldenCase("diamond-implies-phi", f"<a>p | ~({PHI2}) [f]", False),
    GoldenCase("box-atom", "[a]p [f]", False),
    GoldenCase("diamond-or-box", "<a>p | [a]q [f]", False),
    GoldenCase("infinite-path", "nu x. <a>x [f]", False),
    GoldenCase("well-founded", "mu x. [a]x [f]", False),
    GoldenCase("converse-loop-wrong-way", "<a>[a']p [f]", False),
    GoldenCase("p-or-converse", "p | <a>[a']~p [f]", False),
    GoldenCase("mixed-mu", "mu x.(p | <a'>x) | [a]~p [f]", False),
)


# -- formulas -------------------------------------------------------------------

def random_formula_text(rng: random.Random, depth: int, atoms=("p", "q"), actions=("a", "a'"),
                        _vars: tuple = (), _fresh: list | None = None) -> str:
    fresh = _fresh if _fresh is not None else [0]
    if depth <= 0:
        pool = [a for a in atoms] + [f"~{a}" for a in atoms] + list(_vars)
        return rng.choice(pool)
    r = rng.random()
    sub = lambda: random_formula_text(rng, depth - 1, atoms, actions, _vars, fresh)  # noqa: E731
    if r < 0.15:
        return rng.choice(list(atoms) + [f"~{a}" for a in atoms] + list(_vars) * 2)
    if r < 0.35:
        op = rng.choice(("|", "&"))
        return f"({sub()} {op} {sub()})"
    if r < 0.7:
        a = rng.choice(actions)
        return f"<{a}>{sub()}" if rng.random() < 0.5 else f"[{a}]{sub()}"
    name = f"x{fresh[0]}"
    fresh[0] += 1
    binder = rng.choice(("mu", "nu"))
    body = random_formula_text(rng, depth - 1, atoms, actions, _vars + (name,), fresh)
    return f"{binder} {name}.({body})"


def random_formula(rng: random.Random, depth: int = 3, atoms=("p", "q"), actions=("a", "a'"),
                   max_closure: int | None = None, tries: int = 1000) -> Formula:
    """Random closed alternation-free formula (rejection sampling)."""
    for _ in range(tries):
        text = random_formula_text(rng, depth, atoms, actions)
        try:
            f = parse_formula(text)
        except FormulaError:
            continue
        if max_closure is not None and len(closure(f)) > max_closure:
            continue
        return f
    raise RuntimeError("no admissible formula found")


# -- models ---------------------------------------------------------------------

def random_model(rng: random.Random, n: int, atoms=("p", "q"), actions=("a",), density: float = 0.35) -> KripkeModel:
    states = [f"s{i}" for i in range(n)]
    edges = []
    for a in actions:
        for s in states:
            for t in states:
                if rng.random() < density:
                    edges.append((a, s, t))
    val = {p: [s for s in states if rng.random() < 0.5] for p in atoms}
    return KripkeModel(states, edges, val)


# -- sequents ---------------------------------------------------------------------

def random_sequent_text(rng: random.Random, depth: int = 2, atoms=("p",), actions=("a", "a'")) -> str:
    """Trace-atom-free sequent text with one to three members.

    Half of the samples pair a formula with its negation (so they tend to be
    provable); the rest are free combinations.
    """
    f = random_formula(rng, depth, atoms, actions)
    members = [f]
    if rng.random() < 0.5:
        members.append(negate(f))
        if rng.random() < 0.3:
            members.append(random_formula(rng, depth - 1 if depth > 1 else 1, atoms, actions))
    else:
        for _ in range(rng.randint(0, 2)):
            members.append(random_formula(rng, depth, atoms, actions))
    parts = []
    for i, g in enumerate(dict.fromkeys(members)):
        ann = "f" if i == 0 or rng.random() < 0.5 else "u"
        parts.append(f"{_wrap(render(g))} [{ann}]")
    return ", ".join(parts)


def _wrap(text: str) -> str:
    return f"({text})" if " " in text else text


def random_sequents(seed: int, count: int, **kw) -> list[str]:
    rng = random.Random(seed)
    return [random_sequent_text(rng, **kw) for _ in range(count)]
