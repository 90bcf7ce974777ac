"""Formulas of the alternation-free two-way modal mu-calculus.

Formulas are kept in negation normal form and are hash-consed: structurally
equal formulas are the same Python object, so ``==`` is identity and sets of
formulas are cheap.  Bound variables are named canonically by their binder
nesting height (the innermost binder gets index 0), which makes
alpha-equivalent closed formulas identical.

Text syntax::

    p   ~p   A | B   A & B   <a>A   [a]A   <a'>A   mu x. A   nu x. A   ~(A)

``&`` binds tighter than ``|``, binders extend as far right as possible and
``~(A)`` is the defined negation of a closed formula.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator

ATOM = "atom"
NATOM = "natom"
VAR = "var"
OR = "or"
AND = "and"
DIA = "dia"
BOX = "box"
MU = "mu"
NU = "nu"

BINDERS = (MU, NU)
MODALS = (DIA, BOX)

_DUAL = {ATOM: NATOM, NATOM: ATOM, VAR: VAR, OR: AND, AND: OR, DIA: BOX, BOX: DIA, MU: NU, NU: MU}


@dataclass(frozen=True, order=True)
class Action:
    """An action name together with a converse flag; ``converse`` is an involution."""

    name: str
    conv: bool = False

    @property
    def converse(self) -> "Action":
        return Action(self.name, not self.conv)

    def __str__(self) -> str:
        return self.name + ("'" if self.conv else "")


class FormulaError(ValueError):
    """Raised for ill-formed formulas (alternation, negated variables, ...)."""


class ParseError(FormulaError):
    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}")


class Formula:
    """A hash-consed formula node.  Build via the module functions, never directly."""

    __slots__ = ("kind", "name", "action", "left", "right", "index", "nest", "fv", "size", "__weakref__")

    def __repr__(self) -> str:
        return f"Formula({render(self)!r})"

    def __str__(self) -> str:
        return render(self)

    def __reduce__(self):
        if self.fv:
            raise TypeError("only closed formulas can be pickled")
        return (parse_formula, (render(self),))

    @property
    def is_fixpoint(self) -> bool:
        return self.kind in BINDERS

    @property
    def is_modal(self) -> bool:
        return self.kind in MODALS

    def children(self) -> tuple["Formula", ...]:
        if self.right is not None:
            return (self.left, self.right)
        if self.left is not None:
            return (self.left,)
        return ()


_table: dict[tuple, Formula] = {}


def _make(kind: str, name: str | None = None, action: Action | None = None,
          left: Formula | None = None, right: Formula | None = None, index: int = -1) -> Formula:
    key = (kind, name, action, left, right, index)
    node = _table.get(key)
    if node is not None:
        return node
    node = Formula()
    node.kind = kind
    node.name = name
    node.action = action
    node.left = left
    node.right = right
    node.index = index
    if kind in BINDERS:
        node.nest = left.nest + 1
        node.fv = left.fv - {index}
        node.size = left.size + 1
    elif left is None:
        node.nest = 0
        node.fv = frozenset((index,)) if kind == VAR else frozenset()
        node.size = 1
    elif right is None:
        node.nest = left.nest
        node.fv = left.fv
        node.size = left.size + 1
    else:
        node.nest = max(left.nest, right.nest)
        node.fv = left.fv | right.fv
        node.size = left.size + right.size + 1
    _table[key] = node
    return node


# -- builders -----------------------------------------------------------------

def atom(name: str) -> Formula:
    return _make(ATOM, name=name)


def natom(name: str) -> Formula:
    return _make(NATOM, name=name)


def lor(a: Formula, b: Formula) -> Formula:
    return _make(OR, left=a, right=b)


def land(a: Formula, b: Formula) -> Formula:
    return _make(AND, left=a, right=b)


def dia(action: Action | str, a: Formula) -> Formula:
    return _make(DIA, action=_action(action), left=a)


def box(action: Action | str, a: Formula) -> Formula:
    return _make(BOX, action=_action(action), left=a)


def _action(a: Action | str) -> Action:
    if isinstance(a, Action):
        return a
    stripped = a.rstrip("'")
    return Action(stripped, (len(a) - len(stripped)) % 2 == 1)


def _var(index: int) -> Formula:
    return _make(VAR, index=index)


def _binder(kind: str, index: int, body: Formula) -> Formula:
    return _make(kind, index=index, left=body)


# -- canonical naming, substitution ------------------------------------------

_canon_cache: dict[Formula, Formula] = {}


def _canon(f: Formula, env: dict[int, int]) -> Formula:
    if not f.fv and f in _canon_cache:
        return _canon_cache[f]
    k = f.kind
    if k == VAR:
        out = _var(env.get(f.index, f.index))
    elif k in BINDERS:
        i = f.left.nest
        inner = dict(env)
        inner[f.index] = i
        out = _binder(k, i, _canon(f.left, inner))
    elif f.left is None:
        out = f
    elif f.right is None:
        out = _make(k, action=f.action, left=_canon(f.left, env))
    else:
        out = _make(k, left=_canon(f.left, env), right=_canon(f.right, env))
    if not f.fv:
        _canon_cache[f] = out
    return out


def canonical(f: Formula) -> Formula:
    """Rename bound variables canonically (binder index = nesting height of its body)."""
    return _canon(f, {})


def _subst(f: Formula, index: int, repl: Formula) -> Formula:
    if index not in f.fv:
        return f
    k = f.kind
    if k == VAR:
        return repl
    if k in BINDERS:
        # a binder with the same index shadows, but then index is not free here
        return _binder(k, f.index, _subst(f.left, index, repl))
    if f.right is None:
        return _make(k, action=f.action, left=_subst(f.left, index, repl))
    return _make(k, left=_subst(f.left, index, repl), right=_subst(f.right, index, repl))


_unfold_cache: dict[Formula, Formula] = {}


def unfold(f: Formula) -> Formula:
    """Return ``body[f/x]`` for a fixpoint formula ``f = eta x. body``."""
    if f.kind not in BINDERS:
        raise FormulaError(f"not a fixpoint formula: {render(f)}")
    out = _unfold_cache.get(f)
    if out is None:
        out = canonical(_subst(f.left, f.index, f))
        _unfold_cache[f] = out
    return out


_neg_cache: dict[Formula, Formula] = {}


def negate(f: Formula) -> Formula:
    """De Morgan dual; bound variables are left unchanged."""
    out = _neg_cache.get(f)
    if out is not None:
        return out
    k = f.kind
    d = _DUAL[k]
    if k in (ATOM, NATOM):
        out = _make(d, name=f.name)
    elif k == VAR:
        out = f
    elif k in BINDERS:
        out = _binder(d, f.index, negate(f.left))
    elif f.right is None:
        out = _make(d, action=f.action, left=negate(f.left))
    else:
        out = _make(d, left=negate(f.left), right=negate(f.right))
    _neg_cache[f] = out
    return out


def subformulas(f: Formula) -> Iterator[Formula]:
    seen = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in seen:
            continue
        seen.add(g)
        yield g
        stack.extend(g.children())


def atoms_of(f: Formula) -> set[str]:
    return {g.name for g in subformulas(f) if g.kind in (ATOM, NATOM)}


def actions_of(f: Formula) -> set[Action]:
    return {g.action for g in subformulas(f) if g.kind in MODALS}


def is_alternation_free(f: Formula) -> bool:
    """No free occurrence of a bound variable sits under an opposite binder."""
    for g in subformulas(f):
        if g.kind in BINDERS and _var_under(g.left, g.index, _DUAL[g.kind], False):
            return False
    return True


def _var_under(f: Formula, index: int, opposite: str, under: bool) -> bool:
    if index not in f.fv:
        return False
    k = f.kind
    if k == VAR:
        return under
    if k in BINDERS:
        return _var_under(f.left, index, opposite, under or k == opposite)
    return any(_var_under(c, index, opposite, under) for c in f.children())


def closure(xi: Formula) -> set[Formula]:
    """Least set containing ``xi`` closed under subformulas of connectives/modalities and unfolding."""
    out = {xi}
    stack = [xi]
    while stack:
        g = stack.pop()
        if g.kind in BINDERS:
            nxt: tuple[Formula, ...] = (unfold(g),)
        else:
            nxt = g.children()
        for h in nxt:
            if h not in out:
                out.add(h)
                stack.append(h)
    return out


# -- rendering ----------------------------------------------------------------

_LEVEL = {ATOM: 4, NATOM: 4, VAR: 4, DIA: 3, BOX: 3, AND: 2, OR: 1, MU: 0, NU: 0}
_VAR_BASES = ("x", "y", "z", "v", "w")


def _var_base(f: Formula) -> str:
    names = atoms_of(f)
    for base in _VAR_BASES:
        if not any(re.fullmatch(base + r"\d+", n) for n in names):
            return base
    base = "x_"
    while any(n.startswith(base) for n in names):
        base += "_"
    return base


def render(f: Formula) -> str:
    """Render in the text syntax; ``parse_formula(render(f)) is f`` for closed formulas."""
    return _render(f, _var_base(f))


def _render(f: Formula, base: str) -> str:
    k = f.kind
    if k == ATOM:
        return f.name
    if k == NATOM:
        return "~" + f.name
    if k == VAR:
        return f"{base}{f.index}"
    if k in BINDERS:
        return f"{k} {base}{f.index}. {_render(f.left, base)}"
    if k == DIA:
        return f"<{f.action}>{_wrap(f.left, 3, base)}"
    if k == BOX:
        return f"[{f.action}]{_wrap(f.left, 3, base)}"
    op = " | " if k == OR else " & "
    lvl = _LEVEL[k]
    return _wrap(f.left, lvl, base) + op + _wrap(f.right, lvl + 1, base)


def _wrap(f: Formula, need: int, base: str) -> str:
    s = _render(f, base)
    return s if _LEVEL[f.kind] >= need else f"({s})"


_UNI = {OR: " ∨ ", AND: " ∧ "}


def pretty(f: Formula) -> str:
    """Unicode rendering for display only (not parseable)."""
    base = _var_base(f)

    def go(g: Formula, need: int) -> str:
        k = g.kind
        if k == ATOM:
            s = g.name
        elif k == NATOM:
            s = g.name + "̄"
        elif k == VAR:
            s = f"{base}{g.index}"
        elif k in BINDERS:
            s = ("μ" if k == MU else "ν") + f"{base}{g.index}." + go(g.left, 0)
        elif k in MODALS:
            a = g.action.name + ("̆" if g.action.conv else "")
            s = (f"⟨{a}⟩" if k == DIA else f"[{a}]") + go(g.left, 3)
        else:
            s = go(g.left, _LEVEL[k]) + _UNI[k] + go(g.right, _LEVEL[k] + 1)
        return s if _LEVEL[k] >= need else f"({s})"

    return go(f, 0)


# -- parsing ------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(!~>|~>|[~|&<>\[\]().,'])|([A-Za-z_][A-Za-z0-9_]*))")
KEYWORDS = ("mu", "nu")


def tokenize(text: str) -> list[tuple[str, int]]:
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        sym = m.group(1) or m.group(2)
        toks.append((sym, m.start(1) if m.group(1) else m.start(2)))
        pos = m.end()
    toks.append(("", n))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.scope: list[tuple[str, int, str]] = []  # (name, raw id, binder kind)
        self.fresh = 0

    @property
    def tok(self) -> str:
        return self.toks[self.i][0]

    @property
    def pos(self) -> int:
        return self.toks[self.i][1]

    def error(self, msg: str, pos: int | None = None):
        raise ParseError(msg, self.pos if pos is None else pos, self.text)

    def eat(self, sym: str):
        if self.tok != sym:
            self.error(f"expected {sym!r}, found {self.tok or 'end of input'!r}")
        self.i += 1

    def ident(self) -> str:
        t = self.tok
        if not t or not (t[0].isalpha() or t[0] == "_") or t in KEYWORDS:
            self.error(f"expected identifier, found {t or 'end of input'!r}")
        self.i += 1
        return t

    def lookup(self, name: str):
        for nm, ident, kind in reversed(self.scope):
            if nm == name:
                return ident
        return None

    def formula(self) -> Formula:
        if self.tok in KEYWORDS:
            return self.binder()
        left = self.conj()
        while self.tok == "|":
            self.i += 1
            left = lor(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.unary()
        while self.tok == "&":
            self.i += 1
            left = land(left, self.unary())
        return left

    def binder(self) -> Formula:
        kind = self.tok
        self.i += 1
        start = self.pos
        name = self.ident()
        self.eat(".")
        ident = self.fresh
        self.fresh += 1
        self.scope.append((name, ident, kind))
        body = self.formula()
        self.scope.pop()
        # raw ids are negative so they never collide with canonical indices
        return _binder(kind, -1 - ident, body)

    def action(self) -> Action:
        name = self.ident()
        primes = 0
        while self.tok == "'":
            primes += 1
            self.i += 1
        return Action(name, primes % 2 == 1)

    def unary(self) -> Formula:
        t = self.tok
        if t in KEYWORDS:
            return self.binder()
        if t == "~":
            start = self.pos
            self.i += 1
            if self.tok == "(":
                self.i += 1
                inner = self.formula()
                self.eat(")")
                if inner.fv:
                    self.error("negation of a formula with free bound variables", start)
                return negate(inner)
            name = self.ident()
            if self.lookup(name) is not None:
                self.error(f"negated variable ~{name} under its binder", start)
            return natom(name)
        if t == "<":
            self.i += 1
            a = self.action()
            self.eat(">")
            return dia(a, self.unary())
        if t == "[":
            self.i += 1
            a = self.action()
            self.eat("]")
            return box(a, self.unary())
        if t == "(":
            self.i += 1
            inner = self.formula()
            self.eat(")")
            return inner
        name = self.ident()
        ident = self.lookup(name)
        if ident is None:
            return atom(name)
        return _var(-1 - ident)


def _finish(f: Formula, text: str, pos: int) -> Formula:
    f = canonical(f)
    if not is_alternation_free(f):
        raise ParseError("formula is not alternation-free", pos, text)
    return f


def parse_formula(text: str) -> Formula:
    """Parse a closed, alternation-free formula; raises :class:`ParseError`."""
    p = _Parser(text)
    f = p.formula()
    if p.tok:
        p.error(f"unexpected {p.tok!r}")
    return _finish(f, text, 0)


# -- contexts -----------------------------------------------------------------

def _sort_key(f: Formula):
    return (f.size, render(f))


class Context:
    """A finite negation-closed set of formulas with integer indices.

    Index order is canonical: formulas sorted by size and text, each one
    immediately followed by its negation, so ``neg[i] == i ^ 1``.  Everything
    downstream that iterates over the context is deterministic.
    """

    def __init__(self, formulas: Iterable[Formula]):
        fs = sorted(set(formulas), key=_sort_key)
        members = set(fs)
        if all(negate(f) in members for f in fs):
            # pair every formula with its negation so that neg(i) == i ^ 1
            paired: list[Formula] = []
            placed: set[Formula] = set()
            for f in fs:
                if f not in placed:
                    g = negate(f)
                    paired.extend((f, g))
                    placed.update((f, g))
            fs = paired
        self.formulas: tuple[Formula, ...] = tuple(fs)
        self.index: dict[Formula, int] = {f: i for i, f in enumerate(fs)}
        n = self.n = len(fs)
        self.neg = [self.index.get(negate(f), -1) for f in fs]
        self.kind = [f.kind for f in fs]
        self.left = [-1] * n
        self.right = [-1] * n
        self.unf = [-1] * n
        self.dia_of: dict[tuple[Action, int], int] = {}
        self.box_of: dict[tuple[Action, int], int] = {}
        for i, f in enumerate(fs):
            if f.kind in (OR, AND):
                self.left[i] = self.index[f.left]
                self.right[i] = self.index[f.right]
            elif f.kind in MODALS:
                self.left[i] = self.index[f.left]
                table = self.dia_of if f.kind == DIA else self.box_of
                table[(f.action, self.left[i])] = i
            elif f.kind in BINDERS:
                self.unf[i] = self.index[unfold(f)]
        if any(j < 0 for j in self.neg):
            raise FormulaError("context is not negation-closed")

    def __len__(self) -> int:
        return self.n

    def __iter__(self):
        return iter(self.formulas)

    def __contains__(self, f) -> bool:
        return f in self.index

    def __eq__(self, other) -> bool:
        return isinstance(other, Context) and self.formulas == other.formulas

    def __hash__(self) -> int:
        return hash(self.formulas)

    def __getitem__(self, i: int) -> Formula:
        return self.formulas[i]

    def idx(self, f: Formula | str) -> int:
        if isinstance(f, str):
            f = parse_formula(f)
        try:
            return self.index[f]
        except KeyError:
            raise FormulaError(f"formula {render(f)} is not in the context") from None

    def atoms(self) -> list[str]:
        return sorted({f.name for f in self.formulas if f.kind in (ATOM, NATOM)})

    def actions(self) -> list[Action]:
        return sorted({f.action for f in self.formulas if f.kind in MODALS})


def negation_closed_context(seed: Iterable[Formula | str]) -> Context:
    """Least negation-closed set containing the seed formulas."""
    out: set[Formula] = set()
    stack = [parse_formula(s) if isinstance(s, str) else s for s in seed]
    while stack:
        f = stack.pop()
        if f in out:
            continue
        if f.fv:
            raise FormulaError(f"open formula {render(f)} cannot enter a context")
        for g in closure(f):
            if g not in out:
                out.add(g)
                stack.append(negate(g))
    return Context(out)
