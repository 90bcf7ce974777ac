"""Sequents of the focus calculus with trace atoms, and its rule instances.

A sequent over a context of ``n`` formulas is an ``int`` used as a bit set.
Bit positions (members) are

* ``2*i + b``               annotated formula ``i`` (``b`` is 0 for u, 1 for f)
* ``2n + i*n + j``          trace atom ``i ~> j``
* ``2n + n*n + i*n + j``    negated trace atom ``i !~> j``

Contexts pair every formula with its negation (``neg(i) == i ^ 1``), so the
four annotation bits of a formula and its negation form one aligned nibble.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .syntax import (AND, BOX, DIA, MU, NU, OR, Action, Context, FormulaError, ParseError, _Parser, _finish,
                     negation_closed_context, render)

U, F = 0, 1
ANN, TRACE, NTRACE = "ann", "trace", "ntrace"

AXIOMS = ("Ax1", "Ax2", "Ax3")
RULES = AXIOMS + ("R_or", "R_and", "R_mu", "R_nu", "trans", "cut", "tc", "F", "R_box")
LOGICAL = ("R_or", "R_and", "R_mu", "R_nu")


def bits(x: int) -> Iterator[int]:
    """Positions of the set bits of ``x``, ascending."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def lowest(x: int) -> int:
    return (x & -x).bit_length() - 1


@dataclass(frozen=True)
class RuleInstance:
    """An application of a rule: conclusion, rule name, premisses and what the rule acts on.

    ``principal`` is a member for the logical rules and axioms, a formula index
    for cut, an index pair for tc and a triple for trans.
    """

    conclusion: int
    rule: str
    premisses: tuple
    principal: object = None
    action: Action | None = None

    @property
    def is_axiom(self) -> bool:
        return self.rule in AXIOMS


class Calculus:
    def __init__(self, ctx: Context):
        self.ctx = ctx
        n = self.n = len(ctx)
        if any(ctx.neg[i] != i ^ 1 for i in range(n)):
            raise FormulaError("context must pair each formula with its negation")
        self.T0 = T0 = 2 * n
        self.N0 = N0 = 2 * n + n * n
        self.END = 2 * n + 2 * n * n
        self.ANN = (1 << T0) - 1
        self.UBITS = sum(1 << (2 * i) for i in range(n))
        self.FBITS = self.UBITS << 1
        self.M4 = sum(1 << (4 * k) for k in range(n // 2))
        self.NN = (1 << (n * n)) - 1
        self._pair_cache: dict[int, int] = {}
        self.ROW = (1 << n) - 1
        self.DIAG = sum(1 << (i * n + i) for i in range(n))
        self.kind_mask = {k: 0 for k in LOGICAL}
        self.add: dict[int, tuple[int, ...]] = {}
        rule_of = {OR: "R_or", AND: "R_and", MU: "R_mu", NU: "R_nu"}
        for i in range(n):
            k = ctx.kind[i]
            if k not in rule_of:
                continue
            for b in (U, F):
                m = 2 * i + b
                self.kind_mask[rule_of[k]] |= 1 << m
                if k == OR:
                    l, r = ctx.left[i], ctx.right[i]
                    self.add[m] = (self.bit_ntrace(i, l) | self.bit_ntrace(i, r) | 1 << (2 * l + b) | 1 << (2 * r + b),)
                elif k == AND:
                    l, r = ctx.left[i], ctx.right[i]
                    self.add[m] = (self.bit_ntrace(i, l) | 1 << (2 * l + b), self.bit_ntrace(i, r) | 1 << (2 * r + b))
                elif k == MU:
                    self.add[m] = (1 << (2 * ctx.unf[i]),)
                else:
                    u = ctx.unf[i]
                    self.add[m] = (self.bit_ntrace(i, u) | 1 << (T0 + u * n + i) | 1 << (2 * u + b),)
        # per action: body of a-diamonds, converse box over a formula, converse diamond over a formula
        self._tables: dict[Action, tuple[list[int], list[int], list[int]]] = {}
        for act in {f.action for f in ctx.formulas if f.is_modal}:
            ca = act.converse
            dia_body = [ctx.left[i] if ctx.kind[i] == DIA and ctx[i].action == act else -1 for i in range(n)]
            conv_box = [ctx.box_of.get((ca, i), -1) for i in range(n)]
            conv_dia = [ctx.dia_of.get((ca, i), -1) for i in range(n)]
            self._tables[act] = (dia_body, conv_box, conv_dia)
        self._jump_cache: dict = {}

    # -- member encoding ----------------------------------------------------

    def ann(self, i: int, b: int) -> int:
        return 2 * i + b

    def trace(self, i: int, j: int) -> int:
        return self.T0 + i * self.n + j

    def ntrace(self, i: int, j: int) -> int:
        return self.N0 + i * self.n + j

    def bit_ntrace(self, i: int, j: int) -> int:
        return 1 << (self.N0 + i * self.n + j)

    def decode(self, m: int) -> tuple:
        if m < self.T0:
            return (ANN, m >> 1, m & 1)
        if m < self.N0:
            i, j = divmod(m - self.T0, self.n)
            return (TRACE, i, j)
        i, j = divmod(m - self.N0, self.n)
        return (NTRACE, i, j)

    def members(self, gamma: int) -> list[int]:
        return list(bits(gamma))

    def from_members(self, members: Iterable[int]) -> int:
        out = 0
        for m in members:
            if not 0 <= m < self.END:
                raise FormulaError(f"member {m} is outside the context")
            out |= 1 << m
        return out

    def has(self, gamma: int, m: int) -> bool:
        return (gamma >> m) & 1 == 1

    def member_holds(self, ev, f, m: int, s: int, cache: dict | None = None) -> bool:
        """Truth of member ``m`` at state ``s`` relative to the universal strategy ``f``.

        ``ev`` is an evaluation game over this context and ``f`` maps its
        universal positions to successors.
        """
        kind, i, j = self.decode(m)
        if kind == ANN:
            return ev.holds_under(f, i, s, cache)
        held = ev.trace_holds(f, i, j, s)
        return held if kind == TRACE else not held

    def holds(self, ev, f, gamma: int, s: int, cache: dict | None = None) -> bool:
        """Some member of ``gamma`` holds at ``s`` under ``f``."""
        return any(self.member_holds(ev, f, m, s, cache) for m in bits(gamma))

    def member_text(self, m: int) -> str:
        kind, i, j = self.decode(m)
        f = render(self.ctx[i])
        if kind == ANN:
            return f"{f} [{'f' if j else 'u'}]"
        op = "~>" if kind == TRACE else "!~>"
        return f"{_paren(f)} {op} {_paren(render(self.ctx[j]))}"

    def render(self, gamma: int) -> str:
        return ", ".join(self.member_text(m) for m in bits(gamma))

    def parse(self, text: str) -> int:
        """Parse a sequent over this context; formulas outside the context are rejected."""
        out = 0
        for kind, f, g, b, pos in _parse_members(text):
            try:
                i = self.ctx.idx(f)
                if kind == ANN:
                    out |= 1 << self.ann(i, b)
                else:
                    j = self.ctx.idx(g)
                    out |= 1 << (self.trace(i, j) if kind == TRACE else self.ntrace(i, j))
            except FormulaError as exc:
                raise ParseError(str(exc), pos, text) from None
        return out

    def sequent(self, members: Iterable[tuple]) -> int:
        """Build from tuples ``(formula, 'u'|'f')``, ``('~>', f, g)`` or ``('!~>', f, g)``."""
        out = 0
        for t in members:
            if t[0] in ("~>", "!~>"):
                i, j = self.ctx.idx(t[1]), self.ctx.idx(t[2])
                out |= 1 << (self.trace(i, j) if t[0] == "~>" else self.ntrace(i, j))
            else:
                out |= 1 << self.ann(self.ctx.idx(t[0]), F if t[1] == "f" else U)
        return out

    # -- projections --------------------------------------------------------

    def formulas(self, gamma: int) -> set[int]:
        """Gamma^-: formula indices of the annotated members."""
        return {m >> 1 for m in bits(gamma & self.ANN)}

    def formula_mask(self, gamma: int) -> int:
        """Gamma^- as a bit set over formula indices."""
        x = gamma & self.ANN
        y = (x | (x >> 1)) & self.UBITS
        out = 0
        for m in bits(y):
            out |= 1 << (m >> 1)
        return out

    def unfocus(self, gamma: int) -> int:
        return (gamma & ~self.ANN) | ((gamma & self.FBITS) >> 1) | (gamma & self.UBITS)

    def focus(self, gamma: int) -> int:
        return (gamma & ~self.ANN) | ((gamma & self.UBITS) << 1) | (gamma & self.FBITS)

    def has_focus(self, gamma: int) -> bool:
        return gamma & self.FBITS != 0

    def traces(self, gamma: int) -> int:
        """Trace atoms as a bit set over ``i*n + j``."""
        return (gamma >> self.T0) & self.NN

    def ntraces(self, gamma: int) -> int:
        return gamma >> self.N0

    def s_value(self, xi: int, gamma: int) -> int:
        if (gamma >> (2 * xi + 1)) & 1:
            return F
        ng = gamma >> self.N0
        n = self.n
        for m in bits(gamma & self.FBITS):
            if (ng >> ((m >> 1) * n + xi)) & 1:
                return F
        return U

    # -- the modal jump -----------------------------------------------------

    def jump(self, gamma: int, principal: int) -> int:
        """Premiss of the modal rule with principal ``[a]phi^b`` and conclusion ``gamma``.

        The focus-transfer values are computed over the whole conclusion; the
        clauses range over the side members (conclusion minus principal).
        """
        key = (gamma, principal)
        hit = self._jump_cache.get(key)
        if hit is not None:
            return hit
        ctx, n, T0, N0 = self.ctx, self.n, self.T0, self.N0
        box_i = principal >> 1
        if not 0 <= principal < T0 or ctx.kind[box_i] != BOX:
            raise FormulaError("principal of the modal rule must be an annotated box formula")
        dia_body, conv_box, conv_dia = self._tables[ctx[box_i].action]
        phi = ctx.left[box_i]
        side = gamma & ~(1 << principal)
        out = 1 << (2 * phi + self.s_value(box_i, gamma))
        for m in bits(side & self.ANN):
            i = m >> 1
            if dia_body[i] >= 0:
                out |= 1 << (2 * dia_body[i] + self.s_value(i, gamma))
            if conv_box[i] >= 0:
                out |= 1 << (2 * conv_box[i])
        for t in bits((side >> T0) & self.NN):
            i, chi = divmod(t, n)
            k = conv_dia[chi]
            if k < 0:
                continue
            if i == box_i:
                out |= 1 << (T0 + phi * n + k)
            elif dia_body[i] >= 0:
                out |= 1 << (T0 + dia_body[i] * n + k)
        for t in bits(side >> N0):
            chi, j = divmod(t, n)
            k = conv_dia[chi]
            if k < 0:
                continue
            if j == box_i:
                out |= 1 << (N0 + k * n + phi)
            elif dia_body[j] >= 0:
                out |= 1 << (N0 + k * n + dia_body[j])
        if len(self._jump_cache) > 500_000:
            self._jump_cache.clear()
        self._jump_cache[key] = out
        return out

    def boxes(self, gamma: int) -> list[int]:
        """Annotated box members, ascending."""
        kind = self.ctx.kind
        return [m for m in bits(gamma & self.ANN) if kind[m >> 1] == BOX]

    # -- axioms and instances ----------------------------------------------

    def axiom(self, gamma: int) -> RuleInstance | None:
        """The first axiom instance with conclusion ``gamma`` (Ax1 before Ax2 before Ax3)."""
        x = gamma & self.ANN
        both = ((x | (x >> 1)) & ((x >> 2) | (x >> 3))) & self.M4
        if both:
            i = 2 * (lowest(both) >> 2)
            m = 2 * i if (gamma >> (2 * i)) & 1 else 2 * i + 1
            return RuleInstance(gamma, "Ax1", (), m)
        tr = (gamma >> self.T0) & self.NN
        if tr:
            clash = tr & (gamma >> self.N0)
            if clash:
                return RuleInstance(gamma, "Ax2", (), self.T0 + lowest(clash))
            refl = tr & self.DIAG
            if refl:
                return RuleInstance(gamma, "Ax3", (), self.T0 + lowest(refl))
        return None

    def is_axiom(self, gamma: int) -> str | None:
        inst = self.axiom(gamma)
        return inst.rule if inst else None

    def _axiom_of(self, gamma: int, rule: str, principal) -> bool:
        T0, N0, n = self.T0, self.N0, self.n
        if not isinstance(principal, int) or not 0 <= principal < self.END or not (gamma >> principal) & 1:
            return False
        if rule == "Ax1":
            if principal >= T0:
                return False
            j = principal >> 1 ^ 1
            return (gamma >> (2 * j)) & 3 != 0
        if rule == "Ax2":
            return T0 <= principal < N0 and (gamma >> (principal + n * n)) & 1 == 1
        if not T0 <= principal < N0:
            return False
        i, j = divmod(principal - T0, n)
        return i == j

    def _logical(self, m: int, side: int) -> tuple[str, tuple] | None:
        adds = self.add.get(m)
        if adds is None:
            return None
        kind = self.ctx.kind[m >> 1]
        rule = {OR: "R_or", AND: "R_and", MU: "R_mu", NU: "R_nu"}[kind]
        return rule, tuple(side | a for a in adds)

    def derive(self, gamma: int, rule: str, principal, action: Action | None = None) -> list[tuple]:
        """All premiss tuples a rule can produce from ``gamma`` with this principal."""
        n, T0 = self.n, self.T0
        if rule in AXIOMS:
            return [()] if self._axiom_of(gamma, rule, principal) else []
        if rule in LOGICAL:
            m = principal
            if not isinstance(m, int) or not 0 <= m < T0 or not (gamma >> m) & 1:
                return []
            out = []
            for side in (gamma & ~(1 << m), gamma):
                got = self._logical(m, side)
                if got and got[0] == rule and got[1] not in out:
                    out.append(got[1])
            return out
        if rule == "R_box":
            m = principal
            if not isinstance(m, int) or not 0 <= m < T0 or not (gamma >> m) & 1 or self.ctx.kind[m >> 1] != BOX:
                return []
            if action is not None and action != self.ctx[m >> 1].action:
                return []
            return [(self.jump(gamma, m),)]
        if rule == "cut":
            i = principal
            if not isinstance(i, int) or not 0 <= i < n:
                return []
            return [(gamma | 1 << (2 * i), gamma | 1 << (2 * (i ^ 1)))]
        if rule == "tc":
            try:
                i, j = principal
            except (TypeError, ValueError):
                return []
            if not (0 <= i < n and 0 <= j < n):
                return []
            return [(gamma | 1 << self.trace(i, j), gamma | 1 << self.ntrace(i, j))]
        if rule == "trans":
            try:
                i, j, k = principal
            except (TypeError, ValueError):
                return []
            if not (0 <= i < n and 0 <= j < n and 0 <= k < n):
                return []
            if (gamma >> self.ntrace(i, j)) & 1 and (gamma >> self.ntrace(j, k)) & 1:
                return [(gamma | 1 << self.ntrace(i, k),)]
            return []
        if rule == "F":
            return [] if self.has_focus(gamma) else [(self.focus(gamma),)]
        return []

    def applicable_instances(self, gamma: int) -> list[RuleInstance]:
        """Every instance with conclusion ``gamma`` (full mode), in canonical order."""
        n, T0 = self.n, self.T0
        out: list[RuleInstance] = []
        members = list(bits(gamma))
        for rule in AXIOMS:
            for m in members:
                if self._axiom_of(gamma, rule, m):
                    out.append(RuleInstance(gamma, rule, (), m))
        for rule in LOGICAL:
            for m in bits(gamma & self.kind_mask[rule]):
                for prem in self.derive(gamma, rule, m):
                    out.append(RuleInstance(gamma, rule, prem, m))
        ng = gamma >> self.N0
        for t in bits(ng):
            i, j = divmod(t, n)
            for k in bits((ng >> (j * n)) & self.ROW):
                out.append(RuleInstance(gamma, "trans", (gamma | 1 << self.ntrace(i, k),), (i, j, k)))
        for i in range(n):
            out.append(RuleInstance(gamma, "cut", self.derive(gamma, "cut", i)[0], i))
        for i in range(n):
            for j in range(n):
                out.append(RuleInstance(gamma, "tc", self.derive(gamma, "tc", (i, j))[0], (i, j)))
        if not self.has_focus(gamma):
            out.append(RuleInstance(gamma, "F", (self.focus(gamma),)))
        for m in self.boxes(gamma):
            out.append(RuleInstance(gamma, "R_box", (self.jump(gamma, m),), m, self.ctx[m >> 1].action))
        return out

    def validate_instance(self, inst: RuleInstance) -> bool:
        """Re-derive the premisses from conclusion, rule and principal and compare."""
        if inst.rule not in RULES:
            return False
        gamma = inst.conclusion
        if not isinstance(gamma, int) or gamma < 0 or gamma >> self.END:
            return False
        if inst.rule == "R_box" and isinstance(inst.principal, int) and 0 <= inst.principal < self.T0:
            f = self.ctx[inst.principal >> 1]
            if inst.action is not None and f.is_modal and f.action != inst.action:
                return False
        return tuple(inst.premisses) in self.derive(gamma, inst.rule, inst.principal, inst.action)

    # -- the phased strategy of the completeness argument ------------------

    def productive_cut(self, gamma: int) -> int | None:
        """Next productive cut formula; cuts with a premiss that is already an axiom come first."""
        x = gamma & self.ANN
        open_ = self.M4 & ~((x | (x >> 2)) & self.M4)
        if not open_:
            return None
        forced = open_ & ((x >> 1) | (x >> 3))
        return 2 * (lowest(forced or open_) >> 2)

    def pair_masks(self, pairs: Sequence[tuple[int, int]], members_only: bool = False) -> tuple:
        """Split trace-cut pairs into (reflexive, other) bit sets over ``i*n + j``.

        With ``members_only`` a non-reflexive pair is only cut on while both of
        its formulas are members of the sequent.
        """
        refl = other = 0
        for i, j in pairs:
            if i == j:
                refl |= 1 << (i * self.n + j)
            else:
                other |= 1 << (i * self.n + j)
        return refl, other, members_only

    def member_pairs(self, gamma: int) -> int:
        """Bit set over ``i*n + j`` of pairs whose formulas both occur in ``gamma``."""
        key = gamma & self.ANN
        out = self._pair_cache.get(key)
        if out is None:
            present = 0
            for i in self.formulas(key):
                present |= 1 << i
            out = 0
            for i in bits(present):
                out |= present << (i * self.n)
            self._pair_cache[key] = out
        return out

    def productive_tc(self, gamma: int, masks: tuple) -> tuple[int, int] | None:
        decided = ((gamma >> self.T0) | (gamma >> self.N0)) & self.NN
        refl, other, members_only = masks
        open_ = refl & ~decided
        if not open_:
            open_ = other & ~decided
            if open_ and members_only:
                open_ &= self.member_pairs(gamma)
        if open_:
            return divmod(lowest(open_), self.n)
        return None

    def cumulative_move(self, gamma: int) -> tuple[str, object, tuple] | None:
        """First cumulative and productive instance of R_or, R_and, R_mu, R_nu or trans,
        as ``(rule, principal, premisses)``."""
        add = self.add
        for rule in LOGICAL:
            c = gamma & self.kind_mask[rule]
            while c:
                low = c & -c
                c ^= low
                m = low.bit_length() - 1
                adds = add[m]
                if len(adds) == 1:
                    if adds[0] & ~gamma:
                        return rule, m, (gamma | adds[0],)
                elif adds[0] & ~gamma and adds[1] & ~gamma:
                    return rule, m, (gamma | adds[0], gamma | adds[1])
        n, ROW = self.n, self.ROW
        ng = gamma >> self.N0
        if not ng:
            return None
        for i in range(n):
            row = (ng >> (i * n)) & ROW
            r = row
            while r:
                low = r & -r
                r ^= low
                j = low.bit_length() - 1
                missing = (ng >> (j * n)) & ROW & ~row
                if missing:
                    k = lowest(missing)
                    return "trans", (i, j, k), (gamma | 1 << (self.N0 + i * n + k),)
        return None

    def cumulative_step(self, gamma: int) -> RuleInstance | None:
        mv = self.cumulative_move(gamma)
        return RuleInstance(gamma, mv[0], mv[2], mv[1]) if mv else None

    def is_axiomatic(self, gamma: int) -> bool:
        x = gamma & self.ANN
        if ((x | (x >> 1)) & ((x >> 2) | (x >> 3))) & self.M4:
            return True
        tr = (gamma >> self.T0) & self.NN
        return bool(tr and (tr & (gamma >> self.N0) or tr & self.DIAG))

    def phase_move(self, gamma: int, stage: int, masks: tuple) -> tuple | None:
        """Move of the phased strategy at ``(gamma, stage)`` as ``(rule, principal, premisses, stages)``;
        ``None`` when only the modal step remains.  Axioms are taken eagerly.

        Stages: 1 formula cuts, 2 focus, 3 logical rules and transitivity, with
        trace cuts only once those are exhausted (they add trace atoms alone, so
        closing branches by axioms first keeps the stretch small).
        """
        if self.is_axiomatic(gamma):
            ax = self.axiom(gamma)
            return ax.rule, ax.principal, (), ()
        if stage <= 1:
            i = self.productive_cut(gamma)
            if i is not None:
                return "cut", i, (gamma | 1 << (2 * i), gamma | 1 << (2 * (i ^ 1))), (1, 1)
            stage = 2
        if stage == 2 and not gamma & self.FBITS:
            return "F", None, (self.focus(gamma),), (3,)
        mv = self.cumulative_move(gamma)
        if mv is not None:
            return mv[0], mv[1], mv[2], (3,) * len(mv[2])
        pair = self.productive_tc(gamma, masks)
        if pair is not None:
            t = pair[0] * self.n + pair[1]
            return "tc", pair, (gamma | 1 << (self.T0 + t), gamma | 1 << (self.N0 + t)), (3, 3)
        return None

    def relevant_pairs(self) -> list[tuple[int, int]]:
        """Default trace-cut pairs: reflexive pairs first, then (modal formula, chi)
        where chi sits under a diamond of the converse action."""
        ctx = self.ctx
        pairs = set()
        for i, f in enumerate(ctx.formulas):
            if f.is_modal:
                ca = f.action.converse
                for (act, chi) in ctx.dia_of:
                    if act == ca and chi != i:
                        pairs.add((i, chi))
        return [(i, i) for i in range(self.n)] + sorted(pairs)

    def all_pairs(self) -> list[tuple[int, int]]:
        """Every pair, reflexive ones first (their positive premiss is an axiom)."""
        return [(i, i) for i in range(self.n)] + [(i, j) for i in range(self.n) for j in range(self.n) if i != j]


def _paren(s: str) -> str:
    return f"({s})" if " " in s else s


class _MemberParser(_Parser):
    def member(self):
        start = self.pos
        f = self.formula()
        if self.tok == "[":
            self.i += 1
            ann = self.ident()
            if ann not in ("u", "f"):
                self.error("annotation must be u or f")
            self.eat("]")
            return (ANN, f, None, F if ann == "f" else U, start)
        if self.tok in ("~>", "!~>"):
            kind = TRACE if self.tok == "~>" else NTRACE
            self.i += 1
            g = self.formula()
            return (kind, f, g, None, start)
        return (ANN, f, None, F, start)


def _parse_members(text: str) -> Iterator[tuple]:
    p = _MemberParser(text)
    if not p.tok:
        return
    while True:
        kind, f, g, b, pos = p.member()
        f = _finish(f, text, pos)
        if g is not None:
            g = _finish(g, text, pos)
        yield kind, f, g, b, pos
        if p.tok == ",":
            p.i += 1
            continue
        if p.tok:
            p.error(f"unexpected {p.tok!r}")
        break


def sequent_formulas(text: str) -> list:
    """Formulas mentioned in a sequent text, in order of appearance."""
    out = []
    for kind, f, g, b, pos in _parse_members(text):
        out.append(f)
        if g is not None:
            out.append(g)
    return out


def parse_sequent(text: str, ctx: Context | None = None) -> tuple[Calculus, int]:
    """Parse a sequent; without a context the least negation-closed one is used."""
    if ctx is None:
        ctx = negation_closed_context(sequent_formulas(text))
    calc = Calculus(ctx)
    return calc, calc.parse(text)
