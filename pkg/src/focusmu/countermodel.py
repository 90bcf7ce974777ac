"""Countermodels from Refuter's winning strategy in the phased search game.

States are the modal-free stretches Refuter's strategy produces; a modal
step with principal ``[a]phi`` links a stretch to the stretch above it by an
``a``-edge.  The infinite unravelling is cut to a finite candidate (by
identifying stretches with the same start sequent and incoming action) and a
candidate is only accepted after the model checker confirms that every
formula of the root sequent fails at the root.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .calculus import Calculus, bits
from .search import PHASED, PhasedSearch, RefuterWitness, build_search_game
from .semantics import EvaluationGame, KripkeModel, fixpoint_oracle
from .syntax import AND, BOX, MU, NU, OR, Action, Context, render

DEPTH_SCHEDULE = (1, 2, 4, 8)


class RefutationError(RuntimeError):
    pass


@dataclass
class StretchNode:
    """One stretch of Refuter's strategy: start sequent, chosen end, completed union of the path."""

    start: int
    end: int
    label: int
    children: list[tuple[int, Action, int]]  # (box member, action, start of the next stretch)


class StrategyGraph:
    """Refuter's strategy with every modal choice of Prover, keyed by stretch start."""

    def __init__(self, search: PhasedSearch):
        if search.mode != PHASED:
            raise RefutationError("countermodels are extracted from the phased game only")
        if search.prover_wins():
            raise RefutationError("Prover wins at the root; there is nothing to refute")
        self.search = search
        self.calc: Calculus = search.calc
        self.root = search.labels[search.root][1]
        self.nodes: dict[int, StretchNode] = {}
        todo = [self.root]
        while todo:
            g = todo.pop()
            if g in self.nodes:
                continue
            end = search.refuter_leaf(g)
            if end is None:
                raise RefutationError("Refuter strategy undefined inside his region")
            label = completed_label(self.calc, search.leaves[g][end])
            kids = []
            for m in self.calc.boxes(end):
                nxt = self.calc.jump(end, m)
                kids.append((m, self.calc.ctx[m >> 1].action, nxt))
                todo.append(nxt)
            self.nodes[g] = StretchNode(g, end, label, kids)

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass
class ModelState:
    id: int
    start: int
    label: int
    depth: int
    parent: int | None = None
    action: Action | None = None
    box: int | None = None  # principal member of the modal step that created this state
    children: list[int] = field(default_factory=list)

    @property
    def signature(self) -> tuple:
        return (self.start, self.action)


def build_states(sg: StrategyGraph, depth: int) -> list[ModelState]:
    """Unravel the strategy graph to ``depth`` modal steps; state 0 is the root."""
    states = [ModelState(0, sg.root, sg.nodes[sg.root].label, 0)]
    queue = [0]
    while queue:
        sid = queue.pop(0)
        st = states[sid]
        if st.depth >= depth:
            continue
        for m, act, nxt in sg.nodes[st.start].children:
            child = ModelState(len(states), nxt, sg.nodes[nxt].label, st.depth + 1, sid, act, m)
            states.append(child)
            st.children.append(child.id)
            queue.append(child.id)
    return states


def completed_label(calc: Calculus, label: int) -> int:
    """Fill in trace atoms the search left undecided with their positive form.

    The default search only cuts on trace atoms between member formulas, so a
    state's label may leave other pairs open; no other check reads them.
    """
    decided = ((label >> calc.T0) | (label >> calc.N0)) & calc.NN
    return label | ((calc.NN & ~decided) << calc.T0)


SATURATION_BULLETS = (
    "no formula together with its negation",
    "u-annotation decides every formula",
    "every trace atom is decided exactly once",
    "no reflexive trace atom",
    "disjunctions are decomposed",
    "conjunctions have a witness conjunct",
    "least fixpoints are unfolded",
    "greatest fixpoints are unfolded with a negated trace atom",
    "greatest fixpoint unfoldings trace back",
    "negated trace atoms are transitive",
)


def saturation_check(calc: Calculus, label: int) -> list[str]:
    """Violated saturation conditions of a state label (empty list when saturated)."""
    ctx, n, T0, N0 = calc.ctx, calc.n, calc.T0, calc.N0
    has = lambda m: (label >> m) & 1 == 1  # noqa: E731
    present = calc.formulas(label)
    out = []
    if any(i ^ 1 in present for i in present):
        out.append(SATURATION_BULLETS[0])
    if any(has(2 * i) == has(2 * (i ^ 1)) for i in range(n)):
        out.append(SATURATION_BULLETS[1])
    if any(has(T0 + t) == has(N0 + t) for t in range(n * n)):
        out.append(SATURATION_BULLETS[2])
    if any(has(T0 + i * n + i) for i in range(n)):
        out.append(SATURATION_BULLETS[3])
    nt = lambda i, j: has(N0 + i * n + j)  # noqa: E731
    bad_or = bad_and = bad_mu = bad_nu = bad_nu2 = False
    for i in present:
        k = ctx.kind[i]
        if k == OR:
            l, r = ctx.left[i], ctx.right[i]
            if not (nt(i, l) and nt(i, r) and l in present and r in present):
                bad_or = True
        elif k == AND:
            l, r = ctx.left[i], ctx.right[i]
            if not ((nt(i, l) and l in present) or (nt(i, r) and r in present)):
                bad_and = True
        elif k == MU:
            if ctx.unf[i] not in present:
                bad_mu = True
        elif k == NU:
            u = ctx.unf[i]
            if not (nt(i, u) and u in present):
                bad_nu = True
            if not has(T0 + u * n + i):
                bad_nu2 = True
    for flag, idx in ((bad_or, 4), (bad_and, 5), (bad_mu, 6), (bad_nu, 7), (bad_nu2, 8)):
        if flag:
            out.append(SATURATION_BULLETS[idx])
    ng = label >> N0
    rows = [(ng >> (i * n)) & calc.ROW for i in range(n)]
    if any(rows[j] & ~rows[i] for i in range(n) for j in bits(rows[i])):
        out.append(SATURATION_BULLETS[9])
    return out


# -- finite candidates ------------------------------------------------------------

@dataclass
class Candidate:
    model: KripkeModel
    root: str
    method: str
    depth: int
    rep: list[int]  # unravelled state -> model state index
    states: list[ModelState]


def _valuation(calc: Calculus, labels: list[int]) -> dict[str, list[str]]:
    ctx = calc.ctx
    val: dict[str, list[str]] = {p: [] for p in ctx.atoms()}
    for sid, label in enumerate(labels):
        for i in calc.formulas(label):
            f = ctx[i]
            if f.kind == "natom":
                val[f.name].append(f"s{sid}")
    return val


def quotient_candidate(sg: StrategyGraph, depth: int) -> Candidate:
    """Unravel to ``depth``, then identify states with the same (start, incoming action)."""
    states = build_states(sg, depth)
    rep: list[int] = []
    sig_id: dict[tuple, int] = {}
    labels: list[int] = []
    for st in states:
        k = sig_id.get(st.signature)
        if k is None:
            k = sig_id[st.signature] = len(labels)
            labels.append(st.label)
        rep.append(k)
    edges = set()
    for st in states:
        for c in st.children:
            edges.add((str(states[c].action), f"s{rep[st.id]}", f"s{rep[c]}"))
        if st.depth == depth:
            # close the frontier on states that already exist
            for m, act, nxt in sg.nodes[st.start].children:
                k = sig_id.get((nxt, act))
                if k is not None:
                    edges.add((str(act), f"s{rep[st.id]}", f"s{k}"))
    names = [f"s{k}" for k in range(len(labels))]
    model = KripkeModel(names, sorted(edges), _valuation(sg.calc, labels))
    return Candidate(model, "s0", "quotient", depth, rep, states)


def unravel_candidate(sg: StrategyGraph, depth: int) -> Candidate:
    """Tree of depth ``depth``; frontier modal steps loop back to the nearest ancestor
    with the same signature, or failing that the same start sequent."""
    states = build_states(sg, depth)
    edges = set()
    for st in states:
        for c in st.children:
            edges.add((str(states[c].action), f"s{st.id}", f"s{c}"))
        if st.depth == depth:
            for m, act, nxt in sg.nodes[st.start].children:
                tgt = None
                anc = st.id
                while anc is not None:
                    a = states[anc]
                    if a.start == nxt and a.action == act:
                        tgt = anc
                        break
                    anc = a.parent
                if tgt is None:
                    anc = st.id
                    while anc is not None:
                        if states[anc].start == nxt:
                            tgt = anc
                            break
                        anc = states[anc].parent
                if tgt is not None:
                    edges.add((str(act), f"s{st.id}", f"s{tgt}"))
    names = [f"s{k}" for k in range(len(states))]
    model = KripkeModel(names, sorted(edges), _valuation(sg.calc, [st.label for st in states]))
    return Candidate(model, "s0", "unravel", depth, list(range(len(states))), states)


# -- the universal player's strategy and label checks -------------------------------

def derive_fT(calc: Calculus, states: list[ModelState]) -> dict[tuple[int, int], tuple[int, int]]:
    """Universal strategy on an unravelled forest: witness conjuncts and modal children.

    Keys and values are (formula index, state id).
    """
    ctx = calc.ctx
    n, N0 = calc.n, calc.N0
    f: dict[tuple[int, int], tuple[int, int]] = {}
    for st in states:
        present = calc.formulas(st.label)
        for i in sorted(present):
            if ctx.kind[i] == AND:
                for c in (ctx.left[i], ctx.right[i]):
                    if (st.label >> (N0 + i * n + c)) & 1 and c in present:
                        f[(i, st.id)] = (c, st.id)
                        break
                else:
                    raise RefutationError(f"no witness conjunct for {render(ctx[i])} in state {st.id}")
        for c in st.children:
            box = states[c].box
            i = box >> 1
            f.setdefault((i, st.id), (ctx.left[i], c))
    return f


@dataclass
class LabelReport:
    positions: int = 0
    outside_sequent: list = field(default_factory=list)
    loops: int = 0
    loop_violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.outside_sequent and not self.loop_violations


def label_spot_checks(calc: Calculus, states: list[ModelState], root_formulas, f=None) -> LabelReport:
    """Explore f_T-guided matches from the root formulas inside the unravelled tree.

    Checks that every reached (phi, state) has phi in the state's label and
    that a mu-free return to the same state at psi is recorded as phi !~> psi.
    Positions at frontier states (children cut off by the depth bound) stop the walk.
    """
    ctx = calc.ctx
    n, N0 = calc.n, calc.N0
    f = derive_fT(calc, states) if f is None else f
    parent_of = {st.id: st.parent for st in states}
    act_of = {st.id: st.action for st in states}
    frontier = {st.id for st in states if st.children == [] and _has_boxes_or_dias(calc, st.label)}
    rep = LabelReport()

    def moves(i: int, s: int) -> list[tuple[int, int]]:
        k = ctx.kind[i]
        if k in ("atom", "natom"):
            return []
        if k in (OR,):
            return [(ctx.left[i], s), (ctx.right[i], s)]
        if k == AND:
            return [f[(i, s)]] if (i, s) in f else []
        if k in (MU, NU):
            return [(ctx.unf[i], s)]
        a = ctx[i].action
        targets = [c for c in states[s].children if states[c].action == a]
        p = parent_of[s]
        if p is not None and act_of[s] == a.converse:
            targets.append(p)
        if k == BOX:
            return [f[(i, s)]] if (i, s) in f else []
        return [(ctx.left[i], t) for t in targets]

    seen = set()
    todo = [(i, 0) for i in root_formulas]
    while todo:
        pos = todo.pop()
        if pos in seen:
            continue
        seen.add(pos)
        i, s = pos
        if i not in calc.formulas(states[s].label):
            rep.outside_sequent.append((render(ctx[i]), s))
            continue
        if s in frontier:
            continue
        todo.extend(moves(i, s))
    rep.positions = len(seen)
    # loop condition: from every reached position, mu-free walks returning to the same state
    for (i, s) in seen:
        if s in frontier or i not in calc.formulas(states[s].label):
            continue
        reach = set()
        stack = [(i, s)]
        while stack:
            j, t = stack.pop()
            if (j, t) in reach:
                continue
            reach.add((j, t))
            if t in frontier or ctx.kind[j] == MU:
                continue
            stack.extend(moves(j, t))
        for (j, t) in reach:
            if t == s and j != i:
                rep.loops += 1
                if not (states[s].label >> (N0 + i * n + j)) & 1:
                    rep.loop_violations.append((render(ctx[i]), render(ctx[j]), s))
    return rep


def _has_boxes_or_dias(calc: Calculus, label: int) -> bool:
    return any(calc.ctx[i].is_modal for i in calc.formulas(label))


# -- certificates -----------------------------------------------------------------

@dataclass
class Certificate:
    model: KripkeModel
    root: str
    falsified: list
    verdicts: dict
    depth: int
    method: str
    tc_scope: str = "relevant"

    def to_json(self) -> dict:
        return {
            "model": self.model.to_json(),
            "root": self.root,
            "falsified": [render(f) for f in self.falsified],
            "verification": self.verdicts,
            "depth": self.depth,
            "method": self.method,
            "trace_cut_scope": self.tc_scope,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


@dataclass
class Unverified:
    depth: int
    reason: str

    def __str__(self) -> str:
        return f"refutation unverified at depth {self.depth}: {self.reason}"


def check_candidate(calc: Calculus, cand: Candidate, root_formulas) -> dict | None:
    """Per-formula verdicts if every root formula is false at the root (game and oracle agree)."""
    ctx = calc.ctx
    ev = EvaluationGame(ctx, cand.model)
    r = cand.model.sid[cand.root]
    verdicts = {}
    for i in root_formulas:
        if ev.true_at(i, r):
            return None
        verdicts[render(ctx[i])] = {"model_check": False}
    for i in root_formulas:
        truth = cand.root in fixpoint_oracle(cand.model, ctx[i])
        if truth:
            raise RefutationError(f"model checker and fixpoint oracle disagree on {render(ctx[i])}")
        verdicts[render(ctx[i])]["fixpoint_oracle"] = False
    return verdicts


def verified_refute(witness: RefuterWitness, cap: int = 8, schedule=DEPTH_SCHEDULE):
    """A :class:`Certificate`, or :class:`Unverified` when no candidate up to depth ``cap`` works."""
    search = witness.search
    calc = search.calc
    sg = StrategyGraph(search)
    root_formulas = sorted(calc.formulas(sg.root))
    depths = [d for d in schedule if d <= cap] or [cap]
    tried = 0
    for d in depths:
        for make in (quotient_candidate, unravel_candidate):
            cand = make(sg, d)
            tried += 1
            verdicts = check_candidate(calc, cand, root_formulas)
            if verdicts is not None:
                return Certificate(cand.model, cand.root, [calc.ctx[i] for i in root_formulas], verdicts, d,
                                   cand.method, search.tc_scope)
    return Unverified(depths[-1], f"{tried} finite candidates checked, none falsifies the root")


def refute(ctx: Context | Calculus, gamma: int, cap: int = 8, tc_scope: str = "relevant"):
    """Run the phased search and, if Refuter wins, try to certify a countermodel."""
    search = build_search_game(ctx, gamma, PHASED, tc_scope)
    if search.prover_wins():
        raise RefutationError("sequent is provable")
    return verified_refute(RefuterWitness(search), cap)
