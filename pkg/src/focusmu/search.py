"""Proof search as a parity game between Prover and Refuter, proof extraction and proof checking.

Two arenas are available.  ``full`` lets Prover pick any rule instance and is
only practical for very small contexts.  ``phased`` restricts Prover to the
strategy of the completeness argument: productive cuts and trace cuts, then
focus, then cumulative productive logical steps, then one modal step of his
choice (an axiom is taken as soon as one applies).  Prover has no choice
before the modal step, so each modal-free stretch ("segment") is collapsed
into a single Refuter move that picks the sequent the stretch ends in.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

from .calculus import AXIOMS, F, Calculus, RuleInstance, bits
from .graphs import tarjan_scc
from .paritygames import ParityGame, Solution, solve
from .syntax import Context, Formula, FormulaError, _action, negation_closed_context, parse_formula, render

PROVER, REFUTER = 0, 1
PHASED, FULL = "phased", "full"


class SearchBudgetExceeded(RuntimeError):
    pass


def instance_priority(calc: Calculus, inst: RuleInstance) -> int:
    """3 if the conclusion has no focused formula, 2 for a focused modal step, 1 otherwise."""
    if not calc.has_focus(inst.conclusion):
        return 3
    return 2 if inst.rule == "R_box" else 1


class _Arena:
    def __init__(self, calc: Calculus, max_positions: int):
        self.calc = calc
        self.max_positions = max_positions
        self.labels: list[tuple] = []
        self.owner: list[int] = []
        self.priority: list[int] = []
        self.edges: list[list[int]] = []
        self.index: dict = {}
        self._todo: list[int] = []
        self._solution: Solution | None = None

    def _new(self, label, owner: int, prio: int) -> int:
        v = len(self.labels)
        if v >= self.max_positions:
            raise SearchBudgetExceeded(f"search game exceeds {self.max_positions} positions")
        self.labels.append(label)
        self.owner.append(owner)
        self.priority.append(prio)
        self.edges.append([])
        return v

    def _position(self, key, owner: int, prio: int) -> int:
        v = self.index.get(key)
        if v is None:
            v = self._new(key, owner, prio)
            self.index[key] = v
            self._todo.append(v)
        return v

    def _finish(self):
        self.game = ParityGame(self.owner, self.priority, self.edges, self.labels)

    @property
    def solution(self) -> Solution:
        if self._solution is None:
            self._solution = solve(self.game)
        return self._solution

    def prover_wins(self) -> bool:
        return self.solution.winner[self.root] == PROVER

    def __len__(self) -> int:
        return len(self.labels)


class FullSearch(_Arena):
    """Every productive instance of every rule is a Prover move.

    Labels: ``("seq", gamma)``, ``("inst", instance)``.  An instance with a
    premiss equal to its conclusion is left out: Refuter could pick that premiss
    forever, and such a loop has odd priority, so Prover never gains from it.
    """

    mode = FULL

    def __init__(self, calc: Calculus, root: int, max_positions: int = 200_000):
        super().__init__(calc, max_positions)
        self.root = self._position(("seq", root), PROVER, 0)
        while self._todo:
            v = self._todo.pop()
            gamma = self.labels[v][1]
            for inst in calc.applicable_instances(gamma):
                if gamma in inst.premisses:
                    continue
                w = self._new(("inst", inst), REFUTER, instance_priority(calc, inst))
                self.edges[v].append(w)
                self.edges[w] = [self._position(("seq", p), PROVER, 0) for p in inst.premisses]
        self._finish()


class PhasedSearch(_Arena):
    """Segment-collapsed arena of the phased strategy.

    Labels: ``("seg", gamma)`` owned by Refuter, who picks how the modal-free
    stretch starting at ``gamma`` ends; ``("leaf", lam)`` owned by Prover, who
    picks the box member for the modal step.  Segment positions carry the
    largest priority met along the stretch (3 if it starts unfocused, else 1);
    leaves carry the priority of the modal step.
    """

    mode = PHASED

    def __init__(self, calc: Calculus, root: int, tc_scope: str = "relevant", max_positions: int = 2_000_000):
        super().__init__(calc, max_positions)
        if tc_scope == "relevant":
            self.pairs = calc.relevant_pairs()
        elif tc_scope == "all":
            self.pairs = calc.all_pairs()
        else:
            raise ValueError(f"unknown trace-cut scope {tc_scope!r}")
        self.tc_scope = tc_scope
        self.masks = calc.pair_masks(self.pairs, members_only=(tc_scope == "relevant"))
        self.leaves: dict[int, dict[int, int]] = {}
        self.root = self._seg(root)
        while self._todo:
            v = self._todo.pop()
            kind, gamma = self.labels[v]
            if kind == "seg":
                ends = self.segment_leaves(gamma)
                self.leaves[gamma] = ends
                self.edges[v] = [self._leaf(lam) for lam in ends]
            else:
                self.edges[v] = [self._seg(calc.jump(gamma, m)) for m in calc.boxes(gamma)]
        self._finish()

    def _seg(self, gamma: int) -> int:
        return self._position(("seg", gamma), REFUTER, 1 if self.calc.has_focus(gamma) else 3)

    def _leaf(self, lam: int) -> int:
        return self._position(("leaf", lam), PROVER, 2 if self.calc.has_focus(lam) else 3)

    def step(self, gamma: int, stage: int) -> tuple[RuleInstance, tuple] | None:
        """Prover's deterministic move at ``(gamma, stage)``, or None when only the modal step is left."""
        mv = self.calc.phase_move(gamma, stage, self.masks)
        if mv is None:
            return None
        rule, principal, prem, stages = mv
        return RuleInstance(gamma, rule, prem, principal), stages

    def segment_leaves(self, gamma: int) -> dict[int, int]:
        """Non-axiomatic end sequents of the stretch from ``gamma``, each mapped to the union
        of the sequents on the first path (in depth-first order) leading to it."""
        out: dict[int, int] = {}
        move = self.calc.phase_move
        masks = self.masks
        stack = [(gamma, 1, gamma)]
        seen = set()
        while stack:
            g, stage, union = stack.pop()
            if (g, stage) in seen:
                continue
            seen.add((g, stage))
            mv = move(g, stage, masks)
            if mv is None:
                out.setdefault(g, union)
                continue
            prem, stages = mv[2], mv[3]
            for k in range(len(prem) - 1, -1, -1):
                stack.append((prem[k], stages[k], union | prem[k]))
        return dict(sorted(out.items()))

    def refuter_leaf(self, gamma: int) -> int | None:
        """End sequent Refuter's strategy picks for the stretch starting at ``gamma``."""
        v = self.index[("seg", gamma)]
        w = self.solution.strategy[v]
        return self.labels[w][1] if w >= 0 else None


def build_search_game(ctx_or_calc, root: int, mode: str = PHASED, tc_scope: str = "relevant",
                      max_positions: int | None = None):
    calc = ctx_or_calc if isinstance(ctx_or_calc, Calculus) else Calculus(ctx_or_calc)
    if not isinstance(root, int) or root < 0 or root >> calc.END:
        raise FormulaError("root sequent mentions members outside the context")
    if mode == FULL:
        return FullSearch(calc, root, max_positions or 200_000)
    if mode == PHASED:
        return PhasedSearch(calc, root, tc_scope, max_positions or 2_000_000)
    raise ValueError(f"unknown mode {mode!r}")


# -- proofs --------------------------------------------------------------------

@dataclass
class ProofNode:
    id: int
    sequent: int
    rule: str | None = None
    principal: object = None
    action: object = None
    children: list[int] = field(default_factory=list)
    backedge: int | None = None


@dataclass
class Proof:
    """A finite proof graph; buds (``backedge`` set) repeat an earlier node's sequent."""

    calc: Calculus
    nodes: list[ProofNode]
    root: int = 0
    annotation: str = "all-focused"

    @property
    def root_sequent(self) -> int:
        return self.nodes[self.root].sequent

    def __len__(self) -> int:
        return len(self.nodes)

    def _principal_json(self, node: ProofNode):
        calc, p = self.calc, node.principal
        if p is None:
            return None
        if node.rule == "cut":
            return render(calc.ctx[p])
        if node.rule in ("tc", "trans"):
            return [render(calc.ctx[i]) for i in p]
        return calc.member_text(p)

    def to_json(self) -> dict:
        calc = self.calc
        return {
            "root": self.root,
            "sigma": [render(f) for f in calc.ctx.formulas],
            "annotation_convention": self.annotation,
            "nodes": [
                {
                    "id": nd.id,
                    "sequent": [calc.member_text(m) for m in bits(nd.sequent)],
                    "rule": nd.rule,
                    "principal": self._principal_json(nd),
                    "action": str(nd.action) if nd.action is not None else None,
                    "children": list(nd.children),
                    "backedge": nd.backedge,
                }
                for nd in self.nodes
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1, ensure_ascii=False)

    @classmethod
    def from_json(cls, data: dict) -> "Proof":
        ctx = Context(parse_formula(s) for s in data["sigma"])
        calc = Calculus(ctx)
        nodes = []
        memo: dict[str, int] = {}

        def member(text: str) -> int:
            m = memo.get(text)
            if m is None:
                m = memo[text] = calc.parse(text)
            return m

        for raw in data["nodes"]:
            seq = 0
            for text in raw["sequent"]:
                seq |= member(text)
            rule = raw.get("rule")
            p = raw.get("principal")
            if p is not None:
                if rule == "cut":
                    p = ctx.idx(p)
                elif rule in ("tc", "trans"):
                    p = tuple(ctx.idx(s) for s in p)
                else:
                    p = member(p).bit_length() - 1
            act = raw.get("action")
            nodes.append(ProofNode(raw["id"], seq, rule, p, _action(act) if act is not None else None,
                                   list(raw.get("children", [])), raw.get("backedge")))
        return cls(calc, nodes, data.get("root", 0), data.get("annotation_convention", "all-focused"))

    def to_dot(self) -> str:
        calc = self.calc
        lines = ["digraph proof {", "  node [shape=box, fontname=monospace];"]
        for nd in self.nodes:
            text = calc.render(nd.sequent).replace("\\", "\\\\").replace('"', '\\"')
            lines.append(f'  n{nd.id} [label="{nd.rule or "bud"}\\n{text}"];')
            for c in nd.children:
                lines.append(f"  n{nd.id} -> n{c};")
            if nd.backedge is not None:
                lines.append(f"  n{nd.id} -> n{nd.backedge} [style=dashed];")
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass
class RefuterWitness:
    """Refuter's positional winning strategy in the search game, restricted to his region."""

    search: _Arena

    @property
    def strategy(self) -> dict[int, int]:
        return self.search.solution.strategy_for(REFUTER, self.search.game)

    @property
    def region(self) -> set[int]:
        return self.search.solution.region(REFUTER)

    @property
    def root(self) -> int:
        return self.search.root


def _extract_full(search: FullSearch) -> Proof:
    sol, labels = search.solution, search.labels
    nodes: list[ProofNode] = []
    seen: dict[int, int] = {}

    def new(v: int) -> int:
        nodes.append(ProofNode(len(nodes), labels[v][1]))
        seen[v] = len(nodes) - 1
        return seen[v]

    new(search.root)
    stack = [search.root]
    while stack:
        v = stack.pop()
        nd = nodes[seen[v]]
        inst: RuleInstance = labels[sol.strategy[v]][1]
        nd.rule, nd.principal, nd.action = inst.rule, inst.principal, inst.action
        for u in search.edges[sol.strategy[v]]:
            if u in seen:
                nodes.append(ProofNode(len(nodes), labels[u][1], backedge=seen[u]))
                nd.children.append(len(nodes) - 1)
            else:
                nd.children.append(new(u))
                stack.append(u)
    return Proof(search.calc, nodes)


def _extract_phased(search: PhasedSearch) -> Proof:
    calc, sol, labels = search.calc, search.solution, search.labels
    nodes: list[ProofNode] = []
    seg_node: dict[int, int] = {}

    def new(seq: int) -> ProofNode:
        nd = ProofNode(len(nodes), seq)
        nodes.append(nd)
        return nd

    root = new(labels[search.root][1])
    seg_node[root.sequent] = root.id
    stack = [(root.id, 1)]
    while stack:
        nid, stage = stack.pop()
        nd = nodes[nid]
        st = search.step(nd.sequent, stage)
        if st is not None:
            inst, stages = st
            nd.rule, nd.principal = inst.rule, inst.principal
            for p, s in zip(inst.premisses, stages):
                child = new(p)
                nd.children.append(child.id)
                stack.append((child.id, s))
            continue
        w = sol.strategy[search.index[("leaf", nd.sequent)]]
        if w < 0:
            raise RuntimeError("Prover has no winning move at a stretch end")
        m = calc.boxes(nd.sequent)[search.edges[search.index[("leaf", nd.sequent)]].index(w)]
        nd.rule, nd.principal, nd.action = "R_box", m, calc.ctx[m >> 1].action
        prem = labels[w][1]
        if prem in seg_node:
            bud = new(prem)
            bud.backedge = seg_node[prem]
            nd.children.append(bud.id)
        else:
            child = new(prem)
            seg_node[prem] = child.id
            nd.children.append(child.id)
            stack.append((child.id, 1))
    return Proof(calc, nodes)


def extract_proof(search) -> Proof:
    """Unfold Prover's positional strategy into a proof graph with buds for repetitions."""
    if not search.prover_wins():
        raise ValueError("Prover does not win at the root")
    return _extract_phased(search) if search.mode == PHASED else _extract_full(search)


def prove(ctx: Context | Calculus, gamma: int, mode: str = PHASED, tc_scope: str = "relevant",
          max_positions: int | None = None):
    """A :class:`Proof` if Prover wins at ``gamma``, else a :class:`RefuterWitness`."""
    search = build_search_game(ctx, gamma, mode, tc_scope, max_positions)
    if search.prover_wins():
        return extract_proof(search)
    return RefuterWitness(search)


def formula_sequent(phi: Formula | str, ctx: Context | None = None) -> tuple[Calculus, int]:
    """Context and all-focused root sequent for a single formula."""
    if isinstance(phi, str):
        phi = parse_formula(phi)
    ctx = ctx or negation_closed_context([phi])
    calc = Calculus(ctx)
    return calc, 1 << calc.ann(ctx.idx(phi), F)


# -- independent checking --------------------------------------------------------

@dataclass
class ProofCheck:
    ok: bool
    errors: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def verify_proof(proof: Proof, root_sequent: int | None = None) -> ProofCheck:
    """Check a cyclic proof graph.

    Leaves must be axioms or buds, every inference must re-derive, buds must
    repeat their target's sequent, every node on a cycle must have a focused
    formula, and every cycle must pass through a modal step.
    """
    calc = proof.calc
    errors: list[str] = []
    byid = {nd.id: nd for nd in proof.nodes}
    if len(byid) != len(proof.nodes):
        errors.append("duplicate node ids")
    if proof.root not in byid:
        return ProofCheck(False, ["root id does not exist"])
    if root_sequent is not None and byid[proof.root].sequent != root_sequent:
        errors.append("root sequent differs from the goal")
    succ: dict[int, list[int]] = {}
    for nd in proof.nodes:
        where = f"node {nd.id}"
        if nd.backedge is not None:
            if nd.children or nd.rule is not None:
                errors.append(f"{where}: a bud carries no rule and no children")
            tgt = byid.get(nd.backedge)
            if tgt is None:
                errors.append(f"{where}: back-edge to missing node {nd.backedge}")
                succ[nd.id] = []
            else:
                if tgt.sequent != nd.sequent:
                    errors.append(f"{where}: back-edge target {tgt.id} has a different sequent")
                succ[nd.id] = [tgt.id]
            continue
        if nd.rule is None:
            errors.append(f"{where}: leaf without rule is not an axiom")
            succ[nd.id] = []
            continue
        missing = [c for c in nd.children if c not in byid]
        if missing:
            errors.append(f"{where}: missing children {missing}")
            succ[nd.id] = []
            continue
        if not nd.children and nd.rule not in AXIOMS:
            errors.append(f"{where}: leaf rule {nd.rule} is not an axiom")
        inst = RuleInstance(nd.sequent, nd.rule, tuple(byid[c].sequent for c in nd.children), nd.principal, nd.action)
        if not calc.validate_instance(inst):
            errors.append(f"{where}: invalid {nd.rule} inference")
        succ[nd.id] = list(nd.children)
    seen = {proof.root}
    stack = [proof.root]
    while stack:
        v = stack.pop()
        for w in succ.get(v, ()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    for comp in tarjan_scc(sorted(seen), lambda v: succ.get(v, ())):
        if len(comp) == 1 and comp[0] not in succ.get(comp[0], ()):
            continue
        for v in comp:
            if not calc.has_focus(byid[v].sequent):
                errors.append(f"node {v}: unfocused sequent on a cycle")
        inner = {v for v in comp if byid[v].rule != "R_box"}
        for sub in tarjan_scc(sorted(inner), lambda v: [w for w in succ.get(v, ()) if w in inner]):
            if len(sub) > 1 or sub[0] in succ.get(sub[0], ()):
                errors.append(f"cycle through nodes {sorted(sub)[:8]} avoids the modal rule")
    return ProofCheck(not errors, errors)
