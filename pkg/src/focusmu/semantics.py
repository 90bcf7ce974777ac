"""Regular Kripke models, evaluation games, model checking and strategy-relative truth."""
from __future__ import annotations

import itertools
import json
from typing import Hashable, Iterable, Mapping, Sequence

from .graphs import reachable
from .paritygames import ParityGame, Solution, solve, verify_strategy
from .syntax import (AND, ATOM, BINDERS, BOX, DIA, MU, NATOM, NU, OR, VAR, Action, Context, Formula,
                     FormulaError, _action, negation_closed_context, parse_formula, render)

EXISTS, FORALL = 0, 1


class ModelError(ValueError):
    pass


class KripkeModel:
    """Finite model whose relations are closed under converse: ``R_a'`` is always the inverse of ``R_a``."""

    def __init__(self, states: Sequence[Hashable], edges: Iterable[tuple], valuation: Mapping[str, Iterable[Hashable]]):
        self.states: list = list(states)
        if len(set(self.states)) != len(self.states):
            raise ModelError("duplicate state names")
        self.sid = {s: i for i, s in enumerate(self.states)}
        rel: dict[Action, set[tuple[int, int]]] = {}
        for a, s, t in edges:
            act = _action(a)
            try:
                i, j = self.sid[s], self.sid[t]
            except KeyError as exc:
                raise ModelError(f"edge mentions unknown state {exc.args[0]!r}") from None
            rel.setdefault(act, set()).add((i, j))
            rel.setdefault(act.converse, set()).add((j, i))
        self.rel = rel
        self.succ: dict[Action, list[list[int]]] = {}
        for act, pairs in rel.items():
            lists: list[list[int]] = [[] for _ in self.states]
            for i, j in sorted(pairs):
                lists[i].append(j)
            self.succ[act] = lists
        self.val: dict[str, frozenset[int]] = {}
        for p, ss in valuation.items():
            try:
                self.val[p] = frozenset(self.sid[s] for s in ss)
            except KeyError as exc:
                raise ModelError(f"valuation mentions unknown state {exc.args[0]!r}") from None

    def __len__(self) -> int:
        return len(self.states)

    def successors(self, action: Action, i: int) -> list[int]:
        lists = self.succ.get(action)
        return lists[i] if lists is not None else []

    def is_regular(self) -> bool:
        return all(self.rel.get(a.converse, set()) == {(j, i) for i, j in pairs} for a, pairs in self.rel.items())

    def forward_edges(self) -> list[tuple[str, Hashable, Hashable]]:
        """One representative per converse pair (the non-converse direction)."""
        out = []
        for act in sorted(self.rel):
            if act.conv:
                continue
            for i, j in sorted(self.rel[act]):
                out.append((act.name, self.states[i], self.states[j]))
        for act in sorted(self.rel):
            if act.conv and act.converse not in self.rel:
                for i, j in sorted(self.rel[act]):
                    out.append((str(act), self.states[i], self.states[j]))
        return out

    def to_json(self) -> dict:
        return {
            "states": list(self.states),
            "edges": [{"action": a, "from": s, "to": t} for a, s, t in self.forward_edges()],
            "valuation": {p: [self.states[i] for i in sorted(ss)] for p, ss in sorted(self.val.items())},
        }

    @classmethod
    def from_json(cls, data: dict) -> "KripkeModel":
        try:
            return cls(data["states"], [(e["action"], e["from"], e["to"]) for e in data.get("edges", [])],
                       data.get("valuation", {}))
        except (KeyError, TypeError) as exc:
            raise ModelError(f"malformed model: {exc}") from None

    @classmethod
    def load(cls, path) -> "KripkeModel":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(json.load(fh))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)

    def to_dot(self, name: str = "model", root: Hashable | None = None) -> str:
        lines = [f"digraph {name} {{"]
        for i, s in enumerate(self.states):
            props = ",".join(sorted(p for p, ss in self.val.items() if i in ss))
            shape = "doublecircle" if s == root else "circle"
            lines.append(f'  s{i} [shape={shape}, label="{s}\\n{{{props}}}"];')
        for a, s, t in self.forward_edges():
            lines.append(f'  s{self.sid[s]} -> s{self.sid[t]} [label="{a}"];')
        lines.append("}")
        return "\n".join(lines) + "\n"


class EvaluationGame:
    """Evaluation game on the board ``ctx x states``; position ``i * |S| + s``."""

    def __init__(self, ctx: Context, model: KripkeModel):
        if not model.is_regular():
            raise ModelError("model is not regular")
        self.ctx = ctx
        self.model = model
        ns = self.ns = len(model)
        owner, prio, edges = [], [], []
        for i, f in enumerate(ctx.formulas):
            k = f.kind
            for s in range(ns):
                if k == ATOM or k == NATOM:
                    true = (s in model.val.get(f.name, ())) == (k == ATOM)
                    owner.append(FORALL if true else EXISTS)
                    edges.append([])
                elif k in (OR, AND):
                    owner.append(EXISTS if k == OR else FORALL)
                    edges.append([ctx.left[i] * ns + s, ctx.right[i] * ns + s])
                elif k in (DIA, BOX):
                    owner.append(EXISTS if k == DIA else FORALL)
                    body = ctx.left[i]
                    edges.append([body * ns + t for t in model.successors(f.action, s)])
                elif k in BINDERS:
                    owner.append(EXISTS)
                    edges.append([ctx.unf[i] * ns + s])
                else:
                    raise FormulaError(f"open formula on the board: {render(f)}")
                prio.append(2 if k == NU else 1 if k == MU else 0)
        self.game = ParityGame(owner, prio, edges)
        self._solution: Solution | None = None

    def pos(self, i: int, s: int) -> int:
        return i * self.ns + s

    def split(self, v: int) -> tuple[int, int]:
        return divmod(v, self.ns)

    @property
    def solution(self) -> Solution:
        if self._solution is None:
            self._solution = solve(self.game)
        return self._solution

    def true_at(self, i: int, s: int) -> bool:
        return self.solution.winner[self.pos(i, s)] == EXISTS

    # -- strategy-relative semantics --------------------------------------

    def check_ops(self, f: Mapping[int, int]) -> None:
        g = self.game
        for v in range(g.n):
            if g.owner[v] == FORALL and g.edges[v]:
                if v not in f:
                    raise ModelError(f"strategy undefined at {self.describe(v)}")
                if f[v] not in g.edges[v]:
                    raise ModelError(f"strategy makes an inadmissible move at {self.describe(v)}")

    def restricted(self, f: Mapping[int, int]) -> ParityGame:
        g = self.game
        edges = [[f[v]] if g.owner[v] == FORALL and g.edges[v] else g.edges[v] for v in range(g.n)]
        return ParityGame(g.owner, g.priority, edges)

    def holds_under(self, f: Mapping[int, int], i: int, s: int, _cache: dict | None = None) -> bool:
        """``f`` is not winning for the universal player at ``(i, s)``."""
        self.check_ops(f)
        key = id(f)
        if _cache is not None and key in _cache:
            win = _cache[key]
        else:
            win = solve(self.restricted(f)).winner
            if _cache is not None:
                _cache[key] = win
        return win[self.pos(i, s)] == EXISTS

    def trace_holds(self, f: Mapping[int, int], i: int, j: int, s: int) -> bool:
        """An f-guided match from (i, s) to (j, s) passing no least-fixpoint formula before its end."""
        if i == j:
            return True
        g = self.game
        ns = self.ns
        kinds = self.ctx.kind
        target = self.pos(j, s)

        def succ(v):
            if kinds[v // ns] == MU:
                return ()
            if g.owner[v] == FORALL and g.edges[v]:
                return (f[v],)
            return g.edges[v]

        return target in reachable([self.pos(i, s)], succ)

    def ops(self, limit: int = 4096) -> list[dict[int, int]]:
        """All optimal positional strategies of the universal player (winning wherever it can win)."""
        g = self.game
        sol = self.solution
        lose = sol.region(FORALL)
        spots = [v for v in range(g.n) if g.owner[v] == FORALL and g.edges[v]]
        options = []
        for v in spots:
            if v in lose:
                options.append([w for w in g.edges[v] if w in lose])
            else:
                options.append(list(g.edges[v]))
        total = 1
        for o in options:
            total *= len(o)
            if total > limit:
                raise ModelError(f"more than {limit} candidate strategies; model too large to enumerate")
        out = []
        for pick in itertools.product(*options):
            f = dict(zip(spots, pick))
            if verify_strategy(g, FORALL, f, lose):
                out.append(f)
        return out

    def describe(self, v: int) -> str:
        i, s = self.split(v)
        return f"({render(self.ctx[i])}, {self.model.states[s]!r})"


def build_evaluation_game(ctx: Context, model: KripkeModel) -> EvaluationGame:
    return EvaluationGame(ctx, model)


def _state(model: KripkeModel, s) -> int:
    try:
        return model.sid[s]
    except KeyError:
        raise ModelError(f"unknown state {s!r}") from None


def _formula(phi) -> Formula:
    return parse_formula(phi) if isinstance(phi, str) else phi


def model_check(model: KripkeModel, s, phi: Formula | str, ctx: Context | None = None) -> bool:
    """Truth of ``phi`` at state ``s`` via the evaluation game."""
    phi = _formula(phi)
    ctx = ctx or negation_closed_context([phi])
    ev = EvaluationGame(ctx, model)
    return ev.true_at(ctx.idx(phi), _state(model, s))


def fixpoint_oracle(model: KripkeModel, phi: Formula | str) -> set:
    """Denotation of ``phi`` by Knaster-Tarski iteration, returned as a set of state names."""
    phi = _formula(phi)
    full = frozenset(range(len(model)))

    def ev(f: Formula, env: dict[int, frozenset[int]]) -> frozenset[int]:
        k = f.kind
        if k == ATOM:
            return model.val.get(f.name, frozenset())
        if k == NATOM:
            return full - model.val.get(f.name, frozenset())
        if k == VAR:
            return env[f.index]
        if k == OR:
            return ev(f.left, env) | ev(f.right, env)
        if k == AND:
            return ev(f.left, env) & ev(f.right, env)
        if k == DIA:
            body = ev(f.left, env)
            return frozenset(s for s in full if any(t in body for t in model.successors(f.action, s)))
        if k == BOX:
            body = ev(f.left, env)
            return frozenset(s for s in full if all(t in body for t in model.successors(f.action, s)))
        cur = frozenset() if k == MU else full
        while True:
            inner = dict(env)
            inner[f.index] = cur
            nxt = ev(f.left, inner)
            if nxt == cur:
                return cur
            cur = nxt

    return {model.states[i] for i in ev(phi, {})}


def _ops_positions(ev: EvaluationGame, f: Mapping) -> dict[int, int]:
    """Accept strategies keyed by ((formula, state) -> (formula, state)) or by raw positions."""
    out = {}
    for k, v in f.items():
        if isinstance(k, int):
            out[k] = v
        else:
            (a, s), (b, t) = k, v
            out[ev.pos(ev.ctx.idx(_formula(a)), _state(ev.model, s))] = ev.pos(ev.ctx.idx(_formula(b)), _state(ev.model, t))
    return out


def satisfies_under(model: KripkeModel, f: Mapping, s, phi: Formula | str, ctx: Context | None = None) -> bool:
    phi = _formula(phi)
    ctx = ctx or negation_closed_context([phi])
    ev = EvaluationGame(ctx, model)
    return ev.holds_under(_ops_positions(ev, f), ctx.idx(phi), _state(model, s))


def satisfies_trace_atom(model: KripkeModel, f: Mapping, s, phi: Formula | str, psi: Formula | str,
                         ctx: Context | None = None) -> bool:
    phi, psi = _formula(phi), _formula(psi)
    ctx = ctx or negation_closed_context([phi, psi])
    ev = EvaluationGame(ctx, model)
    fp = _ops_positions(ev, f)
    ev.check_ops(fp)
    return ev.trace_holds(fp, ctx.idx(phi), ctx.idx(psi), _state(model, s))


def enumerate_ops(ctx: Context, model: KripkeModel, limit: int = 4096) -> list[dict]:
    """Optimal positional strategies of the universal player, keyed by (formula, state) pairs."""
    ev = EvaluationGame(ctx, model)
    out = []
    for f in ev.ops(limit):
        named = {}
        for v, w in f.items():
            i, s = ev.split(v)
            j, t = ev.split(w)
            named[(ctx[i], model.states[s])] = (ctx[j], model.states[t])
        out.append(named)
    return out
