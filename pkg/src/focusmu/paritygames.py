"""Finite parity games: arenas, Zielonka solving, strategy checking, brute-force oracle.

Convention: player 0 wins an infinite play iff the largest priority seen
infinitely often is even; a player who cannot move loses.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

from .graphs import tarjan_scc

try:  # compiled kernel if the extension was built
    from ._zielonka import zielonka as _kernel

    BACKEND = "cython"
except ImportError:  # pragma: no cover - depends on the build
    from ._zielonka_py import zielonka as _kernel

    BACKEND = "python"

from ._zielonka_py import zielonka as _py_kernel


class GameError(ValueError):
    pass


class ParityGame:
    """Arena with positions ``0..n-1``; ``labels`` optionally maps positions to domain objects."""

    __slots__ = ("owner", "priority", "edges", "labels")

    def __init__(self, owner: Sequence[int], priority: Sequence[int], edges: Sequence[Sequence[int]],
                 labels: Sequence[Hashable] | None = None):
        n = len(owner)
        if len(priority) != n or len(edges) != n:
            raise GameError("owner, priority and edges must have equal length")
        for v, ws in enumerate(edges):
            if owner[v] not in (0, 1):
                raise GameError(f"position {v}: owner must be 0 or 1")
            if priority[v] < 0:
                raise GameError(f"position {v}: negative priority")
            for w in ws:
                if not 0 <= w < n:
                    raise GameError(f"position {v}: edge to unknown position {w}")
        self.owner = list(owner)
        self.priority = list(priority)
        self.edges = [list(ws) for ws in edges]
        self.labels = list(labels) if labels is not None else None

    def __len__(self) -> int:
        return len(self.owner)

    @property
    def n(self) -> int:
        return len(self.owner)

    def label(self, v: int):
        return self.labels[v] if self.labels is not None else v


@dataclass
class Solution:
    winner: list[int]
    strategy: list[int]  # chosen successor for the owner where the owner wins, else -1

    def region(self, player: int) -> set[int]:
        return {v for v, w in enumerate(self.winner) if w == player}

    def strategy_for(self, player: int, game: ParityGame) -> dict[int, int]:
        return {v: s for v, s in enumerate(self.strategy)
                if s >= 0 and game.owner[v] == player and self.winner[v] == player}


def _csr(n: int, edges: Sequence[Sequence[int]]):
    soff = [0] * (n + 1)
    stgt: list[int] = []
    indeg = [0] * (n + 1)
    for v in range(n):
        stgt.extend(edges[v])
        soff[v + 1] = len(stgt)
        for w in edges[v]:
            indeg[w] += 1
    poff = [0] * (n + 1)
    for v in range(n):
        poff[v + 1] = poff[v] + indeg[v]
    fill = poff[:]
    ptgt = [0] * len(stgt)
    for v in range(n):
        for w in edges[v]:
            ptgt[fill[w]] = v
            fill[w] += 1
    return soff, stgt, poff, ptgt


def solve(g: ParityGame, backend: str | None = None) -> Solution:
    """Winning regions and positional winning strategies (Zielonka's algorithm).

    Dead ends are routed to two fresh sinks: a priority-1 loop for stuck
    player-0 positions and a priority-0 loop for stuck player-1 positions.
    """
    kernel = _kernel
    if backend == "python":
        kernel = _py_kernel
    elif backend not in (None, "cython", BACKEND):
        raise GameError(f"unknown backend {backend!r}")
    n = g.n
    owner = g.owner + [0, 1]
    prio = g.priority + [1, 0]
    sink_lose0, sink_lose1 = n, n + 1
    edges = []
    for v in range(n):
        ws = g.edges[v]
        if ws:
            edges.append(ws)
        else:
            edges.append([sink_lose0] if owner[v] == 0 else [sink_lose1])
    edges.append([sink_lose0])
    edges.append([sink_lose1])
    soff, stgt, poff, ptgt = _csr(n + 2, edges)
    win, strat = kernel(n + 2, owner, prio, soff, stgt, poff, ptgt)
    win = list(win[:n])
    strat = [s if 0 <= s < n else -1 for s in strat[:n]]
    return Solution(win, strat)


@dataclass
class Check:
    """Truthy verdict with a diagnostic."""

    ok: bool
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def verify_strategy(g: ParityGame, player: int, strategy: Mapping[int, int], region) -> Check:
    """Is ``strategy`` winning for ``player`` from every position of ``region``?

    Keeps the chosen edge at the player's positions and all edges at the
    opponent's, then requires closure, no stuck player positions, and that every
    cycle inside the region has a maximum priority of the player's parity.
    """
    region = set(region)
    if not region:
        return Check(True)
    kept: dict[int, list[int]] = {}
    for v in region:
        if g.owner[v] == player:
            if not g.edges[v]:
                return Check(False, f"position {v}: player {player} is stuck")
            if v not in strategy:
                return Check(False, f"position {v}: strategy undefined")
            w = strategy[v]
            if w not in g.edges[v]:
                return Check(False, f"position {v}: move to {w} is not admissible")
            kept[v] = [w]
        else:
            kept[v] = list(g.edges[v])
        for w in kept[v]:
            if w not in region:
                return Check(False, f"position {v}: move to {w} leaves the region")
    # every cycle has the player's parity iff for every priority d of the wrong
    # parity, no cycle through a d-position lives in the subgraph of priorities <= d
    bad = sorted({g.priority[v] for v in region if g.priority[v] % 2 != player})
    for d in bad:
        sub = {v for v in region if g.priority[v] <= d}
        for comp in tarjan_scc(sorted(sub), lambda v: [w for w in kept[v] if w in sub]):
            cs = set(comp)
            if len(comp) == 1 and comp[0] not in kept[comp[0]]:
                continue
            if any(g.priority[v] == d for v in comp):
                return Check(False, f"cycle through {sorted(cs)[:6]} has maximal priority {d}")
    return Check(True)


def _play_winner(g: ParityGame, s0: Mapping[int, int], s1: Mapping[int, int], start: int) -> int:
    seen: dict[int, int] = {}
    path: list[int] = []
    v = start
    while v not in seen:
        seen[v] = len(path)
        path.append(v)
        if not g.edges[v]:
            return 1 - g.owner[v]
        v = (s0 if g.owner[v] == 0 else s1)[v]
    loop = path[seen[v]:]
    return max(g.priority[u] for u in loop) % 2


def brute_force_winner(g: ParityGame, bound: int = 10) -> list[int]:
    """Winner per position by enumerating all pairs of positional strategies."""
    if g.n > bound:
        raise GameError(f"game has {g.n} positions, oracle bound is {bound}")
    choices = [[], []]
    for p in (0, 1):
        vs = [v for v in range(g.n) if g.owner[v] == p and g.edges[v]]
        choices[p] = [dict(zip(vs, pick)) for pick in itertools.product(*(g.edges[v] for v in vs))]
    out = []
    for v in range(g.n):
        # player 0 wins iff some strategy of hers beats every counter-strategy
        won = any(all(_play_winner(g, s0, s1, v) == 0 for s1 in choices[1]) for s0 in choices[0])
        out.append(0 if won else 1)
    return out


def random_game(rng: random.Random, n: int, max_priority: int = 3, max_out: int = 3,
                dead_end_rate: float = 0.1) -> ParityGame:
    owner = [rng.randrange(2) for _ in range(n)]
    prio = [rng.randrange(max_priority + 1) for _ in range(n)]
    edges = []
    for _ in range(n):
        if rng.random() < dead_end_rate:
            edges.append([])
        else:
            k = rng.randint(1, max_out)
            edges.append(sorted(set(rng.randrange(n) for _ in range(k))))
    return ParityGame(owner, prio, edges)


def to_dot(g: ParityGame, name: str = "game", winner: Sequence[int] | None = None) -> str:
    """Circles for player 0, boxes for player 1; labels show the priority."""
    lines = [f"digraph {name} {{"]
    for v in range(g.n):
        shape = "circle" if g.owner[v] == 0 else "box"
        extra = ""
        if winner is not None:
            extra = ', style=filled, fillcolor="%s"' % ("palegreen" if winner[v] == 0 else "lightpink")
        lines.append(f'  n{v} [shape={shape}, label="{v}:{g.priority[v]}"{extra}];')
    for v in range(g.n):
        for w in g.edges[v]:
            lines.append(f"  n{v} -> n{w};")
    lines.append("}")
    return "\n".join(lines) + "\n"
