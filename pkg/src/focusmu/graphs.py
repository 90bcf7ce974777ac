"""Small graph helpers shared by the game solver and the proof checker."""
from __future__ import annotations

from typing import Callable, Hashable, Iterable, Sequence


def tarjan_scc(nodes: Iterable[Hashable], succ: Callable[[Hashable], Iterable[Hashable]]) -> list[list]:
    """Strongly connected components, iterative Tarjan.  Components come out in reverse topological order."""
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    out: list[list] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ(w))))
                    advanced = True
                    break
                if w in on_stack and index[w] < low[v]:
                    low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out


def cyclic_nodes(nodes: Iterable[Hashable], succ: Callable[[Hashable], Iterable[Hashable]]) -> set:
    """Nodes lying on some cycle (non-trivial SCC or self-loop)."""
    res = set()
    for comp in tarjan_scc(nodes, succ):
        if len(comp) > 1:
            res.update(comp)
        else:
            v = comp[0]
            if v in set(succ(v)):
                res.add(v)
    return res


def reachable(starts: Iterable[Hashable], succ: Callable[[Hashable], Iterable[Hashable]]) -> set:
    seen = set(starts)
    stack = list(seen)
    while stack:
        v = stack.pop()
        for w in succ(v):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def predecessors(edges: Sequence[Sequence[int]]) -> list[list[int]]:
    pred: list[list[int]] = [[] for _ in edges]
    for v, ws in enumerate(edges):
        for w in ws:
            pred[w].append(v)
    return pred
