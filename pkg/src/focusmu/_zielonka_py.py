"""Pure-Python Zielonka kernel.

Input is a dead-end-free game in compressed sparse row form.  Output is the
winner (0/1) of every position and a positional strategy (successor index, or
-1) that is winning for the owner wherever the owner wins.
"""
from __future__ import annotations


def zielonka(n, owner, prio, soff, stgt, poff, ptgt):
    gid = [0] * n
    win = [0] * n
    strat = [-1] * n
    stamp = [0] * n
    cnt = [0] * n
    state = {"gid": 0, "stamp": 0}

    def attractor(g, target, p):
        """Attractor for ``p`` to ``target`` inside subgame ``g``; sets p's attractor strategy."""
        state["stamp"] += 1
        st = state["stamp"]
        out = list(target)
        for v in out:
            stamp[v] = -st
        i = 0
        while i < len(out):
            w = out[i]
            i += 1
            for k in range(poff[w], poff[w + 1]):
                v = ptgt[k]
                if gid[v] != g or stamp[v] == -st:
                    continue
                if owner[v] == p:
                    strat[v] = w
                    stamp[v] = -st
                    out.append(v)
                else:
                    if stamp[v] != st:
                        stamp[v] = st
                        c = 0
                        for j in range(soff[v], soff[v + 1]):
                            if gid[stgt[j]] == g:
                                c += 1
                        cnt[v] = c
                    cnt[v] -= 1
                    if cnt[v] == 0:
                        stamp[v] = -st
                        out.append(v)
        return out, st

    def solve(nodes, g):
        alive = list(nodes)
        while alive:
            d = max(prio[v] for v in alive)
            p = d & 1
            top = [v for v in alive if prio[v] == d]
            attr, st = attractor(g, top, p)
            state["gid"] += 1
            g2 = state["gid"]
            rest = [v for v in alive if stamp[v] != -st]
            for v in rest:
                gid[v] = g2
            solve(rest, g2)
            for v in rest:
                gid[v] = g
            opp = [v for v in rest if win[v] != p]
            if not opp:
                for v in attr:
                    win[v] = p
                for v in top:
                    if owner[v] == p:
                        for j in range(soff[v], soff[v + 1]):
                            if gid[stgt[j]] == g:
                                strat[v] = stgt[j]
                                break
                break
            battr, st = attractor(g, opp, 1 - p)
            for v in battr:
                win[v] = 1 - p
                gid[v] = -1
            alive = [v for v in alive if stamp[v] != -st]
        for v in nodes:
            gid[v] = g

    solve(list(range(n)), 0)
    for v in range(n):
        if owner[v] != win[v]:
            strat[v] = -1
    return win, strat
