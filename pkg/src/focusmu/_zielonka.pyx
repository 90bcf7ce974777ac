# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Zielonka kernel; same contract as ``_zielonka_py.zielonka``."""
from libc.stdlib cimport malloc, free


cdef class _Solver:
    cdef int n
    cdef int* owner
    cdef int* prio
    cdef int* soff
    cdef int* stgt
    cdef int* poff
    cdef int* ptgt
    cdef int* gid
    cdef int* win
    cdef int* strat
    cdef int* stamp
    cdef int* cnt
    cdef int* queue
    cdef int next_gid
    cdef int cur_stamp

    def __cinit__(self, int n, owner, prio, soff, stgt, poff, ptgt):
        cdef int i
        cdef int m = len(stgt)
        self.n = n
        self.owner = <int*>malloc((n + 1) * sizeof(int))
        self.prio = <int*>malloc((n + 1) * sizeof(int))
        self.soff = <int*>malloc((n + 1) * sizeof(int))
        self.poff = <int*>malloc((n + 1) * sizeof(int))
        self.stgt = <int*>malloc((m + 1) * sizeof(int))
        self.ptgt = <int*>malloc((m + 1) * sizeof(int))
        self.gid = <int*>malloc((n + 1) * sizeof(int))
        self.win = <int*>malloc((n + 1) * sizeof(int))
        self.strat = <int*>malloc((n + 1) * sizeof(int))
        self.stamp = <int*>malloc((n + 1) * sizeof(int))
        self.cnt = <int*>malloc((n + 1) * sizeof(int))
        self.queue = <int*>malloc((n + 1) * sizeof(int))
        if (not self.owner or not self.prio or not self.soff or not self.poff or not self.stgt
                or not self.ptgt or not self.gid or not self.win or not self.strat
                or not self.stamp or not self.cnt or not self.queue):
            raise MemoryError()
        for i in range(n):
            self.owner[i] = owner[i]
            self.prio[i] = prio[i]
            self.gid[i] = 0
            self.win[i] = 0
            self.strat[i] = -1
            self.stamp[i] = 0
            self.cnt[i] = 0
        for i in range(n + 1):
            self.soff[i] = soff[i]
            self.poff[i] = poff[i]
        for i in range(m):
            self.stgt[i] = stgt[i]
            self.ptgt[i] = ptgt[i]
        self.next_gid = 0
        self.cur_stamp = 0

    def __dealloc__(self):
        free(self.owner); free(self.prio); free(self.soff); free(self.poff)
        free(self.stgt); free(self.ptgt); free(self.gid); free(self.win)
        free(self.strat); free(self.stamp); free(self.cnt); free(self.queue)

    cdef int attractor(self, int g, int* target, int tn, int p):
        """Fills ``queue`` with the attractor; returns its length.  Members get stamp == -cur_stamp."""
        cdef int st, i, k, j, v, w, c, qn
        self.cur_stamp += 1
        st = self.cur_stamp
        qn = 0
        for i in range(tn):
            v = target[i]
            self.stamp[v] = -st
            self.queue[qn] = v
            qn += 1
        i = 0
        while i < qn:
            w = self.queue[i]
            i += 1
            for k in range(self.poff[w], self.poff[w + 1]):
                v = self.ptgt[k]
                if self.gid[v] != g or self.stamp[v] == -st:
                    continue
                if self.owner[v] == p:
                    self.strat[v] = w
                    self.stamp[v] = -st
                    self.queue[qn] = v
                    qn += 1
                else:
                    if self.stamp[v] != st:
                        self.stamp[v] = st
                        c = 0
                        for j in range(self.soff[v], self.soff[v + 1]):
                            if self.gid[self.stgt[j]] == g:
                                c += 1
                        self.cnt[v] = c
                    self.cnt[v] -= 1
                    if self.cnt[v] == 0:
                        self.stamp[v] = -st
                        self.queue[qn] = v
                        qn += 1
        return qn

    cdef void solve(self, int* nodes, int nn, int g):
        cdef int* alive = <int*>malloc((nn + 1) * sizeof(int))
        cdef int* buf = <int*>malloc((nn + 1) * sizeof(int))
        cdef int an = nn
        cdef int i, j, v, d, p, tn, qn, st, rn, g2, on
        for i in range(nn):
            alive[i] = nodes[i]
        while an > 0:
            d = -1
            for i in range(an):
                if self.prio[alive[i]] > d:
                    d = self.prio[alive[i]]
            p = d & 1
            tn = 0
            for i in range(an):
                v = alive[i]
                if self.prio[v] == d:
                    buf[tn] = v
                    tn += 1
            qn = self.attractor(g, buf, tn, p)
            st = self.cur_stamp
            self.next_gid += 1
            g2 = self.next_gid
            rn = 0
            for i in range(an):
                v = alive[i]
                if self.stamp[v] != -st:
                    buf[rn] = v
                    rn += 1
                    self.gid[v] = g2
            # top nodes are needed again below, so recompute them from ``alive`` later
            self.solve(buf, rn, g2)
            on = 0
            for i in range(rn):
                v = buf[i]
                self.gid[v] = g
            for i in range(rn):
                v = buf[i]
                if self.win[v] != p:
                    buf[on] = v
                    on += 1
            if on == 0:
                for i in range(an):
                    v = alive[i]
                    if self.stamp[v] == -st:
                        self.win[v] = p
                    if self.prio[v] == d and self.owner[v] == p:
                        for j in range(self.soff[v], self.soff[v + 1]):
                            if self.gid[self.stgt[j]] == g:
                                self.strat[v] = self.stgt[j]
                                break
                break
            qn = self.attractor(g, buf, on, 1 - p)
            st = self.cur_stamp
            for i in range(qn):
                v = self.queue[i]
                self.win[v] = 1 - p
                self.gid[v] = -1
            j = 0
            for i in range(an):
                v = alive[i]
                if self.stamp[v] != -st:
                    alive[j] = v
                    j += 1
            an = j
        for i in range(nn):
            self.gid[nodes[i]] = g
        free(alive)
        free(buf)

    def run(self):
        cdef int* nodes = <int*>malloc((self.n + 1) * sizeof(int))
        cdef int i
        for i in range(self.n):
            nodes[i] = i
        self.solve(nodes, self.n, 0)
        free(nodes)
        win = [self.win[i] for i in range(self.n)]
        strat = [self.strat[i] if self.owner[i] == self.win[i] else -1 for i in range(self.n)]
        return win, strat


def zielonka(n, owner, prio, soff, stgt, poff, ptgt):
    return _Solver(n, owner, prio, soff, stgt, poff, ptgt).run()
