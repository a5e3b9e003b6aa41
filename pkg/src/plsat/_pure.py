"""Pure Python / numpy kernels.

Reference implementations of the hot loops.  ``plsat._core`` (Cython)
implements the same algorithms step for step, so both backends return
bit-identical results; ``plsat.kernels`` picks one at import time.
"""
from __future__ import annotations

import numpy as np

from .rng import clause_keys, stream_words, unit_interval

NAME = "pure"

SAT, UNSAT, TIMEOUT = 1, 0, 2


def build_alias(p):
    """Vose alias table for the probability vector ``p`` (must sum to 1)."""
    p = np.asarray(p, dtype=np.float64)
    n = p.shape[0]
    scaled = (p * n).tolist()
    prob = [0.0] * n
    alias = list(range(n))
    small = [i for i in range(n) if scaled[i] < 1.0]
    large = [i for i in range(n) if scaled[i] >= 1.0]
    while small and large:
        lo = small.pop()
        hi = large.pop()
        prob[lo] = scaled[lo]
        alias[lo] = hi
        scaled[hi] = (scaled[hi] + scaled[lo]) - 1.0
        if scaled[hi] < 1.0:
            small.append(hi)
        else:
            large.append(hi)
    for i in large:
        prob[i] = 1.0
    for i in small:
        prob[i] = 1.0
    return np.array(prob, dtype=np.float64), np.array(alias, dtype=np.int64)


def _draw(prob, alias, words):
    n = prob.shape[0]
    x = unit_interval(words) * n
    i = np.minimum(x.astype(np.int64), n - 1)
    frac = x - i
    return np.where(frac < prob[i], i, alias[i])


def sample_clauses(prob, alias, m, k, seed, start=0):
    """Sample clauses ``start .. start+m-1`` of the stream.

    Returns ``(lits, attempts)`` where ``lits`` is an ``(m, k)`` int32
    array of signed DIMACS literals sorted by variable, and ``attempts``
    counts every k-draw including rejected ones.
    """
    prob = np.asarray(prob, dtype=np.float64)
    alias = np.asarray(alias, dtype=np.int64)
    out = np.empty((m, k), dtype=np.int32)
    keys = clause_keys(seed, start, m)
    pending = np.arange(m)
    attempts = 0
    a = 0
    while pending.size:
        kk = keys[pending]
        attempts += pending.size
        draws = np.empty((pending.size, k), dtype=np.int64)
        for s in range(k):
            draws[:, s] = _draw(prob, alias, stream_words(kk, a, s, k))
        order = np.argsort(draws, axis=1, kind="stable")
        svars = np.take_along_axis(draws, order, axis=1)
        ok = np.all(np.diff(svars, axis=1) != 0, axis=1)
        if ok.any():
            sw = stream_words(kk[ok], a, k, k)
            neg = (sw[:, None] >> np.arange(k, dtype=np.uint64)[None, :]) & np.uint64(1)
            neg = np.take_along_axis(neg.astype(np.int64), order[ok], axis=1)
            out[pending[ok]] = ((svars[ok] + 1) * (1 - 2 * neg)).astype(np.int32)
        pending = pending[~ok]
        a += 1
    return out, attempts


def scc(num_nodes, indptr, indices):
    """Tarjan SCC; component ids are issued in reverse topological order."""
    indptr = np.asarray(indptr).tolist()
    indices = np.asarray(indices).tolist()
    index = [-1] * num_nodes
    low = [0] * num_nodes
    onstack = [False] * num_nodes
    comp = [-1] * num_nodes
    stack = []
    counter = 0
    ncomp = 0
    for root in range(num_nodes):
        if index[root] != -1:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        onstack[root] = True
        work = [[root, indptr[root]]]
        while work:
            frame = work[-1]
            v, pos = frame
            if pos < indptr[v + 1]:
                w = indices[pos]
                frame[1] = pos + 1
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    onstack[w] = True
                    work.append([w, indptr[w]])
                elif onstack[w] and index[w] < low[v]:
                    low[v] = index[w]
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    if low[v] < low[u]:
                        low[u] = low[v]
                if low[v] == index[v]:
                    while True:
                        w = stack.pop()
                        onstack[w] = False
                        comp[w] = ncomp
                        if w == v:
                            break
                    ncomp += 1
    return np.array(comp, dtype=np.int64)


def dpll(n, lits, k, order, phase, max_decisions):
    """Chronological-backtracking DPLL with two watched literals.

    ``lits`` is a flat array of signed DIMACS literals, ``k`` per clause.
    ``order`` lists 1-based variables by branching priority.  Returns
    ``(status, assignment, decisions, propagations)``.
    """
    lits = np.asarray(lits, dtype=np.int64)
    m = lits.shape[0] // k if k else 0
    # literal code: 2*(v-1) + negated
    cl = (2 * (np.abs(lits) - 1) + (lits < 0)).tolist()
    val = [-1] * n
    trail = []
    trail_lim = []
    flipped = []
    order = [int(v) - 1 for v in order]
    pos = [0] * n
    for idx, v in enumerate(order):
        pos[v] = idx
    ptr = 0
    decisions = 0
    propagations = 0
    watches = [[] for _ in range(2 * n)]

    def litval(c):
        x = val[c >> 1]
        return -1 if x < 0 else x ^ (c & 1)

    def assign(c):
        val[c >> 1] = 1 - (c & 1)
        trail.append(c)

    def assignment():
        return np.array([max(x, 0) for x in val], dtype=np.int8)

    if k == 1:
        for c in cl:
            x = litval(c)
            if x == 0:
                return UNSAT, assignment(), 0, 0
            if x < 0:
                assign(c)
    else:
        for ci in range(m):
            watches[cl[ci * k]].append(ci)
            watches[cl[ci * k + 1]].append(ci)

    qhead = 0
    while True:
        conflict = False
        while qhead < len(trail):
            p = trail[qhead]
            qhead += 1
            false_lit = p ^ 1
            ws = watches[false_lit]
            i = j = 0
            end = len(ws)
            while i < end:
                ci = ws[i]
                i += 1
                base = ci * k
                if cl[base] == false_lit:
                    cl[base] = cl[base + 1]
                    cl[base + 1] = false_lit
                first = cl[base]
                if litval(first) == 1:
                    ws[j] = ci
                    j += 1
                    continue
                found = False
                for t in range(base + 2, base + k):
                    if litval(cl[t]) != 0:
                        cl[base + 1] = cl[t]
                        cl[t] = false_lit
                        watches[cl[base + 1]].append(ci)
                        found = True
                        break
                if found:
                    continue
                ws[j] = ci
                j += 1
                if litval(first) == 0:
                    while i < end:
                        ws[j] = ws[i]
                        j += 1
                        i += 1
                    conflict = True
                else:
                    assign(first)
                    propagations += 1
            del ws[j:]
            if conflict:
                break

        if conflict:
            while True:
                if not trail_lim:
                    return UNSAT, assignment(), decisions, propagations
                lim = trail_lim[-1]
                d = trail[lim]
                for c in trail[lim:]:
                    v = c >> 1
                    val[v] = -1
                    if pos[v] < ptr:
                        ptr = pos[v]
                del trail[lim:]
                if flipped[-1]:
                    trail_lim.pop()
                    flipped.pop()
                    continue
                flipped[-1] = True
                assign(d ^ 1)
                qhead = lim
                break
            continue

        while ptr < n and val[order[ptr]] >= 0:
            ptr += 1
        if ptr == n:
            return SAT, assignment(), decisions, propagations
        if 0 <= max_decisions <= decisions:
            return TIMEOUT, assignment(), decisions, propagations
        decisions += 1
        v = order[ptr]
        trail_lim.append(len(trail))
        flipped.append(False)
        assign(2 * v + (0 if phase else 1))
