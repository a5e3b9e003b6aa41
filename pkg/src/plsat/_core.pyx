# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels.  Step-for-step ports of ``plsat._pure``."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t, int32_t, int8_t
from libcpp.vector cimport vector

cnp.import_array()

NAME = "compiled"

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15ULL
cdef int SAT = 1, UNSAT = 0, TIMEOUT = 2


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


def build_alias(p):
    cdef cnp.ndarray[cnp.float64_t] pa = np.ascontiguousarray(p, dtype=np.float64)
    cdef Py_ssize_t n = pa.shape[0], i
    cdef cnp.ndarray[cnp.float64_t] prob = np.zeros(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.int64_t] alias = np.arange(n, dtype=np.int64)
    cdef vector[double] scaled
    cdef vector[int64_t] small, large
    cdef int64_t lo, hi
    scaled.resize(n)
    for i in range(n):
        scaled[i] = pa[i] * n
    for i in range(n):
        if scaled[i] < 1.0:
            small.push_back(i)
    for i in range(n):
        if scaled[i] >= 1.0:
            large.push_back(i)
    while small.size() and large.size():
        lo = small.back()
        small.pop_back()
        hi = large.back()
        large.pop_back()
        prob[lo] = scaled[lo]
        alias[lo] = hi
        scaled[hi] = (scaled[hi] + scaled[lo]) - 1.0
        if scaled[hi] < 1.0:
            small.push_back(hi)
        else:
            large.push_back(hi)
    for i in range(<Py_ssize_t>large.size()):
        prob[large[i]] = 1.0
    for i in range(<Py_ssize_t>small.size()):
        prob[small[i]] = 1.0
    return prob, alias


def sample_clauses(prob, alias, Py_ssize_t m, int k, seed, Py_ssize_t start=0):
    cdef double[::1] pr = np.ascontiguousarray(prob, dtype=np.float64)
    cdef int64_t[::1] al = np.ascontiguousarray(alias, dtype=np.int64)
    out_arr = np.empty((m, k), dtype=np.int32)
    cdef int32_t[:, ::1] out = out_arr
    cdef Py_ssize_t n = pr.shape[0], j
    cdef double dn = <double>n
    cdef uint64_t root = mix64(<uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF))
    cdef uint64_t key, word, a
    cdef int64_t attempts = 0
    cdef int64_t v, tv
    cdef int s, t, tn, ok
    cdef double x, frac
    cdef int64_t draws[64]
    cdef int negs[64]
    if k > 64:
        raise ValueError("clause width above 64 is not supported")
    with nogil:
        for j in range(m):
            key = mix64(root + GAMMA * <uint64_t>(start + j + 1))
            a = 0
            while True:
                attempts += 1
                for s in range(k):
                    word = mix64(key + GAMMA * (a * <uint64_t>(k + 1) + <uint64_t>(s + 1)))
                    x = <double>(word >> 11) * (1.0 / 9007199254740992.0) * dn
                    v = <int64_t>x
                    if v > n - 1:
                        v = n - 1
                    frac = x - <double>v
                    if not (frac < pr[v]):
                        v = al[v]
                    draws[s] = v
                    negs[s] = s
                # stable insertion sort of slots by drawn variable
                for s in range(1, k):
                    tv = draws[s]
                    tn = negs[s]
                    t = s - 1
                    while t >= 0 and draws[t] > tv:
                        draws[t + 1] = draws[t]
                        negs[t + 1] = negs[t]
                        t -= 1
                    draws[t + 1] = tv
                    negs[t + 1] = tn
                ok = 1
                for s in range(1, k):
                    if draws[s] == draws[s - 1]:
                        ok = 0
                        break
                if ok:
                    word = mix64(key + GAMMA * (a * <uint64_t>(k + 1) + <uint64_t>(k + 1)))
                    for s in range(k):
                        if (word >> <uint64_t>negs[s]) & 1:
                            out[j, s] = <int32_t>(-(draws[s] + 1))
                        else:
                            out[j, s] = <int32_t>(draws[s] + 1)
                    break
                a += 1
    return out_arr, int(attempts)


def scc(Py_ssize_t num_nodes, indptr, indices):
    cdef int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef int64_t[::1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    comp_arr = np.full(num_nodes, -1, dtype=np.int64)
    cdef int64_t[::1] comp = comp_arr
    cdef vector[int64_t] index, low, stack, work_v, work_pos
    cdef vector[char] onstack
    cdef int64_t counter = 0, ncomp = 0, root, v, w, u, p
    index.assign(num_nodes, -1)
    low.assign(num_nodes, 0)
    onstack.assign(num_nodes, 0)
    with nogil:
        for root in range(num_nodes):
            if index[root] != -1:
                continue
            index[root] = counter
            low[root] = counter
            counter += 1
            stack.push_back(root)
            onstack[root] = 1
            work_v.push_back(root)
            work_pos.push_back(ip[root])
            while work_v.size():
                v = work_v.back()
                p = work_pos.back()
                if p < ip[v + 1]:
                    w = ix[p]
                    work_pos[work_pos.size() - 1] = p + 1
                    if index[w] == -1:
                        index[w] = counter
                        low[w] = counter
                        counter += 1
                        stack.push_back(w)
                        onstack[w] = 1
                        work_v.push_back(w)
                        work_pos.push_back(ip[w])
                    elif onstack[w] and index[w] < low[v]:
                        low[v] = index[w]
                else:
                    work_v.pop_back()
                    work_pos.pop_back()
                    if work_v.size():
                        u = work_v.back()
                        if low[v] < low[u]:
                            low[u] = low[v]
                    if low[v] == index[v]:
                        while True:
                            w = stack.back()
                            stack.pop_back()
                            onstack[w] = 0
                            comp[w] = ncomp
                            if w == v:
                                break
                        ncomp += 1
    return comp_arr


cdef inline int litval(const int8_t* val, int64_t c) noexcept nogil:
    cdef int8_t x = val[c >> 1]
    if x < 0:
        return -1
    return x ^ <int>(c & 1)


def dpll(int64_t n, lits, int k, order, int phase, int64_t max_decisions):
    cdef cnp.ndarray[cnp.int64_t] la = np.ascontiguousarray(lits, dtype=np.int64)
    cdef int64_t total = la.shape[0]
    cdef int64_t m = total // k if k else 0
    cdef vector[int64_t] cl
    cdef vector[int8_t] val
    cdef vector[int64_t] trail, trail_lim, pos
    cdef vector[char] flipped
    cdef vector[vector[int64_t]] watches
    cdef int64_t[::1] od = np.ascontiguousarray(order, dtype=np.int64) - 1
    cdef int64_t i, j, end, ci, base, first, t, p, false_lit, lim, d, v, c, ptr = 0
    cdef int64_t decisions = 0, propagations = 0, qhead = 0
    cdef int found, conflict, status = -1, x
    cdef int8_t* vp
    cl.resize(total)
    for i in range(total):
        v = la[i]
        cl[i] = 2 * (v - 1) + 0 if v > 0 else 2 * (-v - 1) + 1
    val.assign(n, -1)
    pos.assign(n, 0)
    for i in range(n):
        pos[od[i]] = i
    watches.resize(2 * n)
    vp = val.data()
    if k == 1:
        for i in range(m):
            c = cl[i]
            x = litval(vp, c)
            if x == 0:
                status = UNSAT
                break
            if x < 0:
                val[c >> 1] = 1 - <int8_t>(c & 1)
                trail.push_back(c)
    else:
        for ci in range(m):
            watches[cl[ci * k]].push_back(ci)
            watches[cl[ci * k + 1]].push_back(ci)

    with nogil:
        while status < 0:
            conflict = 0
            while qhead < <int64_t>trail.size():
                p = trail[qhead]
                qhead += 1
                false_lit = p ^ 1
                i = 0
                j = 0
                end = watches[false_lit].size()
                while i < end:
                    ci = watches[false_lit][i]
                    i += 1
                    base = ci * k
                    if cl[base] == false_lit:
                        cl[base] = cl[base + 1]
                        cl[base + 1] = false_lit
                    first = cl[base]
                    if litval(vp, first) == 1:
                        watches[false_lit][j] = ci
                        j += 1
                        continue
                    found = 0
                    for t in range(base + 2, base + k):
                        if litval(vp, cl[t]) != 0:
                            cl[base + 1] = cl[t]
                            cl[t] = false_lit
                            watches[cl[base + 1]].push_back(ci)
                            found = 1
                            break
                    if found:
                        continue
                    watches[false_lit][j] = ci
                    j += 1
                    if litval(vp, first) == 0:
                        while i < end:
                            watches[false_lit][j] = watches[false_lit][i]
                            j += 1
                            i += 1
                        conflict = 1
                    else:
                        val[first >> 1] = 1 - <int8_t>(first & 1)
                        trail.push_back(first)
                        propagations += 1
                watches[false_lit].resize(j)
                if conflict:
                    break

            if conflict:
                while True:
                    if trail_lim.size() == 0:
                        status = UNSAT
                        break
                    lim = trail_lim.back()
                    d = trail[lim]
                    for i in range(lim, <int64_t>trail.size()):
                        v = trail[i] >> 1
                        val[v] = -1
                        if pos[v] < ptr:
                            ptr = pos[v]
                    trail.resize(lim)
                    if flipped.back():
                        trail_lim.pop_back()
                        flipped.pop_back()
                        continue
                    flipped[flipped.size() - 1] = 1
                    c = d ^ 1
                    val[c >> 1] = 1 - <int8_t>(c & 1)
                    trail.push_back(c)
                    qhead = lim
                    break
                continue

            while ptr < n and val[od[ptr]] >= 0:
                ptr += 1
            if ptr == n:
                status = SAT
                break
            if max_decisions >= 0 and decisions >= max_decisions:
                status = TIMEOUT
                break
            decisions += 1
            v = od[ptr]
            trail_lim.push_back(trail.size())
            flipped.push_back(0)
            c = 2 * v + (0 if phase else 1)
            val[v] = 1 - <int8_t>(c & 1)
            trail.push_back(c)

    out = np.empty(n, dtype=np.int8)
    for i in range(n):
        out[i] = val[i] if val[i] > 0 else 0
    return status, out, int(decisions), int(propagations)
