"""Compiled inner loops over all vertices of a (sub)cube.

A subcube is described by ``lo`` (ambient bits that are always one), ``free``
(ambient coordinates that vary, ascending) and ``xor`` (ambient bits flipped
after deposit, used to relabel an arbitrary antipodal pair as 0/1).  Local
index ``s`` in ``[0, 2**k)`` maps to ambient vertex ``(lo | deposit(s)) ^ xor``.
Iterating ``s`` in increasing numeric order is a topological order of the
increasing edges, so each pass is a single sweep.

All hashing matches :mod:`hyperpath.edge_sampler` for ``d <= WORD_DIM_CAP``.
"""

import numpy as np
from numba import njit

_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_U0 = np.uint64(0)
_U1 = np.uint64(1)
_S11 = np.uint64(11)
_S27 = np.uint64(27)
_S30 = np.uint64(30)
_S31 = np.uint64(31)

LIMB_BITS = 62
_LIMB_MASK = np.uint64((1 << LIMB_BITS) - 1)
_LIMB_SHIFT = np.uint64(LIMB_BITS)


@njit(inline="always")
def _fmix(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(inline="always")
def _present(d, seed, thr, mask, use_mask, lower, c):
    enc = lower * np.uint64(d) + np.uint64(c)
    if use_mask:
        return mask[enc]
    return (_fmix(seed ^ enc) >> _S11) < thr


@njit(cache=True)
def _ambient_table(lo, free, xor):
    k = free.size
    n = 1 << k
    amb = np.empty(n, np.uint64)
    amb[0] = lo ^ xor
    for s in range(1, n):
        j = 0
        while not (s >> j) & 1:
            j += 1
        amb[s] = amb[s & (s - 1)] ^ (_U1 << np.uint64(free[j]))
    return amb


@njit(cache=True, nogil=True)
def longest_and_counts(d, seed, thr, mask, use_mask, amb, free, identity, limbs):
    """Longest increasing path ending at every vertex, plus path counts.

    Returns ``(L, counts)``; ``counts`` has shape ``(n, limbs)`` and holds the
    number of increasing paths from local vertex 0 in base-2**62 limbs
    (``limbs == 0`` skips counting).  A length candidate is only hashed when
    it could improve the running maximum, and a count is only propagated from
    vertices reachable from 0.
    """
    k = free.size
    n = 1 << k
    L = np.zeros(n, np.uint8)
    counts = np.zeros((n if limbs > 0 else 1, max(limbs, 1)), np.uint64)
    reach = np.zeros(n if limbs > 0 else 1, np.uint8)
    if limbs > 0:
        counts[0, 0] = _U1
        reach[0] = 1
    for s in range(1, n):
        pc = 0
        t = s
        while t:
            t &= t - 1
            pc += 1
        best = 0
        for j in range(k):
            if not (s >> j) & 1:
                continue
            u = s ^ (1 << j)
            cand = L[u] + 1
            need_len = cand > best
            need_cnt = limbs > 0 and reach[u] != 0
            if not (need_len or need_cnt):
                continue
            if identity:
                lower = np.uint64(u)
            else:
                lower = amb[u] & ~(_U1 << np.uint64(free[j]))
            if not _present(d, seed, thr, mask, use_mask, lower, free[j]):
                continue
            if need_len:
                best = cand
            if need_cnt:
                reach[s] = 1
                carry = _U0
                for i in range(limbs):
                    v = counts[s, i] + counts[u, i] + carry
                    counts[s, i] = v & _LIMB_MASK
                    carry = v >> _LIMB_SHIFT
            elif best == pc:
                break
        L[s] = best
    return L, counts


@njit(cache=True, nogil=True)
def reach_from_bottom(d, seed, thr, mask, use_mask, amb, free, identity):
    """``reach[s]`` is 1 iff local vertex ``s`` is reachable from local 0."""
    k = free.size
    n = 1 << k
    reach = np.zeros(n, np.uint8)
    reach[0] = 1
    for s in range(1, n):
        for j in range(k):
            if not (s >> j) & 1:
                continue
            u = s ^ (1 << j)
            if not reach[u]:
                continue
            if identity:
                lower = np.uint64(u)
            else:
                lower = amb[u] & ~(_U1 << np.uint64(free[j]))
            if _present(d, seed, thr, mask, use_mask, lower, free[j]):
                reach[s] = 1
                break
    return reach


@njit(cache=True, nogil=True)
def longest_batch(d, seeds, thr, free):
    """Longest path length on the full cube for many seeds."""
    n = 1 << d
    out = np.zeros(seeds.size, np.int64)
    dummy_mask = np.zeros(1, np.bool_)
    dummy_amb = np.zeros(1, np.uint64)
    for r in range(seeds.size):
        L, _ = longest_and_counts(d, seeds[r], thr, dummy_mask, False, dummy_amb, free, True, 0)
        best = 0
        for s in range(n):
            if L[s] > best:
                best = L[s]
        out[r] = best
    return out


@njit(cache=True, nogil=True)
def _popcount(v):
    c = 0
    while v:
        v &= v - 1
        c += 1
    return c


@njit(cache=True, nogil=True)
def longest_by_search(d, seed, thr, mask, use_mask):
    """Exact longest increasing path on the full cube by memoised search.

    ``top[v]`` is the highest layer reachable from ``v`` by an increasing
    path (255 = not yet computed).  Sources are tried layer by layer from the
    bottom; a source in layer ``a`` can give at most ``d - a``, so the scan
    stops once that cannot beat the best found.  Reaching layer ``d`` is
    final, which lets the search return as soon as the all-one vertex is hit
    while every memo entry stays exact.

    Returns ``(length, source, top)``.
    """
    n = 1 << d
    top = np.full(n, 255, np.uint8)
    stack_v = np.empty(d + 1, np.int64)
    stack_c = np.empty(d + 1, np.int64)
    stack_h = np.empty(d + 1, np.int64)
    best = 0
    best_src = 0
    for a in range(d + 1):
        if d - a <= best:
            break
        v = (1 << a) - 1
        while v < n:
            if top[v] == 255:
                sp = 0
                stack_v[0] = v
                stack_c[0] = 0
                stack_h[0] = a
                while sp >= 0:
                    x = stack_v[sp]
                    if stack_h[sp] == d:
                        for i in range(sp + 1):
                            top[stack_v[i]] = d
                        break
                    c = stack_c[sp]
                    pushed = False
                    while c < d:
                        if not (x >> c) & 1:
                            w = x | (1 << c)
                            hw = top[w]
                            if hw == 255 or hw > stack_h[sp]:
                                if _present(d, seed, thr, mask, use_mask, np.uint64(x), c):
                                    if hw == 255:
                                        stack_c[sp] = c + 1
                                        sp += 1
                                        stack_v[sp] = w
                                        stack_c[sp] = 0
                                        stack_h[sp] = _popcount(w)
                                        pushed = True
                                        break
                                    stack_h[sp] = hw
                                    if hw == d:
                                        break
                        c += 1
                    if pushed:
                        continue
                    if stack_h[sp] == d:
                        continue
                    top[x] = stack_h[sp]
                    sp -= 1
                    if sp >= 0 and top[x] > stack_h[sp]:
                        stack_h[sp] = top[x]
            gain = top[v] - a
            if gain > best:
                best = gain
                best_src = v
                if best == d - a:
                    break
            if a == 0:
                break
            low = v & -v
            ripple = v + low
            v = (((ripple ^ v) >> 2) // low) | ripple
    return best, best_src, top


@njit(cache=True, nogil=True)
def search_batch(d, seeds, thr):
    out = np.zeros(seeds.size, np.int64)
    dummy_mask = np.zeros(1, np.bool_)
    for r in range(seeds.size):
        out[r] = longest_by_search(d, seeds[r], thr, dummy_mask, False)[0]
    return out
