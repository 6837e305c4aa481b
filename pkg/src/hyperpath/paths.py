"""Longest increasing paths, antipodal path counts and reachability in Q^d_p."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .edge_sampler import RandomSubgraph, SubcubeOracle
from .errors import DimensionTooLarge, InvalidInput, NotComparable
from .hypercube import WORD_DIM_CAP, Subcube, full_vertex, is_leq, ones

CLASSES = ("full", "d_minus_1", "d_minus_2", "shorter")

# Bytes of per-vertex state the full-cube kernels may allocate.
MEMORY_BUDGET = int(os.environ.get("HYPERPATH_MEMORY_BUDGET", 2 << 30))

_DUMMY_MASK = np.zeros(1, np.bool_)
_DUMMY_AMB = np.zeros(1, np.uint64)


@dataclass(frozen=True)
class PathResult:
    d: int
    length: int
    witness: tuple[int, ...]
    classification: str


def classify(length: int, d: int) -> str:
    gap = d - length
    return CLASSES[gap] if gap < 3 else "shorter"


def _kernel_args(g: RandomSubgraph):
    mask = g.mask if g.mask is not None else _DUMMY_MASK
    return np.uint64(g.seed), np.uint64(g.threshold), mask, g.mask is not None


def _require_dense(d: int, k: int, bytes_per_vertex: int):
    if d > WORD_DIM_CAP:
        raise DimensionTooLarge(f"d={d} exceeds the word cap {WORD_DIM_CAP}")
    if (bytes_per_vertex << k) > MEMORY_BUDGET:
        raise DimensionTooLarge(
            f"2^{k} vertices x {bytes_per_vertex} B exceeds the memory budget "
            f"of {MEMORY_BUDGET} B (set HYPERPATH_MEMORY_BUDGET)"
        )


def longest_increasing_path(g: RandomSubgraph, method: str = "search") -> PathResult:
    """Exact ``ℓ(Q^d_p)`` with one witness path.

    ``method="dense"`` runs the layered DP ``L(v) = max(L(u) + 1)`` over every
    vertex and backtracks from the smallest vertex attaining the maximum,
    always stepping to the smallest-valued predecessor.  ``method="search"``
    (default) computes the same length by memoised depth-first search that
    stops once no better path can exist; its witness starts at the smallest
    source in the lowest layer attaining ``ℓ`` and takes the smallest
    coordinate at each step.
    """
    d = g.d
    _require_dense(d, d, 1)
    seed, thr, mask, use_mask = _kernel_args(g)
    if method == "dense":
        free = np.arange(d, dtype=np.int64)
        L, _ = K.longest_and_counts(d, seed, thr, mask, use_mask, _DUMMY_AMB, free, True, 0)
        length = int(L.max())
        v = int(np.flatnonzero(L == length)[0])
        path = [v]
        while L[v]:
            for c in reversed(ones(v)):
                u = v & ~(1 << c)
                if L[u] == L[v] - 1 and g.present(u, c):
                    v = u
                    break
            else:  # pragma: no cover - DP invariant
                raise RuntimeError("DP table inconsistent with the edge oracle")
            path.append(v)
        path.reverse()
    elif method == "search":
        length, src, top = K.longest_by_search(d, seed, thr, mask, use_mask)
        length = int(length)
        goal = int(top[src])
        v = int(src)
        path = [v]
        while v.bit_count() < goal:
            for c in range(d):
                w = v | (1 << c)
                if w != v and top[w] == goal and g.present(v, c):
                    v = w
                    break
            else:  # pragma: no cover - memo invariant
                raise RuntimeError("search memo inconsistent with the edge oracle")
            path.append(v)
    else:
        raise InvalidInput(f"unknown method {method!r}")
    return PathResult(d, length, tuple(path), classify(length, d))


def longest_length(g: RandomSubgraph) -> int:
    """``ℓ(Q^d_p)`` without a witness (memoised search kernel)."""
    _require_dense(g.d, g.d, 1)
    seed, thr, mask, use_mask = _kernel_args(g)
    return int(K.longest_by_search(g.d, seed, thr, mask, use_mask)[0])


def antipodal_pair_connected(g: RandomSubgraph, u: int) -> bool:
    """Is there a ``u``-to-complement path moving away from ``u`` at every step?"""
    d = g.d
    _require_dense(d, d, 1)
    free = np.arange(d, dtype=np.int64)
    amb = K._ambient_table(np.uint64(0), free, np.uint64(u))
    seed, thr, mask, use_mask = _kernel_args(g)
    reach = K.reach_from_bottom(d, seed, thr, mask, use_mask, amb, free, False)
    return bool(reach[-1])


def count_antipodal_paths(g: RandomSubgraph) -> int:
    """Exact number of increasing **0** → **1** paths with every edge present."""
    d = g.d
    limbs = max(1, -(-math.factorial(d).bit_length() // K.LIMB_BITS))
    _require_dense(d, d, 2 + 8 * limbs)
    seed, thr, mask, use_mask = _kernel_args(g)
    free = np.arange(d, dtype=np.int64)
    _, counts = K.longest_and_counts(d, seed, thr, mask, use_mask, _DUMMY_AMB, free, True, limbs)
    total = 0
    for i, limb in enumerate(counts[-1]):
        total |= int(limb) << (K.LIMB_BITS * i)
    return total


def _neighbours_present(g: RandomSubgraph, x: int, coords: np.ndarray, up: bool) -> list[int]:
    if coords.size == 0:
        return []
    ok = g.present_up(x, coords) if up else g.present_down(x, coords)
    return [int(c) for c in coords[ok]]


def _coord_array(mask: int, d: int) -> np.ndarray:
    raw = np.frombuffer(mask.to_bytes((d + 7) // 8, "little"), dtype=np.uint8)
    return np.flatnonzero(np.unpackbits(raw, bitorder="little")[:d])


def percolates_to_layer(g: RandomSubgraph, side: str, k: int) -> bool:
    """Does **0** reach layer ``k`` (or **1** reach layer ``d - k``)?

    Depth-first search over present edges touching only layers ``<= k``
    (resp. ``>= d - k``); stops at the first vertex of the target layer.
    """
    d = g.d
    if not 0 <= k <= d:
        raise InvalidInput(f"k={k} outside [0, {d}]")
    if side not in ("from_zero", "from_one"):
        raise InvalidInput(f"unknown side {side!r}")
    if k == 0:
        return True
    up = side == "from_zero"
    start = 0 if up else full_vertex(d)
    full = full_vertex(d)
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        depth = x.bit_count() if up else d - x.bit_count()
        coords = _coord_array(full & ~x if up else x, d)
        kids = []
        for c in _neighbours_present(g, x, coords, up):
            y = x ^ (1 << c)
            if y not in seen:
                if depth + 1 == k:
                    return True
                seen.add(y)
                kids.append(y)
        stack.extend(reversed(kids))
    return False


def _unwrap(g) -> RandomSubgraph:
    return g.g if isinstance(g, SubcubeOracle) else g


def increasing_path_between(g, u: int, v: int) -> list[int] | None:
    """An increasing path of present edges from ``u`` to ``v``, or None.

    Only edges inside ``Q(u, v)`` are consulted.  ``g`` may be a
    :class:`RandomSubgraph` or a :class:`SubcubeOracle` containing both ends.
    """
    if not is_leq(u, v):
        raise NotComparable(f"{u:#x} is not below {v:#x}")
    if isinstance(g, SubcubeOracle) and not (u in g.subcube and v in g.subcube):
        return None
    g = _unwrap(g)
    if u == v:
        return [u]
    sub = Subcube(u, v)
    free_list = sub.free_coords()
    k = len(free_list)
    if g.d <= WORD_DIM_CAP and (10 << k) <= MEMORY_BUDGET:
        return _dense_between(g, u, free_list)
    return _sparse_between(g, u, v)


def _dense_between(g: RandomSubgraph, u: int, free_list: list[int]) -> list[int] | None:
    k = len(free_list)
    free = np.array(free_list, dtype=np.int64)
    amb = K._ambient_table(np.uint64(u), free, np.uint64(0))
    seed, thr, mask, use_mask = _kernel_args(g)
    reach = K.reach_from_bottom(g.d, seed, thr, mask, use_mask, amb, free, False)
    s = (1 << k) - 1
    if not reach[s]:
        return None
    path = [int(amb[s])]
    while s:
        for j in range(k - 1, -1, -1):
            t = s ^ (1 << j)
            if (s >> j) & 1 and reach[t] and g.present(int(amb[t]), free_list[j]):
                s = t
                break
        path.append(int(amb[s]))
    path.reverse()
    return path


def _sparse_between(g: RandomSubgraph, u: int, v: int) -> list[int] | None:
    parent = {u: None}
    stack = [u]
    while stack:
        x = stack.pop()
        if x == v:
            path = []
            while x is not None:
                path.append(x)
                x = parent[x]
            return path[::-1]
        coords = _coord_array(v & ~x, g.d)
        kids = []
        for c in _neighbours_present(g, x, coords, True):
            y = x | (1 << c)
            if y not in parent:
                parent[y] = x
                kids.append(y)
        stack.extend(reversed(kids))
    return None


def exists_increasing_path_between(g, u: int, v: int) -> bool:
    return increasing_path_between(g, u, v) is not None


def path_is_valid(g, path) -> bool:
    """Every step adds exactly one coordinate along a present edge."""
    for a, b in zip(path, path[1:]):
        x = b & ~a
        if a & ~b or x == 0 or x & (x - 1):
            return False
        if not g.present(a, x.bit_length() - 1):
            return False
    return True
