"""The Tree Construction algorithm: a capped, truncated, coordinate-avoiding BFS.

Starting from one corner of a subcube, the queue discipline is FIFO.  A
dequeued vertex ``x`` looks one layer further away from the root and
considers only unvisited neighbours whose connecting coordinate is neither
globally avoided nor in ``C_x`` (the branch coordinates hanging off its
root path, restricted to the side of ``x`` the tree grows into).  Edges are
queried in ascending coordinate order and the first ``child_cap`` present
ones become children.  Nothing is queried from a vertex whose next layer is
the truncation layer, so the deepest leaves sit one layer short of it.

The resulting leaves are "easily distinguishable": for two leaves ``w1, w2``
of a tree grown upwards, ``I(w2)`` meets ``C_T(w1, 0)``.
"""

from __future__ import annotations

import math
from collections import defaultdict, deque
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, TraceMismatch, VertexNotInTree
from .hypercube import Subcube, ones

FLAVORS = ("all", "zero_side", "one_side")


def default_child_cap(d: int) -> int:
    """``⌈ln d⌉``, at least 1."""
    return max(1, math.ceil(math.log(d)))


@dataclass(frozen=True)
class TreeGrowInput:
    subcube: Subcube
    root: int
    avoided: frozenset[int]
    trunc_layer: int
    oracle: object
    child_cap: int | None = None

    def __post_init__(self):
        s = self.subcube
        if self.root not in (s.lo, s.hi):
            raise InvalidInput("root must be one of the subcube's corners")
        if not s.lo.bit_count() <= self.trunc_layer <= s.hi.bit_count():
            raise InvalidInput("truncation layer outside the subcube's layer span")
        d = self.oracle.d
        if s.hi >> d:
            raise InvalidInput("subcube does not fit in the oracle's dimension")
        object.__setattr__(self, "avoided", frozenset(self.avoided))
        if any(not 0 <= c < d for c in self.avoided):
            raise InvalidInput("avoided coordinate out of range")
        if self.child_cap is not None and self.child_cap < 0:
            raise InvalidInput("child_cap must be non-negative")

    @property
    def d(self) -> int:
        return self.oracle.d

    @property
    def cap(self) -> int:
        return default_child_cap(self.d) if self.child_cap is None else self.child_cap

    @property
    def increasing(self) -> bool:
        return self.root == self.subcube.lo


@dataclass
class MonotoneTree:
    """Rooted monotone tree; vertices are int bit-sets.

    ``parent`` maps every non-root vertex to ``(parent, coordinate)``;
    ``children_coords`` lists, per vertex, the coordinates of its tree
    children in the order they were accepted.  ``order`` is the discovery
    order (root first).
    """

    root: int
    d: int
    orientation: str
    parent: dict[int, tuple[int, int]] = field(default_factory=dict)
    children_coords: dict[int, list[int]] = field(default_factory=dict)
    order: list[int] = field(default_factory=list)
    _cmask: dict[int, int] = field(default_factory=dict, repr=False)

    @classmethod
    def from_edges(cls, root: int, d: int, edges) -> "MonotoneTree":
        """Build from ``(parent, coordinate)`` pairs given in BFS order."""
        orient = None
        t = cls(root, d, "increasing")
        t.order.append(root)
        t.children_coords[root] = []
        for p, c in edges:
            if p not in t.children_coords:
                raise InvalidInput(f"parent {p:#x} not yet in tree")
            child = p ^ (1 << c)
            this = "increasing" if child > p else "decreasing"
            if orient is not None and this != orient:
                raise InvalidInput("tree is not monotone")
            orient = this
            t.parent[child] = (p, c)
            t.children_coords[p].append(c)
            t.children_coords[child] = []
            t.order.append(child)
        t.orientation = orient or "increasing"
        return t

    def __contains__(self, v: int) -> bool:
        return v in self.children_coords

    def __len__(self) -> int:
        return len(self.order)

    @property
    def leaves(self) -> frozenset[int]:
        return frozenset(v for v in self.order if not self.children_coords[v])

    def path_from_root(self, v: int) -> list[int]:
        if v not in self:
            raise VertexNotInTree(f"{v:#x} is not in the tree")
        path = [v]
        while v != self.root:
            v = self.parent[v][0]
            path.append(v)
        return path[::-1]

    def c_mask(self, v: int) -> int:
        """``C_T(v)`` as a bit mask."""
        if v in self._cmask:
            return self._cmask[v]
        path = self.path_from_root(v)
        acc = 0
        for a, nxt in zip(path, path[1:]):
            kids = 0
            for c in self.children_coords[a]:
                kids |= 1 << c
            acc |= kids & ~(a ^ nxt)
        self._cmask[v] = acc
        return acc

    def c_mask_side(self, v: int, flavor: str) -> int:
        m = self.c_mask(v)
        if flavor == "all":
            return m
        if flavor == "zero_side":
            return m & ~v
        if flavor == "one_side":
            return m & v
        raise InvalidInput(f"unknown flavor {flavor!r}")

    def layer_count(self, k: int) -> int:
        return sum(1 for v in self.order if v.bit_count() == k)


def c_set(tree: MonotoneTree, v: int, flavor: str = "all") -> frozenset[int]:
    return frozenset(ones(tree.c_mask_side(v, flavor)))


@dataclass(frozen=True)
class GrowEvent:
    """One dequeue.

    At that moment ``A ∪ B`` is the first ``discovered_before`` vertices of
    the discovery order and ``B`` the first ``completed_before``.
    ``candidates`` is ``Y_x`` as ascending coordinates, all of which were
    queried in that order; ``present`` lists those whose edge was present.
    """

    vertex: int
    discovered_before: int
    completed_before: int
    candidates: np.ndarray
    present: np.ndarray
    accepted: tuple[int, ...]


@dataclass
class GrowTrace:
    events: list[GrowEvent] = field(default_factory=list)


_EMPTY = np.zeros(0, dtype=np.int64)


def _bits(mask: int, d: int) -> np.ndarray:
    raw = np.frombuffer(mask.to_bytes((d + 7) // 8, "little"), dtype=np.uint8)
    return np.flatnonzero(np.unpackbits(raw, bitorder="little")[:d])


def tree_construct(inp: TreeGrowInput) -> tuple[MonotoneTree, GrowTrace]:
    d = inp.d
    inc = inp.increasing
    cap = inp.cap
    sub = inp.subcube
    free = sub.free_mask
    avoid = 0
    for c in inp.avoided:
        avoid |= 1 << c
    trunc = inp.trunc_layer
    step = 1 if inc else -1

    tree = MonotoneTree(inp.root, d, "increasing" if inc else "decreasing")
    trace = GrowTrace()
    order = tree.order
    order.append(inp.root)
    index = {inp.root: 0}
    cmask = tree._cmask
    cmask[inp.root] = 0

    # seen_from[z]: coordinates c with z ^ (1 << c) already discovered, for z
    # one layer closer to the root.  Each vertex registers ``depth`` entries.
    seen_from: dict[int, int] = defaultdict(int)
    corner = sub.lo if inc else sub.hi

    head = 0
    queue = deque([inp.root])
    while queue:
        x = queue.popleft()
        discovered_before = len(order)
        completed_before = head
        head += 1
        jx = x.bit_count() + step
        cx = cmask[x] & ~x if inc else cmask[x] & x

        cands = _EMPTY
        if (jx - trunc) * step < 0:
            pool = (free & ~x if inc else x & free) & ~avoid & ~cx & ~seen_from.get(x, 0)
            if pool:
                cands = _bits(pool, d)
        if cands.size:
            present = inp.oracle.present_up(x, cands) if inc else inp.oracle.present_down(x, cands)
            hits = cands[present]
        else:
            hits = _EMPTY
        accepted = [int(c) for c in hits[:cap]]

        kids = 0
        for c in accepted:
            kids |= 1 << c
        for c in accepted:
            y = x ^ (1 << c)
            index[y] = len(order)
            order.append(y)
            tree.parent[y] = (x, c)
            tree.children_coords[y] = []
            cmask[y] = cmask[x] | (kids & ~(1 << c))
            queue.append(y)
            rest = y ^ corner
            while rest:
                low = rest & -rest
                seen_from[y ^ low] |= low
                rest ^= low
        tree.children_coords[x] = accepted
        trace.events.append(
            GrowEvent(x, discovered_before, completed_before, cands, hits, tuple(accepted))
        )
    return tree, trace


@dataclass(frozen=True)
class Prop22Report:
    a: bool
    b: bool
    c: bool

    @property
    def all(self) -> bool:
        return self.a and self.b and self.c


def _check_trace(tree: MonotoneTree, trace: GrowTrace, cap: int):
    if len(trace.events) != len(tree.order):
        raise TraceMismatch("one dequeue event per tree vertex expected")
    for i, ev in enumerate(trace.events):
        if ev.vertex != tree.order[i]:
            raise TraceMismatch(f"event {i} dequeues {ev.vertex:#x}, expected FIFO order")
        if ev.completed_before != i or ev.discovered_before > len(tree.order):
            raise TraceMismatch(f"event {i} has inconsistent snapshot counters")
        if list(ev.accepted) != tree.children_coords.get(ev.vertex):
            raise TraceMismatch(f"event {i} children disagree with the tree")
        cands = ev.candidates
        if np.any(np.diff(cands) <= 0) or not np.isin(ev.present, cands).all():
            raise TraceMismatch(f"event {i} candidate list malformed")
        if [int(c) for c in ev.present[:cap]] != list(ev.accepted):
            raise TraceMismatch(f"event {i} accepted set is not the first present candidates")


def verify_proposition_22(tree: MonotoneTree, trace: GrowTrace, inp: TreeGrowInput) -> Prop22Report:
    """Check the three deterministic properties of a grown tree.

    (a) list sizes: ``|C_T(u, 0)| <= i ln d`` (grown up) or
        ``|C_T(u, 1)| <= (d - i) ln d`` (grown down), for every vertex;
    (b) every ordered pair of distinct leaves is distinguished by the first
        leaf's list;
    (c) at each dequeue, every already-discovered neighbour of ``x`` in the
        next layer differs from ``x`` in a coordinate of ``C_x``.
    """
    _check_trace(tree, trace, inp.cap)
    d = inp.d
    inc = tree.orientation == "increasing"
    side = "zero_side" if inc else "one_side"
    bound = (inp.trunc_layer if inc else d - inp.trunc_layer) * math.log(d)

    a = all(tree.c_mask_side(u, side).bit_count() <= bound for u in tree.order)

    leaves = sorted(tree.leaves)
    lists = {w: tree.c_mask_side(w, side) for w in leaves}
    b = True
    for w1 in leaves:
        l1 = lists[w1]
        for w2 in leaves:
            if w1 != w2 and not ((w2 if inc else ~w2) & l1):
                b = False
                break
        if not b:
            break

    by_layer = defaultdict(list)
    for i, v in enumerate(tree.order):
        by_layer[v.bit_count()].append(i)
    c = True
    step = 1 if inc else -1
    for ev in trace.events:
        x = ev.vertex
        cx = tree.c_mask_side(x, side)
        for i in by_layer[x.bit_count() + step]:
            if i >= ev.discovered_before:
                continue
            y = tree.order[i]
            diff = x ^ y
            if diff & (diff - 1):
                continue
            if not (diff & cx):
                c = False
                break
        if not c:
            break
    return Prop22Report(a, b, c)


def tree_to_json(tree: MonotoneTree) -> dict:
    from .hypercube import format_vertex

    fmt = lambda v: format_vertex(v, tree.d)  # noqa: E731
    pos = {v: i for i, v in enumerate(tree.order)}
    return {
        "d": tree.d,
        "root": fmt(tree.root),
        "orientation": tree.orientation,
        "parent": {fmt(v): [fmt(p), c] for v, (p, c) in tree.parent.items()},
        "leaves": [
            {"vertex": fmt(w), "c_set": sorted(c_set(tree, w))}
            for w in sorted(tree.leaves, key=pos.__getitem__)
        ],
    }
