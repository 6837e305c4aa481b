"""Staged construction of an antipodal increasing path at desk scale.

Stages, each mirroring one step of the supercritical argument:

1. grow ``T0'`` from **0** up to layer ``h0`` (no avoided coordinates);
   and keep only the root paths of its first ``seed_leaves`` top-layer vertices;
2. grow ``T1'`` from **1** down to layer ``d - h1``, avoiding ``I0``, the union
   of the one-coordinates of ``T0'``'s top layer, so every ``T1'`` vertex sits
   above every ``T0'`` vertex (pruned the same way);
3. extend: from a ``T0'`` leaf ``u`` grow inside ``Q(u, [d] \\ C(u, 0))`` on
   the low half of the coordinates (also avoiding everything some ``T1'`` leaf
   has cleared), ``ext0`` more layers; mirror for ``T1'`` on the high half;
4. pair every lower leaf ``v0`` with a group of upper leaves, grow down from
   each (never clearing ``I(v0)``) for ``descend`` layers, then walk the
   resulting layer down one offending coordinate at a time until it avoids
   ``C_T0(v0, 0)``;
5. keep a greedy list of pairs whose subcubes are certified disjoint;
6. look for an increasing path inside each subcube;
7. stitch ``0 -> v0 -> v1 -> 1`` into a witness.

The asymptotic sizes (log log d, 150 log d, d^10 ...) are parameters here.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .edge_sampler import RandomSubgraph, p_from_alpha, restrict_to_subcube
from .errors import InvalidParams
from .hypercube import Subcube, full_vertex, is_leq, subcubes_certified_disjoint
from .paths import increasing_path_between, path_is_valid
from .treegrow import MonotoneTree, TreeGrowInput, default_child_cap, tree_construct

STAGES = (
    "lower_tree_died",
    "upper_tree_died",
    "no_disjoint_pairs",
    "no_subcube_path",
    "witness_found",
)


@dataclass(frozen=True)
class PipelineParams:
    h0: int = 3
    h1: int = 3
    leaf_target: int = 8
    half_split: int | None = None
    subcube_budget: int = 16
    ext0: int = 1
    ext1: int = 1
    descend: int = 2
    group_size: int = 4
    seed_leaves: int | None = None

    def validate(self, d: int) -> "PipelineParams":
        if min(self.h0, self.h1, self.ext0, self.ext1, self.descend) < 0:
            raise InvalidParams("heights must be non-negative")
        if self.h0 < 1 or self.h1 < 1:
            raise InvalidParams("h0 and h1 must be at least 1")
        if self.h0 + self.h1 >= d:
            raise InvalidParams(f"h0 + h1 = {self.h0 + self.h1} must be below d = {d}")
        if self.h0 + self.ext0 + self.h1 + self.ext1 >= d:
            raise InvalidParams("extended trees would meet")
        if self.leaf_target < 1 or self.subcube_budget < 1 or self.group_size < 1:
            raise InvalidParams("leaf_target, subcube_budget and group_size must be >= 1")
        if self.seed_leaves is not None and self.seed_leaves < 1:
            raise InvalidParams("seed_leaves must be >= 1")
        if self.half_split is not None and not 0 <= self.half_split <= d:
            raise InvalidParams("half_split outside [0, d]")
        return self

    def split(self, d: int) -> int:
        return d // 2 if self.half_split is None else self.half_split

    def seeds(self, d: int) -> int:
        return default_child_cap(d) if self.seed_leaves is None else self.seed_leaves


@dataclass
class PipelineOutcome:
    stage_reached: str
    subcubes_tested: int = 0
    witness: tuple[int, ...] | None = None
    lower_leaves: list[int] = field(default_factory=list)
    upper_leaves: list[int] = field(default_factory=list)
    pairs: list[tuple[int, int]] = field(default_factory=list)

    def to_json(self, d: int) -> dict:
        from .hypercube import format_vertex

        fmt = lambda v: format_vertex(v, d)  # noqa: E731
        return {
            "d": d,
            "stage_reached": self.stage_reached,
            "subcubes_tested": self.subcubes_tested,
            "witness": None if self.witness is None else [fmt(v) for v in self.witness],
            "V0": [fmt(v) for v in self.lower_leaves],
            "V1": [fmt(v) for v in self.upper_leaves],
            "pairs": [[fmt(a), fmt(b)] for a, b in self.pairs],
        }


def _mask(coords) -> int:
    m = 0
    for c in coords:
        m |= 1 << c
    return m


def _coords(mask: int) -> frozenset[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return frozenset(out)


def _at_layer(tree: MonotoneTree, k: int) -> list[int]:
    return [v for v in tree.order if v.bit_count() == k]


def _grow(g, sub: Subcube, root: int, avoid_mask: int, trunc: int) -> MonotoneTree:
    lo_l, hi_l = sub.lo.bit_count(), sub.hi.bit_count()
    trunc = min(max(trunc, lo_l), hi_l)
    inp = TreeGrowInput(sub, root, _coords(avoid_mask), trunc, g)
    return tree_construct(inp)[0]


def _prune(tree: MonotoneTree, keep: list[int]) -> MonotoneTree:
    """The subtree spanned by the root paths of ``keep``."""
    wanted = set()
    for v in keep:
        wanted.update(tree.path_from_root(v))
    edges = [tree.parent[v] for v in tree.order if v in wanted and v != tree.root]
    pruned = MonotoneTree.from_edges(tree.root, tree.d, edges)
    pruned.orientation = tree.orientation
    return pruned


@dataclass
class _Branch:
    """A grown tree hanging off a stem path that starts at 0 or 1."""

    stem: list[int]
    tree: MonotoneTree

    def path_to(self, v: int) -> list[int]:
        return self.stem + self.tree.path_from_root(v)[1:]


def select_disjoint_pairs(lower, candidates, budget: int | None = None) -> list[tuple[int, int]]:
    """Greedy pairing of lower leaves with upper candidates.

    ``lower`` is a sequence of ``(v0, C_T0(v0, 0) mask)``.  ``candidates`` is
    either a mapping ``v0 -> [v1, ...]`` or one sequence offered to every
    ``v0``.  A pair is kept when ``v0 < v1``, ``v1`` avoids the list of
    ``v0`` and its subcube is certified disjoint from every kept subcube.
    """
    chosen: list[tuple[int, int]] = []
    cubes: list[Subcube] = []
    for v0, cmask in lower:
        if budget is not None and len(chosen) >= budget:
            break
        pool = candidates.get(v0, ()) if hasattr(candidates, "get") else candidates
        for v1 in pool:
            if v1 == v0 or not is_leq(v0, v1) or v1 & cmask:
                continue
            cube = Subcube(v0, v1)
            if all(subcubes_certified_disjoint(cube, other) for other in cubes):
                chosen.append((v0, v1))
                cubes.append(cube)
                break
    return chosen


def _refine(g: RandomSubgraph, layer: list[int], cmask: int, d: int):
    """The X(j)/C(j) walk.

    Returns ``(final, links)``: the surviving set and, for every vertex the
    walk touched, the vertex it stepped down from (None for the start layer).

    Coordinates of ``C`` are handled smallest first.  If at least ``|X|/d``
    members already have that coordinate at zero they are kept; otherwise
    every member with a one there steps down along that coordinate, provided
    the edge is present.
    """
    cur: dict[int, int | None] = {x: None for x in layer}
    links: dict[int, int | None] = dict(cur)
    rest = cmask
    while rest and cur:
        low = rest & -rest
        rest ^= low
        c = low.bit_length() - 1
        keep = [x for x in cur if not x & low]
        if keep and len(keep) * d >= len(cur):
            cur = {x: links[x] for x in keep}
            continue
        nxt: dict[int, int | None] = {}
        for x in cur:
            if x & low:
                y = x ^ low
                if y not in nxt and y not in links and g.present(y, c):
                    nxt[y] = x
                    links[y] = x
        cur = nxt
    return cur, links


def build_witness(d: int, alpha: float, seed: int, params: PipelineParams | None = None,
                  p: float | None = None) -> PipelineOutcome:
    """Run all stages on ``Q^d_p`` with ``p = alpha / d`` (or ``p`` if given)."""
    params = (params or PipelineParams()).validate(d)
    g = RandomSubgraph(d, p_from_alpha(alpha, d) if p is None else p, seed)
    full = full_vertex(d)
    cube = Subcube(0, full)
    split = params.split(d)
    low_half = (1 << split) - 1
    high_half = full & ~low_half

    # (1) lower seed tree
    t0p = _grow(g, cube, 0, 0, params.h0 + 1)
    tops0 = _at_layer(t0p, params.h0)[: params.seeds(d)]
    if not tops0:
        return PipelineOutcome("lower_tree_died")
    t0p = _prune(t0p, tops0)
    i0 = 0
    for v in tops0:
        i0 |= v

    # (2) upper seed tree, above everything in T0'
    t1p = _grow(g, cube, full, i0, d - params.h1 - 1)
    tops1 = _at_layer(t1p, d - params.h1)[: params.seeds(d)]
    if not tops1:
        return PipelineOutcome("upper_tree_died")
    t1p = _prune(t1p, tops1)
    i1 = full
    for v in tops1:
        i1 &= v

    # (3) extensions; each keeps the first branch reaching leaf_target leaves,
    # else the one with most leaves
    lower = _extend(g, t0p, tops0, up=True, layer=params.h0 + params.ext0,
                    avoid=(full & ~i1) | high_half, target=params.leaf_target, d=d)
    if lower is None:
        return PipelineOutcome("lower_tree_died")
    t0_union = 0
    for v in lower.tree.order:
        t0_union |= v
    upper = _extend(g, t1p, tops1, up=False, layer=d - params.h1 - params.ext1,
                    avoid=t0_union | low_half, target=params.leaf_target * params.group_size, d=d)
    if upper is None:
        return PipelineOutcome("upper_tree_died")

    v0s = _at_layer(lower.tree, params.h0 + params.ext0)[: params.leaf_target]
    ms = _at_layer(upper.tree, d - params.h1 - params.ext1)
    out = PipelineOutcome("no_disjoint_pairs", lower_leaves=v0s)

    # (4) candidate uppers per v0, remembering how each reaches 1
    candidates: dict[int, list[int]] = {}
    route: dict[tuple[int, int], list[int]] = {}
    for i, v0 in enumerate(v0s):
        cmask = lower.tree.c_mask_side(v0, "zero_side")
        group = [ms[(i * params.group_size + j) % len(ms)] for j in range(min(params.group_size, len(ms)))]
        for u in dict.fromkeys(group):
            wu = upper.tree.c_mask_side(u, "one_side")
            sub = Subcube(wu, u)
            if not is_leq(v0, u):
                continue
            b = _grow(g, sub, u, v0, u.bit_count() - params.descend - 1)
            deepest = min(v.bit_count() for v in b.order)
            xs = _at_layer(b, deepest)
            final, links = _refine(g, xs, cmask, d)
            if not final:
                continue
            v1 = min(final)
            chain = [v1]
            while links[chain[-1]] is not None:
                chain.append(links[chain[-1]])
            down = upper.path_to(u) + b.path_from_root(chain[-1])[1:] + chain[-2::-1]
            candidates.setdefault(v0, []).append(v1)
            route[(v0, v1)] = down
            break
        # one candidate per v0 is enough; more would only widen the greedy search
    out.upper_leaves = [candidates[v][0] for v in v0s if v in candidates]

    # (5) certified-disjoint pairs
    lists = [(v0, lower.tree.c_mask_side(v0, "zero_side")) for v0 in v0s]
    pairs = select_disjoint_pairs(lists, candidates, params.subcube_budget)
    out.pairs = pairs
    if not pairs:
        return out

    # (6) search each subcube in order; (7) stitch the first success
    out.stage_reached = "no_subcube_path"
    for v0, v1 in pairs:
        out.subcubes_tested += 1
        mid = increasing_path_between(restrict_to_subcube(g, Subcube(v0, v1)), v0, v1)
        if mid is None:
            continue
        witness = lower.path_to(v0) + mid[1:] + route[(v0, v1)][::-1][1:]
        if len(witness) != d + 1 or not path_is_valid(g, witness):  # pragma: no cover
            raise RuntimeError("stitched witness failed re-validation")
        out.witness = tuple(witness)
        out.stage_reached = "witness_found"
        return out
    return out


def _extend(g, seed_tree: MonotoneTree, tops: list[int], up: bool, layer: int,
            avoid: int, target: int, d: int) -> _Branch | None:
    full = full_vertex(d)
    best = None
    best_count = 0
    for u in tops:
        if up:
            cm = seed_tree.c_mask_side(u, "zero_side")
            sub = Subcube(u, full & ~cm)
            tree = _grow(g, sub, u, avoid, layer + 1)
        else:
            cm = seed_tree.c_mask_side(u, "one_side")
            sub = Subcube(cm, u)
            tree = _grow(g, sub, u, avoid, layer - 1)
        count = len(_at_layer(tree, layer))
        if count > best_count:
            best, best_count = _Branch(seed_tree.path_from_root(u), tree), count
            if count >= target:
                break
    return best


def witness_is_valid(g: RandomSubgraph, witness) -> bool:
    return (
        witness is not None
        and len(witness) == g.d + 1
        and witness[0] == 0
        and witness[-1] == full_vertex(g.d)
        and path_is_valid(g, witness)
    )
