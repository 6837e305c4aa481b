import json
import math
import random

import numpy as np
import pytest

from hyperpath.edge_sampler import RandomSubgraph
from hyperpath.errors import InvalidInput, TraceMismatch, VertexNotInTree
from hyperpath.hypercube import Subcube, full_vertex, parse_vertex
from hyperpath.treegrow import (
    GrowEvent,
    GrowTrace,
    MonotoneTree,
    TreeGrowInput,
    c_set,
    default_child_cap,
    tree_construct,
    tree_to_json,
    verify_proposition_22,
)

V = parse_vertex


def grow(d, p, seed, trunc, root="lo", avoided=(), sub=None, cap=None):
    g = RandomSubgraph(d, p, seed)
    sub = sub or Subcube.full(d)
    r = sub.lo if root == "lo" else sub.hi
    inp = TreeGrowInput(sub, r, frozenset(avoided), trunc, g, cap)
    tree, trace = tree_construct(inp)
    return inp, tree, trace


def test_child_cap_natural_log():
    assert default_child_cap(4) == 2
    assert default_child_cap(500) == 7
    assert default_child_cap(1000) == 7
    assert default_child_cap(2) == 1 and default_child_cap(1) == 1


def test_p_zero_root_only():
    inp, tree, trace = grow(10, 0.0, 1, 5)
    assert tree.order == [0] and tree.leaves == {0}
    assert verify_proposition_22(tree, trace, inp).all


def test_p_one_d4_cap_binds():
    # root accepts coordinates 0 and 1 (cap 2); layer 2 is the truncation layer
    inp, tree, trace = grow(4, 1.0, 0, 2)
    assert inp.cap == 2
    assert tree.children_coords[0] == [0, 1]
    assert sorted(tree.leaves) == [V("0001"), V("0010")]
    assert trace.events[0].candidates.tolist() == [0, 1, 2, 3]
    assert all(ev.candidates.size == 0 for ev in trace.events[1:])


def test_p_one_d4_one_more_layer():
    # hand simulation with truncation at layer 3:
    #   0001 has C_x = {1}, so Y = {2, 3}; 0010 has C_x = {0}, so Y = {2, 3}
    inp, tree, trace = grow(4, 1.0, 0, 3)
    ev = {e.vertex: e for e in trace.events}
    assert ev[V("0001")].candidates.tolist() == [2, 3]
    assert ev[V("0010")].candidates.tolist() == [2, 3]
    assert sorted(tree.leaves) == sorted(V(s) for s in ("0101", "1001", "0110", "1010"))
    assert c_set(tree, V("0101")) == {1, 3}
    assert verify_proposition_22(tree, trace, inp).all


def test_figure_tree_fixture():
    # a hand-built tree in Q^4 with its branch lists
    t = MonotoneTree.from_edges(0, 4, [(0, 0), (0, 1), (1, 1), (1, 2), (2, 3), (3, 3)])
    want = {"0000": set(), "0001": {1}, "0010": {0}, "0011": {1, 2},
            "0101": {1}, "1010": {0}, "1011": {1, 2}}
    for s, cs in want.items():
        assert c_set(t, V(s)) == cs
    assert c_set(t, V("1011"), "zero_side") == {2}
    assert c_set(t, V("1011"), "one_side") == {1}
    assert t.leaves == {V("0101"), V("1010"), V("1011")}
    with pytest.raises(VertexNotInTree):
        c_set(t, V("1111"))
    with pytest.raises(InvalidInput):
        t.c_mask_side(0, "sideways")


def test_from_edges_rejects_bad_input():
    with pytest.raises(InvalidInput):
        MonotoneTree.from_edges(0, 4, [(1, 1)])
    with pytest.raises(InvalidInput):
        MonotoneTree.from_edges(0b0011, 4, [(0b0011, 2), (0b0011, 0)])


def _fake_trace(tree):
    events = []
    for i, v in enumerate(tree.order):
        kids = np.array(tree.children_coords[v], dtype=np.int64)
        disc = 1 + sum(len(tree.children_coords[u]) for u in tree.order[:i])
        events.append(GrowEvent(v, disc, i, np.sort(kids), np.sort(kids), tuple(tree.children_coords[v])))
    return GrowTrace(events)


def test_adversarial_leaves_fail_b():
    # 0001 continues along coordinate 1, which the root already used for 0010,
    # so the two leaves 0011 and 0010 are not told apart by C(0011, 0)
    t = MonotoneTree.from_edges(0, 4, [(0, 0), (0, 1), (1, 1)])
    inp = TreeGrowInput(Subcube.full(4), 0, frozenset(), 3, RandomSubgraph(4, 1.0, 0))
    rep = verify_proposition_22(t, _fake_trace(t), inp)
    assert rep.a and rep.c and not rep.b and not rep.all


def test_trace_mismatch():
    inp, tree, trace = grow(8, 0.5, 3, 4)
    assert len(tree) > 2
    bad = GrowTrace(trace.events[:-1])
    with pytest.raises(TraceMismatch):
        verify_proposition_22(tree, bad, inp)
    swapped = GrowTrace([trace.events[1], trace.events[0]] + trace.events[2:])
    with pytest.raises(TraceMismatch):
        verify_proposition_22(tree, swapped, inp)


def _check_invariants(inp, tree, trace):
    g = inp.oracle
    inc = inp.increasing
    step = 1 if inc else -1
    assert len(set(tree.order)) == len(tree.order)
    for v, (p, c) in tree.parent.items():
        assert v.bit_count() - p.bit_count() == step
        assert v ^ p == 1 << c
        assert g.present(min(v, p), c)
        assert v in inp.subcube
        assert c not in inp.avoided
        assert (v.bit_count() - inp.trunc_layer) * step < 0
    for v in tree.order:
        assert len(tree.children_coords[v]) <= inp.cap
    for ev in trace.events:
        if not ev.accepted:
            leaf_layer = ev.vertex.bit_count()
            assert ev.present.size == 0 or leaf_layer + step == inp.trunc_layer
    for v in tree.order:
        z, o = c_set(tree, v, "zero_side"), c_set(tree, v, "one_side")
        assert not z & o and z | o == c_set(tree, v)


def test_random_trees_properties():
    rng = random.Random(11)
    for _ in range(60):
        d = rng.randint(4, 40)
        alpha = rng.choice([1.5, 3.0, 6.0])
        dist = rng.randint(1, min(d, 5))
        avoided = frozenset(rng.sample(range(d), rng.randint(0, d // 3)))
        root = rng.choice(["lo", "hi"])
        trunc = dist if root == "lo" else d - dist
        inp, tree, trace = grow(d, min(1.0, alpha / d), rng.getrandbits(64), trunc, root, avoided)
        _check_invariants(inp, tree, trace)
        assert verify_proposition_22(tree, trace, inp).all


def test_grown_inside_subcube_from_top():
    d = 12
    sub = Subcube(V("000000000011"), V("011111111111"))
    inp, tree, trace = grow(d, 0.5, 5, 6, "hi", avoided={4}, sub=sub)
    assert tree.orientation == "decreasing"
    _check_invariants(inp, tree, trace)
    for v in tree.order:
        assert v & (1 << 4) and v & 0b11
    assert verify_proposition_22(tree, trace, inp).all


def test_determinism():
    a = grow(200, 4 / 200, 0xABC, 4)
    b = grow(200, 4 / 200, 0xABC, 4)
    assert json.dumps(tree_to_json(a[1])) == json.dumps(tree_to_json(b[1]))
    for e1, e2 in zip(a[2].events, b[2].events):
        assert e1.vertex == e2.vertex and e1.accepted == e2.accepted
        assert np.array_equal(e1.candidates, e2.candidates)


def test_input_validation():
    g = RandomSubgraph(6, 0.5, 0)
    s = Subcube(V("000001"), V("011111"))
    with pytest.raises(InvalidInput):
        TreeGrowInput(s, V("000011"), frozenset(), 3, g)
    with pytest.raises(InvalidInput):
        TreeGrowInput(s, s.lo, frozenset(), 6, g)
    with pytest.raises(InvalidInput):
        TreeGrowInput(s, s.lo, frozenset({9}), 3, g)
    with pytest.raises(InvalidInput):
        TreeGrowInput(Subcube(0, (1 << 8) - 1), 0, frozenset(), 3, g)


def test_tree_json_shape():
    inp, tree, _ = grow(6, 1.0, 0, 3)
    js = tree_to_json(tree)
    assert js["root"] == "000000"
    assert js["parent"]["000001"] == ["000000", 0]
    assert {leaf["vertex"] for leaf in js["leaves"]} == {format(v, "06b") for v in tree.leaves}


def test_path_from_root():
    inp, tree, _ = grow(8, 1.0, 0, 4)
    for v in tree.leaves:
        path = tree.path_from_root(v)
        assert path[0] == 0 and path[-1] == v
        assert [u.bit_count() for u in path] == list(range(len(path)))
    with pytest.raises(VertexNotInTree):
        tree.path_from_root(full_vertex(8))


def test_leaf_counts_large_d():
    inp, tree, trace = grow(1000, 4 / 1000, 7, 6)
    top = tree.layer_count(5)
    assert top <= default_child_cap(1000) ** 5
    assert math.isfinite(top)
