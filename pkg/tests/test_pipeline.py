import pytest

from hyperpath.edge_sampler import RandomSubgraph
from hyperpath.errors import InvalidParams
from hyperpath.hypercube import Subcube, full_vertex, is_leq, subcubes_certified_disjoint
from hyperpath.pipeline import PipelineParams, build_witness, select_disjoint_pairs, witness_is_valid
from hyperpath.treegrow import TreeGrowInput, tree_construct, verify_proposition_22

SMALL = PipelineParams(h0=1, h1=1, ext0=0, ext1=0, descend=1, leaf_target=2, group_size=1)


def test_everything_present():
    out = build_witness(8, 8.0, 1, SMALL, p=1.0)
    assert out.stage_reached == "witness_found"
    assert len(out.witness) == 9
    assert witness_is_valid(RandomSubgraph(8, 1.0, 1), out.witness)


def test_nothing_present():
    assert build_witness(8, 2.0, 1, SMALL, p=0.0).stage_reached == "lower_tree_died"


@pytest.mark.parametrize("kw", [
    dict(h0=4, h1=4),
    dict(h0=0),
    dict(leaf_target=0),
    dict(subcube_budget=0),
    dict(h0=3, h1=3, ext0=1, ext1=1),
    dict(half_split=9),
    dict(seed_leaves=0),
    dict(descend=-1),
])
def test_invalid_params(kw):
    with pytest.raises(InvalidParams):
        build_witness(8, 4.0, 0, PipelineParams(**{**SMALL.__dict__, **kw}))


def _check_outcome(out, g, params):
    d = g.d
    if out.witness is not None:
        assert out.stage_reached == "witness_found"
        assert witness_is_valid(g, out.witness)
        assert [v.bit_count() for v in out.witness] == list(range(d + 1))
    cubes = [Subcube(a, b) for a, b in out.pairs]
    for i, a in enumerate(cubes):
        assert a.lo != a.hi and is_leq(a.lo, a.hi)
        for b in cubes[i + 1:]:
            assert subcubes_certified_disjoint(a, b)
    assert len(out.pairs) <= params.subcube_budget
    assert out.subcubes_tested <= len(out.pairs)


def test_random_runs_valid():
    params = PipelineParams(h0=3, h1=3, leaf_target=8, subcube_budget=16)
    stages = set()
    for seed in range(40):
        out = build_witness(24, 5.0, seed, params)
        stages.add(out.stage_reached)
        _check_outcome(out, RandomSubgraph.from_alpha(24, 5.0, seed), params)
    assert "witness_found" in stages


def test_small_d_edge_sets_disjoint():
    params = PipelineParams(h0=1, h1=1, ext0=1, ext1=1, descend=1, leaf_target=4, group_size=2)
    seen_pairs = 0
    for seed in range(40):
        out = build_witness(10, 5.0, seed, params)
        edge_sets = [{(e.lower, e.coord) for e in Subcube(a, b).edges()} for a, b in out.pairs]
        seen_pairs += len(edge_sets)
        for i, a in enumerate(edge_sets):
            for b in edge_sets[i + 1:]:
                assert not a & b
    assert seen_pairs > 0


def test_determinism():
    params = PipelineParams()
    a = build_witness(24, 5.0, 0xBEEF, params)
    b = build_witness(24, 5.0, 0xBEEF, params)
    assert a == b


def test_json_output():
    out = build_witness(8, 8.0, 1, SMALL, p=1.0)
    js = out.to_json(8)
    assert js["stage_reached"] == "witness_found"
    assert js["witness"][0] == "00000000" and js["witness"][-1] == "11111111"


def test_select_single_pair():
    assert select_disjoint_pairs([(0b0001, 0b0010)], [0b1101]) == [(0b0001, 0b1101)]


def test_select_filter_excludes():
    # candidate carries a coordinate from the lower vertex's list
    assert select_disjoint_pairs([(0b0001, 0b0010)], [0b0011]) == []
    # not above v0
    assert select_disjoint_pairs([(0b0001, 0)], [0b0110]) == []


def test_select_from_verified_tree():
    d = 8
    g = RandomSubgraph(d, 1.0, 0)
    inp = TreeGrowInput(Subcube.full(d), 0, frozenset(), 2, g)
    tree, trace = tree_construct(inp)
    assert verify_proposition_22(tree, trace, inp).all
    leaves = sorted(tree.leaves)[:2]
    lists = [(w, tree.c_mask_side(w, "zero_side")) for w in leaves]
    full = full_vertex(d)
    uppers = {w: [full & ~cm] for w, cm in lists}
    pairs = select_disjoint_pairs(lists, uppers)
    assert len(pairs) == 2
    assert subcubes_certified_disjoint(Subcube(*pairs[0]), Subcube(*pairs[1]))


def test_select_budget():
    lower = [(1 << i, 0) for i in range(4)]
    cands = [0b1111_1111]
    # every subcube contains the top vertex, so only one survives
    assert len(select_disjoint_pairs(lower, cands)) == 1
    assert select_disjoint_pairs(lower, cands, budget=0) == []
