import math

import numpy as np
import pytest
from scipy import stats

from hyperpath.edge_sampler import (
    RandomSubgraph,
    coupled_threshold,
    derive_seed,
    edge_state,
    fmix64,
    hash_encoding,
    n_limbs,
    parse_seed,
    restrict_to_subcube,
)
from hyperpath.errors import InvalidInput, InvalidParameter
from hyperpath.hypercube import EdgeId, Subcube, full_vertex, parse_vertex


def all_edges(d):
    for v in range(1 << d):
        for c in range(d):
            if not (v >> c) & 1:
                yield v, c


def test_extreme_p():
    d = 6
    g0, g1 = RandomSubgraph(d, 0.0, 11), RandomSubgraph(d, 1.0, 11)
    assert not any(g0.present(v, c) for v, c in all_edges(d))
    assert all(g1.present(v, c) for v, c in all_edges(d))


def test_presence_frequency():
    # Q^16 has only 16 * 2^15 = 524288 edges; use all of them (0.002 is ~3 SE)
    d, p = 16, 0.3
    g = RandomSubgraph(d, p, 2024)
    hits = total = 0
    for v in range(1 << d):
        coords = np.array([c for c in range(d) if not (v >> c) & 1], dtype=np.int64)
        if coords.size == 0:
            continue
        hits += int(g.present_up(v, coords).sum())
        total += coords.size
    assert total == d << (d - 1)
    assert abs(hits / total - p) < 0.002


def test_threshold_is_pure_and_matches_state():
    g = RandomSubgraph(10, 0.37, 5)
    e = EdgeId(0b1010000001, 3)
    u = coupled_threshold(g, e)
    assert u == coupled_threshold(g, e)
    assert 0.0 <= u < 1.0
    for p in (0.0, 0.1, u, np.nextafter(u, 1), 0.9, 1.0):
        assert edge_state(g.with_p(p), e) == (u < p)


def test_monotone_coupling_all_edges():
    for d in (6, 12):
        lo, hi = RandomSubgraph(d, 0.1, 99), RandomSubgraph(d, 0.5, 99)
        for v, c in all_edges(d):
            if lo.present(v, c):
                assert hi.present(v, c)


def test_uniforms_ks():
    g = RandomSubgraph(20, 0.5, 314159)
    vals = []
    v = 0
    while len(vals) < 100_000:
        coords = np.array([c for c in range(20) if not (v >> c) & 1], dtype=np.int64)
        if coords.size:
            vals.extend(g.uniforms_up(v, coords).tolist())
        v += 1
    stat = stats.kstest(vals[:100_000], "uniform").statistic
    assert stat < 0.01


def test_independence_chi_square():
    # joint law of k fixed edges over 10^5 seeds against product Bernoulli
    d, p, k, n = 12, 0.5, 6, 100_000
    edges = [(0, 0), (1, 1), (3, 2), (0b100000000000 - 1, 11), (0b10, 5), (0b111, 3)]
    assert len(set(edges)) == k
    seeds = np.array([derive_seed(77, i) for i in range(n)], dtype=np.uint64)
    from hyperpath.edge_sampler import fmix64_array, threshold_int

    code = np.zeros(n, dtype=np.int64)
    for j, (v, c) in enumerate(edges):
        h = fmix64_array(seeds ^ np.uint64(v * d + c))
        code |= ((h >> np.uint64(11)) < np.uint64(threshold_int(p))).astype(np.int64) << j
    observed = np.bincount(code, minlength=1 << k)
    expected = np.full(1 << k, n / (1 << k))
    pval = stats.chisquare(observed, expected).pvalue
    assert pval > 1e-3


def test_explicit_matches_lazy():
    for d in (3, 7, 12):
        lazy = RandomSubgraph(d, 0.4, 1234 + d)
        expl = lazy.explicit()
        assert expl.mode == "explicit"
        for v, c in all_edges(d):
            assert lazy.present(v, c) == expl.present(v, c)
        x = 0b101 & full_vertex(d)
        coords = np.array([c for c in range(d) if not (x >> c) & 1])
        assert (lazy.present_up(x, coords) == expl.present_up(x, coords)).all()


def test_batched_queries_match_scalar():
    for d in (10, 40, 58, 59, 100, 1000):
        g = RandomSubgraph.from_alpha(d, 4, 8)
        rng = np.random.default_rng(d)
        for _ in range(5):
            x = int.from_bytes(rng.bytes((d + 7) // 8), "little") & full_vertex(d)
            zeros = np.array([c for c in range(d) if not (x >> c) & 1][:50], dtype=np.int64)
            onesc = np.array([c for c in range(d) if (x >> c) & 1][:50], dtype=np.int64)
            if zeros.size:
                up = g.present_up(x, zeros)
                assert up.tolist() == [g.present(x, int(c)) for c in zeros]
            if onesc.size:
                down = g.present_down(x, onesc)
                assert down.tolist() == [g.present(x & ~(1 << int(c)), int(c)) for c in onesc]


def test_multi_limb_hash_reduces_to_single_word():
    assert n_limbs(58) == 1 and n_limbs(59) == 2
    assert hash_encoding(5, 12345, 1) == fmix64(5 ^ 12345)
    # a leading zero limb is not the same as no limb; the scheme is fixed per d
    assert hash_encoding(5, 12345, 2) == fmix64(fmix64(5) ^ 12345)


def test_seed_parsing():
    assert parse_seed("42") == 42
    assert parse_seed("0x2A") == 42
    assert parse_seed(7) == 7
    for bad in ("-1", "zz", str(1 << 64)):
        with pytest.raises(InvalidParameter):
            parse_seed(bad)


def test_derived_seeds_distinct():
    seeds = {derive_seed(0xDEADBEEF, i) for i in range(100_000)}
    assert len(seeds) == 100_000


def test_parameter_validation():
    with pytest.raises(InvalidParameter):
        RandomSubgraph(4, 1.5, 0)
    with pytest.raises(InvalidParameter):
        RandomSubgraph(0, 0.5, 0)
    with pytest.raises(InvalidParameter):
        RandomSubgraph(4, 0.5, 0, mode="bogus")
    g = RandomSubgraph(4, 0.5, 0)
    with pytest.raises(InvalidInput):
        g.present(0b0001, 0)
    with pytest.raises(InvalidInput):
        g.present(0, 4)
    assert RandomSubgraph.from_alpha(3, 10, 0).p == 1.0


def test_restrict_full_and_point():
    d = 6
    g = RandomSubgraph(d, 0.5, 3)
    full = restrict_to_subcube(g, Subcube.full(d))
    for v, c in all_edges(d):
        assert full.present(v, c) == g.present(v, c)
    point = restrict_to_subcube(g, Subcube(0b101, 0b101))
    assert list(point.edges()) == []
    assert not any(point.present(v, c) for v, c in all_edges(d))


def test_restrict_disjoint_edge_sets():
    d = 8
    g = RandomSubgraph(d, 0.5, 17)
    s1 = Subcube(parse_vertex("00000001"), parse_vertex("01111111"))
    s2 = Subcube(parse_vertex("10000000"), parse_vertex("11111110"))
    e1 = {(e.lower, e.coord) for e in restrict_to_subcube(g, s1).edges()}
    e2 = {(e.lower, e.coord) for e in restrict_to_subcube(g, s2).edges()}
    assert e1 and e2 and not e1 & e2
    o1 = restrict_to_subcube(g, s1)
    for v, c in all_edges(d):
        if o1.present(v, c):
            assert (v, c) in e1 and g.present(v, c)


def test_same_seed_same_thresholds():
    a, b = RandomSubgraph(9, 0.2, 55), RandomSubgraph(9, 0.8, 55)
    for v, c in list(all_edges(9))[:2000]:
        assert a.uniform(v, c) == b.uniform(v, c)


def test_p_rounding_boundary():
    # p is compared on 53-bit uniforms: p = k / 2^53 keeps exactly k values
    assert math.ceil(0.5 * 2**53) == RandomSubgraph(4, 0.5, 0).threshold
