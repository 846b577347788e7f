import random
from itertools import combinations

import pytest

from ematroids.codes import FiniteSet, Shift, Stream, set_encode
from ematroids.graph import (
    InvalidSolution, NotMaximalWithinBound, TabledGraph, UnionFind, add_anchor_edge,
    anchored_components, antichain_to_components, brute_force_max_antichains, connected,
    decode_antichain_to_maxset, ematroid_from_graph, gadget_components,
    gadget_graph_from_setfunction, is_max_antichain, min_path_code, parse_vertex,
    repair_basis, u_code, v_code,
)
from ematroids.matroid import (
    DecidableMatroid, brute_force_bases, check_ematroid_axioms, rank_upper_check,
)


def uf_components(edges, vertices):
    uf = UnionFind()
    for v in vertices:
        uf.find(v)
    for a, b in edges:
        uf.union(a, b)
    return len(uf.groups())


def random_graph(rng, size, p=0.2, tail="attach"):
    edges = [(a, b) for a, b in combinations(range(size), 2) if rng.random() < p]
    return TabledGraph(size, edges, 0 if tail == "attach" else None)


def omitting(*sets):
    """All nonempty sets except the given ones, in code order."""
    return Stream([], Shift(0, frozenset({0} | {set_encode(s) for s in sets})))


def test_connected_examples():
    g = TabledGraph(3, [], None)
    assert not connected(g, 0, 1, 3)
    p = TabledGraph(3, [(0, 1), (1, 2)], None)
    assert connected(p, 0, 2, 3)
    assert not connected(p, 0, 2, 2)


def test_connected_gadget():
    # singleton {j} enumerated at step 2^j - 1, so the marker moves at j=0,1,3,7...
    g = gadget_graph_from_setfunction(omitting(), 2)
    assert g.pendant(1, 7)
    assert connected(g, g.u(1, 0), g.v(1, 5), 10 ** 6)


def test_min_path_code():
    g = TabledGraph(2, [(0, 1)])
    assert min_path_code(g, 1, 0, 2) == 5
    assert min_path_code(g, 0, 1, 2) == 6


def test_graph_ematroid_single_edge():
    g = TabledGraph(2, [(0, 1)], 0)
    m = ematroid_from_graph(g, (0, 1))
    assert m.e(6) == set_encode([0, 1])
    for j in range(6):
        assert m.e(j) == set_encode([0, 1])
    with pytest.raises(Exception):
        ematroid_from_graph(TabledGraph(2, []), None)


def test_graph_ematroid_bases_are_antichains():
    g = TabledGraph(4, [(0, 1)], None)
    bases = brute_force_max_antichains(g, range(4))
    assert bases == {frozenset({0, 2, 3}), frozenset({1, 2, 3})}
    comps = g.components()
    trunc = DecidableMatroid(tuple(range(4)), lambda xs: len({comps.label(x) for x in xs}) < len(xs))
    assert brute_force_bases(trunc) == bases


def test_brute_force_max_antichain_examples():
    assert brute_force_max_antichains(TabledGraph(2, []), [0, 1]) == {frozenset({0, 1})}
    assert brute_force_max_antichains(TabledGraph(2, [(0, 1)]), [0, 1]) == {frozenset({0}), frozenset({1})}
    got = brute_force_max_antichains(TabledGraph(4, [(0, 1), (2, 3)]), range(4))
    assert got == {frozenset(s) for s in ({0, 2}, {0, 3}, {1, 2}, {1, 3})}


def test_rank_upper_three_components():
    g = TabledGraph(6, [(0, 1), (2, 3), (4, 5)], 0)
    m = ematroid_from_graph(g, (0, 1))
    assert rank_upper_check(m, 4, 6, 2600)
    assert not rank_upper_check(m, 3, 6, 2600)


@pytest.mark.parametrize("seed", range(5))
def test_graph_ematroid_axioms(seed):
    rng = random.Random(seed)
    g = random_graph(rng, 8, 0.25)
    g = TabledGraph(8, set(g.edges) | {(0, 1)}, 0)
    m = ematroid_from_graph(g, (0, 1), comps=g.components())
    rep = check_ematroid_axioms(m, 8, 4, 3000)
    assert rep.violations == []


def test_anchor_edge_repair():
    g = TabledGraph(3, [], None)
    h = add_anchor_edge(g, anchor=1)
    assert h.adjacent(0, 2) and h.edge == (0, 2)
    assert repair_basis(frozenset({0, 3}), anchor=1) == {1, 2}
    assert repair_basis(frozenset({2, 3}), anchor=1) == {1, 2}


@pytest.mark.parametrize("seed", range(20))
def test_anchor_preserves_component_count(seed):
    rng = random.Random(seed)
    g = random_graph(rng, rng.randint(1, 9))
    size = g.size
    before = uf_components(g.edges, range(size))
    h = add_anchor_edge(g, rng.randrange(size))
    after = uf_components([(a, b) for a in range(size + 1) for b in h.neighbors(a, size + 1)], range(size + 1))
    assert before == after
    comps = anchored_components(g.components(), h.anchor)
    for a in range(size + 1):
        for b in range(size + 1):
            assert (comps.label(a) == comps.label(b)) == connected(h, a, b, size + 1)


def test_antichain_to_components_examples():
    g = TabledGraph(3, [], None)
    assert antichain_to_components(g, {0, 1, 2}, 3) == {0: 0, 1: 1, 2: 2}
    g = TabledGraph(4, [(0, 1)], None)
    assert antichain_to_components(g, {0, 2, 3}, 4) == {0: 0, 1: 0, 2: 2, 3: 3}
    rays = TabledGraph(10, [(0, 2), (2, 4), (4, 6), (6, 8), (1, 3), (3, 5), (5, 7), (7, 9)], None)
    got = antichain_to_components(rays, {0, 1}, 10)
    assert got == {v: v % 2 for v in range(10)}
    with pytest.raises(NotMaximalWithinBound):
        antichain_to_components(g, {0, 2}, 4)


@pytest.mark.parametrize("seed", range(100))
def test_antichain_to_components_constant_on_components(seed):
    rng = random.Random(seed)
    g = random_graph(rng, rng.randint(2, 10), 0.25, tail=None)
    comps = g.components()
    a = comps.sample_antichain(rng, g.size).chosen
    mp = antichain_to_components(g, a, g.size)
    assert set(mp.values()) == set(a)
    for u in range(g.size):
        for v in range(g.size):
            if comps.label(u) == comps.label(v):
                assert mp[u] == mp[v]


def test_vertex_codes_roundtrip():
    for b in range(1, 4):
        for j in range(6):
            assert parse_vertex(u_code(b, j)) == ("u", b, j, None)
            for k in range(4):
                assert parse_vertex(v_code(b, j, k)) == ("v", b, j, k)


def gadget_component_count(g, steps):
    """Union-find over the first ``steps`` steps, dropping the still-open run."""
    uf = UnionFind()
    for b in range(1, g.n):
        for j in range(steps):
            uf.union(g.u(b, j), g.u(b, j + 1))
            if g.pendant(b, j):
                uf.union(g.v(b, j), g.u(b, j))
            else:
                uf.union(g.v(b, j), g.v(b, j + 1))
    return len(uf.groups())


def test_gadget_missing_singleton_zero():
    g = gadget_graph_from_setfunction(omitting({0}), 2)
    assert all(g.marker(1, j) == 0 for j in range(50))
    assert gadget_component_count(g, 50) == 2
    comps = gadget_components(g, [FiniteSet({0})])
    assert comps.count == 2


def test_gadget_all_singletons():
    g = gadget_graph_from_setfunction(omitting(), 2)
    # steps 0..63 close every run through step 63 (pendant at 2^6 - 1)
    assert gadget_component_count(g, 64) == 1
    assert gadget_components(g, []).count == 1


@pytest.mark.parametrize("seed", range(15))
def test_gadget_component_invariant(seed):
    rng = random.Random(seed)
    n = rng.choice([2, 3])
    pool = [FiniteSet(s) for b in range(1, n) for s in combinations(range(5), b)]
    omitted = rng.sample(pool, rng.randint(0, 3))
    g = gadget_graph_from_setfunction(omitting(*omitted), n)
    comps = gadget_components(g, omitted)
    sizes = {len(x) for x in omitted}
    assert comps.count == (n - 1) + len(sizes)
    # union-find agrees with labels once every marker has settled or moved far
    steps = 400
    uf = UnionFind()
    for b in range(1, n):
        for j in range(steps):
            uf.union(g.u(b, j), g.u(b, j + 1))
            uf.union(g.v(b, j), g.u(b, j) if g.pendant(b, j) else g.v(b, j + 1))
    for b in range(1, n):
        for j in range(steps // 2):
            assert (uf.find(g.v(b, j)) == uf.find(g.u(b, 0))) == (comps.label(g.v(b, j)) == (b, "u"))


def decode_all(omitted, n, samples=20, seed=0):
    g = gadget_graph_from_setfunction(omitting(*omitted), n)
    comps = gadget_components(g, omitted)
    rng = random.Random(seed)
    window = 4 * max(comps.members(k, 10 ** 7)[0] for k in comps.keys) + 64
    out = set()
    for _ in range(samples):
        d = comps.sample_antichain(rng, window)
        assert is_max_antichain(g, comps, d, window)
        out.add(decode_antichain_to_maxset(d))
    return out


def test_decode_single_omitted():
    assert decode_all([FiniteSet({0})], 2) == {FiniteSet({0})}


def test_decode_nothing_omitted():
    assert decode_all([], 3) == {FiniteSet()}


def test_decode_pair_omitted():
    assert decode_all([FiniteSet({1, 4})], 3) == {FiniteSet({1, 4})}


def test_decode_prefers_largest_cardinality():
    got = decode_all([FiniteSet({2}), FiniteSet({0, 3}), FiniteSet({1, 3})], 3)
    assert got == {FiniteSet({0, 3})}


def test_decode_brute_force_truncation():
    # brute-force maximal antichains of a small truncation (a single branch)
    g = gadget_graph_from_setfunction(omitting({0}), 2)
    verts = [g.u(1, j) for j in range(3)] + [g.v(1, j) for j in range(3)]
    for d in brute_force_max_antichains(g, verts):
        assert decode_antichain_to_maxset(d) == {0}


def test_decode_rejects_non_antichain():
    g = gadget_graph_from_setfunction(omitting({0}), 2)
    with pytest.raises(InvalidSolution):
        decode_antichain_to_maxset([g.u(1, 0), g.u(1, 1)], g, 100)
