from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from ematroids.codes import (
    Budget, BudgetExhausted, Constant, Cycle, FiniteSet, InvalidSet, MovingMarker, NatSet, Probe,
    SmallSets, small_set, small_set_position,
    Shift, Stream, colex_rank, colex_unrank, injectivize, pair, seq_decode,
    seq_encode, set_decode, set_encode, unpair,
)


def diagonal_enumeration(limit):
    out = []
    s = 0
    while len(out) < limit:
        for j in range(s + 1):
            out.append((s - j, j))
        s += 1
    return out[:limit]


def colex_enumeration(n, universe):
    return sorted((frozenset(c) for c in combinations(range(universe), n)),
                  key=lambda x: sorted(x, reverse=True))


def test_pair_examples():
    assert pair(0, 0) == 0
    assert pair(1, 2) == 8
    assert diagonal_enumeration(9)[8] == (1, 2)


def test_unpair_examples():
    # The diagonal oracle puts (0,2) at index 5 and (2,0) at index 3.
    assert diagonal_enumeration(6)[5] == (0, 2)
    assert unpair(5) == (0, 2)
    assert unpair(3) == (2, 0)


def test_pair_bijection():
    table = diagonal_enumeration(10_000)
    for n, (i, j) in enumerate(table):
        assert pair(i, j) == n
        assert unpair(n) == (i, j)
    for i in range(100):
        for j in range(100):
            assert unpair(pair(i, j)) == (i, j)


def test_set_codes():
    assert set_encode([]) == 0
    assert set_encode([0, 2]) == 5
    assert set_decode(2) == {1}
    with pytest.raises(InvalidSet):
        set_encode([1, 1])
    for c in range(1 << 16):
        s = set_decode(c)
        assert s.code == c
        assert set_encode(s) == c
        assert list(s.elements) == sorted(s)


def test_colex_examples():
    assert colex_unrank(0, 2) == {0, 1}
    assert colex_unrank(1, 2) == {0, 2}
    assert colex_rank({1, 2}) == 2
    assert colex_unrank(0, 4) == {0, 1, 2, 3}
    with pytest.raises(InvalidSet):
        colex_rank([])


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_colex_matches_enumeration(n):
    order = colex_enumeration(n, 12)
    for r, s in enumerate(order):
        assert colex_rank(s) == r
        assert colex_unrank(r, n) == s
    # colex order on a fixed size agrees with bitmask order
    assert [set_encode(s) for s in order] == sorted(set_encode(s) for s in order)


def test_seq_codes():
    assert seq_encode([]) == 0
    for xs in ([0], [1, 2, 1], [5, 0, 3]):
        assert seq_decode(seq_encode(xs)) == xs


@given(st.lists(st.integers(0, 50), max_size=6))
def test_seq_roundtrip(xs):
    assert seq_decode(seq_encode(xs)) == xs


def test_stream_tails():
    s = Stream([4, 4], Cycle((0, 2)))
    assert s.take(6) == [4, 4, 0, 2, 0, 2]
    assert s.omitted() == NatSet(frozenset({1, 3}), 5)
    s = Stream([], Shift(0, frozenset({2})))
    assert s.take(5) == [0, 1, 3, 4, 5]
    assert s.omitted() == NatSet(frozenset({2}))
    s = Stream([9], Shift(3, frozenset({1})))
    assert s.take(3) == [9, 4, 5]
    assert s.omitted() == NatSet(frozenset({0, 1, 2, 3}))
    s = Stream([], Constant(7))
    assert 0 in s.omitted() and 7 not in s.omitted() and 100 in s.omitted()


@given(st.lists(st.integers(0, 20), max_size=8), st.integers(0, 6),
       st.frozensets(st.integers(0, 15), max_size=4))
def test_shift_omitted_matches_scan(prefix, offset, skip):
    s = Stream(prefix, Shift(offset, skip))
    seen = set(s.take(len(prefix) + 80))
    om = s.omitted()
    for x in range(40):
        assert (x in om) == (x not in seen)


def test_roundtrip_json():
    for s in (Stream([1, 2], Constant(3)), Stream([0], Cycle((1, 2))),
              Stream([5], Shift(2, frozenset({0, 9})))):
        t = Stream.from_json(s.to_json())
        assert t.take(30) == s.take(30)


def test_probe_counts_distinct():
    p = Probe(Stream([1, 2, 3]), Budget(2))
    p(0), p(0), p(1)
    assert p.queries_made == 2
    with pytest.raises(BudgetExhausted):
        p(2)


def test_injectivize_examples():
    f = Stream.derived("halves", lambda n: n // 2)
    assert injectivize(f).take(5) == [0, 1, 2, 3, 4]
    f = Stream([5, 5, 3, 5, 7], Shift(8))
    assert injectivize(f).take(5) == [5, 3, 7, 8, 9]
    f = Stream([], Shift(0))
    assert injectivize(f).take(10) == f.take(10)
    with pytest.raises(BudgetExhausted):
        injectivize(Stream([1], Constant(1)), search_limit=50)(1)


@given(st.lists(st.integers(0, 10), max_size=10))
def test_injectivize_properties(prefix):
    f = Stream(prefix, Shift(11))
    g = injectivize(f).take(15)
    assert len(set(g)) == len(g)
    assert set(g) <= set(f.take(200))
    firsts = list(dict.fromkeys(prefix))
    assert g[:len(firsts)] == firsts


def least_missing(values):
    s = set(values)
    return next(x for x in range(len(s) + 1) if x not in s)


def test_moving_marker_trace():
    f = Stream([0, 1, 3], Shift(4))       # omits exactly 2
    mm = MovingMarker(f)
    g = mm.stream.take(60)
    # f(0) = 0 hits the marker (0,0): it retires into g(0) and moves to (1, t)
    assert g[0] == pair(0, 0)
    assert mm.marker(1) == (1, 0)
    assert g[1] == pair(1, 0)
    assert mm.marker(2) == (2, 0)
    assert mm.marker(50) == (2, 0)
    assert pair(2, 0) not in g
    assert set(range(40)) - {pair(2, 0)} <= set(g)


def test_moving_marker_omitting_zero():
    f = Stream([], Shift(0, frozenset({0})))
    mm = MovingMarker(f)
    assert all(mm.marker(k) == (0, 0) for k in range(30))
    assert 0 not in mm.stream.take(80)


@given(st.lists(st.integers(0, 12), max_size=12), st.frozensets(st.integers(0, 12), min_size=1, max_size=3))
def test_moving_marker_omits_one_code(prefix, skip):
    f = Stream([x for x in prefix if x not in skip], Shift(0, skip))
    y = min(f.omitted().finite)
    mm = MovingMarker(f)
    marker = mm.settle(y)
    g = mm.stream.take(400)
    assert len(set(g)) == len(g)
    assert pair(*marker) not in g
    assert set(range(60)) - {pair(*marker)} <= set(g)


def test_moving_marker_partial_stream():
    vals = [None, 0, None, 1, None]
    mm = MovingMarker(lambda k: vals[k] if k < len(vals) else None)
    y, t = mm.settle(2)
    assert y == 2
    assert pair(y, t) not in mm.stream.take(200)


def test_small_set_enumeration_matches_brute_force():
    from itertools import combinations
    bound = 4
    want = {FiniteSet(c).code for r in range(1, bound) for c in combinations(range(7), r)}
    got = [small_set(y, bound) for y in range(400)]
    assert all(0 < len(x) < bound for x in got)
    assert len({x.code for x in got}) == 400
    assert want <= {x.code for x in got}
    assert all(small_set_position(x, bound) == y for y, x in enumerate(got))


def test_small_sets_tail_and_omitted():
    om = [FiniteSet({1, 2}), FiniteSet({4})]
    f = Stream([FiniteSet({0}).code, FiniteSet({0}).code], SmallSets(3, 0, frozenset(x.code for x in om)))
    vals = {f(i) for i in range(300)}
    assert not {x.code for x in om} & vals
    assert f.omitted_small_sets() == om
    assert f.in_range(FiniteSet({0, 3}).code) and not f.in_range(FiniteSet({4}).code)
    assert not f.in_range(FiniteSet({0, 1, 2}).code)
    g = Stream([FiniteSet({5}).code], SmallSets(3, 2))
    assert g.omitted_small_sets() == [small_set(0, 3), small_set(1, 3)]
    assert Stream.from_json(f.to_json())(17) == f(17)
