import random
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from ematroids.codes import Constant, Stream, pair, set_decode, set_encode, unpair
from ematroids.matroid import (
    DecidableMatroid, EMatroid, OracleTooLarge, brute_force_bases, check_ematroid_axioms,
    decode_range_from_basis, ematroid_from_injection, fixture_ematroid, fixture_matroid,
    greedy_basis, injection_truncation, is_basis, matroid_ematroid,
    random_linear_matroid, rank_mod_p, rank_upper_check,
)


def free(n):
    return DecidableMatroid(tuple(range(n)), lambda xs: False)


def uniform1(n):
    return DecidableMatroid(tuple(range(n)), lambda xs: len(xs) >= 2)


def scan_bases(ground, dependent):
    """Maximal independent sets by scanning all subsets (ground <= 10)."""
    subsets = [frozenset(s) for r in range(len(ground) + 1) for s in combinations(ground, r)]
    indep = [s for s in subsets if not dependent(s)]
    return {s for s in indep if not any(s < t for t in indep)}


def test_fixture_axioms_clean():
    rep = check_ematroid_axioms(fixture_ematroid(), 9, 3, 500)
    assert rep.violations == []


def test_em1_violation():
    m = EMatroid(Stream([], Constant(0)))
    rep = check_ematroid_axioms(m, 3, 2, 5)
    assert ("em1", "e(0) is empty") in rep.violations


def test_em2_violation():
    m = EMatroid(Stream([], Constant(set_encode([0, 1]))))
    rep = check_ematroid_axioms(m, 3, 3, 10)
    assert any(ax == "em2" and "{0,1,2}" in msg for ax, msg in rep.violations)


def test_em3_violation():
    # dependent sets: everything of size 2 containing 0, plus supersets;
    # {0} and {1,2} independent yet {0,1}, {0,2} dependent -> exchange fails
    dep = [c for c in range(1, 8) if len(set_decode(c)) >= 2 and (c & 1 or len(set_decode(c)) == 3)]
    m = EMatroid(Stream(dep, Constant(dep[0])))
    rep = check_ematroid_axioms(m, 3, 2, len(dep))
    assert any(ax == "em3" for ax, _ in rep.violations)


def test_greedy_fixture():
    b = greedy_basis(fixture_matroid(30))
    assert b == {x for x in range(30) if x % 3 != 1}


def test_greedy_trivial():
    assert greedy_basis(free(5)) == {0, 1, 2, 3, 4}
    assert greedy_basis(uniform1(5)) == {0}


def test_brute_force_examples():
    assert brute_force_bases(free(3)) == {frozenset({0, 1, 2})}
    assert brute_force_bases(uniform1(3)) == {frozenset({0}), frozenset({1}), frozenset({2})}
    expected = {frozenset({a, b, 2, 5}) for a in (0, 1) for b in (3, 4)}
    assert brute_force_bases(fixture_matroid(6)) == expected
    assert scan_bases(list(range(6)), fixture_matroid(6).dependent) == expected
    with pytest.raises(OracleTooLarge):
        brute_force_bases(free(13))


@pytest.mark.parametrize("seed", range(30))
def test_brute_force_matches_scan(seed):
    m = random_linear_matroid(random.Random(seed), 7, 3)
    assert brute_force_bases(m) == scan_bases(list(m.ground), m.dependent)


def test_rank_mod_p():
    assert rank_mod_p([(1, 0), (0, 1), (1, 1)], 2) == 2
    assert rank_mod_p([(1, 2), (2, 4)], 5) == 1
    assert rank_mod_p([(0, 0)], 3) == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.lists(st.integers(0, 8), min_size=9, max_size=9, unique=True))
def test_greedy_any_order_is_basis(seed, order):
    m = random_linear_matroid(random.Random(seed), 9, 3)
    assert is_basis(m, greedy_basis(m, order))


def test_injection_encoding_examples():
    f = Stream([3, 1, 4], Constant(0))
    m = ematroid_from_injection(f, check_prefix=3)
    assert set_decode(m.e(pair(0, 0))) == {pair(3, 0), pair(3, 1)}
    for t in range(300):
        s = set_decode(m.e(t))
        j, _ = unpair(t)
        assert {pair(f(j), 0), pair(f(j), 1)} <= s
        assert all(m.is_ground(x) for x in s)
    with pytest.raises(Exception):
        ematroid_from_injection(Stream([1, 1]), check_prefix=2)


def test_injection_decode_evens():
    evens = Stream.derived("evens", lambda j: 2 * j)
    trunc = injection_truncation(lambda a: a % 2 == 0, 4)
    bases = brute_force_bases(trunc)
    assert bases
    for b in bases:
        assert decode_range_from_basis(b, 1) is False
        assert decode_range_from_basis(b, 2) is True
    # truncation dependence agrees with the enumeration on small sets
    m = ematroid_from_injection(evens)
    seen = m.enumerated(4000)
    for r in (1, 2, 3):
        for xs in combinations(trunc.ground, r):
            if trunc.dependent(xs) and r == 2:
                assert set_encode(xs) in seen


def test_injection_identity_decode():
    trunc = injection_truncation(lambda a: True, 3)
    for b in brute_force_bases(trunc):
        assert decode_range_from_basis(b, 0)


def test_injection_axioms_with_oracle():
    m = ematroid_from_injection(Stream.derived("inj", lambda j: [5, 0, 2][j] if j < 3 else j + 6))
    rng = {5, 0, 2}
    m.dependent = lambda xs: any(pair(a, 0) in xs and pair(a, 1) in xs
                                 for a in {unpair(x)[0] for x in xs}
                                 if a in rng or a >= 9)
    rep = check_ematroid_axioms(m, 8, 4, 2000)
    assert rep.violations == []


def test_rank_upper_check():
    mm = DecidableMatroid((0,), lambda xs: len(xs) >= 2, loops_from=1)
    m = matroid_ematroid(mm)
    assert rank_upper_check(m, 2, 4, 3000)
    fm = DecidableMatroid(tuple(range(4)), lambda xs: False, loops_from=4)
    assert not rank_upper_check(matroid_ematroid(fm), 2, 4, 3000)
