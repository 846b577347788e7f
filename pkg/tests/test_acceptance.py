"""Acceptance criteria, one test each, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the verdict lines go to
the terminal even when output is captured.
"""

import random
import time

import pytest
import sympy

from ematroids.codes import Shift, Stream, pair, set_decode, unpair
from ematroids.matroid import (
    DecidableMatroid, brute_force_bases, check_ematroid_axioms, decode_range_from_basis,
    ematroid_from_injection, greedy_basis, random_linear_matroid,
)
from ematroids.vecspace import (
    DirectSum, FormalSum, GadgetNSpace, build_gadget_space_2, decode_basis_to_maxset,
    decode_basis_to_omitted, dependence, sample_bases, slot_sum, split_by_projection,
    split_pure_basis, truncated_rank,
)
from ematroids.weihrauch import REDUCTIONS, generate, negative_controls, verify_reduction
from ematroids.weihrauch.reductions import _Walk, walk_settles
from ematroids.weihrauch.verify import default_budget

PREFIX, SUBSET = 8, 4


@pytest.fixture
def verdict(capsys):
    def say(name: str, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return say


def enum_bound(stab: int) -> int:
    return 4 * stab * stab


# -- axiom suite ---------------------------------------------------------------------------------

def random_injection(rng: random.Random, size: int = 6):
    """An injective stream and its range, read off the construction."""
    skip = set(rng.sample(range(2 * size), rng.randint(1, size)))
    prefix = rng.sample(sorted(skip), rng.randint(0, len(skip) - 1))
    f = Stream(prefix, Shift(rng.randint(0, 3), frozenset(skip)))
    # never produced: skipped values left out of the prefix, and the tail values jumped by the offset
    outside = [v for v in range(4 * size + 8) if v not in skip]
    missing = (skip - set(prefix)) | set(outside[:f.tail.offset])
    return f, (lambda a: a not in missing), len(prefix) + 2 * size + 4


def injection_case(seed):
    f, in_range, stab = random_injection(random.Random(seed))
    m = ematroid_from_injection(f, check_prefix=stab)

    def dependent(xs):
        return any(pair(a, 0) in xs and pair(a, 1) in xs for a in {unpair(x)[0] for x in xs} if in_range(a))
    m.dependent = dependent
    return m, in_range, stab


def test_range_oracle_matches_stream():
    for seed in range(20):
        f, in_range, stab = random_injection(random.Random(seed))
        seen = {f(j) for j in range(400)}
        assert all(in_range(a) == (a in seen) for a in range(40))


def test_axiom_suite(verdict):
    t0 = time.time()
    cases = []
    for seed in range(20):
        m, _, stab = injection_case(seed)
        cases.append(("injection", seed, m, stab))
    for seed in range(20):
        src = generate("gac", seed)
        cases.append(("graph", seed, REDUCTIONS["gac-emb"].apply(src).data["m"], src.stabilization_bound))
    for seed in range(20):
        src = generate("vsb", seed)
        cases.append(("space", seed, REDUCTIONS["vsb-emb"].apply(src).data["m"], src.stabilization_bound))
    for seed in range(20):
        kind, n = [("emb", None), ("embn", 2), ("embn", 3), ("emblt", 3)][seed % 4]
        src = generate(kind, seed, 6, n)
        cases.append((kind, seed, src.data["m"], src.stabilization_bound))
    bad = []
    for kind, seed, m, stab in cases:
        rep = check_ematroid_axioms(m, PREFIX, SUBSET, enum_bound(stab))
        if rep.violations:
            bad.append((kind, seed, rep.violations[:2]))
    elapsed = time.time() - t0
    ok = not bad and elapsed < 30
    verdict("axiom suite", ok, f"{len(cases)} e-matroids, {len(bad)} with violations, {elapsed:.1f}s (< 30s)")
    assert not bad, bad[:3]
    assert elapsed < 30


# -- greedy against brute force ----------------------------------------------------------------------

def test_greedy_oracle_equivalence(verdict):
    hits = 0
    for seed in range(100):
        rng = random.Random(seed)
        size = rng.randint(1, 9)
        m = random_linear_matroid(rng, size, rng.randint(1, min(size, 4)), rng.choice([2, 3, 5]))
        order = list(m.ground)
        rng.shuffle(order)
        hits += greedy_basis(m, order) in brute_force_bases(m)
    verdict("greedy-oracle equivalence", hits == 100, f"{hits}/100 greedy bases are brute-force bases")
    assert hits == 100


# -- decode law for the injection encoding -----------------------------------------------------------

def truncation_from_enumeration(m, k: int, bound: int) -> DecidableMatroid:
    """The encoding matroid on ``{(i, eps) : i < k}``, dependence read off ``e``."""
    ground = frozenset(pair(i, eps) for i in range(k) for eps in (0, 1))
    found = {set_decode(m.e(t)) for t in range(bound)}
    inside = [d for d in found if d <= ground]
    minimal = [d for d in inside if not any(o < d for o in inside)]
    return DecidableMatroid(tuple(sorted(ground)), lambda xs: any(d <= xs for d in minimal))


def test_decode_law(verdict):
    counter = 0
    checked = 0
    for seed in range(50):
        m, in_range, stab = injection_case(seed)
        trunc = truncation_from_enumeration(m, 8, enum_bound(stab))
        for b in brute_force_bases(trunc, limit=16):
            for k in range(8):
                checked += 1
                counter += decode_range_from_basis(b, k) != in_range(k)
    verdict("b1 decode law", counter == 0, f"{checked} (basis, k) checks, {counter} counterexamples")
    assert counter == 0


# -- the reduction suite ----------------------------------------------------------------------------

def test_reduction_suite(verdict):
    t0 = time.time()
    reports = [verify_reduction(r, trials=100) for r in REDUCTIONS.values()]
    elapsed = time.time() - t0
    passes = sum(r.passes for r in reports)
    trials = sum(r.trials for r in reports)
    for r in reports:
        verdict(f"  {r.name}", r.ok, f"{r.passes}/{r.trials}, max queries {r.max_queries}")
    ok = len(reports) == 15 and passes == trials == 1500 and elapsed < 300
    verdict("reduction suite", ok, f"{passes}/{trials} trials, {elapsed:.1f}s (< 300s)")
    assert len(reports) == 15
    assert passes == trials == 1500, [f for r in reports for f in r.failures][:2]
    assert elapsed < 300


# -- the dimension-2 gadget -----------------------------------------------------------------------------

def test_gadget_two_dimensional(verdict):
    ranks, decoded = [], 0
    for seed in range(20):
        src = generate("cnu", seed)
        a = src.cert.first(1)[0]
        space = build_gadget_space_2(src.data["f"])
        gens = 2 * a + 12
        bound = 2 * max(space.key_slot(k) for k in range(gens)) + 2
        ranks.append(truncated_rank(space, bound))
        b = sample_bases(space, random.Random(seed), 1)[0]
        decoded += decode_basis_to_omitted([slot_sum(x) for x in b], space.f) == a
    ok = ranks == [2] * 20 and decoded == 20
    verdict("Q14B gadget", ok, f"truncated ranks {sorted(set(ranks))}, decoded {decoded}/20")
    assert ranks == [2] * 20
    assert decoded == 20


# -- the n-fold gadget -------------------------------------------------------------------------------------

def random_vectors(rng, n, count, spread=6):
    out = []
    for _ in range(count):
        terms = {pair(rng.randrange(spread), rng.randrange(n)): rng.randint(-3, 3) for _ in range(rng.randint(1, 4))}
        out.append(FormalSum({k: v for k, v in terms.items() if v}))
    return out


def test_gadget_n_fold(verdict):
    bad, samples = [], 0
    for n in (2, 3, 4):
        for seed in range(10):
            src = generate("ccardmax", seed, 6, n)
            om = src.cert.omitted
            space = GadgetNSpace(src.data["f"], n, om)
            top = max(len(x) for x in om)
            keys = [pair(i, k) for i in range(2 * 6 + 8) for k in range(n)]
            bound = 2 * max(space.key_slot(key) for key in keys) + 2
            r = truncated_rank(space, bound)
            b = sample_bases(space, random.Random(seed), 1)[0]
            k = len(b) - n - 1
            if not (n <= r <= 2 * n) or k != top:
                bad.append((n, seed, r, k, top))
            got = decode_basis_to_maxset([_vector_in(space, x) for x in b], n, src.data["f"])
            if got not in om or len(got) != top:
                bad.append((n, seed, "decode", sorted(got)))
            rng = random.Random(seed)
            for _ in range(50):
                samples += 1
                if not dependence(random_vectors(rng, n, 2 * n + 1), space)[0]:
                    bad.append((n, seed, "independent 2n+1"))
    verdict("Q17A gadget", not bad, f"30 instances, {samples} (2n+1)-samples, {len(bad)} problems")
    assert not bad, bad[:3]


def _vector_in(space, x):
    v = slot_sum(x)
    return FormalSum({space.gen_key(s): q for s, q in v.terms.items()})


# -- direct sums ----------------------------------------------------------------------------------------

def oracle_is_basis(space, vectors) -> bool:
    """Rank in the free module against the relations, by sympy."""
    rels = [list(r) for r in space.relations]
    rows = [[v.coeff(k) for k in range(space.gens)] for v in vectors]
    r_rel = sympy.Matrix(rels).rank() if rels else 0
    r_all = sympy.Matrix(rels + rows).rank() if rels + rows else 0
    dim = space.gens - r_rel
    return len(vectors) == dim and r_all - r_rel == dim


def test_direct_sum_split(verdict):
    good = total = 0
    for seed in range(20):
        src = generate("hatvsb", seed)
        spaces = src.data["spaces"]
        ds = DirectSum(spaces)
        rng = random.Random(seed)
        pure = []
        for i, sp in enumerate(spaces):
            pure += [ds.inject(i, sp.vector(x)) for x in sample_bases(sp, rng, 1)[0]]
        mixed = [ds.vector(x) for x in sample_bases(ds, rng, 1)[0]]
        for pieces in (split_pure_basis(ds, pure), split_by_projection(ds, mixed)):
            total += 1
            good += all(oracle_is_basis(sp, piece) for sp, piece in zip(spaces, pieces))
    verdict("direct-sum split", good == total, f"{good}/{total} splits are summand bases (20 pure, 20 mixed)")
    assert good == total


# -- the F walk --------------------------------------------------------------------------------------

def test_marker_walk(verdict):
    bad = []
    for seed in range(50):
        n = 2 + seed % 2
        src = generate("embn", seed, 6, n)
        bound = default_budget(src)
        t, final = walk_settles(src.cert, src.data["m"].e, n)
        walk = _Walk(src.data["m"].e, n)
        if t > bound or walk.at(bound) != final or final not in brute_force_bases(src.data["matroid"]):
            bad.append((seed, n, t, sorted(final)))
    verdict("w2 marker walk", not bad, f"50 instances, {len(bad)} failures")
    assert not bad


# -- negative controls --------------------------------------------------------------------------------

def test_negative_controls(verdict):
    results = {r.name: len(verify_reduction(r, trials=100).failures) for r in negative_controls()}
    ok = len(results) == 3 and all(v >= 1 for v in results.values())
    verdict("negative controls", ok, ", ".join(f"{k}: {v} failures" for k, v in results.items()))
    assert ok
