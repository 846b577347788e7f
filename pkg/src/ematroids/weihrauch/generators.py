"""Seeded source-instance generators.

A generator draws a JSON-able payload; ``build`` turns a payload into a
certified :class:`Instance`.  The certificate is always recomputed from the
payload, so serialized records and freshly generated instances agree.

Randomness: ``split_rng(seed, *labels)`` hashes the 64-bit seed together
with string labels (BLAKE2b, 8-byte digest) into the seed of an
independent ``random.Random``; every consumer gets its own labelled child.
"""

from __future__ import annotations

import hashlib
import random
from itertools import combinations
from typing import Callable, Optional

from ..codes import (
    FiniteSet, InvalidInstance, SmallSets, Stream, colex_unrank, pair,
    set_decode, set_encode, small_set, unpair,
)
from ..graph import TabledGraph
from ..matroid import (
    DecidableMatroid, brute_force_bases, matroid_ematroid, rank_mod_p,
)
from ..vecspace import QuotientSpace
from .problems import (
    EMBCert, FamilyCert, GACCert, Instance, OmitCert, ParallelCert, ZeroCert,
)

FORMAT_VERSION = 1


def split_rng(seed: int, *labels) -> random.Random:
    h = hashlib.blake2b(digest_size=8)
    h.update(int(seed).to_bytes(8, "little", signed=False) if seed >= 0 else str(seed).encode())
    for lab in labels:
        h.update(b"/" + str(lab).encode())
    return random.Random(int.from_bytes(h.digest(), "little"))


# -- payload generators ------------------------------------------------------------------

def _gen_cn(rng: random.Random, size: int) -> dict:
    prefix_len = rng.randint(0, size)
    kind = rng.choice(["shift", "shift", "constant", "cycle"])
    if kind == "shift":
        skip = sorted(rng.sample(range(2 * size + 2), rng.randint(1, 3)))
        pool = [v for v in range(2 * size + 4) if v not in skip]
        tail = {"rule": "shift", "offset": rng.randint(0, 3), "skip": skip}
    elif kind == "constant":
        pool = list(range(size + 2))
        tail = {"rule": "constant", "value": rng.choice(pool)}
    else:
        pool = list(range(size + 2))
        tail = {"rule": "cycle", "values": rng.sample(pool, rng.randint(1, 3))}
    return {"prefix": [rng.choice(pool) for _ in range(prefix_len)], "tail": tail}


def _gen_cnu(rng: random.Random, size: int) -> dict:
    a = rng.randrange(size + 1)
    offset = rng.randint(0, 3)
    low = [v for v in range(offset + 1) if v != a][:offset]   # every value below the tail but a
    extras = [rng.choice([v for v in range(2 * size + 2) if v != a]) for _ in range(rng.randint(0, size))]
    prefix = low + extras
    rng.shuffle(prefix)
    return {"prefix": prefix, "tail": {"rule": "shift", "offset": offset, "skip": [a]}}


def _gen_lpo(rng: random.Random, size: int) -> dict:
    prefix = [1] * rng.randint(0, size)
    if prefix and rng.random() < 0.4:
        prefix[rng.randrange(len(prefix))] = 0
    tail = {"rule": "constant", "value": 1} if rng.random() < 0.6 else {"rule": "cycle", "values": [1, 1, 0]}
    return {"prefix": prefix, "tail": tail}


def _gen_hatcn(rng: random.Random, size: int) -> dict:
    return {"components": [_gen_cn(rng, size) for _ in range(rng.randint(1, 3))]}


def _partition_graph(rng: random.Random, size: int, groups: int, tail: bool) -> dict:
    if size < groups:
        raise InvalidInstance("need at least one vertex per component")
    label = list(range(groups)) + [rng.randrange(groups) for _ in range(size - groups)]
    rng.shuffle(label)
    edges = set()
    for g in range(groups):
        vs = [v for v in range(size) if label[v] == g]
        rng.shuffle(vs)
        for i in range(1, len(vs)):
            edges.add(tuple(sorted((vs[i], vs[rng.randrange(i)]))))
        for a, b in combinations(vs, 2):
            if rng.random() < 0.15:
                edges.add((a, b))
    return {"size": size, "edges": sorted(map(list, edges)),
            "tail": rng.randrange(size) if tail else None}


def _gen_gac(rng: random.Random, size: int) -> dict:
    return _partition_graph(rng, size, rng.randint(1, max(1, size - 1)), rng.random() < 0.6)


def _gen_gacn(rng: random.Random, size: int, n: int) -> dict:
    return _partition_graph(rng, max(size, n), n, True)


def _gen_gaclt(rng: random.Random, size: int, n: int) -> dict:
    if n < 2:
        raise InvalidInstance("bound n must be at least 2")
    return _partition_graph(rng, max(size, n), rng.randint(1, n - 1), True)


def _gen_matroid(rng: random.Random, size: int, rank: int, p: int = 3) -> dict:
    size = max(size, rank)
    while True:
        cols = [[rng.randrange(p) for _ in range(rank)] if rng.random() > 0.15 else [0] * rank
                for _ in range(size)]
        if rank_mod_p(cols, p) == rank:
            return {"columns": cols, "p": p}


def _gen_emb(rng: random.Random, size: int) -> dict:
    return _gen_matroid(rng, size, rng.randint(1, max(1, min(size, 4))))


def _gen_embn(rng: random.Random, size: int, n: int) -> dict:
    return _gen_matroid(rng, size, n)


def _gen_emblt(rng: random.Random, size: int, n: int) -> dict:
    return _gen_matroid(rng, size, rng.randint(1, n))


def _gen_space(rng: random.Random, size: int) -> dict:
    gens = rng.randint(1, max(1, min(size, 4)))
    rels = [[rng.randint(-2, 2) for _ in range(gens)] for _ in range(rng.randrange(gens))]
    return {"gens": gens, "relations": rels}


def _gen_hatvsb(rng: random.Random, size: int) -> dict:
    return {"spaces": [_gen_space(rng, size) for _ in range(3)]}


def _gen_family(rng: random.Random, size: int, n: int) -> dict:
    if n < 2:
        raise InvalidInstance("n must be at least 2")
    top = max(size, n + 1)
    omitted = set()
    for _ in range(rng.randint(1, 3)):
        omitted.add(FiniteSet(rng.sample(range(top), rng.randint(1, n - 1))).code)
    pool = [small_set(y, n).code for y in range(4 * top) if small_set(y, n).code not in omitted]
    prefix = [rng.choice(pool) for _ in range(rng.randint(0, size))]
    return {"prefix": prefix, "tail": {"rule": "small-sets", "bound": n, "offset": rng.randint(0, 2),
                                       "skip": sorted(omitted)}}


GENERATORS: dict[str, Callable] = {
    "cn": _gen_cn, "cnu": _gen_cnu, "lpo": _gen_lpo, "hatcn": _gen_hatcn,
    "gac": _gen_gac, "gacn": _gen_gacn, "gaclt": _gen_gaclt,
    "emb": _gen_emb, "embn": _gen_embn, "emblt": _gen_emblt,
    "vsb": _gen_space, "hatvsb": _gen_hatvsb,
    "csubmax": _gen_family, "ccardmax": _gen_family,
}
NEEDS_N = {"gacn", "gaclt", "embn", "emblt", "csubmax", "ccardmax"}


# -- builders ----------------------------------------------------------------------------------

def _stab(prefix_len: int, size: int) -> int:
    return prefix_len + 2 * size + 4


def _build_cn(payload: dict, size: int) -> Instance:
    f = Stream.from_json(payload)
    return Instance("cn", {"f": f}, OmitCert.of(f.omitted()), _stab(len(f.prefix), size))


def _build_cnu(payload: dict, size: int) -> Instance:
    f = Stream.from_json(payload)
    om = f.omitted()
    if not om.is_finite or len(om.finite) != 1:
        raise InvalidInstance(f"expected a unique omitted value, got {om}")
    return Instance("cnu", {"f": f}, OmitCert.of(om), _stab(len(f.prefix), size))


def _first_zero(p: Stream) -> Optional[int]:
    for s in range(p.stabilization + 8):
        if p(s) == 0:
            return s
    return None


def _build_lpo(payload: dict, size: int) -> Instance:
    p = Stream.from_json(payload)
    return Instance("lpo", {"p": p}, ZeroCert(_first_zero(p), p), _stab(len(p.prefix), size))


DEFAULT_COMPONENT = {"prefix": [], "tail": {"rule": "constant", "value": 0}}


def pack(component: Callable[[int], Callable[[int], int]]) -> Stream:
    """One stream carrying component ``c`` at indices ``pair(c, i)``."""
    def f(t: int) -> int:
        c, i = unpair(t)
        return component(c)(i)
    return Stream.derived("packed", f)


def _build_hatcn(payload: dict, size: int) -> Instance:
    comps = [_build_cn(c, size) for c in payload["components"]]
    default = _build_cn(DEFAULT_COMPONENT, size)

    def component(c: int) -> Instance:
        return comps[c] if c < len(comps) else default

    stab = max(i.stabilization_bound for i in comps)
    cert = ParallelCert(lambda c: component(c).cert, len(comps) + 2)
    return Instance("hatcn", {"f": pack(lambda c: component(c).data["f"]), "component": component},
                    cert, stab)


def _build_graph(kind: str, payload: dict, size: int, n: Optional[int]) -> Instance:
    g = TabledGraph.from_json(payload)
    comps = g.components()
    inst = Instance(kind, {"graph": g}, GACCert(comps, g.size + 4), _stab(g.size, size),
                    {"n": n} if n is not None else {})
    return inst


def linear_matroid(payload: dict) -> DecidableMatroid:
    cols, p = payload["columns"], payload["p"]

    def dep(xs: frozenset) -> bool:
        return rank_mod_p([cols[x] for x in xs], p) < len(xs)

    return DecidableMatroid(tuple(range(len(cols))), dep, loops_from=len(cols))


def matroid_cert(m: DecidableMatroid, rank: int) -> EMBCert:
    bases = sorted(brute_force_bases(m), key=lambda b: b.code)
    window = m.loops_from + 4
    fallback = set_encode([m.loops_from])

    def is_basis(b) -> bool:
        try:
            xs = FiniteSet(x for x in range(window) if x in b)
        except TypeError:
            return False
        if isinstance(b, (set, frozenset)) and any(x >= window for x in b):
            return False
        return xs in bases

    def sample(rng: random.Random, k: int) -> list:
        return list(bases) if len(bases) <= k else rng.sample(bases, k)

    def first_appearance(c: int) -> int:
        if c == fallback:
            return 0
        if not m.dependent(set_decode(c)):
            raise InvalidInstance("independent sets never appear")
        return pair(c, 0)

    return EMBCert(m.dependent, is_basis, sample, rank, first_appearance, window)


def _build_emb(kind: str, payload: dict, size: int, n: Optional[int]) -> Instance:
    m = linear_matroid(payload)
    rank = rank_mod_p(payload["columns"], payload["p"])
    em = matroid_ematroid(m)
    return Instance(kind, {"m": em, "matroid": m}, matroid_cert(m, rank), _stab(len(m.ground), size),
                    {"n": n} if n is not None else {})


def _build_vsb(payload: dict, size: int) -> Instance:
    space = QuotientSpace.from_json(payload)
    return Instance("vsb", {"space": space}, None, _stab(space.gens, size))


def _build_hatvsb(payload: dict, size: int) -> Instance:
    spaces = [QuotientSpace.from_json(s) for s in payload["spaces"]]
    return Instance("hatvsb", {"spaces": spaces}, None, _stab(sum(s.gens for s in spaces), size))


def large_set(t: int, n: int) -> FiniteSet:
    """The ``t``-th set of size at least ``n``."""
    a, b = unpair(t)
    return colex_unrank(b, n + a)


def family_stream(small: Stream, n: int) -> Stream:
    """Small sets at even indices, every set of size ``>= n`` at odd ones."""
    def f(t: int) -> int:
        q, r = divmod(t, 2)
        return small(q) if r == 0 else large_set(q, n).code
    return Stream.derived("family", f)


def _build_family(kind: str, payload: dict, size: int, n: int) -> Instance:
    small = Stream.from_json(payload)
    if not isinstance(small.tail, SmallSets) or small.tail.bound != n:
        raise InvalidInstance("family instances need a small-sets tail with bound n")
    omitted = [FiniteSet()] + small.omitted_small_sets()
    return Instance(kind, {"f": family_stream(small, n), "small": small}, FamilyCert(omitted),
                    _stab(2 * len(small.prefix), size), {"n": n})


def build(kind: str, payload: dict, size: int, n: Optional[int] = None, seed: Optional[int] = None) -> Instance:
    if kind in NEEDS_N and n is None:
        raise InvalidInstance(f"{kind} needs a parameter n")
    if kind == "cn":
        inst = _build_cn(payload, size)
    elif kind == "cnu":
        inst = _build_cnu(payload, size)
    elif kind == "lpo":
        inst = _build_lpo(payload, size)
    elif kind == "hatcn":
        inst = _build_hatcn(payload, size)
    elif kind in ("gac", "gacn", "gaclt"):
        inst = _build_graph(kind, payload, size, n)
    elif kind in ("emb", "embn", "emblt"):
        inst = _build_emb(kind, payload, size, n)
    elif kind == "vsb":
        inst = _build_vsb(payload, size)
    elif kind == "hatvsb":
        inst = _build_hatvsb(payload, size)
    elif kind in ("csubmax", "ccardmax"):
        inst = _build_family(kind, payload, size, n)
    else:
        raise InvalidInstance(f"no generator for {kind!r}")
    inst.seed = seed
    inst.params.setdefault("size", size)
    inst.data["payload"] = payload
    return inst


def generate(kind: str, seed: int, size: int = 6, n: Optional[int] = None) -> Instance:
    if kind not in GENERATORS:
        raise InvalidInstance(f"no generator for {kind!r}")
    if kind in NEEDS_N and n is None:
        raise InvalidInstance(f"{kind} needs a parameter n")
    rng = split_rng(seed, "gen", kind, size, n)
    gen = GENERATORS[kind]
    payload = gen(rng, size, n) if kind in NEEDS_N else gen(rng, size)
    return build(kind, payload, size, n, seed)


# -- records -----------------------------------------------------------------------------------

def certificate_json(inst: Instance) -> dict:
    c = inst.cert
    if isinstance(c, OmitCert):
        return {"omitted_first": c.first(8)}
    if isinstance(c, ZeroCert):
        return {"first_zero": c.first_zero}
    if isinstance(c, ParallelCert):
        return {"components": [certificate_json(inst.data["component"](i)) for i in range(c.window)]}
    if isinstance(c, GACCert):
        return {"components": c.comps.count, "table_components": len(c.comps.table_keys or [])}
    if isinstance(c, EMBCert):
        return {"rank": c.rank, "bases": [sorted(b) for b in c.sample(random.Random(0), 1 << 12)]}
    if isinstance(c, FamilyCert):
        return {"omitted": [sorted(x) for x in c.omitted]}
    if inst.kind in ("vsb", "vsbn", "vsblt"):
        return {"dimension": inst.data["space"].dimension}
    if inst.kind == "hatvsb":
        return {"dimensions": [s.dimension for s in inst.data["spaces"]]}
    return {}


def to_record(inst: Instance) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "kind": inst.kind,
        "params": {k: v for k, v in sorted(inst.params.items())},
        "seed": inst.seed,
        "stabilization_bound": inst.stabilization_bound,
        "payload": inst.data["payload"],
        "certificate": certificate_json(inst),
    }


def from_record(rec: dict) -> Instance:
    if rec.get("format_version") != FORMAT_VERSION:
        raise InvalidInstance(f"unsupported format_version {rec.get('format_version')!r}")
    params = rec["params"]
    return build(rec["kind"], rec["payload"], params["size"], params.get("n"), rec.get("seed"))
