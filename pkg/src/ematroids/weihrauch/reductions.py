"""Reductions between the registered problems.

A reduction has a forward map ``phi`` on instance data (it may read only
the source data, never the certificate), a ``certify`` step deriving the
target certificate from the source certificate, and a backward map
``psi``.  A strong ``psi`` is called with the target solution alone; a
plain one also receives the source instance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Callable, Optional

from ..codes import (
    BudgetExhausted, FiniteSet, MovingMarker, Stream, colex_rank,
    colex_unrank, injectivize, nth_outside, pair, set_decode, unpair,
)
from ..graph import (
    AnchoredGraph, GadgetGraph, anchored_components, decode_antichain_to_maxset,
    ematroid_from_graph, gadget_components, is_max_antichain, repair_basis,
)
from ..matroid import EMatroid, greedy_steps
from ..vecspace import (
    DirectSum, FormalSum, Gadget2Space, GadgetNSpace, branch_stream, decode_basis_to_maxset,
    decode_basis_to_omitted, ematroid_from_vectorspace, is_basis as space_is_basis,
    sample_bases, slot_sum, split_by_projection,
)
from .generators import pack
from .problems import (
    ChoiceFunction, EMBCert, FamilyCert, GACCert, Instance, OmitCert, ParallelCert, ZeroCert,
)


class InvalidComposition(ValueError):
    pass


STRONG, PLAIN = "strong", "plain"


@dataclass
class Reduction:
    name: str
    source: str
    target: str
    phi: Callable[[dict, dict], tuple[dict, dict]]
    certify: Callable[[Instance, dict, dict], Any]
    psi: Callable
    strength: str
    output: Optional[Callable[[dict], Callable[[int], Any]]] = None
    parts: tuple = field(default=())

    def apply(self, src: Instance) -> Instance:
        if self.parts:
            out = src
            for r in self.parts:
                out = r.apply(out)
            return out
        data, params = self.phi(src.data, src.params)
        cert = self.certify(src, data, params)
        return Instance(self.target, data, cert, src.stabilization_bound, params, src.seed)

    def forward(self, data: dict, params: dict) -> tuple[dict, dict]:
        """``phi`` alone, without certificates."""
        if self.parts:
            for r in self.parts:
                data, params = r.forward(data, params)
            return data, params
        return self.phi(data, params)

    def back(self, sol, src: Optional[Instance] = None):
        if self.strength == STRONG:
            return self.psi(sol)
        return self.psi(sol, src)


def _keep(params: dict, **changes) -> dict:
    out = dict(params)
    out.update(changes)
    return out


# -- LPO to C_N ---------------------------------------------------------------------------
# f(s) = 0 at the first zero z of p and s + 1 elsewhere, so the range misses
# exactly z + 1 (or 0 when p has no zero).

def _first_zero_upto(p: Callable[[int], int], s: int, memo: dict) -> Optional[int]:
    while memo["scanned"] <= s and memo["zero"] is None:
        t = memo["scanned"]
        if p(t) == 0:
            memo["zero"] = t
        memo["scanned"] += 1
    z = memo["zero"]
    return z if z is not None and z <= s else None


def _lpo_cn_phi(data: dict, params: dict) -> tuple[dict, dict]:
    p = data["p"]
    memo = {"scanned": 0, "zero": None}

    def f(s: int) -> int:
        return 0 if _first_zero_upto(p, s, memo) == s else s + 1

    return {"f": Stream.derived("lpo-cn", f)}, _keep(params)


def _lpo_cn_cert(src: Instance, data: dict, params: dict) -> OmitCert:
    z = src.cert.first_zero
    return OmitCert.single(0 if z is None else z + 1)


def _lpo_cn_psi(m: int) -> int:
    return m - 1 if m > 0 else 0


# -- parallel C_N to parallel LPO ---------------------------------------------------------
# Component 2<c,n> of the target vanishes where f_c hits n; component
# 2<<c,n>,i>+1 vanishes at 0 if f_c(i) != n and at 1 otherwise, which lets
# psi check whether the answer i to 2<c,n> really is a preimage of n.

def _hat_component(f: Callable[[int], int], d: int) -> Callable[[int], int]:
    if d % 2 == 0:
        c, n = unpair(d // 2)
        return lambda s: 0 if f(pair(c, s)) == n else 1
    cn, i = unpair((d - 1) // 2)
    c, n = unpair(cn)

    def r(s: int) -> int:
        if s > 1:
            return 1
        hit = f(pair(c, i)) == n
        return 0 if (s == 1) == hit else 1
    return r


def _hatcn_hatlpo_phi(data: dict, params: dict) -> tuple[dict, dict]:
    f = data["f"]
    comps: dict[int, Callable[[int], int]] = {}

    def component(d: int) -> Callable[[int], int]:
        if d not in comps:
            comps[d] = _hat_component(f, d)
        return comps[d]

    return {"p": pack(component), "p_component": component}, _keep(params)


def _hatcn_hatlpo_cert(src: Instance, data: dict, params: dict) -> ParallelCert:
    f = src.data["f"]

    def zero_cert(d: int) -> ZeroCert:
        p = data["p_component"](d)
        if d % 2 == 0:
            c, n = unpair(d // 2)
            if src.cert.component(c).contains(n):
                return ZeroCert(None, p)
            s = 0
            while f(pair(c, s)) != n:
                s += 1
            return ZeroCert(s, p)
        return ZeroCert(0 if p(0) == 0 else 1, p)

    def component(d: int) -> Instance:
        return Instance("lpo", {"p": data["p_component"](d)}, zero_cert(d), src.stabilization_bound)

    data["component"] = component
    return ParallelCert(zero_cert, 6)


def _hatcn_hatlpo_psi(h: Callable[[int], int], search: int = 4096) -> ChoiceFunction:
    def pick(c: int) -> int:
        for n in range(search):
            i = h(2 * pair(c, n))
            if h(2 * pair(pair(c, n), i) + 1) == 0:
                return n
        raise BudgetExhausted(f"no omitted value of component {c} below {search}")
    return ChoiceFunction(pick)


# -- C_N to unique C_N (moving marker) ------------------------------------------------------

def _cn_cnu_phi(data: dict, params: dict) -> tuple[dict, dict]:
    mm = MovingMarker(data["f"])
    return {"f": mm.stream, "marker": mm}, _keep(params)


def _cn_cnu_cert(src: Instance, data: dict, params: dict) -> OmitCert:
    y = src.cert.first(1)[0]
    return OmitCert.single(pair(*MovingMarker(src.data["f"]).settle(y)))


def _cn_cnu_psi(m: int) -> int:
    return unpair(m)[0]


# -- graphs to e-matroids ---------------------------------------------------------------------

def _graph_emb_phi(target_n: Callable[[dict], Optional[int]]):
    def phi(data: dict, params: dict) -> tuple[dict, dict]:
        g = AnchoredGraph(data["graph"], 0)
        m = ematroid_from_graph(g, g.edge)
        out = _keep(params)
        n = target_n(params)
        if n is not None:
            out["n"] = n
        return {"m": m, "graph": g}, out
    return phi


def _graph_emb_cert(src: Instance, data: dict, params: dict) -> EMBCert:
    g = data["graph"]
    comps = anchored_components(src.cert.comps, 0)
    window = src.cert.window + 1

    def dependent(xs: frozenset) -> bool:
        labels = [comps.label(x) for x in xs]
        return len(set(labels)) < len(labels)

    def is_basis(b) -> bool:
        return is_max_antichain(g, comps, b, window)

    def sample(rng, k: int) -> list:
        every = comps.all_antichains(window, k)
        return every if every is not None else [comps.sample_antichain(rng, window) for _ in range(k)]

    data["m"].dependent = dependent
    return EMBCert(dependent, is_basis, sample, comps.count, None, window)


def _graph_emb_psi(b):
    return repair_basis(b, 0)


def _graph_output(data: dict) -> Callable[[int], Any]:
    return data["m"].e


# -- vector spaces to e-matroids ----------------------------------------------------------------

def _vsb_emb_phi(data: dict, params: dict) -> tuple[dict, dict]:
    return {"m": ematroid_from_vectorspace(data["space"]), "space": data["space"]}, _keep(params)


def _vsb_emb_cert(src: Instance, data: dict, params: dict) -> EMBCert:
    space = src.data["space"]

    def is_basis(b) -> bool:
        try:
            return space_is_basis(space, list(b))
        except TypeError:
            return False

    return EMBCert(space.element_dependent, is_basis, lambda rng, k: sample_bases(space, rng, k),
                   space.dimension, None, 0)


def _identity(x):
    return x


# -- e-matroids to parallel C_N ------------------------------------------------------------------
# Component c (the finite set coded by c) enumerates odd numbers 2s+1 until
# c shows up in e at stage t0; from then on it enumerates everything but
# 2 t0 + 1.  So component c has an odd solution iff the set is dependent.

class _Appearance:
    def __init__(self, e: Callable[[int], int]):
        self.e = e
        self.first: dict[int, int] = {}
        self.scanned = 0

    def upto(self, c: int, s: int) -> Optional[int]:
        while self.scanned <= s and c not in self.first:
            self.first.setdefault(self.e(self.scanned), self.scanned)
            self.scanned += 1
        t = self.first.get(c)
        return t if t is not None and t <= s else None


def _emb_hatcn_phi(data: dict, params: dict) -> tuple[dict, dict]:
    seen = _Appearance(data["m"].e)

    def component(c: int) -> Callable[[int], int]:
        def fc(s: int) -> int:
            t0 = seen.upto(c, s)
            return 2 * s + 1 if t0 is None else nth_outside(s - t0, [2 * t0 + 1])
        return fc

    return {"f": pack(component), "f_component": component}, _keep(params)


def _emb_hatcn_cert(src: Instance, data: dict, params: dict) -> ParallelCert:
    cert: EMBCert = src.cert

    def omit(c: int) -> OmitCert:
        if c and cert.dependent(set_decode(c)):
            return OmitCert.single(2 * cert.first_appearance(c) + 1)
        return OmitCert(lambda m: m % 2 == 0, lambda k: [2 * i for i in range(k)])

    def component(c: int) -> Instance:
        return Instance("cn", {"f": Stream.derived("component", data["f_component"](c))}, omit(c),
                        src.stabilization_bound)

    data["component"] = component
    return ParallelCert(omit, 8)


class GreedyBasis:
    """The greedy basis of ``0, 1, 2, ...`` under a dependence predicate, built on demand."""

    def __init__(self, dependent: Callable[[frozenset], bool]):
        self.steps = greedy_steps(dependent, _naturals())
        self.members: list[int] = []
        self.decided = -1

    def __contains__(self, x: int) -> bool:
        while self.decided < x:
            y, take = next(self.steps)
            self.decided = y
            if take:
                self.members.append(y)
        return x in self.members

    def __repr__(self) -> str:
        return f"GreedyBasis(decided<= {self.decided}: {self.members})"


def _naturals():
    i = 0
    while True:
        yield i
        i += 1


def _emb_hatcn_psi(h: Callable[[int], int]) -> GreedyBasis:
    return GreedyBasis(lambda xs: h(FiniteSet(xs).code) % 2 == 1)


# -- parallel VSB to VSB (direct sum) -------------------------------------------------------------

def _hatvsb_vsb_phi(data: dict, params: dict) -> tuple[dict, dict]:
    return {"space": DirectSum(data["spaces"])}, _keep(params)


def _hatvsb_vsb_psi(b, src: Instance) -> list[FiniteSet]:
    spaces = src.data["spaces"]
    ds = DirectSum(spaces)
    parts = split_by_projection(ds, [ds.vector(x) for x in b])
    return [FiniteSet(sp.element_of(v) for v in part) for sp, part in zip(spaces, parts)]


# -- unique C_N to VSB_2 --------------------------------------------------------------------------

def _cnu_vsb2_phi(data: dict, params: dict) -> tuple[dict, dict]:
    return {"g": injectivize(data["f"])}, _keep(params, n=2)


def _cnu_vsb2_cert(src: Instance, data: dict, params: dict) -> None:
    data["space"] = Gadget2Space(data["g"], src.cert.first(1)[0])
    return None


def _cnu_vsb2_psi(b, src: Instance) -> int:
    return decode_basis_to_omitted([slot_sum(x) for x in b], injectivize(src.data["f"]))


def _relation_code(g: Callable[[int], int], m: int) -> int:
    a = g(m)
    return FormalSum({2 * a: 1, 2 * a + 1: m + 1}).code


def _cnu_vsb2_output(data: dict) -> Callable[[int], Any]:
    return lambda m: _relation_code(data["g"], m)


# -- VSB_n-style e-matroid walk to C_N ----------------------------------------------------------
# F_0 = {0..n-1}; F_{t+1} is the colex successor of F_t when e(t) = F_t.
# The target misses exactly the codes <t, F_t> with t > 0 after which F
# never moves again.

class _Walk:
    def __init__(self, e: Callable[[int], int], n: int):
        self.e = e
        self.n = n
        self.sets = [FiniteSet(range(n))]

    def at(self, t: int) -> FiniteSet:
        while len(self.sets) <= t:
            cur = self.sets[-1]
            step = len(self.sets) - 1
            if self.e(step) == cur.code:
                cur = colex_unrank(colex_rank(cur) + 1, self.n)
            self.sets.append(cur)
        return self.sets[t]


def _embn_cn_phi(data: dict, params: dict) -> tuple[dict, dict]:
    walk = _Walk(data["m"].e, params["n"])

    def f(s: int) -> int:
        c, w = unpair(s)
        t, r = unpair(c)
        if t == 0 or r != walk.at(t).code or walk.at(t + w) != walk.at(t):
            return c
        return 0

    return {"f": Stream.derived("embn-cn", f), "walk": walk}, {k: v for k, v in params.items() if k != "n"}


def walk_settles(cert: EMBCert, e: Callable[[int], int], n: int) -> tuple[int, FiniteSet]:
    """First stage from which the walk stays put, and where it stays."""
    cur, t = FiniteSet(range(n)), 0
    while cert.dependent(cur):
        while e(t) != cur.code:
            t += 1
        t += 1
        cur = colex_unrank(colex_rank(cur) + 1, n)
    return t, cur


def _embn_cn_cert(src: Instance, data: dict, params: dict) -> OmitCert:
    t, final = walk_settles(src.cert, src.data["m"].e, src.n)
    start, code = max(t, 1), final.code

    def contains(x: int) -> bool:
        tt, r = unpair(x)
        return tt >= start and r == code

    return OmitCert(contains, lambda k: [pair(start + i, code) for i in range(k)])


def _embn_cn_psi(m: int) -> FiniteSet:
    return set_decode(unpair(m)[1])


# -- bounded-rank e-matroids to containment-maximal omitted sets ------------------------------------

def _emblt_csubmax_phi(data: dict, params: dict) -> tuple[dict, dict]:
    m: EMatroid = data["m"]

    def f(t: int) -> int:
        q, eps = divmod(t, 2)
        if eps:
            return m.e(q)
        i, j = unpair(q)
        if any(not m.is_ground(x) for x in set_decode(i)):
            return i
        return m.e(j)

    return {"f": Stream.derived("emblt-csubmax", f)}, _keep(params, n=params["n"] + 1)


def _emblt_csubmax_cert(src: Instance, data: dict, params: dict) -> FamilyCert:
    mat = src.data["matroid"]
    ground = [x for x in mat.ground if not mat.dependent([x])]
    indep = [FiniteSet(c) for r in range(len(ground) + 1) for c in combinations(ground, r)
             if not mat.dependent(c)]
    return FamilyCert(indep)


# -- maximum-cardinality omitted sets to graphs --------------------------------------------------

def _ccardmax_gaclt_phi(data: dict, params: dict) -> tuple[dict, dict]:
    n = params["n"]
    return {"graph": GadgetGraph(data["f"], n)}, _keep(params, n=2 * n - 1)


def _ccardmax_gaclt_cert(src: Instance, data: dict, params: dict) -> GACCert:
    g = data["graph"]
    comps = gadget_components(g, src.cert.omitted)
    window = 2 * pair(g.n, 4)
    for key in comps.keys:
        b, side = key
        if side == "v":
            window = max(window, g.v(b, g.stuck_step(b, _least_rank(src.cert.omitted, b))) + 1)
    return GACCert(comps, window)


def _least_rank(omitted, b: int) -> int:
    return min(colex_rank(x) for x in omitted if len(x) == b)


def _gadget_output(data: dict) -> Callable[[int], Any]:
    g = data["graph"]

    def out(i: int):
        v = g.vertex(i)
        return (v, tuple(sorted(g.neighbors(v, 1 << 62))))
    return out


def _ccardmax_gaclt_psi(d) -> FiniteSet:
    return decode_antichain_to_maxset(d)


# -- identity between the two maximal-set problems -------------------------------------------------

def _same_phi(data: dict, params: dict) -> tuple[dict, dict]:
    return {"f": data["f"]}, _keep(params)


def _same_cert(src: Instance, data: dict, params: dict) -> FamilyCert:
    return src.cert


# -- maximum-cardinality omitted sets to bounded-dimension spaces --------------------------------------

def _ccardmax_vsblt_phi(data: dict, params: dict) -> tuple[dict, dict]:
    n, f = params["n"], data["f"]
    markers = [MovingMarker(branch_stream(f, k, n)) for k in range(n)]
    return {"f": f, "markers": markers}, _keep(params, n=2 * n + 1, branches=n)


def _ccardmax_vsblt_cert(src: Instance, data: dict, params: dict) -> None:
    data["space"] = GadgetNSpace(data["f"], params["branches"], src.cert.omitted)
    return None


def _ccardmax_vsblt_psi(b, src: Instance) -> FiniteSet:
    n = src.n
    vectors = []
    for x in b:
        terms = {}
        for slot, q in slot_sum(x).terms.items():
            i, k = divmod(slot, n)
            terms[pair(i, k)] = q
        vectors.append(FormalSum(terms))
    return decode_basis_to_maxset(vectors, n, src.data["f"])


def _ccardmax_vsblt_output(data: dict) -> Callable[[int], Any]:
    markers = data["markers"]

    def out(t: int):
        k, m = unpair(t)
        return _relation_code(markers[k].g, m) if k < len(markers) else None
    return out


# -- registry --------------------------------------------------------------------------------------

def _stream_output(key: str):
    return lambda data: data[key]


def build_registry() -> dict[str, Reduction]:
    rs = [
        Reduction("lpo-cn", "lpo", "cn", _lpo_cn_phi, _lpo_cn_cert, _lpo_cn_psi, STRONG,
                  _stream_output("f")),
        Reduction("hatcn-hatlpo", "hatcn", "hatlpo", _hatcn_hatlpo_phi, _hatcn_hatlpo_cert,
                  _hatcn_hatlpo_psi, STRONG, _stream_output("p")),
        Reduction("cn-cnu", "cn", "cnu", _cn_cnu_phi, _cn_cnu_cert, _cn_cnu_psi, STRONG,
                  _stream_output("f")),
        Reduction("gac-emb", "gac", "emb", _graph_emb_phi(lambda p: None), _graph_emb_cert,
                  _graph_emb_psi, STRONG, _graph_output),
        Reduction("vsb-emb", "vsb", "emb", _vsb_emb_phi, _vsb_emb_cert, _identity, STRONG,
                  _graph_output),
        Reduction("emb-hatcn", "emb", "hatcn", _emb_hatcn_phi, _emb_hatcn_cert, _emb_hatcn_psi,
                  STRONG, _stream_output("f")),
        Reduction("hatvsb-vsb", "hatvsb", "vsb", _hatvsb_vsb_phi, lambda s, d, p: None,
                  _hatvsb_vsb_psi, PLAIN, None),
        Reduction("cnu-vsb2", "cnu", "vsbn", _cnu_vsb2_phi, _cnu_vsb2_cert, _cnu_vsb2_psi, PLAIN,
                  _cnu_vsb2_output),
        Reduction("gacn-embn", "gacn", "embn", _graph_emb_phi(lambda p: p["n"]), _graph_emb_cert,
                  _graph_emb_psi, STRONG, _graph_output),
        Reduction("embn-cn", "embn", "cn", _embn_cn_phi, _embn_cn_cert, _embn_cn_psi, STRONG,
                  _stream_output("f")),
        Reduction("emblt-csubmax", "emblt", "csubmax", _emblt_csubmax_phi, _emblt_csubmax_cert,
                  _identity, STRONG, _stream_output("f")),
        Reduction("gaclt-emblt", "gaclt", "emblt", _graph_emb_phi(lambda p: p["n"] - 1),
                  _graph_emb_cert, _graph_emb_psi, STRONG, _graph_output),
        Reduction("ccardmax-gaclt", "ccardmax", "gaclt", _ccardmax_gaclt_phi, _ccardmax_gaclt_cert,
                  _ccardmax_gaclt_psi, STRONG, _gadget_output),
        Reduction("csubmax-ccardmax", "csubmax", "ccardmax", _same_phi, _same_cert, _identity,
                  STRONG, _stream_output("f")),
        Reduction("ccardmax-vsblt", "ccardmax", "vsblt", _ccardmax_vsblt_phi, _ccardmax_vsblt_cert,
                  _ccardmax_vsblt_psi, PLAIN, _ccardmax_vsblt_output),
    ]
    return {r.name: r for r in rs}


REDUCTIONS = build_registry()


def compose(r1: Reduction, r2: Reduction) -> Reduction:
    """``r1`` then ``r2``: forward maps chain, backward maps chain in reverse."""
    if r1.target != r2.source:
        raise InvalidComposition(f"{r1.name} lands in {r1.target}, {r2.name} starts from {r2.source}")
    strength = STRONG if r1.strength == r2.strength == STRONG else PLAIN
    if strength == STRONG:
        def psi(sol):
            return r1.back(r2.back(sol))
    else:
        def psi(sol, src):
            mid = r1.apply(src) if r2.strength == PLAIN else None
            return r1.back(r2.back(sol, mid), src)
    return Reduction(f"compose:{r1.name},{r2.name}", r1.source, r2.target, None, None, psi, strength,
                     r2.output, parts=(r1, r2))


def identity(problem: str) -> Reduction:
    return Reduction(f"id:{problem}", problem, problem, lambda d, p: (d, p), lambda s, d, p: s.cert,
                     _identity, STRONG, None)


def get_reduction(name: str) -> Reduction:
    """A registered reduction, or ``compose:<a>,<b>``."""
    if name.startswith("compose:"):
        a, _, b = name[len("compose:"):].partition(",")
        if not b:
            raise KeyError(name)
        return compose(get_reduction(a), get_reduction(b))
    return REDUCTIONS[name]
