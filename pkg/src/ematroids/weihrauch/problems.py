"""Certified instances, solution objects and the problem registry.

An instance carries its live data (streams, graphs, spaces) next to a
certificate: ground truth that makes solution checking decidable on the
finite window the harness inspects.  Infinite solutions (choice functions
for parallel problems, infinite bases) are objects supporting ``in`` or
call syntax and are only ever inspected below a window.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from ..codes import BudgetExhausted, FiniteSet, NatSet, pair, set_decode
from ..graph import Components, is_max_antichain
from ..vecspace import VectorSpace, is_basis as space_is_basis, sample_bases


# -- instances ----------------------------------------------------------------------

@dataclass
class Instance:
    kind: str
    data: dict
    cert: Any
    stabilization_bound: int
    params: dict = field(default_factory=dict)
    seed: Optional[int] = None

    @property
    def n(self) -> int:
        return self.params["n"]


# -- certificates ---------------------------------------------------------------------

@dataclass
class OmitCert:
    """The complement of the range of an enumeration."""

    contains: Callable[[int], bool]
    first: Callable[[int], list[int]]   # the k least members

    @classmethod
    def of(cls, ns: NatSet) -> "OmitCert":
        if ns.is_empty():
            raise ValueError("enumeration is onto")
        return cls(ns.__contains__, ns.first)

    @classmethod
    def single(cls, x: int) -> "OmitCert":
        return cls.of(NatSet(frozenset({x})))


@dataclass
class ZeroCert:
    """Where a 0/1 sequence vanishes."""

    first_zero: Optional[int]
    value: Callable[[int], int]

    def zeros(self, k: int, horizon: int = 256) -> list[int]:
        if self.first_zero is None:
            return []
        out = []
        for s in range(self.first_zero, self.first_zero + horizon):
            if self.value(s) == 0:
                out.append(s)
                if len(out) >= k:
                    break
        return out


@dataclass
class ParallelCert:
    """Certificates for each component; ``window`` components are checked."""

    component: Callable[[int], Any]
    window: int


@dataclass
class EMBCert:
    dependent: Callable[[frozenset], bool]
    is_basis: Callable[[Any], bool]
    sample: Callable[[random.Random, int], list]
    rank: Optional[int] = None
    first_appearance: Optional[Callable[[int], int]] = None
    window: int = 16


@dataclass
class GACCert:
    comps: Components
    window: int


@dataclass
class FamilyCert:
    """Every omitted finite set (the family is finite)."""

    omitted: list

    def maximal(self) -> list[FiniteSet]:
        fam = [FiniteSet(x) for x in self.omitted]
        return [x for x in fam if not any(x < y for y in fam)]

    def largest(self) -> list[FiniteSet]:
        top = max(len(x) for x in self.omitted)
        return [FiniteSet(x) for x in self.omitted if len(x) == top]


# -- solution objects --------------------------------------------------------------------

class ChoiceFunction:
    """A lazily sampled solution of a parallel problem: one answer per component.

    Counts the components consulted against an optional budget.
    """

    def __init__(self, pick: Callable[[int], int], budget: Optional[int] = None):
        self.pick = pick
        self.budget = budget
        self.memo: dict[int, int] = {}

    def __call__(self, c: int) -> int:
        if c not in self.memo:
            if self.budget is not None and len(self.memo) >= self.budget:
                raise BudgetExhausted(f"solution queried at more than {self.budget} components")
            self.memo[c] = self.pick(c)
        return self.memo[c]

    @property
    def queries(self) -> int:
        return len(self.memo)

    def __repr__(self) -> str:
        return f"ChoiceFunction({dict(sorted(self.memo.items()))})"


# -- problems ---------------------------------------------------------------------------------

@dataclass
class Problem:
    name: str
    is_solution: Callable[[Instance, Any], bool]
    sample_solutions: Callable[[Instance, random.Random, int], list]
    validate: Callable[[Instance, int], bool]
    brute_force_solutions: Callable[[Instance, int], list]
    parallel: bool = False


def _choice_is_solution(inst: Instance, m) -> bool:
    return isinstance(m, int) and m >= 0 and inst.cert.contains(m)


def _choice_samples(inst: Instance, rng: random.Random, k: int) -> list[int]:
    pool = inst.cert.first(max(k, 8))
    return pool if len(pool) <= k else sorted(rng.sample(pool, k))


def _choice_validate(inst: Instance, bound: int) -> bool:
    f = inst.data["f"]
    return inst.cert.first(1) != [] and not any(inst.cert.contains(f(t)) for t in range(bound))


def _choice_brute(inst: Instance, bound: int) -> list[int]:
    return [m for m in range(bound) if inst.cert.contains(m)]


def _unique_validate(inst: Instance, bound: int) -> bool:
    return _choice_validate(inst, bound) and len(inst.cert.first(2)) == 1


def _lpo_is_solution(inst: Instance, m) -> bool:
    if not isinstance(m, int) or m < 0:
        return False
    hit = inst.data["p"](m) == 0
    return hit == (inst.cert.first_zero is not None)


def _lpo_samples(inst: Instance, rng: random.Random, k: int) -> list[int]:
    if inst.cert.first_zero is None:
        return sorted(rng.sample(range(4 * k), k))
    return inst.cert.zeros(k)


def _lpo_validate(inst: Instance, bound: int) -> bool:
    p, z = inst.data["p"], inst.cert.first_zero
    for s in range(bound):
        if p(s) == 0 and (z is None or s < z):
            return False
    return z is None or p(z) == 0


def _lpo_brute(inst: Instance, bound: int) -> list[int]:
    return [m for m in range(bound) if _lpo_is_solution(inst, m)]


def parallel_problem(base: Problem, name: str) -> Problem:
    """Componentwise version of ``base`` over a stream of instances."""

    def component(inst: Instance, c: int) -> Instance:
        return inst.data["component"](c)

    def is_solution(inst: Instance, h) -> bool:
        return all(base.is_solution(component(inst, c), h(c)) for c in range(inst.cert.window))

    def samples(inst: Instance, rng: random.Random, k: int) -> list[ChoiceFunction]:
        out = []
        for i in range(k):
            seed = rng.getrandbits(64)

            def pick(c: int, seed=seed) -> int:
                r = random.Random(pair(seed % (1 << 32), c))
                return r.choice(base.sample_solutions(component(inst, c), r, 4))
            out.append(ChoiceFunction(pick))
        return out

    def validate(inst: Instance, bound: int) -> bool:
        return all(base.validate(component(inst, c), bound) for c in range(inst.cert.window))

    def brute(inst: Instance, bound: int) -> list:
        return [base.brute_force_solutions(component(inst, c), bound) for c in range(inst.cert.window)]

    return Problem(name, is_solution, samples, validate, brute, parallel=True)


# graphs ------------------------------------------------------------------------------------------

def _gac_is_solution(inst: Instance, a) -> bool:
    return is_max_antichain(inst.data["graph"], inst.cert.comps, a, inst.cert.window)


def _gac_samples(inst: Instance, rng: random.Random, k: int) -> list:
    comps, w = inst.cert.comps, inst.cert.window
    every = comps.all_antichains(w, k)
    if every is not None:
        return every
    return [comps.sample_antichain(rng, w) for _ in range(k)]


def _gac_validate(inst: Instance, bound: int) -> bool:
    g, comps = inst.data["graph"], inst.cert.comps
    vs = g.vertices(bound)
    for v in vs:
        for w in g.neighbors(v, bound):
            if comps.label(v) != comps.label(w):
                return False
    return True


def _gac_brute(inst: Instance, bound: int) -> list:
    return inst.cert.comps.all_antichains(bound, 4096) or []


def _gac_n_validate(inst: Instance, bound: int) -> bool:
    return _gac_validate(inst, bound) and inst.cert.comps.count == inst.n


def _gac_lt_validate(inst: Instance, bound: int) -> bool:
    c = inst.cert.comps.count
    return _gac_validate(inst, bound) and c is not None and c < inst.n


# e-matroids ---------------------------------------------------------------------------------------

def _emb_is_solution(inst: Instance, b) -> bool:
    return inst.cert.is_basis(b)


def _emb_samples(inst: Instance, rng: random.Random, k: int) -> list:
    return inst.cert.sample(rng, k)


def _emb_validate(inst: Instance, bound: int) -> bool:
    m = inst.data["m"]
    for t in range(bound):
        c = m.e(t)
        if c == 0 or not inst.cert.dependent(set_decode(c)):
            return False
    return True


def _emb_n_validate(inst: Instance, bound: int) -> bool:
    return _emb_validate(inst, bound) and inst.cert.rank == inst.n


def _emb_lt_validate(inst: Instance, bound: int) -> bool:
    r = inst.cert.rank
    return _emb_validate(inst, bound) and r is not None and r <= inst.n


def _emb_brute(inst: Instance, bound: int) -> list:
    return inst.cert.sample(random.Random(0), bound)


# vector spaces ----------------------------------------------------------------------------------------

def _vsb_is_solution(inst: Instance, b) -> bool:
    try:
        b = list(b)
    except TypeError:
        return False
    return space_is_basis(inst.data["space"], b)


def _vsb_samples(inst: Instance, rng: random.Random, k: int) -> list:
    return sample_bases(inst.data["space"], rng, k)


def _vsb_validate(inst: Instance, bound: int) -> bool:
    space: VectorSpace = inst.data["space"]
    std = space.standard_basis()
    if len(std) != space.dimension or not space_is_basis(space, [space.element_of(v) for v in std]):
        return False
    rng = random.Random(bound)
    return all(space.is_zero(space.null_vector(rng)) for _ in range(4))


def _vsb_n_validate(inst: Instance, bound: int) -> bool:
    return _vsb_validate(inst, bound) and inst.data["space"].dimension == inst.n


def _vsb_lt_validate(inst: Instance, bound: int) -> bool:
    return _vsb_validate(inst, bound) and inst.data["space"].dimension < inst.n


def _vsb_brute(inst: Instance, bound: int) -> list:
    return sample_bases(inst.data["space"], random.Random(0), bound)


def _hatvsb_is_solution(inst: Instance, bs) -> bool:
    spaces = inst.data["spaces"]
    if len(bs) < len(spaces):
        return False
    extra_ok = all(not list(b) for b in bs[len(spaces):])
    return extra_ok and all(space_is_basis(s, list(b)) for s, b in zip(spaces, bs))


def _hatvsb_samples(inst: Instance, rng: random.Random, k: int) -> list:
    per = [sample_bases(s, rng, k) for s in inst.data["spaces"]]
    return [[rng.choice(p) for p in per] for _ in range(k)]


def _hatvsb_validate(inst: Instance, bound: int) -> bool:
    return all(_vsb_validate(Instance("vsb", {"space": s}, None, bound), bound) for s in inst.data["spaces"])


def _hatvsb_brute(inst: Instance, bound: int) -> list:
    return _hatvsb_samples(inst, random.Random(0), bound)


# maximal omitted sets --------------------------------------------------------------------------------

def _as_set(x) -> Optional[FiniteSet]:
    try:
        return FiniteSet(x)
    except TypeError:
        return None


def _csub_is_solution(inst: Instance, x) -> bool:
    x = _as_set(x)
    return x is not None and x in inst.cert.maximal()


def _ccard_is_solution(inst: Instance, x) -> bool:
    x = _as_set(x)
    return x is not None and x in inst.cert.largest()


def _family_samples(pick: Callable[[Instance], list]):
    def samples(inst: Instance, rng: random.Random, k: int) -> list:
        sols = pick(inst)
        return sols if len(sols) <= k else rng.sample(sols, k)
    return samples


def _family_validate(inst: Instance, bound: int) -> bool:
    f, n = inst.data["f"], inst.n
    om = {FiniteSet(x).code for x in inst.cert.omitted}
    if any(len(x) >= n for x in inst.cert.omitted):
        return False
    return not any(f(t) in om for t in range(bound))


def register_problems() -> dict[str, Problem]:
    cn = Problem("cn", _choice_is_solution, _choice_samples, _choice_validate, _choice_brute)
    cnu = Problem("cnu", _choice_is_solution, _choice_samples, _unique_validate, _choice_brute)
    lpo = Problem("lpo", _lpo_is_solution, _lpo_samples, _lpo_validate, _lpo_brute)
    gac = Problem("gac", _gac_is_solution, _gac_samples, _gac_validate, _gac_brute)
    emb = Problem("emb", _emb_is_solution, _emb_samples, _emb_validate, _emb_brute)
    vsb = Problem("vsb", _vsb_is_solution, _vsb_samples, _vsb_validate, _vsb_brute)
    reg = {
        "cn": cn,
        "cnu": cnu,
        "lpo": lpo,
        "hatcn": parallel_problem(cn, "hatcn"),
        "hatlpo": parallel_problem(lpo, "hatlpo"),
        "gac": gac,
        "gacn": Problem("gacn", _gac_is_solution, _gac_samples, _gac_n_validate, _gac_brute),
        "gaclt": Problem("gaclt", _gac_is_solution, _gac_samples, _gac_lt_validate, _gac_brute),
        "emb": emb,
        "embn": Problem("embn", _emb_is_solution, _emb_samples, _emb_n_validate, _emb_brute),
        "emblt": Problem("emblt", _emb_is_solution, _emb_samples, _emb_lt_validate, _emb_brute),
        "vsb": vsb,
        "vsbn": Problem("vsbn", _vsb_is_solution, _vsb_samples, _vsb_n_validate, _vsb_brute),
        "vsblt": Problem("vsblt", _vsb_is_solution, _vsb_samples, _vsb_lt_validate, _vsb_brute),
        "hatvsb": Problem("hatvsb", _hatvsb_is_solution, _hatvsb_samples, _hatvsb_validate, _hatvsb_brute,
                          parallel=True),
        "csubmax": Problem("csubmax", _csub_is_solution, _family_samples(lambda i: i.cert.maximal()),
                           _family_validate, lambda i, b: i.cert.maximal()),
        "ccardmax": Problem("ccardmax", _ccard_is_solution, _family_samples(lambda i: i.cert.largest()),
                            _family_validate, lambda i, b: i.cert.largest()),
    }
    return reg


PROBLEMS = register_problems()
