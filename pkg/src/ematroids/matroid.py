"""E-matroids, decidable matroids and basis algorithms.

An e-matroid is a ground set of naturals together with a stream ``e`` whose
values are bitmask codes of the finite dependent sets.  Ground elements are
reached through an element codec: ``element(i)`` is the code of the ``i``-th
ground element, so the same machinery serves pairs, vertices and vectors.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .codes import (
    FiniteSet, InvalidInstance, Stream, pair, set_decode, set_encode, unpair,
)


class OracleTooLarge(ValueError):
    pass


def _identity(i: int) -> int:
    return i


def _everything(x: int) -> bool:
    return True


@dataclass
class EMatroid:
    e: Stream
    element: Callable[[int], int] = _identity
    is_ground: Callable[[int], bool] = _everything
    dependent: Optional[Callable[[frozenset], bool]] = None
    name: str = "ematroid"

    def enumerated(self, bound: int) -> set[int]:
        return {self.e(t) for t in range(bound)}

    def ground_prefix(self, k: int) -> list[int]:
        return [self.element(i) for i in range(k)]

    def never_enumerated(self, code: int) -> Optional[bool]:
        """Whether the set with this code is certainly absent from ``range(e)``.

        ``None`` when neither a tabulated tail nor an exact oracle settles it.
        """
        try:
            return code in self.e.omitted()
        except InvalidInstance:
            pass
        if self.dependent is not None:
            return not self.dependent(set_decode(code))
        return None


@dataclass
class AxiomReport:
    violations: list[tuple[str, str]] = field(default_factory=list)
    unconfirmed: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        lines = [f"violations: {len(self.violations)}", f"unconfirmed: {len(self.unconfirmed)}"]
        lines += [f"  {ax}: {msg}" for ax, msg in self.violations]
        return "\n".join(lines)


def check_ematroid_axioms(m: EMatroid, ground_prefix: int, subset_size_bound: int,
                          enum_bound: int) -> AxiomReport:
    """Look for violations of the three e-matroid axioms on bounded data.

    A missing superset or a failed exchange is reported as a violation only
    when absence from ``range(e)`` is certain; otherwise it is unconfirmed.
    """
    if min(ground_prefix, subset_size_bound, enum_bound) <= 0:
        raise ValueError("bounds must be positive")
    rep = AxiomReport()
    prefix = m.ground_prefix(ground_prefix)
    seen: set[int] = set()
    for t in range(enum_bound):
        c = m.e(t)
        if c == 0:
            rep.violations.append(("em1", f"e({t}) is empty"))
        elif c not in seen:
            off = [x for x in set_decode(c) if not m.is_ground(x)]
            if off:
                rep.violations.append(("ground", f"e({t}) contains non-ground {off}"))
        seen.add(c)

    def classify(axiom: str, certain: Optional[bool], msg: str) -> None:
        (rep.violations if certain else rep.unconfirmed).append((axiom, msg))

    # em2: supersets of enumerated sets, extended inside the ground prefix
    for c in sorted(seen):
        x = set_decode(c)
        free = [p for p in prefix if p not in x]
        for r in range(1, max(0, subset_size_bound - len(x)) + 1):
            for extra in combinations(free, r):
                y = set_encode(list(x) + list(extra))
                if y not in seen:
                    classify("em2", m.never_enumerated(y),
                             f"superset {set_decode(y)!r} of {x!r} not enumerated")

    # em3: exchange among presumed-independent subsets of the prefix
    indep: dict[int, list[tuple[FiniteSet, Optional[bool]]]] = {}
    for r in range(subset_size_bound + 1):
        for xs in combinations(prefix, r):
            c = set_encode(xs)
            if c in seen:
                continue
            never = True if c == 0 else m.never_enumerated(c)
            if never is False:
                continue
            indep.setdefault(r, []).append((FiniteSet(xs), never))
    for rx in range(subset_size_bound):
        for x, sure_x in indep.get(rx, []):
            for ry in range(rx + 1, subset_size_bound + 1):
                for y, sure_y in indep.get(ry, []):
                    if x & y:
                        continue
                    if all(set_encode(x | {v}) in seen for v in y):
                        classify("em3", bool(sure_x and sure_y),
                                 f"no exchange element from {y!r} for {x!r}")
    return rep


def rank_upper_check(m: EMatroid, n: int, ground_prefix: int, enum_bound: int) -> bool:
    """Whether every ``n``-subset of the ground prefix shows up in ``e[0, enum_bound)``."""
    seen = m.enumerated(enum_bound)
    return all(set_encode(xs) in seen for xs in combinations(m.ground_prefix(ground_prefix), n))


# -- decidable matroids -----------------------------------------------------------

@dataclass
class DecidableMatroid:
    """A matroid with a total dependence test.

    ``ground`` lists the non-loop part explicitly; when ``loops_from`` is set
    every natural ``>= loops_from`` is an additional loop.
    """

    ground: tuple[int, ...]
    dep: Callable[[frozenset], bool]
    loops_from: Optional[int] = None

    def is_ground(self, x: int) -> bool:
        return x in self.ground or (self.loops_from is not None and x >= self.loops_from)

    def dependent(self, xs: Iterable[int]) -> bool:
        xs = frozenset(xs)
        if not xs:
            return False
        if self.loops_from is not None and any(x >= self.loops_from for x in xs):
            return True
        return self.dep(xs)

    def restrict(self, elements: Iterable[int]) -> "DecidableMatroid":
        return DecidableMatroid(tuple(sorted(elements)), self.dependent)


def greedy_steps(dependent: Callable[[frozenset], bool], order: Iterable[int]) -> Iterator[tuple[int, bool]]:
    """Yield ``(m_j, m_j in B)`` along the nested independent sets ``I_j``."""
    current: set[int] = set()
    for x in order:
        take = not dependent(frozenset(current | {x}))
        if take:
            current.add(x)
        yield x, take


def greedy_basis(m: DecidableMatroid, order: Optional[Iterable[int]] = None) -> FiniteSet:
    if order is None:
        order = m.ground
    return FiniteSet(x for x, take in greedy_steps(m.dependent, order) if take)


def brute_force_bases(m: DecidableMatroid, limit: int = 12) -> set[FiniteSet]:
    ground = list(m.ground)
    if len(ground) > limit:
        raise OracleTooLarge(f"{len(ground)} ground elements exceeds {limit}")
    indep = [frozenset(s) for r in range(len(ground) + 1)
             for s in combinations(ground, r) if not m.dependent(s)]
    out = set()
    for s in indep:
        if all(x in s or m.dependent(s | {x}) for x in ground):
            out.add(FiniteSet(s))
    return out


def is_basis(m: DecidableMatroid, b: Iterable[int]) -> bool:
    b = frozenset(b)
    if m.dependent(b):
        return False
    return all(x in b or m.dependent(b | {x}) for x in m.ground)


# -- random linear matroids ---------------------------------------------------------

def rank_mod_p(vectors: Sequence[Sequence[int]], p: int) -> int:
    rows = [list(v) for v in vectors]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][col] % p), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][col], p - 2, p)
        rows[rank] = [v * inv % p for v in rows[rank]]
        for r in range(len(rows)):
            if r != rank and rows[r][col] % p:
                f = rows[r][col]
                rows[r] = [(a - f * b) % p for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def random_linear_matroid(rng: random.Random, size: int, rank: int, p: int = 3,
                          loop_prob: float = 0.15, exact_rank: bool = False) -> DecidableMatroid:
    """Columns of a random ``rank x size`` matrix over GF(p), some zeroed into loops.

    With ``exact_rank`` the columns are resampled until they span GF(p)^rank.
    """
    while True:
        cols = {}
        for x in range(size):
            if rng.random() < loop_prob:
                cols[x] = tuple([0] * rank)
            else:
                cols[x] = tuple(rng.randrange(p) for _ in range(rank))
        if not exact_rank or rank_mod_p(list(cols.values()), p) == rank:
            break

    def dep(xs: frozenset) -> bool:
        return rank_mod_p([cols[x] for x in xs], p) < len(xs)

    return DecidableMatroid(tuple(range(size)), dep)


def dovetail_ematroid(dependent: Callable[[frozenset], bool], fallback: int,
                      is_ground: Callable[[int], bool] = _everything,
                      name: str = "dovetail") -> EMatroid:
    """E-matroid whose ``e`` hits every dependent set infinitely often.

    ``e(pair(c, r))`` is the set coded by ``c`` when that set is dependent
    and otherwise the fixed dependent set coded by ``fallback``.
    """
    def exact(xs: frozenset) -> bool:
        return bool(xs) and all(is_ground(x) for x in xs) and dependent(xs)

    if not exact(set_decode(fallback)):
        raise InvalidInstance("fallback set must be dependent")

    def e(t: int) -> int:
        c, _ = unpair(t)
        return c if exact(set_decode(c)) else fallback

    return EMatroid(Stream.derived(name, e), is_ground=is_ground, dependent=exact, name=name)


def matroid_ematroid(m: DecidableMatroid) -> EMatroid:
    """Dovetailed e-matroid of a finite matroid extended by its loop tail."""
    if m.loops_from is None:
        raise InvalidInstance("loop tail required for a fallback dependent set")
    return dovetail_ematroid(m.dependent, set_encode([m.loops_from]), m.is_ground)


def fixture_dependent(xs: frozenset) -> bool:
    """Finite supersets of some ``{3k, 3k+1}``."""
    return any(x % 3 == 0 and x + 1 in xs for x in xs)


def fixture_ematroid() -> EMatroid:
    return dovetail_ematroid(fixture_dependent, set_encode([0, 1]), name="fixture")


def fixture_matroid(size: int) -> DecidableMatroid:
    return DecidableMatroid(tuple(range(size)), fixture_dependent)


# -- the injection encoding ------------------------------------------------------------

def injection_element(i: int) -> int:
    """Code of the ``i``-th ground element ``(i // 2, i % 2)``."""
    return pair(i // 2, i % 2)


def ematroid_from_injection(f: Callable[[int], int], check_prefix: int = 0) -> EMatroid:
    """Dependent sets: anything containing both ``(a,0)`` and ``(a,1)`` for ``a`` in ``range(f)``.

    ``e(pair(j, k)) = {(f(j),0), (f(j),1)} | M_k`` where ``M_k`` decodes ``k``
    through the ground codec.  Injectivity of ``f`` is checked on the first
    ``check_prefix`` values.
    """
    vals = [f(j) for j in range(check_prefix)]
    if len(set(vals)) != len(vals):
        raise InvalidInstance(f"f is not injective on its first {check_prefix} values: {vals}")

    def e(t: int) -> int:
        j, k = unpair(t)
        a = f(j)
        members = {pair(a, 0), pair(a, 1)} | {injection_element(x) for x in set_decode(k)}
        return set_encode(members)

    def is_ground(x: int) -> bool:
        return unpair(x)[1] < 2

    return EMatroid(Stream.derived("injection", e), element=injection_element,
                    is_ground=is_ground, name="injection")


def decode_range_from_basis(b, k: int) -> bool:
    """``k`` lies in the range of the injection iff the basis omits ``(k,0)`` or ``(k,1)``."""
    return pair(k, 0) not in b or pair(k, 1) not in b


def injection_truncation(in_range: Callable[[int], bool], k: int) -> DecidableMatroid:
    """The encoding matroid restricted to ``{(i, eps) : i < k}``."""
    ground = tuple(pair(i, e) for i in range(k) for e in (0, 1))

    def dep(xs: frozenset) -> bool:
        return any(pair(a, 0) in xs and pair(a, 1) in xs for a in range(k) if in_range(a))

    return DecidableMatroid(ground, dep)
