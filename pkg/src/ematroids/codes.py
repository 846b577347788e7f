"""Natural-number codes for pairs, finite sets and sequences, plus streams.

Every object the rest of the package touches travels as a natural number:
pairs use the Cantor pairing, finite sets their bitmask (Ackermann) code,
and lists a nested-pair sequence code.  Streams are total maps
``N -> N`` realized as a finite prefix table followed by a tail rule, so
every instance the harness builds is finitely supported.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, isqrt
from typing import Callable, Iterable, Iterator, Optional


class InvalidSet(ValueError):
    pass


class BudgetExhausted(RuntimeError):
    pass


class InvalidInstance(ValueError):
    pass


# -- pairing -----------------------------------------------------------------

def pair(i: int, j: int) -> int:
    """Cantor pairing: diagonals by ``i + j``, ``j`` ascending within one.

    >>> pair(1, 2)
    8
    """
    s = i + j
    return s * (s + 1) // 2 + j


def unpair(n: int) -> tuple[int, int]:
    w = (isqrt(8 * n + 1) - 1) // 2
    j = n - w * (w + 1) // 2
    return w - j, j


# -- finite sets ---------------------------------------------------------------

class FiniteSet(frozenset):
    """A finite set of naturals that knows its bitmask code."""

    @property
    def code(self) -> int:
        return sum(1 << x for x in self)

    @property
    def elements(self) -> tuple[int, ...]:
        return tuple(sorted(self))

    def __repr__(self) -> str:
        return "{" + ",".join(map(str, self.elements)) + "}"


def set_encode(xs: Iterable[int]) -> int:
    xs = list(xs)
    if len(set(xs)) != len(xs):
        raise InvalidSet(f"duplicate elements in {xs}")
    if any(x < 0 for x in xs):
        raise InvalidSet(f"negative element in {xs}")
    return sum(1 << x for x in xs)


def set_decode(c: int) -> FiniteSet:
    out = []
    i = 0
    while c:
        if c & 1:
            out.append(i)
        c >>= 1
        i += 1
    return FiniteSet(out)


def colex_rank(xs: Iterable[int]) -> int:
    """Rank of a set among sets of the same size, ordered colexicographically.

    Colex order on equal-size sets agrees with numeric order of bitmask codes.
    """
    xs = sorted(xs)
    if not xs:
        raise InvalidSet("colex rank of the empty set")
    if len(set(xs)) != len(xs):
        raise InvalidSet(f"duplicate elements in {xs}")
    return sum(comb(a, i + 1) for i, a in enumerate(xs))


def colex_unrank(r: int, n: int) -> FiniteSet:
    if n < 1:
        raise InvalidSet("colex order is defined for sizes n >= 1")
    out = []
    for i in range(n, 0, -1):
        a = i - 1
        while comb(a + 1, i) <= r:
            a += 1
        out.append(a)
        r -= comb(a, i)
    return FiniteSet(out)


# -- sequence codes -----------------------------------------------------------

def seq_encode(xs: Iterable[int]) -> int:
    code = 0
    for x in reversed(list(xs)):
        code = 1 + pair(x, code)
    return code


def seq_decode(c: int) -> list[int]:
    out = []
    while c:
        x, c = unpair(c - 1)
        out.append(x)
    return out


def zigzag(z: int) -> int:
    return 2 * z if z >= 0 else -2 * z - 1


def unzigzag(n: int) -> int:
    return n // 2 if n % 2 == 0 else -(n + 1) // 2


# -- sets of naturals described finitely --------------------------------------

@dataclass(frozen=True)
class NatSet:
    """``finite`` together with every natural ``>= beyond`` (if set)."""

    finite: frozenset = frozenset()
    beyond: Optional[int] = None

    def __contains__(self, x: int) -> bool:
        return x in self.finite or (self.beyond is not None and x >= self.beyond)

    @property
    def is_finite(self) -> bool:
        return self.beyond is None

    def is_empty(self) -> bool:
        return not self.finite and self.beyond is None

    def least(self) -> int:
        cands = list(self.finite)
        if self.beyond is not None:
            cands.append(self.beyond)
        if not cands:
            raise ValueError("empty NatSet")
        return min(cands)

    def members(self, bound: int) -> list[int]:
        return [x for x in range(bound) if x in self]

    def first(self, k: int) -> list[int]:
        """The ``k`` least members (fewer if the set is smaller)."""
        out = sorted(self.finite)
        if self.beyond is not None:
            out = [x for x in out if x < self.beyond]
            x = self.beyond
            while len(out) < k:
                out.append(x)
                x += 1
        return out[:k]

    def to_json(self) -> dict:
        return {"finite": sorted(self.finite), "beyond": self.beyond}

    @classmethod
    def from_json(cls, d: dict) -> "NatSet":
        return cls(frozenset(d["finite"]), d["beyond"])


# -- tail rules ----------------------------------------------------------------

@dataclass(frozen=True)
class Constant:
    value: int


@dataclass(frozen=True)
class Cycle:
    values: tuple[int, ...]

    def __post_init__(self):
        if not self.values:
            raise InvalidInstance("Cycle needs at least one value")


@dataclass(frozen=True)
class Shift:
    """Tail position ``p`` yields the ``(p + offset)``-th natural outside ``skip``."""

    offset: int = 0
    skip: frozenset = frozenset()


@dataclass(frozen=True)
class SmallSets:
    """Tail position ``p`` yields the ``(p + offset)``-th code outside ``skip``
    among codes of nonempty sets with fewer than ``bound`` elements."""

    bound: int
    offset: int = 0
    skip: frozenset = frozenset()

    def __post_init__(self):
        if self.bound < 2:
            raise InvalidInstance("SmallSets needs bound >= 2")


@dataclass(frozen=True)
class Derived:
    name: str
    fn: Callable[[int], int] = field(compare=False, repr=False)


TailRule = Constant | Cycle | Shift | SmallSets | Derived


def _nth_outside(p: int, skip: frozenset) -> int:
    x = p
    for s in sorted(skip):
        if s <= x:
            x += 1
        else:
            break
    return x


def nth_outside(p: int, skip: Iterable[int]) -> int:
    """The ``p``-th natural (from 0) not in ``skip``."""
    return _nth_outside(p, frozenset(skip))


def small_set(y: int, bound: int) -> FiniteSet:
    """The ``y``-th nonempty set of size ``< bound``; sizes interleave, colex within a size."""
    width = bound - 1
    return colex_unrank(y // width, 1 + y % width)


def small_set_position(xs: Iterable[int], bound: int) -> int:
    xs = list(xs)
    if not 0 < len(xs) < bound:
        raise InvalidSet(f"{xs} is not a nonempty set of size < {bound}")
    return colex_rank(xs) * (bound - 1) + len(xs) - 1


class Stream:
    """A total, deterministic map from indices to naturals."""

    def __init__(self, prefix: Iterable[int] = (), tail: TailRule = Constant(0)):
        self.prefix = tuple(prefix)
        self.tail = tail
        self._memo: dict[int, int] = {}

    @classmethod
    def derived(cls, name: str, fn: Callable[[int], int]) -> "Stream":
        return cls((), Derived(name, fn))

    @property
    def stabilization(self) -> int:
        return len(self.prefix)

    def __call__(self, n: int) -> int:
        if n < len(self.prefix):
            return self.prefix[n]
        t = self.tail
        p = n - len(self.prefix)
        if isinstance(t, Constant):
            return t.value
        if isinstance(t, Cycle):
            return t.values[p % len(t.values)]
        if isinstance(t, Shift):
            return _nth_outside(p + t.offset, t.skip)
        if isinstance(t, SmallSets):
            skip = sorted(small_set_position(set_decode(c), t.bound) for c in t.skip)
            return small_set(_nth_outside(p + t.offset, frozenset(skip)), t.bound).code
        if n not in self._memo:
            self._memo[n] = t.fn(n)
        return self._memo[n]

    def take(self, n: int) -> list[int]:
        return [self(i) for i in range(n)]

    def __iter__(self) -> Iterator[int]:
        i = 0
        while True:
            yield self(i)
            i += 1

    def omitted(self) -> NatSet:
        """The complement of the range, computed exactly from the tail rule."""
        t = self.tail
        seen = set(self.prefix)
        if isinstance(t, Derived):
            raise InvalidInstance(f"range of derived stream {t.name!r} is not tabulated")
        if isinstance(t, SmallSets):
            raise InvalidInstance("range complement of a SmallSets tail is infinite; use omitted_small_sets")
        if isinstance(t, (Constant, Cycle)):
            vals = seen | ({t.value} if isinstance(t, Constant) else set(t.values))
            top = max(vals) + 1
            return NatSet(frozenset(x for x in range(top) if x not in vals), top)
        low = _nth_outside(t.offset, t.skip)
        holes = set(t.skip) | {x for x in range(low) if x not in t.skip}
        return NatSet(frozenset(holes - seen))

    def in_range(self, x: int) -> bool:
        if isinstance(self.tail, SmallSets):
            xs = set_decode(x)
            return 0 < len(xs) < self.tail.bound and xs not in self.omitted_small_sets()
        return x not in self.omitted()

    def omitted_small_sets(self) -> list[FiniteSet]:
        """Nonempty sets of size ``< bound`` missing from the range, in enumeration order."""
        t = self.tail
        if not isinstance(t, SmallSets):
            raise InvalidInstance("only defined for SmallSets tails")
        skip = sorted(small_set_position(set_decode(c), t.bound) for c in t.skip)
        low = _nth_outside(t.offset, frozenset(skip))
        holes = set(skip) | {y for y in range(low) if y not in skip}
        seen = set(self.prefix)
        return [small_set(y, t.bound) for y in sorted(holes) if small_set(y, t.bound).code not in seen]

    def to_json(self) -> dict:
        t = self.tail
        if isinstance(t, Constant):
            tail = {"rule": "constant", "value": t.value}
        elif isinstance(t, Cycle):
            tail = {"rule": "cycle", "values": list(t.values)}
        elif isinstance(t, Shift):
            tail = {"rule": "shift", "offset": t.offset, "skip": sorted(t.skip)}
        elif isinstance(t, SmallSets):
            tail = {"rule": "small-sets", "bound": t.bound, "offset": t.offset, "skip": sorted(t.skip)}
        else:
            raise InvalidInstance(f"derived stream {t.name!r} cannot be serialized")
        return {"prefix": list(self.prefix), "tail": tail}

    @classmethod
    def from_json(cls, d: dict) -> "Stream":
        tail = d["tail"]
        rule = tail["rule"]
        if rule == "constant":
            t = Constant(tail["value"])
        elif rule == "cycle":
            t = Cycle(tuple(tail["values"]))
        elif rule == "shift":
            t = Shift(tail["offset"], frozenset(tail["skip"]))
        elif rule == "small-sets":
            t = SmallSets(tail["bound"], tail["offset"], frozenset(tail["skip"]))
        else:
            raise InvalidInstance(f"unknown tail rule {rule!r}")
        return cls(d["prefix"], t)

    def __repr__(self) -> str:
        return f"Stream(prefix={list(self.prefix)}, tail={self.tail!r})"


class Budget:
    """Query accounting for one evaluation context."""

    def __init__(self, limit: Optional[int] = None):
        self.limit = limit
        self.used = 0

    def spend(self, k: int = 1) -> None:
        self.used += k
        if self.limit is not None and self.used > self.limit:
            raise BudgetExhausted(f"query budget {self.limit} exhausted")


class Probe:
    """Wraps a stream, counting distinct indices queried against a budget."""

    def __init__(self, stream: Callable[[int], int], budget: Optional[Budget] = None):
        self.stream = stream
        self.budget = budget if budget is not None else Budget()
        self.seen: dict[int, int] = {}

    def __call__(self, n: int) -> int:
        if n not in self.seen:
            self.budget.spend()
            self.seen[n] = self.stream(n)
        return self.seen[n]

    @property
    def queries_made(self) -> int:
        return len(self.seen)


def injectivize(f: Callable[[int], int], budget: Optional[Budget] = None,
                search_limit: Optional[int] = None) -> Stream:
    """Enumerate ``range(f)`` without repetition, in first-occurrence order.

    Requires ``range(f)`` infinite; looking past ``search_limit`` indices of
    ``f`` for the next fresh value raises :class:`BudgetExhausted`.
    """
    found: list[int] = []
    seen: set[int] = set()
    pos = [0]

    def value(i: int) -> int:
        while len(found) <= i:
            if search_limit is not None and pos[0] >= search_limit:
                raise BudgetExhausted(f"no fresh value of f below index {search_limit}")
            if budget is not None:
                budget.spend()
            v = f(pos[0])
            pos[0] += 1
            if v not in seen:
                seen.add(v)
                found.append(v)
        return found[i]

    return Stream.derived("injectivize", value)


class MovingMarker:
    """Turn a non-surjective enumeration into one omitting exactly one code.

    Values of ``f`` may be ``None`` (nothing enumerated at that step).  The
    marker ``(y, t)`` always has ``y`` equal to the least value not yet
    enumerated when it was placed; once ``y`` is the least value missing
    from ``range(f)`` it never moves again, and ``pair(y, t)`` is the one
    code absent from ``g``.  Fresh outputs skip the live marker.
    """

    def __init__(self, f: Callable[[int], Optional[int]]):
        self.f = f
        self.markers: list[tuple[int, int]] = [(0, 0)]
        self.out: list[int] = []
        self._seen: set[int] = set()
        self._emitted: set[int] = set()
        self._fresh = 0

    def _least_fresh(self, avoid: int) -> int:
        while self._fresh in self._emitted:
            self._fresh += 1
        c = self._fresh
        while c in self._emitted or c == avoid:
            c += 1
        return c

    def _extend(self, k: int) -> None:
        while len(self.out) <= k:
            step = len(self.out)
            v = self.f(step)
            if v is not None:
                self._seen.add(v)
            y, t = self.markers[-1]
            code = pair(y, t)
            if v != y:
                g = self._least_fresh(code)
                nxt = (y, t)
            else:
                y0 = next(z for z in range(step + 2) if z not in self._seen)
                t0 = 0
                while pair(y0, t0) in self._emitted:
                    t0 += 1
                g = code
                nxt = (y0, t0)
            self.out.append(g)
            self._emitted.add(g)
            self.markers.append(nxt)

    def g(self, k: int) -> int:
        self._extend(k)
        return self.out[k]

    def marker(self, k: int) -> tuple[int, int]:
        """The marker in force at step ``k``."""
        self._extend(k)
        return self.markers[k]

    def settle(self, least_omitted: int, limit: int = 1 << 20) -> tuple[int, int]:
        """Run until the marker's first coordinate is ``least_omitted``; return it."""
        k = 0
        while self.marker(k)[0] != least_omitted:
            k += 1
            if k > limit:
                raise BudgetExhausted("marker did not settle")
        return self.marker(k)

    @property
    def stream(self) -> Stream:
        return Stream.derived("moving-marker", self.g)
