"""Countable vector spaces over Q presented by generators and an equality test.

A vector is a finite formal sum of generators with rational coefficients.
Spaces differ only in which formal sums they identify; every space maps
formal sums to a normal form and two vectors are equal when their normal
forms agree.  Vector *elements* (ground elements of the associated
e-matroid) are indices into one fixed enumeration of formal sums, so an
element code means the same formal sum in every space of a given shape.
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import gcd, lcm
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .codes import (
    BudgetExhausted, FiniteSet, InvalidInstance, MovingMarker, Stream,
    colex_rank, colex_unrank, injectivize, pair, seq_decode, seq_encode,
    set_decode, set_encode, unpair, unzigzag, zigzag,
)
from .matroid import EMatroid


class InvalidBasis(ValueError):
    pass


# -- formal sums ----------------------------------------------------------------

def rational_code(q: Fraction) -> int:
    q = Fraction(q)
    return pair(zigzag(q.numerator), q.denominator - 1)


def rational_decode(c: int) -> Fraction:
    z, d = unpair(c)
    return Fraction(unzigzag(z), d + 1)


class FormalSum:
    """Finite map generator key -> nonzero rational."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[int, Fraction] | Iterable[tuple[int, Fraction]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[int, Fraction] = {}
        for k, q in items:
            acc[k] = acc.get(k, Fraction(0)) + Fraction(q)
        self.terms = {k: q for k, q in sorted(acc.items()) if q != 0}

    @classmethod
    def gen(cls, key: int, coeff=1) -> "FormalSum":
        return cls({key: Fraction(coeff)})

    def __add__(self, other: "FormalSum") -> "FormalSum":
        return FormalSum(list(self.terms.items()) + list(other.terms.items()))

    def __neg__(self) -> "FormalSum":
        return FormalSum({k: -q for k, q in self.terms.items()})

    def __sub__(self, other: "FormalSum") -> "FormalSum":
        return self + (-other)

    def scale(self, q) -> "FormalSum":
        return FormalSum({k: v * Fraction(q) for k, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, FormalSum) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(tuple(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def coeff(self, key: int) -> Fraction:
        return self.terms.get(key, Fraction(0))

    @property
    def support(self) -> list[int]:
        return list(self.terms)

    @property
    def code(self) -> int:
        flat = []
        for k, q in self.terms.items():
            flat += [k, zigzag(q.numerator), q.denominator - 1]
        return seq_encode(flat)

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{q}*x{k}" for k, q in self.terms.items())


def decode_formal_sum(c: int) -> Optional[FormalSum]:
    """The formal sum with code ``c``, or ``None`` when ``c`` is not canonical."""
    flat = seq_decode(c)
    if len(flat) % 3:
        return None
    keys, terms = [], {}
    for i in range(0, len(flat), 3):
        k, z, d = flat[i:i + 3]
        num, den = unzigzag(z), d + 1
        if num == 0 or gcd(num, den) != 1:
            return None
        keys.append(k)
        terms[k] = Fraction(num, den)
    if any(a >= b for a, b in zip(keys, keys[1:])):
        return None
    return FormalSum(terms)


def slot_sum(i: int) -> FormalSum:
    """The ``i``-th formal sum over generator *slots*.

    Even indices are single generators (``2s`` gives slot ``s``); odd index
    ``2c + 1`` decodes ``c = pair(a, b)`` into the slots of set ``a`` with
    coefficients read from the sequence ``b`` (missing ones default to 1).
    Every formal sum over slots occurs.
    """
    if i % 2 == 0:
        return FormalSum.gen(i // 2)
    a, b = unpair(i // 2)
    slots = set_decode(a).elements
    qs = [rational_decode(r) for r in seq_decode(b)]
    return FormalSum({s: (qs[t] if t < len(qs) else Fraction(1)) for t, s in enumerate(slots)})


def slot_index(v: FormalSum) -> int:
    """An index whose ``slot_sum`` is ``v``."""
    if len(v.terms) == 1:
        (s, q), = v.terms.items()
        if q == 1:
            return 2 * s
    a = set_encode(v.support)
    b = seq_encode(rational_code(q) for q in v.terms.values())
    return 2 * pair(a, b) + 1


ZERO_ELEMENT = 1  # slot_sum(1) is the empty sum


# -- spaces ---------------------------------------------------------------------

class VectorSpace:
    """Base class: subclasses supply ``gen_key`` and ``normal_form``."""

    name = "space"
    dimension: Optional[int] = None

    def gen_key(self, slot: int) -> int:
        return slot

    def key_slot(self, key: int) -> int:
        return key

    def vector(self, i: int) -> FormalSum:
        """The formal sum named by element code ``i``."""
        return FormalSum({self.gen_key(s): q for s, q in slot_sum(i).terms.items()})

    def element_of(self, v: FormalSum) -> int:
        """An element code naming ``v``."""
        return slot_index(FormalSum({self.key_slot(k): q for k, q in v.terms.items()}))

    def standard_basis(self) -> list[FormalSum]:
        raise NotImplementedError

    def null_vector(self, rng: random.Random) -> FormalSum:
        """A random formal sum equal to zero in the space."""
        return FormalSum()

    def normal_form(self, v: FormalSum) -> FormalSum:
        raise NotImplementedError

    def is_zero(self, v: FormalSum) -> bool:
        return not self.normal_form(v)

    def equal(self, u: FormalSum, v: FormalSum) -> bool:
        return self.is_zero(u - v)

    def coords(self, vs: Sequence[FormalSum]) -> list[dict[int, Fraction]]:
        return [self.normal_form(v).terms for v in vs]

    def element_dependent(self, xs: Iterable[int]) -> bool:
        return dependence([self.vector(i) for i in xs], self)[0]


def _integer_rows(coords: Sequence[Mapping[int, Fraction]]) -> tuple[list[list[int]], list[int]]:
    """Rows cleared of denominators; the multipliers come back as the second value."""
    cols = sorted({k for c in coords for k in c})
    rows, dens = [], []
    for c in coords:
        den = lcm(*(q.denominator for q in c.values())) if c else 1
        rows.append([int(c.get(k, 0) * den) for k in cols])
        dens.append(den)
    return rows, dens


def dependence(vs: Sequence[FormalSum], space: VectorSpace) -> tuple[bool, Optional[list[int]]]:
    """Exact dependence test with an integer witness of ``sum a_i v_i = 0``.

    Fraction-free elimination on the normal-form coordinates, augmented
    with the identity so a vanishing row carries its combination.
    """
    rows, dens = _integer_rows(space.coords(vs))
    n = len(rows)
    aug = [row + [int(i == j) for j in range(n)] for i, row in enumerate(rows)]
    width = len(rows[0]) if rows else 0
    r0 = 0
    for col in range(width):
        piv = next((r for r in range(r0, n) if aug[r][col]), None)
        if piv is None:
            continue
        aug[r0], aug[piv] = aug[piv], aug[r0]
        p = aug[r0][col]
        for r in range(r0 + 1, n):
            a = aug[r][col]
            if a:
                row = [p * x - a * y for x, y in zip(aug[r], aug[r0])]
                g = 0
                for x in row:
                    g = gcd(g, x)
                aug[r] = [x // g for x in row] if g > 1 else row
        r0 += 1
    for r in range(r0, n):
        w = [x * d for x, d in zip(aug[r][width:], dens)]
        g = 0
        for x in w:
            g = gcd(g, x)
        w = [x // g for x in w]
        if next(x for x in w if x) < 0:
            w = [-x for x in w]
        return True, w
    return False, None


def rank(vs: Sequence[FormalSum], space: VectorSpace) -> int:
    rows = [[Fraction(x) for x in r] for r in _integer_rows(space.coords(vs))[0]]
    rk = 0
    width = len(rows[0]) if rows else 0
    for col in range(width):
        piv = next((r for r in range(rk, len(rows)) if rows[r][col]), None)
        if piv is None:
            continue
        rows[rk], rows[piv] = rows[piv], rows[rk]
        for r in range(rk + 1, len(rows)):
            f = rows[r][col] / rows[rk][col]
            if f:
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rk])]
        rk += 1
    return rk


def truncated_rank(space: VectorSpace, bound: int) -> int:
    return rank([space.vector(i) for i in range(bound)], space)


def witness_code(w: Sequence[int]) -> int:
    return seq_encode(rational_code(Fraction(a)) for a in w)


def ematroid_from_vectorspace(space: VectorSpace) -> EMatroid:
    """``e(j)`` lists the vector set coded by ``unpair(j)[0]`` once a witness code is below ``j``.

    Before that (and for independent sets) it falls back to the set holding
    only the zero-vector element.
    """
    memo: dict[int, Optional[int]] = {}

    def least_witness(c: int) -> Optional[int]:
        if c not in memo:
            xs = set_decode(c).elements
            dep, w = dependence([space.vector(i) for i in xs], space) if xs else (False, None)
            memo[c] = witness_code(w) if dep else None
        return memo[c]

    fallback = set_encode([ZERO_ELEMENT])

    def e(j: int) -> int:
        c, _ = unpair(j)
        if c == 0:
            return fallback
        wc = least_witness(c)
        return c if wc is not None and wc < j else fallback

    return EMatroid(Stream.derived(f"vectors:{space.name}", e),
                    dependent=space.element_dependent, name=f"vectors:{space.name}")


# -- explicit finite-dimensional spaces ---------------------------------------------

class QuotientSpace(VectorSpace):
    """``Q^gens`` modulo the span of integer relation rows."""

    name = "quotient"

    def __init__(self, gens: int, relations: Sequence[Sequence[int]] = ()):
        if gens < 1:
            raise InvalidInstance("need at least one generator")
        self.gens = gens
        self.relations = [list(r) for r in relations]
        self._rref, self._pivots = _rref([[Fraction(x) for x in r] for r in self.relations], gens)
        self.dimension = gens - len(self._pivots)

    def gen_key(self, slot: int) -> int:
        return slot % self.gens

    def standard_basis(self) -> list[FormalSum]:
        return [FormalSum.gen(k) for k in range(self.gens) if k not in self._pivots]

    def null_vector(self, rng: random.Random) -> FormalSum:
        out = FormalSum()
        for row in self.relations:
            out = out + FormalSum(enumerate(row)).scale(rng.randint(-2, 2))
        return out

    def normal_form(self, v: FormalSum) -> FormalSum:
        if any(k >= self.gens for k in v.terms):
            raise InvalidInstance(f"key outside {self.gens} generators in {v!r}")
        vec = [v.coeff(k) for k in range(self.gens)]
        for row, p in zip(self._rref, self._pivots):
            if vec[p]:
                f = vec[p]
                vec = [a - f * b for a, b in zip(vec, row)]
        return FormalSum(enumerate(vec))

    def to_json(self) -> dict:
        return {"gens": self.gens, "relations": self.relations}

    @classmethod
    def from_json(cls, d: dict) -> "QuotientSpace":
        return cls(d["gens"], d["relations"])


def _rref(rows: list[list[Fraction]], width: int) -> tuple[list[list[Fraction]], list[int]]:
    rows = [r[:] for r in rows]
    pivots = []
    rk = 0
    for col in range(width):
        piv = next((r for r in range(rk, len(rows)) if rows[r][col]), None)
        if piv is None:
            continue
        rows[rk], rows[piv] = rows[piv], rows[rk]
        p = rows[rk][col]
        rows[rk] = [x / p for x in rows[rk]]
        for r in range(len(rows)):
            if r != rk and rows[r][col]:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rk])]
        pivots.append(col)
        rk += 1
    return rows[:rk], pivots


def random_quotient_space(rng: random.Random, gens: int, relations: int) -> QuotientSpace:
    rels = [[rng.randint(-2, 2) for _ in range(gens)] for _ in range(relations)]
    return QuotientSpace(gens, rels)


def random_basis(space: VectorSpace, rng: random.Random, mix: bool = True) -> list[FormalSum]:
    """A random basis: an invertible integer mix of the standard basis plus zero vectors."""
    vs = list(space.standard_basis())
    if mix:
        for _ in range(rng.randint(0, 2 * len(vs))):
            if len(vs) < 2:
                break
            i, j = rng.sample(range(len(vs)), 2)
            vs[i] = vs[i] + vs[j].scale(rng.choice([-2, -1, 1, 2]))
        vs = [v.scale(rng.choice([1, 1, -1, 2, Fraction(1, 2)])) for v in vs]
    if rng.random() < 0.7:
        vs = [v + space.null_vector(rng) if rng.random() < 0.5 else v for v in vs]
    rng.shuffle(vs)
    return vs


def sample_bases(space: VectorSpace, rng: random.Random, count: int, mix: bool = True) -> list[FiniteSet]:
    """Up to ``count`` distinct bases as element-code sets."""
    out: list[FiniteSet] = []
    for _ in range(4 * count):
        b = FiniteSet(space.element_of(v) for v in random_basis(space, rng, mix))
        if b not in out:
            out.append(b)
            if len(out) >= count:
                break
    return out


def is_basis(space: VectorSpace, xs: Iterable[int]) -> bool:
    xs = list(xs)
    if space.dimension is None:
        raise InvalidInstance("basis check needs a known dimension")
    return len(set(xs)) == len(xs) == space.dimension and not space.element_dependent(xs)


# -- the gadget for a single omitted value ----------------------------------------------
#
# Generators x_i.  With f injective, U0 is spanned by x_{2f(m)} + (m+1) x_{2f(m)+1}
# and U1 by the even generators x_{2i}, i >= 1.  x_0 stays as an anchor, so
# the quotient is spanned by x_0 and x_{2a+1} for the omitted value a.

def _ratio_index(q0: Fraction, q1: Fraction) -> Optional[int]:
    """``m`` with ``q1 = (m + 1) q0``, if any."""
    if q0 == 0:
        return None
    r = q1 / q0 - 1
    return int(r) if r.denominator == 1 and r >= 0 else None


def u0_membership(v: FormalSum, f: Callable[[int], int]) -> bool:
    """Whether ``v`` lies in U0 for an injective ``f``.

    Coefficient pairs on ``(x_{2a}, x_{2a+1})`` must each vanish or be a
    multiple of ``(1, m+1)`` with ``f(m) = a``.
    """
    for a in {k // 2 for k in v.terms}:
        q0, q1 = v.coeff(2 * a), v.coeff(2 * a + 1)
        m = _ratio_index(q0, q1)
        if m is None or f(m) != a:
            return False
    return True


def u01_membership(v: FormalSum, f: Callable[[int], int], in_range: Callable[[int], Optional[bool]]) -> Optional[bool]:
    """Whether ``v`` lies in U0 + U1; ``None`` when ``in_range`` cannot tell yet.

    ``in_range(a)`` may answer ``None`` (not found so far).
    """
    unknown = False
    for a in {k // 2 for k in v.terms}:
        q0, q1 = v.coeff(2 * a), v.coeff(2 * a + 1)
        if a == 0:
            if q1 == 0 and q0 == 0:
                continue
            m = _ratio_index(q0, q1)
            if m is None or f(m) != 0:
                return False
        elif q1 != 0:
            hit = in_range(a)
            if hit is False:
                return False
            if hit is None:
                unknown = True
    return None if unknown else True


def minimal_coset_rep(v: FormalSum, member: Callable[[FormalSum], bool], order_bound: int) -> FormalSum:
    """Code-least ``w`` with ``v - w`` in the subspace tested by ``member``.

    Scans codes upward; ``v`` itself bounds the search.
    """
    top = v.code
    if top > order_bound:
        raise BudgetExhausted(f"code {top} of {v!r} exceeds order bound {order_bound}")
    for c in range(top + 1):
        w = decode_formal_sum(c)
        if w is not None and member(v - w):
            return w
    raise AssertionError("v - v = 0 is always a member")


class _Branch:
    """Normal forms for one gadget: an injective ``g`` with one known omitted value."""

    def __init__(self, g: Callable[[int], int], omitted: Optional[int], search_limit: int):
        self.g = g
        self.omitted = omitted
        self.search_limit = search_limit
        self._inverse: dict[int, int] = {}
        self._scanned = 0

    def preimage(self, a: int, limit: Optional[int] = None) -> Optional[int]:
        limit = self.search_limit if limit is None else limit
        while a not in self._inverse and self._scanned < limit:
            self._inverse.setdefault(self.g(self._scanned), self._scanned)
            self._scanned += 1
        m = self._inverse.get(a)
        return m if m is not None and m < limit else None

    def reduce(self, terms: Mapping[int, Fraction]) -> dict[int, Fraction]:
        """Local keys ``i`` (generator ``x_i``) to their normal form."""
        out: dict[int, Fraction] = {}
        for i, q in terms.items():
            if i % 2 == 0:
                if i == 0:
                    out[0] = out.get(0, Fraction(0)) + q
                continue
            a = i // 2
            if a == self.omitted:
                out[i] = out.get(i, Fraction(0)) + q
                continue
            m = self.preimage(a)
            if m is None:
                raise BudgetExhausted(f"no preimage of {a} below {self.search_limit}")
            if a == 0:
                out[0] = out.get(0, Fraction(0)) - q / (m + 1)
        return out

    def standard_basis(self) -> list[FormalSum]:
        out = [FormalSum.gen(0)]
        if self.omitted is not None:
            out.append(FormalSum.gen(2 * self.omitted + 1))
        return out

    def null_vector(self, rng: random.Random, terms: int = 2) -> FormalSum:
        out = FormalSum()
        for _ in range(terms):
            q = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
            if rng.random() < 0.5:
                out = out + FormalSum.gen(2 * rng.randint(1, 6), q)
            else:
                m = rng.randrange(6)
                a = self.g(m)
                out = out + FormalSum({2 * a: q, 2 * a + 1: q * (m + 1)})
        return out

    def in_range_within(self, bound: int) -> Callable[[int], Optional[bool]]:
        def test(a: int) -> Optional[bool]:
            return True if self.preimage(a, bound) is not None else None
        return test


class Gadget2Space(VectorSpace):
    """Dimension 2 when ``f`` (injective) omits ``omitted``; keys are generator indices."""

    name = "gadget2"

    def __init__(self, f: Callable[[int], int], omitted: Optional[int], search_limit: int = 4096):
        self.f = f
        self.branch = _Branch(f, omitted, search_limit)
        self.dimension = 2 if omitted is not None else 1

    def normal_form(self, v: FormalSum) -> FormalSum:
        return FormalSum(self.branch.reduce(v.terms))

    def standard_basis(self) -> list[FormalSum]:
        return self.branch.standard_basis()

    def null_vector(self, rng: random.Random) -> FormalSum:
        return self.branch.null_vector(rng)


def build_gadget_space_2(f: Stream, omitted: Optional[int] = None, search_limit: int = 4096) -> Gadget2Space:
    """Gadget space of ``f`` after removing repetitions; ``omitted`` is the certificate."""
    if omitted is None:
        om = f.omitted()
        if not om.is_finite or len(om.finite) != 1:
            raise InvalidInstance(f"expected exactly one omitted value, got {om}")
        omitted = next(iter(om.finite))
    return Gadget2Space(injectivize(f, search_limit=search_limit), omitted, search_limit)


def _combo(c: int) -> tuple[Fraction, Fraction]:
    a, b = unpair(c)
    return Fraction(unzigzag(a)), Fraction(unzigzag(b))


def eject_dependent(candidates: Iterable[int], g: Callable[[int], int], max_stages: int) -> int:
    """Drop every ``m`` with ``{x_0, x_{2m+1}}`` dependent until one survives.

    Stage ``t`` tries combination ``t`` on each candidate and searches
    ``g`` below ``t``; combinations left undecided for lack of search are
    retried later.
    """
    live = sorted(set(candidates))
    if not live:
        raise InvalidBasis("no odd generator in the basis")
    branch = _Branch(g, None, max_stages)
    pending: dict[int, list[FormalSum]] = {m: [] for m in live}
    for t in range(1, max_stages + 1):
        if len(live) == 1:
            return live[0]
        q0, q1 = _combo(t - 1)
        in_range = branch.in_range_within(t)
        for m in list(live):
            tests = pending[m]
            if q0 or q1:
                tests.append(FormalSum({0: q0}) + FormalSum({2 * m + 1: q1}))
            keep = []
            for w in tests:
                r = u01_membership(w, g, in_range)
                if r:
                    live.remove(m)
                    break
                if r is None:
                    keep.append(w)
            else:
                pending[m] = keep
    if len(live) == 1:
        return live[0]
    raise BudgetExhausted(f"{len(live)} candidates still live after {max_stages} stages")


def decode_basis_to_omitted(basis: Iterable[FormalSum], f: Callable[[int], int], max_stages: int = 20000) -> int:
    """The value omitted by injective ``f``, read off a basis of its gadget space."""
    odd = {k // 2 for b in basis for k in b.terms if k % 2}
    return eject_dependent(odd, f, max_stages)


# -- the gadget for a maximal omitted set ----------------------------------------------
#
# Branch k < n runs the single-value gadget on g_k, the moving-marker
# version of "which index of A_k = {X : k <= |X| < n} does f hit".  Keys
# are pair(i, k) for generator x_{(i,k)}.

def a_index(k: int, n: int, y: int) -> FiniteSet:
    """The ``y``-th member of ``{X : k <= |X| < n}``."""
    if k == 0:
        if y == 0:
            return FiniteSet()
        y -= 1
    lo = max(k, 1)
    width = n - lo
    if width <= 0:
        raise InvalidInstance(f"no sets with {k} <= size < {n}")
    return colex_unrank(y // width, lo + y % width)


def a_position(k: int, n: int, xs: Iterable[int]) -> int:
    xs = FiniteSet(xs)
    if not k <= len(xs) < n:
        raise InvalidInstance(f"{xs!r} has size outside [{k}, {n})")
    if not xs:
        return 0
    lo = max(k, 1)
    y = colex_rank(xs) * (n - lo) + len(xs) - lo
    return y + 1 if k == 0 else y


def branch_stream(f: Callable[[int], int], k: int, n: int) -> Callable[[int], Optional[int]]:
    def fk(t: int) -> Optional[int]:
        xs = set_decode(f(t))
        return a_position(k, n, xs) if k <= len(xs) < n else None
    return fk


class GadgetNSpace(VectorSpace):
    """Dimension ``n + 1 + (largest omitted size)``, given the omitted sets."""

    name = "gadgetn"

    def __init__(self, f: Callable[[int], int], n: int, omitted_sets: Sequence[Iterable[int]],
                 search_limit: int = 4096):
        if n < 2:
            raise InvalidInstance("need n >= 2")
        self.f, self.n = f, n
        omitted_sets = [FiniteSet(x) for x in omitted_sets]
        self.markers = [MovingMarker(branch_stream(f, k, n)) for k in range(n)]
        self.branches = []
        for k in range(n):
            ys = [a_position(k, n, x) for x in omitted_sets if k <= len(x) < n]
            if k == 0:
                ys.append(0)
            om = pair(*self.markers[k].settle(min(ys), search_limit)) if ys else None
            self.branches.append(_Branch(self.markers[k].g, om, search_limit))
        self.dimension = n + sum(b.omitted is not None for b in self.branches)

    def gen_key(self, slot: int) -> int:
        i, k = divmod(slot, self.n)
        return pair(i, k)

    def key_slot(self, key: int) -> int:
        i, k = unpair(key)
        return i * self.n + k

    def _lift(self, k: int, v: FormalSum) -> FormalSum:
        return FormalSum({pair(i, k): q for i, q in v.terms.items()})

    def standard_basis(self) -> list[FormalSum]:
        return [self._lift(k, b) for k, br in enumerate(self.branches) for b in br.standard_basis()]

    def null_vector(self, rng: random.Random) -> FormalSum:
        k = rng.randrange(self.n)
        return self._lift(k, self.branches[k].null_vector(rng))

    def normal_form(self, v: FormalSum) -> FormalSum:
        local: list[dict[int, Fraction]] = [{} for _ in range(self.n)]
        for key, q in v.terms.items():
            i, k = unpair(key)
            if k >= self.n:
                raise InvalidInstance(f"branch {k} out of range in {v!r}")
            local[k][i] = q
        out = []
        for k, terms in enumerate(local):
            if terms:
                out += [(pair(i, k), q) for i, q in self.branches[k].reduce(terms).items()]
        return FormalSum(out)


def decode_basis_to_maxset(basis: Sequence[FormalSum], n: int, f: Callable[[int], int],
                           max_stages: int = 20000) -> FiniteSet:
    """A largest set omitted by ``f``, read off a basis of its gadget space."""
    k = len(basis) - n - 1
    if not 0 <= k < n:
        raise InvalidBasis(f"basis of size {len(basis)} does not fit n = {n}")
    marker = MovingMarker(branch_stream(f, k, n))
    odd = set()
    for b in basis:
        for key in b.terms:
            i, kk = unpair(key)
            if kk == k and i % 2:
                odd.add(i // 2)
    m = eject_dependent(odd, marker.g, max_stages)
    y, _ = unpair(m)
    return a_index(k, n, y)


# -- direct sums ---------------------------------------------------------------------

class DirectSum(VectorSpace):
    """Finitely many summands; summand ``i`` uses keys ``pair(i, key)``."""

    name = "sum"

    def __init__(self, spaces: Sequence[VectorSpace]):
        if not spaces:
            raise InvalidInstance("empty direct sum")
        self.spaces = list(spaces)
        dims = [s.dimension for s in self.spaces]
        self.dimension = None if None in dims else sum(dims)

    def gen_key(self, slot: int) -> int:
        s, i = divmod(slot, len(self.spaces))
        return pair(i, self.spaces[i].gen_key(s))

    def key_slot(self, key: int) -> int:
        i, k = unpair(key)
        return self.spaces[i].key_slot(k) * len(self.spaces) + i

    def standard_basis(self) -> list[FormalSum]:
        return [self.inject(i, b) for i, sp in enumerate(self.spaces) for b in sp.standard_basis()]

    def null_vector(self, rng: random.Random) -> FormalSum:
        i = rng.randrange(len(self.spaces))
        return self.inject(i, self.spaces[i].null_vector(rng))

    def split(self, v: FormalSum) -> list[FormalSum]:
        parts: list[dict[int, Fraction]] = [{} for _ in self.spaces]
        for key, q in v.terms.items():
            i, k = unpair(key)
            if i >= len(self.spaces):
                raise InvalidInstance(f"summand {i} out of range")
            parts[i][k] = q
        return [FormalSum(p) for p in parts]

    def inject(self, i: int, v: FormalSum) -> FormalSum:
        return FormalSum({pair(i, k): q for k, q in v.terms.items()})

    def normal_form(self, v: FormalSum) -> FormalSum:
        out = FormalSum()
        for i, (s, part) in enumerate(zip(self.spaces, self.split(v))):
            if part:
                out = out + self.inject(i, s.normal_form(part))
        return out

    def summand_of(self, v: FormalSum) -> Optional[int]:
        """The one summand carrying ``v``, if it is pure."""
        idx = {unpair(k)[0] for k in v.terms}
        return next(iter(idx)) if len(idx) == 1 else None


def direct_sum(spaces: Sequence[VectorSpace]) -> DirectSum:
    return DirectSum(spaces)


def split_pure_basis(space: DirectSum, basis: Sequence[FormalSum]) -> list[list[FormalSum]]:
    """``B`` meets each summand in a basis when every member of ``B`` is pure."""
    out: list[list[FormalSum]] = [[] for _ in space.spaces]
    for b in basis:
        i = space.summand_of(b)
        if i is None:
            raise InvalidBasis(f"{b!r} mixes summands")
        out[i].append(space.split(b)[i])
    return out


def split_by_projection(space: DirectSum, basis: Sequence[FormalSum]) -> list[list[FormalSum]]:
    """Project every member onto each summand and prune to an independent spanning set."""
    out = []
    for i, s in enumerate(space.spaces):
        kept: list[FormalSum] = []
        for b in basis:
            p = space.split(b)[i]
            if p and not dependence(kept + [p], s)[0]:
                kept.append(p)
        out.append(kept)
    return out
