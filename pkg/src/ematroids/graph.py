"""Countable graphs, antichains, and the graph-side gadget constructions.

Vertices are naturals.  A graph answers ``is_vertex`` and ``adjacent``;
``neighbors(v, bound)`` lists adjacent vertices with codes below ``bound``
and is overridden wherever the structure allows something faster than a
scan.  Component certificates (:class:`Components`) carry the harness's
ground truth about which vertices share a component.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass
from itertools import combinations, product
from typing import Callable, Hashable, Iterable, Optional

from .codes import (
    FiniteSet, InvalidInstance, Stream, colex_unrank, pair, seq_decode, set_decode,
    set_encode, unpair,
)
from .matroid import EMatroid, OracleTooLarge


class NotMaximalWithinBound(ValueError):
    pass


class InvalidSolution(ValueError):
    pass


class UnionFind:
    def __init__(self):
        self.parent: dict[int, int] = {}

    def find(self, x: int) -> int:
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)

    def groups(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {}
        for x in self.parent:
            out.setdefault(self.find(x), []).append(x)
        return out


class CountableGraph:
    def is_vertex(self, v: int) -> bool:
        return v >= 0

    def adjacent(self, u: int, v: int) -> bool:
        raise NotImplementedError

    def neighbors(self, v: int, bound: int) -> list[int]:
        return [w for w in range(bound) if w != v and self.is_vertex(w) and self.adjacent(v, w)]

    def vertices(self, bound: int) -> list[int]:
        return [v for v in range(bound) if self.is_vertex(v)]

    def vertex(self, i: int) -> int:
        """The ``i``-th vertex in code order."""
        v = -1
        for _ in range(i + 1):
            v += 1
            while not self.is_vertex(v):
                v += 1
        return v

    def union_find(self, bound: int) -> UnionFind:
        uf = UnionFind()
        for v in self.vertices(bound):
            uf.find(v)
            for w in self.neighbors(v, bound):
                uf.union(v, w)
        return uf


class TabledGraph(CountableGraph):
    """Finite edge table on ``[0, size)``; vertices ``>= size`` follow ``tail``.

    ``tail`` is ``None`` (isolated) or a root ``r < size`` every tail vertex
    attaches to.
    """

    def __init__(self, size: int, edges: Iterable[tuple[int, int]], tail: Optional[int] = None):
        self.size = size
        self.edges = frozenset((min(a, b), max(a, b)) for a, b in edges)
        if any(a == b or b >= size for a, b in self.edges):
            raise InvalidInstance("edges must join distinct vertices below size")
        if tail is not None and not 0 <= tail < size:
            raise InvalidInstance("tail root must lie in the table")
        self.tail = tail
        self._adj: dict[int, set[int]] = {}
        for a, b in self.edges:
            self._adj.setdefault(a, set()).add(b)
            self._adj.setdefault(b, set()).add(a)

    def adjacent(self, u: int, v: int) -> bool:
        if u == v:
            return False
        a, b = min(u, v), max(u, v)
        if b < self.size:
            return (a, b) in self.edges
        return self.tail is not None and a == self.tail

    def neighbors(self, v: int, bound: int) -> list[int]:
        if v >= self.size:
            return [self.tail] if self.tail is not None and self.tail < bound else []
        out = [w for w in self._adj.get(v, ()) if w < bound]
        if v == self.tail:
            out += list(range(self.size, bound))
        return out

    def vertex(self, i: int) -> int:
        return i

    def components(self) -> "Components":
        uf = UnionFind()
        for v in range(self.size):
            uf.find(v)
        for a, b in self.edges:
            uf.union(a, b)
        groups = uf.groups()
        size, tail = self.size, self.tail

        def label(v: int):
            if v < size:
                return uf.find(v)
            return uf.find(tail) if tail is not None else v

        def members(key, window: int) -> list[int]:
            out = sorted(groups.get(key, [])) if isinstance(key, int) and key < size else [key]
            if tail is not None and key == uf.find(tail):
                out += list(range(size, max(size, window)))
            return [v for v in out if v < window]

        keys = sorted(groups) if tail is not None else None
        return Components(label, keys, members, finite_from=None if tail is not None else size,
                          table_keys=sorted(groups))

    def to_json(self) -> dict:
        return {"size": self.size, "edges": sorted(map(list, self.edges)), "tail": self.tail}

    @classmethod
    def from_json(cls, d: dict) -> "TabledGraph":
        return cls(d["size"], [tuple(e) for e in d["edges"]], d["tail"])


@dataclass
class Components:
    """Ground-truth component structure of a graph.

    ``keys`` lists every component when there are finitely many; otherwise it
    is ``None`` and each vertex ``>= finite_from`` is its own component while
    ``table_keys`` lists the components meeting ``[0, finite_from)``.
    """

    label: Callable[[int], Hashable]
    keys: Optional[list]
    members: Callable[[Hashable, int], list[int]]
    finite_from: Optional[int] = None
    table_keys: Optional[list] = None

    @property
    def count(self) -> Optional[int]:
        return None if self.keys is None else len(self.keys)

    def sample_antichain(self, rng: random.Random, window: int):
        """A maximal antichain: one random vertex below ``window`` per component."""
        keys = self.keys if self.keys is not None else self.table_keys
        chosen = []
        for k in keys:
            ms = self.members(k, window)
            if not ms:
                raise InvalidInstance(f"component {k!r} has no vertex below {window}")
            chosen.append(rng.choice(ms))
        if self.keys is not None:
            return FiniteSet(chosen)
        return CofiniteAntichain(FiniteSet(chosen), self.finite_from)

    def all_antichains(self, window: int, limit: int) -> Optional[list[FiniteSet]]:
        """Every maximal antichain drawn from vertices below ``window``, if at most ``limit``."""
        if self.keys is None:
            return None
        pools = [self.members(k, window) for k in self.keys]
        total = 1
        for p in pools:
            total *= len(p)
        if total > limit:
            return None
        return [FiniteSet(c) for c in product(*pools)]


@dataclass(frozen=True)
class CofiniteAntichain:
    """``chosen`` plus every vertex code ``>= beyond`` (isolated tail)."""

    chosen: FiniteSet
    beyond: int

    def __contains__(self, v: int) -> bool:
        return v in self.chosen or v >= self.beyond


def is_max_antichain(g: CountableGraph, comps: Components, a, window: int) -> bool:
    """Check ``a`` (anything supporting ``in``) against the certificate below ``window``."""
    if isinstance(a, (set, frozenset)):
        members = sorted(a)
    else:
        members = [v for v in range(window) if v in a]
    if not all(g.is_vertex(v) for v in members):
        return False
    labels = [comps.label(v) for v in members]
    if len(set(labels)) != len(labels):
        return False
    keys = comps.keys if comps.keys is not None else comps.table_keys
    if not set(keys) <= set(labels):
        return False
    if comps.keys is None:
        return all(v in a for v in range(comps.finite_from, window))
    return True


def connected(g: CountableGraph, u: int, v: int, bound: int) -> bool:
    """Path search using only vertex codes below ``bound``."""
    if u == v:
        return True
    seen = {u}
    stack = [u]
    while stack:
        x = stack.pop()
        for w in g.neighbors(x, bound):
            if w == v:
                return True
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return False


def brute_force_max_antichains(g: CountableGraph, vertices: Iterable[int], limit: int = 12) -> set[FiniteSet]:
    """Maximal pairwise-disconnected subsets of a finite induced subgraph."""
    vs = sorted(vertices)
    if len(vs) > limit:
        raise OracleTooLarge(f"{len(vs)} vertices exceeds {limit}")
    top = max(vs) + 1 if vs else 0
    allowed = set(vs)

    class _Induced(CountableGraph):
        def neighbors(self, x, bound):
            return [w for w in g.neighbors(x, top) if w in allowed]

    h = _Induced()
    conn = {(a, b): connected(h, a, b, top) for a, b in combinations(vs, 2)}
    anti = [frozenset(s) for r in range(len(vs) + 1) for s in combinations(vs, r)
            if not any(conn[p] for p in combinations(s, 2))]
    return {FiniteSet(s) for s in anti if not any(s < t for t in anti)}


# -- the graph e-matroid -------------------------------------------------------------

def min_path_code(g: CountableGraph, a: int, b: int, bound: int) -> Optional[int]:
    """Least sequence code of a path from ``a`` to ``b`` inside ``[0, bound)``.

    The code of ``x :: rest`` grows with the code of ``rest``, so a Dijkstra
    sweep backwards from ``b`` finds the least code.
    """
    start = 1 + pair(b, 0)
    best = {b: start}
    heap = [(start, b)]
    while heap:
        c, x = heapq.heappop(heap)
        if c > best.get(x, c):
            continue
        for w in g.neighbors(x, bound):
            cw = 1 + pair(w, c)
            if cw < best.get(w, cw + 1):
                best[w] = cw
                heapq.heappush(heap, (cw, w))
    return best.get(a) if a != b else None


def is_path_code(g: CountableGraph, t: int) -> bool:
    vs = seq_decode(t)
    return (len(vs) >= 2 and len(set(vs)) == len(vs) and all(g.is_vertex(v) for v in vs)
            and all(g.adjacent(x, y) for x, y in zip(vs, vs[1:])))


def vertex_schedule(g: CountableGraph, j: int) -> FiniteSet:
    """``V_j``: the vertex set indexed by the left half of ``j``; each set recurs forever."""
    c, _ = unpair(j)
    return FiniteSet(g.vertex(i) for i in set_decode(c))


def ematroid_from_graph(g: CountableGraph, edge: Optional[tuple[int, int]], path_bound: int = 64,
                        comps: Optional[Components] = None) -> EMatroid:
    """E-matroid whose independent sets are the antichains of ``g``.

    ``e(j) = V_j`` if a path code below ``j`` joins two vertices of ``V_j``,
    and the designated edge otherwise.  Paths are searched through vertex
    codes below ``path_bound``.
    """
    if edge is None or not g.adjacent(*edge):
        raise InvalidInstance("a designated edge of the graph is required")
    default = set_encode(edge)
    cache: dict[tuple[int, int], Optional[int]] = {}

    def code(a: int, b: int) -> Optional[int]:
        key = (min(a, b), max(a, b))
        if key not in cache:
            c1 = min_path_code(g, key[0], key[1], path_bound)
            c2 = min_path_code(g, key[1], key[0], path_bound)
            cands = [c for c in (c1, c2) if c is not None]
            cache[key] = min(cands) if cands else None
        return cache[key]

    def e(j: int) -> int:
        vj = vertex_schedule(g, j)
        for a, b in combinations(sorted(vj), 2):
            c = code(a, b)
            if c is not None and c < j:
                return vj.code
        return default

    def shares_label(xs: frozenset) -> bool:
        labels = [comps.label(x) for x in xs]
        return len(set(labels)) < len(labels)

    m = EMatroid(Stream.derived("graph", e), element=g.vertex, is_ground=g.is_vertex,
                 dependent=shares_label if comps is not None else None, name="graph")
    return m


class AnchoredGraph(CountableGraph):
    """``g`` shifted up by one with a fresh vertex ``0`` joined to ``anchor + 1``."""

    def __init__(self, g: CountableGraph, anchor: int = 0):
        if not g.is_vertex(anchor):
            raise InvalidInstance("anchor must be a vertex")
        self.base = g
        self.anchor = anchor

    def is_vertex(self, v: int) -> bool:
        return v == 0 or (v > 0 and self.base.is_vertex(v - 1))

    def adjacent(self, u: int, v: int) -> bool:
        if u == v:
            return False
        if 0 in (u, v):
            return max(u, v) == self.anchor + 1
        return self.base.adjacent(u - 1, v - 1)

    def neighbors(self, v: int, bound: int) -> list[int]:
        if v == 0:
            return [self.anchor + 1] if self.anchor + 1 < bound else []
        out = [w + 1 for w in self.base.neighbors(v - 1, max(0, bound - 1))]
        if v == self.anchor + 1:
            out.append(0)
        return out

    def vertex(self, i: int) -> int:
        return 0 if i == 0 else self.base.vertex(i - 1) + 1

    @property
    def edge(self) -> tuple[int, int]:
        return (0, self.anchor + 1)


def add_anchor_edge(g: CountableGraph, anchor: int = 0) -> AnchoredGraph:
    return AnchoredGraph(g, anchor)


def anchored_components(comps: Components, anchor: int = 0) -> Components:
    def label(v: int):
        return comps.label(anchor if v == 0 else v - 1)

    def members(key, window: int) -> list[int]:
        out = [v + 1 for v in comps.members(key, max(0, window - 1))]
        if key == comps.label(anchor):
            out.append(0)
        return sorted(out)

    return Components(label, comps.keys, members,
                      None if comps.finite_from is None else comps.finite_from + 1,
                      comps.table_keys)


class RepairedBasis:
    """Undo the anchor shift on a basis of the anchored graph."""

    def __init__(self, b, anchor: int = 0):
        self.b = b
        self.anchor = anchor

    def __contains__(self, v: int) -> bool:
        if v == self.anchor and 0 in self.b:
            return True
        return (v + 1) in self.b

    def __iter__(self):
        if not isinstance(self.b, (set, frozenset)):
            raise TypeError("only finite bases iterate")
        for x in sorted(self.b):
            yield self.anchor if x == 0 else x - 1


def repair_basis(b, anchor: int = 0):
    r = RepairedBasis(b, anchor)
    if isinstance(b, (set, frozenset)):
        return FiniteSet(r)
    return r


def antichain_to_components(g: CountableGraph, a: Iterable[int], bound: int,
                            search_bound: Optional[int] = None) -> dict[int, int]:
    """Map each vertex below ``bound`` to the member of ``a`` it is connected to."""
    uf = g.union_find(search_bound or bound)
    rep: dict[int, int] = {}
    for x in a:
        rep[uf.find(x)] = x
    out = {}
    for v in g.vertices(bound):
        r = uf.find(v)
        if r not in rep:
            raise NotMaximalWithinBound(f"vertex {v} reaches no antichain member")
        out[v] = rep[r]
    return out


# -- the set-function gadget --------------------------------------------------------

def u_code(b: int, j: int) -> int:
    return 2 * pair(b - 1, j)


def v_code(b: int, j: int, k: int) -> int:
    return 2 * pair(pair(b - 1, j), k) + 1


def parse_vertex(code: int) -> tuple[str, int, int, Optional[int]]:
    """``("u", b, j, None)`` or ``("v", b, j, k)``."""
    if code % 2 == 0:
        bm1, j = unpair(code // 2)
        return "u", bm1 + 1, j, None
    bj, k = unpair(code // 2)
    bm1, j = unpair(bj)
    return "v", bm1 + 1, j, k


class GadgetGraph(CountableGraph):
    """Branches ``1 <= b < n``: a ``u``-ray with a ``v``-chain hanging off it.

    At step ``j`` the marker ``k^b_j`` names the candidate set
    ``colex_unrank(k, b)``.  Once ``f`` has enumerated that set (at some
    ``t <= j``) ``v^b_j`` becomes a pendant on ``u^b_j`` and the marker
    advances; otherwise ``v^b_j`` is chained to ``v^b_{j+1}``.  The ``v``
    vertex codes carry their marker value so that the set can be read back
    from a vertex alone.
    """

    def __init__(self, f: Callable[[int], int], n: int):
        if n < 2:
            raise InvalidInstance("gadget graph needs n >= 2")
        self.f = f
        self.n = n
        self._seen: set[int] = set()
        self._steps = 0
        self._markers = {b: [0] for b in range(1, n)}
        self._present = {b: [] for b in range(1, n)}

    def _extend(self, j: int) -> None:
        while self._steps <= j:
            s = self._steps
            self._seen.add(self.f(s))
            for b in range(1, self.n):
                k = self._markers[b][s]
                hit = colex_unrank(k, b).code in self._seen
                self._present[b].append(hit)
                self._markers[b].append(k + 1 if hit else k)
            self._steps += 1

    def marker(self, b: int, j: int) -> int:
        self._extend(j)
        return self._markers[b][j]

    def pendant(self, b: int, j: int) -> bool:
        self._extend(j)
        return self._present[b][j]

    def u(self, b: int, j: int) -> int:
        return u_code(b, j)

    def v(self, b: int, j: int) -> int:
        return v_code(b, j, self.marker(b, j))

    def is_vertex(self, code: int) -> bool:
        kind, b, j, k = parse_vertex(code)
        if not 1 <= b < self.n:
            return False
        return kind == "u" or k == self.marker(b, j)

    def neighbors(self, code: int, bound: int) -> list[int]:
        if not self.is_vertex(code):
            return []
        kind, b, j, _ = parse_vertex(code)
        out = []
        if kind == "u":
            out.append(self.u(b, j + 1))
            if j > 0:
                out.append(self.u(b, j - 1))
            if self.pendant(b, j):
                out.append(self.v(b, j))
        else:
            if self.pendant(b, j):
                out.append(self.u(b, j))
            else:
                out.append(self.v(b, j + 1))
            if j > 0 and not self.pendant(b, j - 1):
                out.append(self.v(b, j - 1))
        return [w for w in out if w < bound]

    def adjacent(self, x: int, y: int) -> bool:
        return y in self.neighbors(x, max(x, y) + 1)

    def vertex(self, i: int) -> int:
        # interleave branches and steps: i -> (branch, step, u/v)
        q, side = divmod(i, 2)
        j, bm1 = divmod(q, self.n - 1)
        return self.u(bm1 + 1, j) if side == 0 else self.v(bm1 + 1, j)

    def stuck_step(self, b: int, omitted_rank: Optional[int]) -> Optional[int]:
        """First step at which the branch-``b`` marker reaches ``omitted_rank``."""
        if omitted_rank is None:
            return None
        j = 0
        while self.marker(b, j) < omitted_rank:
            j += 1
        return j


def gadget_graph_from_setfunction(f: Callable[[int], int], n: int) -> GadgetGraph:
    return GadgetGraph(f, n)


def least_omitted_ranks(omitted: Iterable[FiniteSet], n: int) -> dict[int, Optional[int]]:
    """Per branch ``b``, the colex rank of the least omitted set of size ``b``."""
    from .codes import colex_rank
    out: dict[int, Optional[int]] = {b: None for b in range(1, n)}
    for x in omitted:
        b = len(x)
        if 1 <= b < n:
            r = colex_rank(x)
            if out[b] is None or r < out[b]:
                out[b] = r
    return out


def gadget_components(g: GadgetGraph, omitted: Iterable[FiniteSet]) -> Components:
    """Component certificate from the omitted sets of size below ``n``."""
    ranks = least_omitted_ranks(omitted, g.n)
    stuck = {b: g.stuck_step(b, ranks[b]) for b in range(1, g.n)}

    def label(code: int):
        kind, b, j, _ = parse_vertex(code)
        if kind == "v" and stuck[b] is not None and j >= stuck[b]:
            return (b, "v")
        return (b, "u")

    keys = [(b, "u") for b in range(1, g.n)] + [(b, "v") for b in range(1, g.n) if stuck[b] is not None]

    def members(key, window: int) -> list[int]:
        b, side = key
        out = []
        j = 0
        while u_code(b, j) < window:
            if side == "u":
                out.append(u_code(b, j))
                if (stuck[b] is None or j < stuck[b]) and _closed_run(g, b, j, stuck[b]):
                    out.append(g.v(b, j))
            elif j >= stuck[b]:
                out.append(g.v(b, j))
            j += 1
        return sorted(v for v in out if v < window)

    return Components(label, keys, members)


def _closed_run(g: GadgetGraph, b: int, j: int, stuck: Optional[int], horizon: int = 4096) -> bool:
    """Whether ``v^b_j`` reaches a pendant edge within ``horizon`` steps."""
    if stuck is not None:
        return j < stuck
    for s in range(j, j + horizon):
        if g.pendant(b, s):
            return True
    return False


def decode_antichain_to_maxset(d: Iterable[int], g: Optional[GadgetGraph] = None,
                               check_bound: int = 0) -> FiniteSet:
    """Read a maximum-cardinality omitted set off a maximal antichain of the gadget.

    Uses only the vertex codes; pass ``g`` to also check that ``d`` is an
    antichain among codes below ``check_bound``.
    """
    d = sorted(d)
    if g is not None:
        for a, b in combinations(d, 2):
            if connected(g, a, b, max(check_bound, a + 1, b + 1)):
                raise InvalidSolution(f"vertices {a} and {b} are connected")
    by_branch: dict[int, list[tuple[str, int, Optional[int]]]] = {}
    for code in d:
        kind, b, j, k = parse_vertex(code)
        by_branch.setdefault(b, []).append((kind, j, k))
    doubled = [b for b, vs in by_branch.items() if len(vs) >= 2]
    if not doubled:
        return FiniteSet()
    b0 = max(doubled)
    vs = [(j, k) for kind, j, k in by_branch[b0] if kind == "v"]
    if not vs:
        raise InvalidSolution(f"branch {b0} has two vertices but no v vertex")
    _, k = max(vs)
    return colex_unrank(k, b0)
