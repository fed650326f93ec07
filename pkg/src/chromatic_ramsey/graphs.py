"""Vertex sets, simple graphs, and edge-colored complete graphs.

All vertex sets are bitmasks over 0..n-1 (vertices 0-indexed, colors
1-indexed). Graphs are adjacency bitmask tuples, which keeps every
restriction/intersection operation a couple of int ops.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .errors import DegenerateGraph, UnknownColor


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def bits(mask: int) -> Iterator[int]:
    """Iterate set bit positions in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class VertexSet:
    """Subset of 0..universe-1, stored as a bitmask."""

    universe: int
    mask: int

    @classmethod
    def from_iterable(cls, universe: int, vertices: Iterable[int]) -> "VertexSet":
        m = mask_of(vertices)
        if m >> universe:
            raise ValueError("vertex outside universe")
        return cls(universe, m)

    @classmethod
    def full(cls, universe: int) -> "VertexSet":
        return cls(universe, (1 << universe) - 1)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, v: int) -> bool:
        return bool((self.mask >> v) & 1)

    def __iter__(self) -> Iterator[int]:
        return bits(self.mask)

    def members(self) -> list[int]:
        return list(bits(self.mask))

    def intersect(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.universe, self.mask & other.mask)

    def minus(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.universe, self.mask & ~other.mask)

    def union(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.universe, self.mask | other.mask)

    def issubset(self, other: "VertexSet") -> bool:
        return self.mask & ~other.mask == 0

    def isdisjoint(self, other: "VertexSet") -> bool:
        return self.mask & other.mask == 0


class SimpleGraph:
    """Undirected simple graph on vertices 0..n-1 with bitmask adjacency."""

    __slots__ = ("n", "adj")

    def __init__(self, n: int, adj: tuple[int, ...]):
        self.n = n
        self.adj = adj

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "SimpleGraph":
        adj = [0] * n
        for u, v in edges:
            if u == v:
                raise DegenerateGraph("loop edge")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        return cls(n, tuple(adj))

    @classmethod
    def empty(cls, n: int) -> "SimpleGraph":
        return cls(n, (0,) * n)

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.adj[u] >> v) & 1)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def edge_count(self, within: int | None = None) -> int:
        if within is None:
            return sum(a.bit_count() for a in self.adj) // 2
        return sum((self.adj[v] & within).bit_count() for v in bits(within)) // 2

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for v in range(self.n):
            higher = self.adj[v] >> (v + 1) << (v + 1)
            for u in bits(higher):
                out.append((v, u))
        return out

    def cross_edges(self, a_mask: int, b_mask: int) -> int:
        """Number of edges with one end in a_mask and the other in b_mask
        (masks assumed disjoint)."""
        return sum((self.adj[v] & b_mask).bit_count() for v in bits(a_mask))

    def restricted(self, within: int) -> "SimpleGraph":
        """Same vertex ids, adjacency intersected with `within`."""
        adj = tuple(self.adj[v] & within if (within >> v) & 1 else 0
                    for v in range(self.n))
        return SimpleGraph(self.n, adj)

    def induced(self, vertices: list[int]) -> "SimpleGraph":
        """Reindexed induced subgraph; vertices[i] becomes i."""
        pos = {v: i for i, v in enumerate(vertices)}
        k = len(vertices)
        adj = [0] * k
        for i, v in enumerate(vertices):
            row = 0
            for w in bits(self.adj[v]):
                j = pos.get(w)
                if j is not None:
                    row |= 1 << j
            adj[i] = row
        return SimpleGraph(k, tuple(adj))

    def union_with(self, other: "SimpleGraph") -> "SimpleGraph":
        if other.n != self.n:
            raise DegenerateGraph("union of graphs on different vertex counts")
        return SimpleGraph(self.n, tuple(a | b for a, b in zip(self.adj, other.adj)))


def density(g: SimpleGraph, within: int | None = None) -> Fraction:
    """Edge density |E| / C(n,2) as an exact rational."""
    if within is None:
        n = g.n
        e = g.edge_count()
    else:
        n = within.bit_count()
        e = g.edge_count(within)
    if n < 2:
        raise DegenerateGraph("density needs at least two vertices")
    return Fraction(2 * e, n * (n - 1))


def _pair_index(u: int, v: int) -> int:
    # u < v required
    return v * (v - 1) // 2 + u


class ColoredCompleteGraph:
    """Complete graph K_n with every edge assigned a color from 1..r."""

    __slots__ = ("n", "r", "_colors", "_class_adj")

    def __init__(self, n: int, r: int, colors: tuple[int, ...]):
        if n < 1:
            raise DegenerateGraph("need at least one vertex")
        if r < 1:
            raise UnknownColor("palette must have at least one color")
        if len(colors) != n * (n - 1) // 2:
            raise DegenerateGraph("color table must cover every edge exactly once")
        for c in colors:
            if not 1 <= c <= r:
                raise UnknownColor(f"color {c} outside palette 1..{r}")
        self.n = n
        self.r = r
        self._colors = colors
        self._class_adj: dict[int, tuple[int, ...]] = {}

    @classmethod
    def from_edge_colors(cls, n: int, r: int,
                         edges: Iterable[tuple[int, int, int]]) -> "ColoredCompleteGraph":
        table: list[int | None] = [None] * (n * (n - 1) // 2)
        for u, v, c in edges:
            if u == v:
                raise DegenerateGraph("loop edge")
            if u > v:
                u, v = v, u
            idx = _pair_index(u, v)
            if table[idx] is not None:
                raise DegenerateGraph(f"edge ({u},{v}) colored twice")
            table[idx] = c
        if any(c is None for c in table):
            raise DegenerateGraph("some edge is uncolored")
        return cls(n, r, tuple(table))  # type: ignore[arg-type]

    @classmethod
    def from_function(cls, n: int, r: int, color_of) -> "ColoredCompleteGraph":
        table = []
        for v in range(n):
            for u in range(v):
                table.append(color_of(u, v))
        return cls(n, r, tuple(table))

    def color_of(self, u: int, v: int) -> int:
        if u == v:
            raise DegenerateGraph("no loop edges in K_n")
        if u > v:
            u, v = v, u
        return self._colors[_pair_index(u, v)]

    def edge_triples(self) -> list[tuple[int, int, int]]:
        out = []
        for v in range(self.n):
            for u in range(v):
                out.append((u, v, self._colors[_pair_index(u, v)]))
        return out

    def _adj_for(self, color: int) -> tuple[int, ...]:
        cached = self._class_adj.get(color)
        if cached is None:
            adj = [0] * self.n
            for v in range(self.n):
                base = v * (v - 1) // 2
                for u in range(v):
                    if self._colors[base + u] == color:
                        adj[u] |= 1 << v
                        adj[v] |= 1 << u
            cached = tuple(adj)
            self._class_adj[color] = cached
        return cached

    def class_graph(self, color: int, within: int | None = None) -> SimpleGraph:
        """The color class as a SimpleGraph on the full vertex range."""
        if not 1 <= color <= self.r:
            raise UnknownColor(f"color {color} outside palette 1..{self.r}")
        g = SimpleGraph(self.n, self._adj_for(color))
        return g if within is None else g.restricted(within)

    def union_graph(self, colors: Iterable[int], within: int | None = None) -> SimpleGraph:
        adj = [0] * self.n
        for c in colors:
            if not 1 <= c <= self.r:
                raise UnknownColor(f"color {c} outside palette 1..{self.r}")
            for v, row in enumerate(self._adj_for(c)):
                adj[v] |= row
        g = SimpleGraph(self.n, tuple(adj))
        return g if within is None else g.restricted(within)

    def used_colors(self, within: int | None = None) -> list[int]:
        """Colors that actually appear on at least one edge (inside `within`)."""
        if within is None:
            return sorted(set(self._colors))
        seen = set()
        verts = list(bits(within))
        for i, v in enumerate(verts):
            for u in verts[:i]:
                seen.add(self._colors[_pair_index(u, v)])
        return sorted(seen)

    def class_edge_count(self, color: int, within: int | None = None) -> int:
        return self.class_graph(color).edge_count(within)


def union_color_classes(c: ColoredCompleteGraph, colors: Iterable[int],
                        within: int | None = None) -> SimpleGraph:
    """Union of the given color classes as a simple graph."""
    return c.union_graph(colors, within)
