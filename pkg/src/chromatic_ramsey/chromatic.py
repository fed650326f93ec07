"""Exact chromatic numbers, proper colorings, and clique search.

Kernel selection: alternating-sum subset DP for n <= 20, saturation-ordered
branch and bound for 20 < n <= 64, TooLarge above. Both paths share the same
deterministic tie-breaking (descending degree, then lowest index) so repeated
runs produce identical colorings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import DegenerateGraph, TooLarge
from .graphs import ColoredCompleteGraph, SimpleGraph, bits

DP_MAX = 20
EXACT_MAX = 64


def greedy_clique(g: SimpleGraph, within: int | None = None) -> list[int]:
    """Deterministic greedy clique (lower bound for chi). Multi-seed: grow from
    each of the eight highest-degree vertices and keep the best."""
    universe = within if within is not None else (1 << g.n) - 1
    verts = sorted(bits(universe), key=lambda v: (-(g.adj[v] & universe).bit_count(), v))
    best: list[int] = []
    if not verts:
        return best
    for seed in verts[:8]:
        clique = [seed]
        cand = g.adj[seed] & universe
        while cand:
            pick = max(bits(cand), key=lambda v: ((g.adj[v] & cand).bit_count(), -v))
            clique.append(pick)
            cand &= g.adj[pick]
        if len(clique) > len(best):
            best = sorted(clique)
    return best


def find_clique(g: SimpleGraph, size: int, within: int | None = None) -> list[int] | None:
    """Exact search for a clique of the given size; None if none exists."""
    universe = within if within is not None else (1 << g.n) - 1
    if size <= 0:
        return []
    if size == 1:
        return [next(bits(universe))] if universe else None
    order = sorted(bits(universe), key=lambda v: (-(g.adj[v] & universe).bit_count(), v))

    def extend(clique: list[int], cand: int) -> list[int] | None:
        if len(clique) == size:
            return sorted(clique)
        if len(clique) + cand.bit_count() < size:
            return None
        for v in [u for u in order if (cand >> u) & 1]:
            cand &= ~(1 << v)
            got = extend(clique + [v], cand & g.adj[v])
            if got is not None:
                return got
        return None

    return extend([], universe)


def _dsatur_greedy(g: SimpleGraph, verts: list[int]) -> dict[int, int]:
    """Greedy DSATUR coloring; returns vertex -> color (1-indexed)."""
    colors: dict[int, int] = {}
    neighbor_colors: dict[int, set[int]] = {v: set() for v in verts}
    vset = set(verts)
    while len(colors) < len(verts):
        v = max((u for u in verts if u not in colors),
                key=lambda u: (len(neighbor_colors[u]),
                               sum(1 for w in bits(g.adj[u]) if w in vset), -u))
        used = neighbor_colors[v]
        c = 1
        while c in used:
            c += 1
        colors[v] = c
        for w in bits(g.adj[v]):
            if w in vset:
                neighbor_colors[w].add(c)
    return colors


def _kcolorable_bnb(g: SimpleGraph, verts: list[int], k: int) -> dict[int, int] | None:
    """Exact k-colorability by saturation-ordered backtracking.

    Returns a proper coloring with colors 1..k or None. Symmetry broken by
    allowing at most one brand-new color per branch point.
    """
    if k <= 0:
        return None if verts else {}
    vset = set(verts)
    deg = {v: sum(1 for w in bits(g.adj[v]) if w in vset) for v in verts}
    colors: dict[int, int] = {}
    # neighbor color masks, bit c-1 set when some neighbor uses color c
    satur = {v: 0 for v in verts}

    def pick() -> int:
        return max((u for u in verts if u not in colors),
                   key=lambda u: (satur[u].bit_count(), deg[u], -u))

    def assign(v: int, c: int, trail: list[int]) -> None:
        colors[v] = c
        bit = 1 << (c - 1)
        for w in bits(g.adj[v]):
            if w in vset and w not in colors and not satur[w] & bit:
                satur[w] |= bit
                trail.append(w)

    def unassign(v: int, c: int, trail: list[int]) -> None:
        del colors[v]
        bit = 1 << (c - 1)
        for w in trail:
            satur[w] &= ~bit

    def solve(max_used: int) -> bool:
        if len(colors) == len(verts):
            return True
        v = pick()
        limit = min(k, max_used + 1)
        forbidden = satur[v]
        for c in range(1, limit + 1):
            if forbidden & (1 << (c - 1)):
                continue
            trail: list[int] = []
            assign(v, c, trail)
            if solve(max(max_used, c)):
                return True
            unassign(v, c, trail)
        return False

    return dict(colors) if solve(0) else None


def _chi_leq_dp(g: SimpleGraph, verts: list[int], k: int) -> bool:
    """chi(G) <= k via the alternating cover-count sum over subsets.

    sum over S of (-1)^{n-|S|} * i(S)^k is positive exactly when V can be
    covered by k independent sets, where i(S) counts independent subsets of S.
    """
    h = g.induced(verts)
    n = h.n
    size = 1 << n
    ind = [0] * size
    ind[0] = 1
    for s in range(1, size):
        v = (s & -s).bit_length() - 1
        rest = s & (s - 1)
        ind[s] = ind[rest] + ind[rest & ~h.adj[v]]
    total = 0
    for s in range(size):
        term = ind[s] ** k
        if (n - s.bit_count()) & 1:
            total -= term
        else:
            total += term
    return total > 0


@dataclass(frozen=True)
class ChromaticResult:
    value: int
    coloring: dict[int, int]
    lower_witness: list[int]  # clique giving the final lower bound, may be shorter


def chromatic_number(g: SimpleGraph, within: int | None = None,
                     want_coloring: bool = False) -> int | ChromaticResult:
    """Exact chromatic number of g (optionally restricted to a vertex mask)."""
    universe = within if within is not None else (1 << g.n) - 1
    verts = list(bits(universe))
    n = len(verts)
    if n == 0:
        raise DegenerateGraph("chromatic number of the empty vertex set")
    if n > EXACT_MAX:
        raise TooLarge(f"{n} vertices exceeds the exact cap of {EXACT_MAX}")

    greedy = _dsatur_greedy(g.restricted(universe), verts)
    ub = max(greedy.values())
    clique = greedy_clique(g, universe)
    lb = max(1, len(clique))

    if lb == ub:
        value, coloring = ub, greedy
    elif n <= DP_MAX:
        lo, hi = lb, ub  # chi in [lo, hi], chi <= hi known
        while lo < hi:
            mid = (lo + hi) // 2
            if _chi_leq_dp(g, verts, mid):
                hi = mid
            else:
                lo = mid + 1
        value = lo
        coloring = greedy if value == ub else None
    else:
        value, coloring = ub, greedy
        for k in range(ub - 1, lb - 1, -1):
            attempt = _kcolorable_bnb(g, verts, k)
            if attempt is None:
                break
            value, coloring = k, attempt

    if not want_coloring:
        return value
    if coloring is None:
        coloring = _kcolorable_bnb(g, verts, value)
        assert coloring is not None
    return ChromaticResult(value, coloring, clique)


def proper_coloring(g: SimpleGraph, k: int, within: int | None = None) -> dict[int, int] | None:
    """Exact: a proper coloring with at most k colors, or None.

    Greedy DSATUR answers immediately when it fits inside k; otherwise the
    full branch-and-bound settles it.
    """
    universe = within if within is not None else (1 << g.n) - 1
    verts = list(bits(universe))
    if not verts:
        return {}
    if len(verts) > EXACT_MAX:
        raise TooLarge(f"{len(verts)} vertices exceeds the exact cap of {EXACT_MAX}")
    greedy = _dsatur_greedy(g.restricted(universe), verts)
    if max(greedy.values()) <= k:
        return greedy
    return _kcolorable_bnb(g, verts, k)


@dataclass(frozen=True)
class PqVerdict:
    """Outcome of a chromatic-(p,q) check; falsy when some union is too chromatic."""

    holds: bool
    witness_colors: tuple[int, ...] | None = None
    witness_chi: int | None = None
    unions_checked: int = 0

    def __bool__(self) -> bool:
        return self.holds


def is_chromatic_pq_coloring(c: ColoredCompleteGraph, p: int, q: int,
                             within: int | None = None) -> PqVerdict:
    """Does every union of q-1 color classes have chromatic number <= p-1?

    Only subsets of used colors are examined: an unused class is empty and
    cannot change any union. When fewer than q-1 colors are used the single
    union of all used classes is checked.
    """
    if p < 2:
        raise DegenerateGraph("p must be at least 2")
    if not 2 <= q <= p * (p - 1) // 2 + 1:
        raise DegenerateGraph("q out of range for chromatic-(p,q)")
    used = c.used_colors(within)
    from itertools import combinations
    if len(used) >= q - 1:
        subsets: Iterable[tuple[int, ...]] = combinations(used, q - 1)
    else:
        subsets = [tuple(used)] if used else []
    universe = within if within is not None else (1 << c.n) - 1
    checked = 0
    for colors in subsets:
        union = c.union_graph(colors)
        support = universe
        chi = chromatic_number(union, within=support)
        checked += 1
        if chi > p - 1:
            return PqVerdict(False, tuple(colors), chi, checked)
    return PqVerdict(True, None, None, checked)
