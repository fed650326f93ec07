"""Independent oracles used to pin expected values before trusting the kernels.

Everything here is deliberately naive: full enumeration, no pruning beyond
canonical color order, no shared logic with the library paths under test.
"""

from __future__ import annotations

from itertools import combinations

from chromatic_ramsey.graphs import ColoredCompleteGraph, SimpleGraph, bits


def brute_chromatic(g: SimpleGraph, within: int | None = None) -> int:
    """Minimal k admitting a proper coloring, by trying every assignment.

    Colors are forced to first appear in increasing order, which enumerates
    each coloring once up to color renaming but misses nothing.
    """
    universe = within if within is not None else (1 << g.n) - 1
    verts = list(bits(universe))
    if not verts:
        raise ValueError("empty vertex set")

    def colorable(k: int) -> bool:
        assignment: dict[int, int] = {}

        def place(i: int, used: int) -> bool:
            if i == len(verts):
                return True
            v = verts[i]
            for c in range(1, min(k, used + 1) + 1):
                if any(assignment.get(w) == c for w in bits(g.adj[v])):
                    continue
                assignment[v] = c
                if place(i + 1, max(used, c)):
                    return True
                del assignment[v]
            return False

        return place(0, 0)

    for k in range(1, len(verts) + 1):
        if colorable(k):
            return k
    raise AssertionError("unreachable")


def brute_eps_dense(g: SimpleGraph, v1: list[int], v2: list[int], eps) -> tuple[bool, tuple | None]:
    """Full enumeration over qualifying subset pairs; feasible for parts <= 8."""
    t1 = -(-len(v1) * eps.numerator // eps.denominator)
    t2 = -(-len(v2) * eps.numerator // eps.denominator)
    t1, t2 = max(t1, 1), max(t2, 1)
    for a in combinations(v1, t1):
        amask = 0
        for x in a:
            amask |= 1 << x
        for b in combinations(v2, t2):
            if not any(g.adj[y] & amask for y in b):
                return False, (list(a), list(b))
    return True, None


def brute_dense_pair_exists(g: SimpleGraph, verts: list[int], eps, lo: int, hi: int) -> bool:
    """Any balanced eps-dense pair with part sizes in [lo, hi]? Full enumeration."""
    for s in range(lo, hi + 1):
        for a in combinations(verts, s):
            rest = [v for v in verts if v not in a]
            for b in combinations(rest, s):
                ok, _ = brute_eps_dense(g, list(a), list(b), eps)
                if ok:
                    return True
    return False


def naive_ramsey_value(r: int, p: int, q: int, n_max: int, chromatic_variant: bool):
    """Least n such that no valid coloring of K_n exists, by full enumeration.

    Valid for F: every p-subset spans at least q distinct colors.
    Valid for F_chi: every union of q-1 classes has chi <= p-1.
    Returns the value, or None when every n up to n_max admits a coloring.
    """
    from chromatic_ramsey.chromatic import is_chromatic_pq_coloring

    def has_valid(n: int) -> bool:
        m = n * (n - 1) // 2
        pairs = [(u, v) for v in range(n) for u in range(v)]

        def rec(i: int, colors: list[int]) -> bool:
            if i == m:
                cg = ColoredCompleteGraph.from_edge_colors(
                    n, r, [(u, v, c) for (u, v), c in zip(pairs, colors)])
                if chromatic_variant:
                    return bool(is_chromatic_pq_coloring(cg, p, q))
                for sub in combinations(range(n), p):
                    seen = {cg.color_of(a, b) for a, b in combinations(sub, 2)}
                    if len(seen) <= q - 1:
                        return False
                return True
            for c in range(1, r + 1):
                colors.append(c)
                if rec(i + 1, colors):
                    return True
                colors.pop()
            return False

        if n == 1:
            return True
        return rec(0, [])

    for n in range(2, n_max + 1):
        if not has_valid(n):
            return n
    return None


def hamiltonian_cycle_coloring(n: int) -> ColoredCompleteGraph:
    """K_n (n odd) edge-partitioned into (n-1)/2 Hamiltonian cycles.

    Walecki zigzag: cycle j walks the hub, then j, j+1, j-1, j+2, ... mod n-1.
    Every class has maximum degree 2, so any 3-class union greedy-colors
    with at most 7 colors: a stock verified chromatic-(8,4) input.
    """
    assert n % 2 == 1 and n >= 5
    m = (n - 1) // 2
    hub = n - 1
    edges = []
    for j in range(m):
        seq = [j]
        for k in range(1, n - 1):
            step = k if k % 2 == 1 else -k
            seq.append((seq[-1] + step) % (n - 1))
        cycle = [hub] + seq + [hub]
        for a, b in zip(cycle, cycle[1:]):
            edges.append((min(a, b), max(a, b), j + 1))
    return ColoredCompleteGraph.from_edge_colors(n, m, edges)


def one_factorization_coloring(n: int) -> ColoredCompleteGraph:
    """K_n (n even) properly edge-colored with n-1 perfect matchings.

    Round-robin: round j pairs the fixed vertex with j and folds the rest.
    Unions of two matchings are disjoint paths/even cycles, hence bipartite:
    a stock verified chromatic-(4,3) input.
    """
    assert n % 2 == 0 and n >= 4
    edges = []
    for j in range(n - 1):
        edges.append((min(n - 1, j), max(n - 1, j), j + 1))
        for i in range(1, n // 2):
            a = (j + i) % (n - 1)
            b = (j - i) % (n - 1)
            edges.append((min(a, b), max(a, b), j + 1))
    return ColoredCompleteGraph.from_edge_colors(n, n - 1, edges)


def red_block_coloring() -> ColoredCompleteGraph:
    """Color 1 fills K_8 on the low block; residues of u+v color the rest.

    Colors 2..5 have no edges inside {0..7}, so every family on a side of
    the red pair is empty and the q = 3 reduction must take case 1.  The
    monochromatic K_8 also means the (1, 2, 3)-union is 8-chromatic, so
    this is not a chromatic-(8, 4)-coloring.
    """
    def color(u, v):
        return 1 if (u < 8 and v < 8) else 2 + ((u + v) % 4)
    return ColoredCompleteGraph.from_function(16, 5, color)


def _round_robin_color(u, v, base):
    for j in range(7):
        pairs = {frozenset((7, j))}
        for k in range(1, 4):
            pairs.add(frozenset(((j + k) % 7, (j - k) % 7)))
        if frozenset((u, v)) in pairs:
            return base + j
    raise AssertionError(f"pair ({u}, {v}) missed every round")


def matched_halves_coloring() -> ColoredCompleteGraph:
    """Crossing color 1 plus seven perfect matchings inside each half.

    Every 2-color union is a matching plus at most one complete bipartite
    graph, hence 3-colorable: a verified chromatic-(4, 3) input with a
    biclique-rich color for the q = 2 tower to latch onto.
    """
    def color(u, v):
        if (u < 8) != (v < 8):
            return 1
        if u < 8:
            return _round_robin_color(u, v, 2)
        return _round_robin_color(u - 8, v - 8, 9)
    return ColoredCompleteGraph.from_function(16, 15, color)


def petersen_graph() -> SimpleGraph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return SimpleGraph.from_edges(10, outer + spokes + inner)


def random_coloring(n: int, r: int, seed: int) -> ColoredCompleteGraph:
    import random

    rng = random.Random(f"fixture|{n}|{r}|{seed}")
    edges = [(u, v, rng.randint(1, r)) for v in range(n) for u in range(v)]
    return ColoredCompleteGraph.from_edge_colors(n, r, edges)


def random_graph(n: int, p_num: int, p_den: int, seed: int) -> SimpleGraph:
    import random

    rng = random.Random(f"gnp|{n}|{p_num}/{p_den}|{seed}")
    edges = [(u, v) for v in range(n) for u in range(v)
             if rng.random() * p_den < p_num]
    return SimpleGraph.from_edges(n, edges)
