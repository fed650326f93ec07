"""Exact computation of small generalized Ramsey numbers.

F(r, p, q) is the least n such that every r-coloring of E(K_n) has p vertices
spanning at most q-1 colors; the chromatic variant asks instead for a union of
q-1 color classes with chromatic number at least p. Both searches enumerate
colorings of K_n in a fixed edge order with canonical-form rejection (vertex
relabeling and color renaming) and prune with the defining predicate as soon
as a prefix can no longer extend to a counterexample.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import combinations, permutations

from .chromatic import greedy_clique, is_chromatic_pq_coloring
from .constructions import check_recurrence
from .errors import BudgetExceeded
from .graphs import ColoredCompleteGraph, SimpleGraph

EDGE_ORDERS = ("vertex_major", "vertex_major_reversed")
NODE_BUDGET_DEFAULT = 100_000_000
TIME_BUDGET_DEFAULT = 600.0
CANON_VERTEX_CAP = 7  # full-orbit prefix canonicalization up to this many vertices


@dataclass(frozen=True)
class SearchResult:
    """Outcome of an iterative-deepening Ramsey search.

    Exactly one of value / unknown_above is set. The extremal witness, when
    present, is a counterexample coloring on value - 1 (or n_max) vertices.
    """

    kind: str  # "F" | "F_chi"
    parameters: tuple[int, int, int]
    value: int | None
    unknown_above: int | None
    extremal_witness: ColoredCompleteGraph | None
    nodes_expanded: int
    wall_time: float

    @property
    def is_exact(self) -> bool:
        return self.value is not None


def _edge_list(n: int, order: str) -> list[tuple[int, int]]:
    if order == "vertex_major":
        return [(u, v) for v in range(1, n) for u in range(v)]
    if order == "vertex_major_reversed":
        return [(u, v) for v in range(1, n) for u in reversed(range(v))]
    raise ValueError(f"unknown edge order {order!r}")


class _Searcher:
    """Backtracking enumerator for one board size n.

    Kept colorings are exactly those whose every completed-vertex prefix is
    lexicographically minimal under simultaneous vertex permutation and
    first-appearance color renaming; since the edge order lists all of K_m
    before any edge leaving it, prefixes of a minimal coloring are minimal
    and rejection loses no isomorphism class.
    """

    def __init__(self, kind: str, r: int, p: int, q: int, n: int, order: str,
                 budget: dict):
        self.kind = kind
        self.r = r
        self.p = p
        self.q = q
        self.n = n
        self.edges = _edge_list(n, order)
        self.pos = {e: i for i, e in enumerate(self.edges)}
        # completing vertex v means all edges into v are assigned
        self.completes = [None] * len(self.edges)
        for v in range(1, n):
            self.completes[v * (v + 1) // 2 - 1] = v
        self.budget = budget
        self.col: list[int] = [0] * len(self.edges)

    def run(self) -> list[int] | None:
        if self.n < 2:
            return []
        return self._dfs(0, 0)

    def _dfs(self, i: int, max_used: int) -> list[int] | None:
        if i == len(self.edges):
            return self.col[:] if self._full_ok() else None
        for color in range(1, min(self.r, max_used + 1) + 1):
            self.budget["nodes"] += 1
            if self.budget["nodes"] > self.budget["node_cap"] or \
                    time.perf_counter() > self.budget["deadline"]:
                raise BudgetExceeded(
                    "node or time budget exhausted",
                    frontier={
                        "n": self.n,
                        "assigned": [(self.edges[j], self.col[j])
                                     for j in range(i)],
                    })
            self.col[i] = color
            v = self.completes[i]
            if v is None or self._completed_ok(v):
                got = self._dfs(i + 1, max(max_used, color))
                if got is not None:
                    return got
        self.col[i] = 0
        return None

    def _completed_ok(self, v: int) -> bool:
        if not self._predicate_ok(v):
            return False
        m = v + 1
        if m <= CANON_VERTEX_CAP and not self._is_canonical(m):
            return False
        return True

    def _predicate_ok(self, v: int) -> bool:
        if self.kind == "F":
            # p-subsets become complete exactly when their top vertex does
            if v < self.p - 1:
                return True
            for rest in combinations(range(v), self.p - 1):
                sub = rest + (v,)
                seen = {self.col[self.pos[(a, b)]]
                        for a, b in combinations(sub, 2)}
                if len(seen) <= self.q - 1:
                    return False
            return True
        # chromatic variant: a greedy clique of size p inside some union of
        # q-1 classes survives every extension, so it prunes immediately
        m = v + 1
        block = v * (v + 1) // 2
        used = sorted(set(self.col[:block]))
        if len(used) <= self.q - 1:
            unions = [tuple(used)]
        else:
            unions = list(combinations(used, self.q - 1))
        for colors in unions:
            adj = [0] * m
            want = set(colors)
            for (a, b) in combinations(range(m), 2):
                if self.col[self.pos[(a, b)]] in want:
                    adj[a] |= 1 << b
                    adj[b] |= 1 << a
            g = SimpleGraph(m, adj)
            if len(greedy_clique(g)) >= self.p:
                return False
        return True

    def _full_ok(self) -> bool:
        if self.kind == "F":
            return True  # every p-subset was checked at its completion
        cg = self._as_coloring(self.col)
        return bool(is_chromatic_pq_coloring(cg, self.p, self.q))

    def _as_coloring(self, col: list[int]) -> ColoredCompleteGraph:
        triples = [(u, v, col[self.pos[(u, v)]]) for (u, v) in self.edges]
        return ColoredCompleteGraph.from_edge_colors(self.n, self.r, triples)

    def _is_canonical(self, m: int) -> bool:
        block = m * (m - 1) // 2
        original = self.col[:block]
        prefix_edges = self.edges[:block]
        for perm in permutations(range(m)):
            if perm == tuple(range(m)):
                continue
            rename: dict[int, int] = {}
            nxt = 1
            verdict = 0  # -1 smaller, 1 larger, 0 equal so far
            for idx, (a, b) in enumerate(prefix_edges):
                ia, ib = perm[a], perm[b]
                if ia > ib:
                    ia, ib = ib, ia
                c = self.col[self.pos[(ia, ib)]]
                cc = rename.get(c)
                if cc is None:
                    nxt += 1
                    cc = nxt - 1
                    rename[c] = cc
                if cc != original[idx]:
                    verdict = -1 if cc < original[idx] else 1
                    break
            if verdict == -1:
                return False
        return True


def _validate(kind: str, r: int, p: int, q: int) -> None:
    if r < 1:
        raise ValueError("need at least one color")
    min_p = 3 if kind == "F_chi" else 2
    if p < min_p:
        raise ValueError(f"p must be at least {min_p} for {kind}")
    # q = 2 is always meaningful (the classical Ramsey case), even when
    # C(p,2) < 2 as for p = 2
    if not 2 <= q <= max(2, p * (p - 1) // 2):
        raise ValueError("q must lie in [2, C(p,2)]")


def _deepen(kind: str, r: int, p: int, q: int, n_max: int, edge_order: str,
            node_budget: int, time_budget: float) -> SearchResult:
    _validate(kind, r, p, q)
    t0 = time.perf_counter()
    budget = {"nodes": 0, "node_cap": node_budget,
              "deadline": t0 + time_budget}
    witness_cols: list[int] | None = None
    witness_n = 1
    for n in range(2, n_max + 1):
        searcher = _Searcher(kind, r, p, q, n, edge_order, budget)
        got = searcher.run()
        if got is None:
            witness = None
            if witness_cols is not None and witness_n >= 2:
                prev = _Searcher(kind, r, p, q, witness_n, edge_order, budget)
                witness = prev._as_coloring(witness_cols)
            return SearchResult(kind, (r, p, q), n, None, witness,
                                budget["nodes"], time.perf_counter() - t0)
        witness_cols, witness_n = got, n
    witness = None
    if witness_cols is not None and witness_n >= 2:
        prev = _Searcher(kind, r, p, q, witness_n, edge_order, budget)
        witness = prev._as_coloring(witness_cols)
    return SearchResult(kind, (r, p, q), None, n_max, witness,
                        budget["nodes"], time.perf_counter() - t0)


def compute_F_chi(r: int, p: int, q: int, n_max: int, *,
                  edge_order: str = "vertex_major",
                  node_budget: int = NODE_BUDGET_DEFAULT,
                  time_budget: float = TIME_BUDGET_DEFAULT) -> SearchResult:
    """Least n such that every r-coloring of K_n has a union of q-1 color
    classes with chromatic number at least p, or unknown_above(n_max)."""
    return _deepen("F_chi", r, p, q, n_max, edge_order, node_budget, time_budget)


def compute_F(r: int, p: int, q: int, n_max: int, *,
              edge_order: str = "vertex_major",
              node_budget: int = NODE_BUDGET_DEFAULT,
              time_budget: float = TIME_BUDGET_DEFAULT) -> SearchResult:
    """Least n such that every r-coloring of K_n has p vertices spanning at
    most q-1 colors, or unknown_above(n_max)."""
    return _deepen("F", r, p, q, n_max, edge_order, node_budget, time_budget)


@dataclass(frozen=True)
class TabulationReport:
    results: tuple[SearchResult, ...]
    claims: tuple[str, ...]
    failures: tuple[str, ...]


def tabulate(entries: list[tuple[str, int, int, int, int]], *,
             edge_order: str = "vertex_major",
             node_budget: int = NODE_BUDGET_DEFAULT,
             time_budget: float = TIME_BUDGET_DEFAULT) -> TabulationReport:
    """Run a batch of searches and cross-validate the results.

    Checks the recurrence F(r,p,q) <= r * F(r,p-1,q-1), the definitional
    F_chi <= F on matching parameters, and monotonicity (non-increasing in q,
    non-decreasing in p). Any violation is a search bug, reported and raised.
    """
    results: list[SearchResult] = []
    for (kind, r, p, q, n_max) in entries:
        fn = compute_F if kind == "F" else compute_F_chi
        results.append(fn(r, p, q, n_max, edge_order=edge_order,
                          node_budget=node_budget, time_budget=time_budget))

    claims: list[str] = []
    failures: list[str] = []
    f_exact = {res.parameters: res.value for res in results
               if res.kind == "F" and res.is_exact}
    chi_exact = {res.parameters: res.value for res in results
                 if res.kind == "F_chi" and res.is_exact}

    if f_exact:
        rep = check_recurrence(f_exact)
        claims.extend(f"{e['claim']} (value {e['value']})" for e in rep.entries)
        failures.extend(str(e) for e in rep.failures)

    for params, chi_v in sorted(chi_exact.items()):
        f_v = f_exact.get(params)
        if f_v is not None:
            if chi_v <= f_v:
                claims.append(f"F_chi{params} = {chi_v} <= F{params} = {f_v}")
            else:
                failures.append(f"F_chi{params} = {chi_v} > F{params} = {f_v}")

    for table in (f_exact, chi_exact):
        for (r, p, q), v in sorted(table.items()):
            hi_q = table.get((r, p, q + 1))
            if hi_q is not None:
                if hi_q <= v:
                    claims.append(f"monotone in q at (r={r}, p={p}): "
                                  f"{hi_q} <= {v}")
                else:
                    failures.append(f"value increased in q at (r={r}, p={p}, "
                                    f"q={q} -> {q + 1}): {v} -> {hi_q}")
            hi_p = table.get((r, p + 1, q))
            if hi_p is not None:
                if hi_p >= v:
                    claims.append(f"monotone in p at (r={r}, q={q}): "
                                  f"{hi_p} >= {v}")
                else:
                    failures.append(f"value decreased in p at (r={r}, q={q}, "
                                    f"p={p} -> {p + 1}): {v} -> {hi_p}")

    report = TabulationReport(tuple(results), tuple(claims), tuple(failures))
    if failures:
        raise RuntimeError("tabulation cross-checks failed: "
                           + "; ".join(failures))
    return report
