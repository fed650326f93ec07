"""Epsilon-dense pairs, sparse colors, and robust subset selection.

A balanced pair (V1, V2) is eps-dense when every pair of subsets U1 of V1 and
U2 of V2 with |Ui| >= eps * |Vi| spans at least one edge. Equivalently: the
bipartite complement between V1 and V2 contains no balanced biclique on
ceil(eps * |V1|) vertices per side, which is what the exact decision searches
for. Everything takes exact rational thresholds and fixed seeds.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import (BadRange, EmptyGraph, EpsilonOutOfRange, NotBalanced,
                     NotDisjoint, NotNested, SubsetTooSmall, TooFewSets)
from .graphs import ColoredCompleteGraph, SimpleGraph, VertexSet, bits, mask_of

EPS0_DEFAULT = Fraction(1, 12)
EXACT_PAIR_CAP = 32    # exact denseness decision up to this part size
ENUM_CAP = 16          # complete windowed search guaranteed up to this host size
SAMPLE_PAIRS = 200     # sampled-mode draws
ENUM_BUDGET = 400_000  # candidate-pair budget for enumeration above ENUM_CAP
R_MIN_DEFAULT = 8      # minimum set count for intersect_select


def as_fraction(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def floor_frac(x: Fraction) -> int:
    return x.numerator // x.denominator


def _child_seed(seed: int, tag: str) -> str:
    return f"{seed}|{tag}"


@dataclass(frozen=True)
class DensePair:
    """A balanced pair together with the density parameter it satisfies."""

    v1: VertexSet
    v2: VertexSet
    epsilon: Fraction
    mode: str  # "exact" | "sampled"
    host_size: int

    def part_size(self) -> int:
        return len(self.v1)

    def volume(self) -> int:
        return len(self.v1) + len(self.v2)

    def union_mask(self) -> int:
        return self.v1.mask | self.v2.mask

    def verify(self, g: SimpleGraph) -> bool:
        chk = is_eps_dense(g, self.v1, self.v2, self.epsilon)
        return bool(chk.dense) and chk.mode == "exact"


@dataclass(frozen=True)
class DensenessCheck:
    dense: bool
    mode: str  # "exact" | "sampled"
    witness: tuple[list[int], list[int]] | None = None  # empty pair when not dense

    def __bool__(self) -> bool:
        return self.dense


def _as_members(vs) -> list[int]:
    if isinstance(vs, VertexSet):
        return vs.members()
    return sorted(vs)


def _zero_rectangle(g: SimpleGraph, side1: list[int], side2: list[int],
                    t: int) -> tuple[list[int], list[int]] | None:
    """First (lowest-index) t x t pair with no crossing edge, or None."""
    if len(side1) < t or len(side2) < t:
        return None
    m2 = mask_of(side2)
    nonadj = {u: m2 & ~g.adj[u] for u in side1}

    def rec(idx: int, chosen: list[int], common: int):
        if len(chosen) == t:
            picked = []
            for v in bits(common):
                picked.append(v)
                if len(picked) == t:
                    return chosen[:], picked
            return None
        if len(chosen) + (len(side1) - idx) < t:
            return None
        if common.bit_count() < t:
            return None
        for j in range(idx, len(side1)):
            u = side1[j]
            got = rec(j + 1, chosen + [u], common & nonadj[u])
            if got is not None:
                return got
        return None

    return rec(0, [], m2)


def is_eps_dense(g: SimpleGraph, v1, v2, eps, *, samples: int = SAMPLE_PAIRS,
                 seed: int = 0, exact_cap: int = EXACT_PAIR_CAP) -> DensenessCheck:
    """Exact (parts <= 32) or sampled decision of eps-denseness.

    Not dense comes with an empty-pair witness; in sampled mode a positive
    answer only means no empty pair was drawn.
    """
    a = _as_members(v1)
    b = _as_members(v2)
    if not a or not b:
        raise NotBalanced("parts must be nonempty")
    if len(a) != len(b):
        raise NotBalanced(f"parts differ in size: {len(a)} vs {len(b)}")
    if set(a) & set(b):
        raise NotDisjoint("parts share vertices")
    eps = as_fraction(eps)
    if not 0 < eps < 1:
        raise EpsilonOutOfRange("eps must lie in (0, 1)")
    t = max(1, ceil_frac(eps * len(a)))

    if len(a) <= exact_cap:
        found = _zero_rectangle(g, a, b, t)
        if found is None:
            return DensenessCheck(True, "exact")
        return DensenessCheck(False, "exact", found)

    rng = random.Random(_child_seed(seed, "eps_dense_sample"))
    for _ in range(samples):
        u1 = sorted(rng.sample(a, t))
        u2 = sorted(rng.sample(b, t))
        if g.cross_edges(mask_of(u1), mask_of(u2)) == 0:
            return DensenessCheck(False, "sampled", (u1, u2))
    return DensenessCheck(True, "sampled")


def _balanced_biclique(g: SimpleGraph, verts: list[int], s: int
                       ) -> tuple[list[int], list[int]] | None:
    """Disjoint A, B of size s with every cross edge present (exact)."""
    if len(verts) < 2 * s:
        return None
    universe = mask_of(verts)

    def rec(idx: int, chosen: list[int], chosen_mask: int, common: int):
        avail_b = common & ~chosen_mask
        if len(chosen) == s:
            picked = []
            for v in bits(avail_b):
                picked.append(v)
                if len(picked) == s:
                    return chosen[:], picked
            return None
        if len(chosen) + (len(verts) - idx) < s:
            return None
        if avail_b.bit_count() < s:
            return None
        for j in range(idx, len(verts)):
            u = verts[j]
            got = rec(j + 1, chosen + [u], chosen_mask | (1 << u), common & g.adj[u])
            if got is not None:
                return got
        return None

    return rec(0, [], 0, universe)


@dataclass(frozen=True)
class SizedPairSearch:
    """Result of a windowed dense-pair search.

    exhaustive is True when no heuristic contributed: a returned pair was
    found by complete search, or nonexistence was decided by complete search
    at every part size in the window.
    """

    pair: DensePair | None
    exhaustive: bool
    vacuous_window: bool = False
    sizes_exact: tuple[int, ...] = ()
    sizes_heuristic: tuple[int, ...] = ()


def _first_edge(g: SimpleGraph, verts: list[int]) -> tuple[int, int] | None:
    universe = mask_of(verts)
    for u in verts:
        row = g.adj[u] & universe
        for v in bits(row):
            if v > u:
                return (u, v)
    return None


def _enumerate_pairs(g: SimpleGraph, verts: list[int], s: int, t: int, *,
                     force: bool) -> tuple[bool, tuple[list[int], list[int]] | None]:
    """Complete enumeration for part size s, threshold 1 < t < s.

    Returns (decided_exactly, pair_or_None). A dense pair needs at least
    s - t + 1 vertices of positive degree per side (t isolated vertices in a
    part would give an instant empty rectangle), which kills sparse classes
    immediately and keeps candidate counts honest against the budget.
    """
    universe = mask_of(verts)
    pos = [v for v in verts if g.adj[v] & universe]
    zero = [v for v in verts if not (g.adj[v] & universe)]
    need = s - (t - 1)
    if len(pos) < need:
        return True, None

    lo_core = max(need, s - len(zero))
    count = 0
    for a_core in range(lo_core, min(s, len(pos)) + 1):
        count += math.comb(len(pos), a_core) * math.comb(len(zero), s - a_core)
    if not force and count * count > ENUM_BUDGET:
        return False, None

    cands = []
    for a_core in range(lo_core, min(s, len(pos)) + 1):
        for core in combinations(pos, a_core):
            for fill in combinations(zero, s - a_core):
                cands.append(sorted(core + fill))
    for a in cands:
        a_set = set(a)
        a_mask = mask_of(a)
        for b in cands:
            if a[0] > b[0] or (a_set & set(b)):
                continue  # each unordered disjoint pair once
            if g.cross_edges(a_mask, mask_of(b)) == 0:
                continue
            if _zero_rectangle(g, a, b, t) is None:
                return True, (a, b)
    return True, None


def find_dense_pair_sized(g: SimpleGraph, eps, lo: int, hi: int, *,
                          within: int | None = None, seed: int = 0,
                          restarts: int = 4) -> SizedPairSearch:
    """Search for an eps-dense balanced pair with part sizes in [lo, hi].

    Every part size whose threshold degenerates is decided by complete search
    at any host size: threshold 1 reduces to balanced-biclique search and
    threshold s to an any-edge check. Intermediate thresholds enumerate
    completely when the host has at most 16 vertices (always) or when the
    candidate count fits a budget; otherwise a clamped density-increment
    descent plus seeded sampling hunts for a pair and the nonexistence claim
    is flagged non-exhaustive.
    """
    eps = as_fraction(eps)
    if not 0 < eps < 1:
        raise EpsilonOutOfRange("eps must lie in (0, 1)")
    universe = within if within is not None else (1 << g.n) - 1
    verts = list(bits(universe))
    n = len(verts)
    if lo < 1 or hi > n // 2:
        raise BadRange(f"window [{lo}, {hi}] invalid for {n} vertices")
    if lo > hi:
        return SizedPairSearch(None, True, vacuous_window=True)

    sizes_exact: list[int] = []
    sizes_heur: list[int] = []
    host = g.restricted(universe)
    force = n <= ENUM_CAP

    def exact_for_size(s: int):
        t = max(1, ceil_frac(eps * s))
        if t >= s:
            edge = _first_edge(host, verts)
            if edge is None:
                return True, None
            u, v = edge
            rest = [w for w in verts if w not in (u, v)]
            if len(rest) < 2 * (s - 1):
                return True, None
            a = sorted([u] + rest[:s - 1])
            b = sorted([v] + rest[s - 1:2 * (s - 1)])
            return True, (a, b)
        if t == 1:
            return True, _balanced_biclique(host, verts, s)
        return _enumerate_pairs(host, verts, s, t, force=force)

    pending: list[int] = []
    for s in range(lo, hi + 1):
        decided, pair = exact_for_size(s)
        if decided:
            sizes_exact.append(s)
            if pair is not None:
                dp = DensePair(VertexSet(g.n, mask_of(pair[0])),
                               VertexSet(g.n, mask_of(pair[1])),
                               eps, "exact", n)
                return SizedPairSearch(dp, True, sizes_exact=tuple(sizes_exact),
                                       sizes_heuristic=tuple(sizes_heur))
        else:
            pending.append(s)

    if not pending:
        return SizedPairSearch(None, True, sizes_exact=tuple(sizes_exact))

    # heuristic hunt over undecided sizes: clamped descent, then seeded
    # random balanced pairs; any find is still verified exactly
    sizes_heur = pending
    got = _descent_hunt(host, verts, eps, lo, hi, seed, restarts)
    if got is None:
        rng = random.Random(_child_seed(seed, "sized_sample"))
        for s in pending:
            for _ in range(restarts * 40):
                a = sorted(rng.sample(verts, s))
                rest = [v for v in verts if v not in a]
                b = sorted(rng.sample(rest, s))
                chk = is_eps_dense(host, a, b, eps)
                if chk.dense and chk.mode == "exact":
                    got = (a, b)
                    break
            if got is not None:
                break
    if got is not None:
        dp = DensePair(VertexSet(g.n, mask_of(got[0])), VertexSet(g.n, mask_of(got[1])),
                       eps, "exact", n)
        return SizedPairSearch(dp, False, sizes_exact=tuple(sizes_exact),
                               sizes_heuristic=tuple(sizes_heur))
    return SizedPairSearch(None, False, sizes_exact=tuple(sizes_exact),
                           sizes_heuristic=tuple(sizes_heur))


def _cross(g: SimpleGraph, a_mask: int, b_mask: int) -> int:
    return g.cross_edges(a_mask, b_mask)


def _best_bipartition(g: SimpleGraph, verts: list[int], seed: int,
                      starts: int) -> tuple[list[int], list[int]]:
    """Max-crossing balanced bipartition: best of `starts` seeded shuffles,
    each improved by single-swap hill climbing (swaps keep parts balanced)."""
    rng = random.Random(_child_seed(seed, "bipartition"))
    h = len(verts) // 2
    best = None
    best_e = -1
    for _ in range(starts):
        perm = verts[:]
        rng.shuffle(perm)
        am = mask_of(perm[:h])
        bm = mask_of(perm[h:2 * h])
        improved = True
        while improved:
            improved = False
            for u in list(bits(am)):
                for v in list(bits(bm)):
                    du = (g.adj[u] & am).bit_count() - (g.adj[u] & bm).bit_count()
                    dv = (g.adj[v] & bm).bit_count() - (g.adj[v] & am).bit_count()
                    delta = du + dv + 2 * ((g.adj[u] >> v) & 1)
                    if delta > 0:
                        am = (am & ~(1 << u)) | (1 << v)
                        bm = (bm & ~(1 << v)) | (1 << u)
                        improved = True
                        break
                if improved:
                    break
        e = _cross(g, am, bm)
        if e > best_e:
            best_e = e
            best = (sorted(bits(am)), sorted(bits(bm)))
    assert best is not None
    return best


def _trim_balance(g: SimpleGraph, a: list[int], b: list[int]) -> tuple[list[int], list[int]]:
    """Equalize part sizes by dropping lowest-cross-degree vertices from the
    larger side (ties drop the higher vertex id)."""
    if len(a) == len(b):
        return a, b
    big, small = (a, b) if len(a) > len(b) else (b, a)
    small_mask = mask_of(small)
    keep = sorted(big, key=lambda v: (-(g.adj[v] & small_mask).bit_count(), v))
    big = sorted(keep[:len(small)])
    return (big, small) if len(a) > len(b) else (small, big)


def _descend(g: SimpleGraph, w1: list[int], w2: list[int], eps: Fraction,
             half: int, seed: int) -> tuple[list[int], list[int]] | None:
    """Density-increment descent: follow empty-pair witnesses into the
    sub-pair with the best rho^(-eps/log(1/eps))-scaled density.

    Maximizing that score preserves the invariant density >= d * rho^scale,
    so when the loop exits on a dense pair of part fraction rho we get
    1 >= d * rho^scale, i.e. part size >= half * d^(log(1/eps)/eps)."""
    eps_f = float(eps)
    scale = eps_f / math.log(1 / eps_f)
    while w1 and w2:
        chk = is_eps_dense(g, w1, w2, eps, seed=seed)
        if chk.dense:
            return (w1, w2) if chk.mode == "exact" else None
        u1, u2 = chk.witness
        u1c = sorted(set(w1) - set(u1))
        u2c = sorted(set(w2) - set(u2))
        cands = []
        for pa, pb in ((u1, u2c), (u1c, u2), (u1c, u2c)):
            if not pa or not pb:
                continue
            pa2, pb2 = _trim_balance(g, pa, pb)
            e = _cross(g, mask_of(pa2), mask_of(pb2))
            if e == 0:
                continue
            rho = len(pa2) / half
            score = (e / (len(pa2) * len(pb2))) * rho ** (-scale)
            cands.append((score, pa2, pb2))
        if not cands:
            return None
        cands.sort(key=lambda x: -x[0])
        w1, w2 = cands[0][1], cands[0][2]
    return None


def _descent_hunt(host: SimpleGraph, verts: list[int], eps: Fraction,
                  lo: int, hi: int, seed: int, restarts: int
                  ) -> tuple[list[int], list[int]] | None:
    """Descent clamped to a size window: oversized finds are trimmed to hi
    (highest cross-degree kept) and re-verified."""
    half = max(1, len(verts) // 2)
    for attempt in range(restarts):
        a, b = _best_bipartition(host, verts, seed + 1000 * attempt, starts=8)
        got = _descend(host, a, b, eps, half, seed)
        if got is None:
            continue
        a, b = got
        if len(a) > hi:
            am, bm = mask_of(a), mask_of(b)
            a = sorted(sorted(a, key=lambda v: (-(host.adj[v] & bm).bit_count(), v))[:hi])
            b = sorted(sorted(b, key=lambda v: (-(host.adj[v] & am).bit_count(), v))[:hi])
            chk = is_eps_dense(host, a, b, eps)
            if not (chk.dense and chk.mode == "exact"):
                continue
        if lo <= len(a) <= hi:
            return a, b
    return None


def find_dense_pair(g: SimpleGraph, eps, *, eps0=EPS0_DEFAULT, seed: int = 0,
                    starts: int = 32, restarts: int = 4,
                    within: int | None = None) -> DensePair:
    """Extract a large eps-dense balanced pair by density-increment descent.

    Start from a max-crossing bipartition (the crossing density is at least
    the host's edge density d, asserted and retried on failure); while the
    current pair is not eps-dense, split along the empty-pair witness and
    recurse into the sub-pair with best rho-scaled density, rho being the
    part fraction of the original half. The scaling is calibrated so the
    guarantee part size >= n * d^(log(1/eps)/eps) survives the descent; a
    windowed search backstops it when the descent lands short.
    """
    eps = as_fraction(eps)
    eps0 = as_fraction(eps0)
    if not 0 < eps < min(eps0, 1):
        raise EpsilonOutOfRange(f"eps must lie in (0, {float(min(eps0, 1)):.4f})")
    universe = within if within is not None else (1 << g.n) - 1
    verts = list(bits(universe))
    n = len(verts)
    if n < 2:
        raise EmptyGraph("need at least two vertices")
    host = g.restricted(universe)
    edge_count = host.edge_count(universe)
    if edge_count == 0:
        raise EmptyGraph("no edges in the host set")
    d = Fraction(2 * edge_count, n * (n - 1))

    eps_f = float(eps)
    exponent = math.log(1 / eps_f) / eps_f
    half = n // 2
    # parts of a balanced pair cannot exceed n/2, so the guarantee caps there
    bound = max(1, min(math.ceil(n * float(d) ** exponent - 1e-12), half))

    best: DensePair | None = None

    def consider(a: list[int], b: list[int]):
        nonlocal best
        dp = DensePair(VertexSet(g.n, mask_of(a)), VertexSet(g.n, mask_of(b)),
                       eps, "exact", n)
        if best is None or dp.part_size() > best.part_size():
            best = dp

    for attempt in range(restarts):
        a, b = _best_bipartition(host, verts, seed + 1000 * attempt, starts)
        if Fraction(_cross(host, mask_of(a), mask_of(b))) < d * len(a) * len(b):
            continue  # crossing density below d: retry another seed stream
        got = _descend(host, a, b, eps, half, seed)
        if got is not None:
            consider(*got)
        if best is not None and best.part_size() >= bound:
            return best

    # descent landed short of the guarantee: hunt a qualifying pair directly
    if bound <= half:
        sized = find_dense_pair_sized(g, eps, bound, half, within=universe, seed=seed)
        if sized.pair is not None:
            return sized.pair
    if best is not None:
        return best

    # any single edge is an exact eps-dense 1x1 pair
    u, v = _first_edge(host, verts)  # edge_count > 0 so this exists
    return DensePair(VertexSet(g.n, 1 << u), VertexSet(g.n, 1 << v), eps, "exact", n)


@dataclass(frozen=True)
class SparsityWitness:
    """Verdict of a windowed sparsity check for one color class.

    upper is the relative size cap of the window: eps for the interval
    variant, 1 for the lower-only variant (capped by balancedness at n/2).
    """

    color: int
    x: Fraction
    upper: Fraction
    eps: Fraction
    variant: str  # "interval" | "lower_only"
    sparse: bool
    mode: str     # "exact" | "sampled"
    window: tuple[int, int]
    counterexample: DensePair | None = None
    vacuous: bool = False

    @property
    def verdict(self) -> str:
        return "sparse" if self.sparse else "not_sparse"

    def __bool__(self) -> bool:
        return self.sparse


def is_sparse_color(c: ColoredCompleteGraph, color: int, x, eps,
                    variant: str = "interval", *, within: int | None = None,
                    seed: int = 0) -> SparsityWitness:
    """Is the color class free of eps-dense pairs in the size window?

    lower_only: parts of size at least x*n. interval: parts between x*n and
    eps*n. x = 0 degenerates to "no edges at all" (any edge is a dense 1x1
    pair at every eps).
    """
    if variant not in ("interval", "lower_only"):
        raise ValueError(f"unknown variant {variant!r}")
    x = as_fraction(x)
    eps = as_fraction(eps)
    if x < 0 or x > 1:
        raise EpsilonOutOfRange("x must lie in [0, 1]")
    universe = within if within is not None else (1 << c.n) - 1
    n = universe.bit_count()
    g = c.class_graph(color)
    upper = eps if variant == "interval" else Fraction(1)

    if x == 0:
        has_edge = g.edge_count(universe) > 0
        return SparsityWitness(color, x, upper, eps, variant, not has_edge,
                               "exact", (1, max(1, n // 2)),
                               counterexample=_edge_pair(c.n, g, universe, eps)
                               if has_edge else None)

    lo = max(1, ceil_frac(x * n))
    hi = floor_frac(eps * n) if variant == "interval" else n // 2
    hi = min(hi, n // 2)
    if lo > hi:
        return SparsityWitness(color, x, upper, eps, variant, True, "exact",
                               (lo, hi), vacuous=True)
    res = find_dense_pair_sized(g, eps, lo, hi, within=universe, seed=seed)
    if res.pair is not None:
        return SparsityWitness(color, x, upper, eps, variant, False, "exact",
                               (lo, hi), counterexample=res.pair)
    mode = "exact" if res.exhaustive else "sampled"
    return SparsityWitness(color, x, upper, eps, variant, True, mode, (lo, hi))


def _edge_pair(n: int, g: SimpleGraph, universe: int, eps: Fraction) -> DensePair | None:
    got = _first_edge(g, list(bits(universe)))
    if got is None:
        return None
    u, v = got
    return DensePair(VertexSet(n, 1 << u), VertexSet(n, 1 << v), eps, "exact",
                     universe.bit_count())


@dataclass(frozen=True)
class IntersectSelection:
    """ceil(r/4) subset indices whose intersection stays large."""

    indices: tuple[int, ...]
    intersection: VertexSet
    path: str            # "greedy" | "exhaustive"
    bound: Fraction      # (1-2eps)^k * |universe|
    met: bool

    def __len__(self) -> int:
        return len(self.intersection)


def intersect_select(universe: VertexSet, subsets: list[VertexSet], eps, *,
                     min_sets: int = R_MIN_DEFAULT) -> IntersectSelection:
    """Pick k = ceil(r/4) of r large subsets with intersection at least
    (1-2eps)^k * |universe|.

    Greedy (always add the subset maximizing the running intersection) runs
    first; the exhaustive fallback over all k-subsets restores the averaging
    guarantee when greedy falls short.
    """
    eps = as_fraction(eps)
    r = len(subsets)
    if r < min_sets:
        raise TooFewSets(f"need at least {min_sets} subsets, got {r}")
    if not 0 <= eps <= Fraction(1, 2):
        raise EpsilonOutOfRange("eps must lie in [0, 1/2]")
    nu = len(universe)
    if nu == 0:
        raise SubsetTooSmall("empty universe")
    floor_size = (1 - eps) * nu
    for i, s in enumerate(subsets):
        if not s.issubset(universe):
            raise NotNested(f"subset {i} escapes the universe")
        if Fraction(len(s)) < floor_size:
            raise SubsetTooSmall(
                f"subset {i} has {len(s)} < (1-eps)|U| = {float(floor_size):.3f}")

    k = -(-r // 4)
    bound = (1 - 2 * eps) ** k * nu

    chosen: list[int] = []
    inter = universe.mask
    for _ in range(k):
        bi, bsize, bmask = -1, -1, 0
        for i, s in enumerate(subsets):
            if i in chosen:
                continue
            m = inter & s.mask
            sz = m.bit_count()
            if sz > bsize:
                bi, bsize, bmask = i, sz, m
        chosen.append(bi)
        inter = bmask
    if Fraction(inter.bit_count()) >= bound:
        return IntersectSelection(tuple(sorted(chosen)),
                                  VertexSet(universe.universe, inter),
                                  "greedy", bound, True)

    best_mask, best_idx = inter, tuple(sorted(chosen))
    for combo in combinations(range(r), k):
        m = universe.mask
        for i in combo:
            m &= subsets[i].mask
        if m.bit_count() > best_mask.bit_count():
            best_mask, best_idx = m, combo
    met = Fraction(best_mask.bit_count()) >= bound
    return IntersectSelection(tuple(best_idx), VertexSet(universe.universe, best_mask),
                              "exhaustive", bound, met)
