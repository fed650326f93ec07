"""Independent re-verification of reduction traces.

The replay checker re-derives every verdict recorded in a trace from the
coloring and the certificates alone, through code paths disjoint from the
step implementations: densities are re-checked by direct subset
enumeration against the definition, zero-edge and size claims by direct
counting, profile bookkeeping by re-running the arithmetic, and coloring
claims through the exact chromatic kernel.  Checks whose exact
re-verification would exceed the desk budget are skipped and counted,
never failed.  The first disagreement stops the scan and is reported by
name.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Any, Mapping

from ..chromatic import chromatic_number, proper_coloring
from ..constructions import product_upper_bound
from ..dense_pairs import ceil_frac, floor_frac
from ..graphs import ColoredCompleteGraph, SimpleGraph, VertexSet
from ..serialize import (canonical_dumps, parse_frac, sha256_hex,
                         vset_from_payload)
from .certificates import ReductionCertificate
from .engine import ReductionTrace
from .params import EngineParams
from .profiles import RestrictionProfile

EXACT_REGION_CAP = 32
PAIR_BUDGET = 200_000

# fraction each surviving-set claim must declare, in terms of the params
_SIZE_FRACTIONS = {
    "red_pair_part": lambda p: p.alpha_vec[0],
    "case1_surviving": lambda p: p.beta * p.alpha_vec[0],
    "case2_surviving": lambda p: p.beta * p.alpha_vec[0] * p.alpha_vec[1],
    "balanced_surviving": lambda p: p.gamma_vec[p.q - 2],
}


def input_digest(c: ColoredCompleteGraph, params: EngineParams) -> str:
    """Content hash binding a certificate file to its exact inputs."""
    edges = [[u, v, c.color_of(u, v)]
             for v in range(c.n) for u in range(v)]
    body = {"n": c.n, "r": c.r, "edges": edges, "params": params.payload()}
    return sha256_hex(canonical_dumps(body))


@dataclass(frozen=True)
class ReplayIssue:
    """First point where a replayed verdict disagreed with the record."""

    cert_index: int
    check_index: int
    claim: str
    reason: str

    def payload(self) -> dict[str, Any]:
        return {"cert_index": self.cert_index,
                "check_index": self.check_index,
                "claim": self.claim, "reason": self.reason}


@dataclass(frozen=True)
class ReplayReport:
    """Outcome of replaying one trace against one coloring."""

    ok: bool
    certificates: int
    replayed: int
    skipped: int
    divergence: ReplayIssue | None

    def payload(self) -> dict[str, Any]:
        return {"ok": self.ok, "certificates": self.certificates,
                "replayed": self.replayed, "skipped": self.skipped,
                "divergence": (None if self.divergence is None
                               else self.divergence.payload())}


# ---------------------------------------------------------------------------
# density re-checks straight from the definition
# ---------------------------------------------------------------------------

def _dense_by_subsets(g: SimpleGraph, v1: VertexSet, v2: VertexSet,
                      eps: Fraction, budget: list[int]) -> bool | None:
    """Is (v1, v2) eps-dense?  Checked against the definition directly.

    A violating pair of subsets exists iff some qualifying subset of one
    side has enough non-neighbors on the other, so enumerating the side
    with fewer qualifying subsets decides the question.  None means the
    enumeration budget ran out.
    """
    if len(v1) == 0 or len(v2) == 0:
        return False
    t1 = max(1, ceil_frac(eps * Fraction(len(v1))))
    t2 = max(1, ceil_frac(eps * Fraction(len(v2))))
    if comb(len(v2), t2) < comb(len(v1), t1):
        v1, v2, t1, t2 = v2, v1, t2, t1
    for group in combinations(v1.members(), t1):
        budget[0] -= 1
        if budget[0] < 0:
            return None
        seen = 0
        for u in group:
            seen |= g.adj[u]
        if (v2.mask & ~seen).bit_count() >= t2:
            return False
    return True


def _any_dense_pair(g: SimpleGraph, region: VertexSet, eps: Fraction,
                    lo: int, hi: int, budget: list[int]) -> bool | None:
    """Does any balanced eps-dense pair with part sizes in [lo, hi] exist?"""
    verts = region.members()
    hi = min(hi, len(verts) // 2)
    for s in range(max(lo, 1), hi + 1):
        for a in combinations(verts, s):
            amask = 0
            for x in a:
                amask |= 1 << x
            aset = VertexSet(region.universe, amask)
            rest = [v for v in verts if not (amask >> v) & 1]
            for b in combinations(rest, s):
                budget[0] -= 1
                if budget[0] < 0:
                    return None
                bmask = 0
                for x in b:
                    bmask |= 1 << x
                got = _dense_by_subsets(
                    g, aset, VertexSet(region.universe, bmask), eps, budget)
                if got is None:
                    return None
                if got:
                    return True
    return False


# ---------------------------------------------------------------------------
# per-claim replays
# ---------------------------------------------------------------------------

class _Ctx:
    """Working state for one certificate: the region, params, budgets."""

    def __init__(self, c, params, cert, region, q, exact_cap, budget):
        self.c = c
        self.params = params
        self.cert = cert
        self.region = region
        self.q = q
        self.exact_cap = exact_cap
        self.budget = budget
        self.fired_floors: set[str] = set()

    def outer_of(self, label: str) -> VertexSet | None:
        for check in self.cert.guarantee_checks:
            if (check.claim == "subset_of"
                    and check.detail.get("label") == label):
                return vset_from_payload(check.detail["outer"])
        return None

    def recorded_gamma(self) -> int | None:
        for check in self.cert.guarantee_checks:
            if check.claim == "halt_threshold" and "gamma" in check.detail:
                return int(check.detail["gamma"])
        return None

    def base_window(self) -> VertexSet:
        eff = self.cert.input_profile.eps_eff
        wsize = ceil_frac(eff * len(self.region))
        mask = 0
        for v in self.region.members()[:wsize]:
            mask |= 1 << v
        return VertexSet(self.region.universe, mask)


def _replay_size_at_least(detail, passed, ctx):
    frac = parse_frac(detail["fraction"])
    scale = int(detail["scale"])
    label = str(detail["label"])
    achieved = int(detail["achieved"])
    value = frac * scale
    fired = value <= 1
    bound = 1 if fired else ceil_frac(value)
    if fired:
        ctx.fired_floors.add(label)
    if bound != int(detail["bound"]):
        return "fail", f"recomputed bound {bound} != recorded {detail['bound']}"
    if scale != len(ctx.region):
        return "fail", f"scale {scale} != region size {len(ctx.region)}"
    if label in _SIZE_FRACTIONS and frac != _SIZE_FRACTIONS[label](ctx.params):
        return "fail", f"declared fraction {detail['fraction']} is not the " \
                       f"schedule value for {label}"
    if label == "unbalanced_surviving":
        ls = ctx.cert.level_structure
        if ls is None or frac != ctx.params.gamma_vec[ls.depth - 1]:
            return "fail", "declared fraction is not the depth's gamma"
    if label.endswith("_surviving"):
        surv = ctx.cert.surviving_set
        if surv is None or achieved != len(surv):
            return "fail", "achieved does not match the surviving set"
    elif label == "red_pair_part":
        ls = ctx.cert.level_structure
        if ls is None or achieved != len(ls.level(1)[0]):
            return "fail", "achieved does not match the level-one part"
    if passed != (achieved >= bound):
        return "fail", "pass verdict does not match the numbers"
    return "ok", None


def _count_target(label, ctx):
    """Re-derive the scheduled target of a coverage-count claim."""
    prof = ctx.cert.input_profile
    q = prof.q
    if label == "case1_side_cover":
        return Fraction(prof.r_vec[0] - 1, 2)
    if label == "case2_part_cover":
        return Fraction(prof.r_vec[-1], 8)
    if label == "case2_blue_volume":
        ls = ctx.cert.level_structure
        if ls is None:
            return None
        return 8 * prof.eps * len(ls.level(1)[0])
    if label == "unbalanced_cover":
        ls = ctx.cert.level_structure
        if ls is None:
            return None
        return Fraction(prof.r_vec[ls.depth - 1], 2 ** (4 * q - 4))
    if label == "balanced_cover":
        return Fraction(prof.r_vec[-1], 2 ** (4 * q - 6))
    return None


def _replay_count_at_least(detail, passed, ctx):
    value = int(detail["value"])
    target = parse_frac(detail["target"])
    if passed != (Fraction(value) >= target):
        return "fail", "pass verdict does not match the numbers"
    label = str(detail.get("label", ""))
    expected = _count_target(label, ctx)
    if expected is not None and target != expected:
        return "fail", "recorded target is not the scheduled value"
    if label in ("window_restricted_edges", "densest_restricted"):
        window = ctx.base_window()
        restricted = sorted(ctx.cert.input_profile.restricted_colors())
        counts = [ctx.c.class_edge_count(col, window.mask)
                  for col in restricted]
        real = sum(counts) if label == "window_restricted_edges" \
            else max(counts, default=0)
        if value != real:
            return "fail", f"recounted {real} restricted window edges, " \
                           f"recorded {value}"
        gamma = ctx.recorded_gamma()
        wedges = len(window) * (len(window) - 1) // 2
        denom = gamma if label == "window_restricted_edges" \
            else gamma * max(len(restricted), 1)
        if gamma is not None and target != Fraction(wedges, denom):
            return "fail", "window density target does not match the window"
    return "ok", None


def _replay_subset_of(detail, passed, ctx):
    inner = vset_from_payload(detail["inner"])
    outer = vset_from_payload(detail["outer"])
    if not passed or not inner.issubset(outer):
        return "fail", "containment does not hold"
    label = str(detail.get("label", ""))
    if label.endswith("_surviving"):
        surv = ctx.cert.surviving_set
        if surv is None or inner.mask != surv.mask:
            return "fail", "inner set is not the surviving set"
        if not outer.issubset(ctx.region):
            return "fail", "outer set escapes the working region"
    return "ok", None


def _replay_zero_edges(detail, passed, ctx):
    color = int(detail["color"])
    reg = vset_from_payload(detail["region"])
    if not reg.issubset(ctx.region):
        return "fail", "claimed region escapes the working region"
    count = ctx.c.class_edge_count(color, reg.mask)
    if count != 0 or not passed:
        return "fail", f"color {color} has {count} edges in the claimed region"
    label = str(detail.get("label", ""))
    if label.endswith("_removed"):
        surv = ctx.cert.surviving_set
        if surv is None or reg.mask != surv.mask:
            return "fail", "removal claim is not about the surviving set"
    return "ok", None


def _replay_intersect_bound(detail, passed, ctx):
    size = int(detail["size"])
    selected = list(detail["selected"])
    surv = ctx.cert.surviving_set
    if surv is None or size != len(surv):
        return "fail", "intersection size does not match the surviving set"
    if not selected:
        return "fail", "no subsets were selected"
    path = str(detail["path"])
    if path == "greedy_fallback":
        if passed:
            return "fail", "fallback selections never meet the lemma bound"
        return "ok", None
    if "bound" not in detail:
        return "fail", "lemma path without a recorded bound"
    bound = parse_frac(detail["bound"])
    if passed != (Fraction(size) >= bound):
        return "fail", "pass verdict does not match the recorded bound"
    label = str(detail.get("label", ""))
    universe = {
        "case1_sparse": ctx.outer_of("case1_surviving"),
        "unbalanced_sparse": ctx.outer_of("unbalanced_surviving"),
        "balanced_slices": ctx.outer_of("balanced_surviving"),
    }.get(label)
    if universe is not None:
        eps = parse_frac(detail["eps"])
        expected = (1 - 2 * eps) ** len(selected) * len(universe)
        if bound != expected:
            return "fail", "recorded bound does not match the selection lemma"
    return "ok", None


def _expected_output(rule, detail, ctx):
    """Re-run the bookkeeping of a step's profile update."""
    prof = ctx.cert.input_profile
    params = ctx.params
    q = prof.q
    if rule in ("q3_case2", "balanced"):
        removed = set(int(x) for x in detail["removed"])
        total = prof.r_vec[-1]
        keep_target = ceil_frac(params.z * total)
        if int(detail["keep_target"]) != keep_target:
            return None, "keep_target does not match z * r"
        if len(removed) > total - keep_target:
            return None, "more colors removed than the z-rule allows"
        if not removed <= prof.colors():
            return None, "removed colors are not in the input profile"
        remaining = tuple(sorted(prof.colors() - removed))
        parts = [frozenset(remaining)] + [frozenset()] * (q - 2)
        xs = (Fraction(1),) + (Fraction(0),) * (q - 2)
        if rule == "q3_case2":
            r_vec = (len(remaining), len(remaining))
        else:
            r_vec = (len(remaining),) * (q - 1)
        return RestrictionProfile(q, r_vec, xs, prof.eps, tuple(parts)), None
    if rule == "q3_case1":
        moved = [int(x) for x in detail["moved"]]
        r1 = prof.r_vec[0]
        keep_target = ceil_frac(params.z * r1)
        if int(detail["keep_target"]) != keep_target:
            return None, "keep_target does not match z * r1"
        if len(moved) > r1 - keep_target:
            return None, "more colors moved than the z-rule allows"
        c1 = sorted(prof.color_partition[0])
        if not set(moved) <= set(c1):
            return None, "moved colors are not unrestricted inputs"
        new_c1 = tuple(col for col in c1 if col not in set(moved))
        new_c2 = tuple(sorted(set(prof.color_partition[1]) | set(moved)))
        ls = ctx.cert.level_structure
        surv = ctx.cert.surviving_set
        if ls is None or surv is None:
            return None, "case 1 certificate lacks its structure"
        m = len(ls.level(1)[0])
        scale = max(params.alpha_vec[1] * Fraction(m),
                    prof.x_vec[1] * Fraction(len(ctx.region)))
        x2 = min(Fraction(1), scale / Fraction(len(surv)))
        out = RestrictionProfile(
            3, (len(new_c1), len(new_c1) + len(new_c2)),
            (Fraction(1), x2), prof.eps,
            (frozenset(new_c1), frozenset(new_c2)))
        return out, None
    if rule == "not_balanced":
        k = int(detail["depth"])
        moved = [int(x) for x in detail["moved"]]
        r_k = prof.r_vec[k - 1]
        keep_target = ceil_frac(params.z * r_k)
        if int(detail["keep_target"]) != keep_target:
            return None, "keep_target does not match z * r_k"
        if len(moved) > r_k - keep_target:
            return None, "more colors moved than the z-rule allows"
        pool = sorted(set().union(*prof.color_partition[:k]))
        if not set(moved) <= set(pool):
            return None, "moved colors are not leading-class inputs"
        old = [sorted(cl) for cl in prof.color_partition]
        parts = [tuple(col for col in pool if col not in set(moved))]
        parts.extend(() for _ in range(k - 1))
        parts.append(tuple(sorted(set(old[k]) | set(moved))))
        parts.extend(tuple(old[j]) for j in range(k + 1, q - 1))
        big = ctx.outer_of("unbalanced_surviving")
        surv = ctx.cert.surviving_set
        if big is None or surv is None:
            return None, "unbalanced certificate lacks its sets"
        xs = [Fraction(1)] + [Fraction(0)] * (k - 1)
        n_loc = len(ctx.region)
        scale = max(params.alpha_vec[k] * Fraction(len(big)),
                    prof.x_vec[k] * Fraction(n_loc))
        xs.append(min(Fraction(1), scale / Fraction(len(surv))))
        xs.extend(min(Fraction(1),
                      prof.x_vec[j] * Fraction(n_loc) / Fraction(len(surv)))
                  for j in range(k + 1, q - 1))
        sizes = [len(p) for p in parts]
        r_vec = []
        acc = 0
        for s in sizes:
            acc += s
            r_vec.append(acc)
        out = RestrictionProfile(q, tuple(r_vec), tuple(xs), prof.eps,
                                 tuple(frozenset(p) for p in parts))
        return out, None
    return None, f"unknown bookkeeping rule {rule!r}"


def _replay_profile_arithmetic(detail, passed, ctx):
    if not passed:
        return "fail", "bookkeeping checks must pass at emission"
    rule = str(detail["rule"])
    out = ctx.cert.output_profile
    if out is None:
        return "fail", "bookkeeping without an output profile"
    if list(detail["input_r_vec"]) != list(ctx.cert.input_profile.r_vec):
        return "fail", "recorded input r-vector does not match the profile"
    if list(detail["r_vec"]) != list(out.r_vec):
        return "fail", "recorded r-vector does not match the output profile"
    if [parse_frac(x) for x in detail["x_vec"]] != list(out.x_vec):
        return "fail", "recorded x-vector does not match the output profile"
    expected, why = _expected_output(rule, detail, ctx)
    if expected is None:
        return "fail", why
    if expected != out:
        return "fail", f"recomputed {rule} output profile differs"
    return "ok", None


def _replay_dense_pair(detail, passed, ctx):
    if not passed:
        return "fail", "dense-pair claims must pass at emission"
    v1 = vset_from_payload(detail["v1"])
    v2 = vset_from_payload(detail["v2"])
    if len(v1) == 0 or len(v2) == 0 or not v1.isdisjoint(v2):
        return "fail", "pair sides are empty or overlap"
    if not v1.issubset(ctx.region) or not v2.issubset(ctx.region):
        return "fail", "pair escapes the working region"
    if len(v1) + len(v2) > 2 * ctx.exact_cap:
        return "skip", None
    eps = parse_frac(detail["eps"])
    g = ctx.c.class_graph(int(detail["color"]))
    got = _dense_by_subsets(g, v1, v2, eps, ctx.budget)
    if got is None:
        return "skip", None
    if not got:
        return "fail", "recorded pair is not eps-dense"
    return "ok", None


def _replay_no_dense_pair(detail, passed, ctx):
    if not passed:
        return "fail", "no-dense-pair claims must pass at emission"
    reg = vset_from_payload(detail["region"])
    if not reg.issubset(ctx.region):
        return "fail", "claimed region escapes the working region"
    lo, hi = int(detail["lo"]), int(detail["hi"])
    if hi != len(reg) // 2:
        return "fail", "search window does not span the region"
    if len(reg) > ctx.exact_cap:
        return "skip", None
    eps = parse_frac(detail["eps"])
    g = ctx.c.class_graph(int(detail["color"]))
    got = _any_dense_pair(g, reg, eps, lo, hi, ctx.budget)
    if got is None:
        return "skip", None
    if got:
        return "fail", "a dense pair exists in the claimed-empty window"
    return "ok", None


def _replay_sparse_color(detail, passed, ctx):
    if not passed:
        return "fail", "sparsity claims must pass at emission"
    surv = ctx.cert.surviving_set
    if surv is None:
        return "fail", "sparsity claim without a surviving set"
    color = int(detail["color"])
    x = parse_frac(detail["x"])
    eps = parse_frac(detail["eps"])
    lo, hi = (int(w) for w in detail["window"])
    n = len(surv)
    if x == 0:
        count = ctx.c.class_edge_count(color, surv.mask)
        if count != 0:
            return "fail", f"color {color} has {count} edges but claims " \
                           f"zero-x sparsity"
        return "ok", None
    if lo != max(1, ceil_frac(x * n)) or hi != min(floor_frac(eps * n),
                                                   n // 2):
        return "fail", "recorded window does not match x and eps"
    if bool(detail["vacuous"]) != (lo > hi):
        return "fail", "vacuousness flag does not match the window"
    if lo > hi:
        return "ok", None
    if n > ctx.exact_cap:
        return "skip", None
    g = ctx.c.class_graph(color)
    got = _any_dense_pair(g, surv, eps, lo, hi, ctx.budget)
    if got is None:
        return "skip", None
    if got:
        return "fail", "a dense pair exists inside the sparsity window"
    return "ok", None


def _coloring_region(label, ctx):
    if label == "case2_union":
        ls = ctx.cert.level_structure
        if ls is None:
            return None
        v_pos, v_neg = ls.level(1)
        return v_pos.union(v_neg)
    return ctx.region


def _replay_proper_coloring(detail, passed, ctx):
    if not passed:
        return "fail", "proper-coloring claims must pass at emission"
    label = str(detail.get("label", ""))
    reg = _coloring_region(label, ctx)
    if reg is None:
        return "fail", "no region to color against"
    k = int(detail["k"])
    sizes = [int(s) for s in detail["class_sizes"]]
    if len(sizes) != k or sum(sizes) != len(reg):
        return "fail", "class sizes do not partition the region"
    if len(reg) > ctx.exact_cap:
        return "skip", None
    colors = tuple(int(col) for col in detail["colors"])
    g = ctx.c.union_graph(colors, reg.mask)
    if proper_coloring(g, k, within=reg.mask) is None:
        return "fail", f"the union is not {k}-colorable after all"
    return "ok", None


def _replay_chromatic_at_least(detail, passed, ctx):
    if "region" in detail:
        reg = vset_from_payload(detail["region"])
    else:
        reg = VertexSet.full(ctx.c.n)
    if len(reg) > 2 * ctx.exact_cap:
        return "skip", None
    colors = tuple(int(col) for col in detail["colors"])
    chi = chromatic_number(ctx.c.union_graph(colors, reg.mask),
                           within=reg.mask)
    if chi != int(detail["chi"]):
        return "fail", f"recomputed chi {chi} != recorded {detail['chi']}"
    if passed != (chi >= int(detail["bound"])):
        return "fail", "pass verdict does not match the numbers"
    return "ok", None


def _replay_halt_threshold(detail, passed, ctx):
    if not passed:
        return "fail", "halt thresholds must pass at emission"
    halt = ctx.cert.halt
    if str(detail.get("label", "")) == "size_one":
        n = int(detail["n"])
        if n != len(ctx.region) or n > 1:
            return "fail", "size-one halt on a region with multiple vertices"
        if halt is None or halt.reason != "size_one" or halt.n_bound != 2:
            return "fail", "halt record does not match the size-one claim"
        return "ok", None
    gamma = int(detail["gamma"])
    n0 = int(detail["n0"])
    eps = parse_frac(detail["eps"])
    threshold = parse_frac(detail["threshold"])
    n = int(detail["n"])
    prof = ctx.cert.input_profile
    if n != len(ctx.region):
        return "fail", "recorded n does not match the region"
    if eps != prof.eps_eff:
        return "fail", "recorded eps is not the profile's effective eps"
    if n0 != gamma * (gamma - 1) or threshold != Fraction(n0) / eps:
        return "fail", "threshold arithmetic does not reproduce"
    q = prof.q
    r_active = len(prof.unrestricted_colors())
    configured = any("configured" in note for note in ctx.cert.notes)
    if not configured:
        if r_active <= q:
            if gamma != 2 ** q:
                return "fail", "direct gamma must be 2^q"
        elif gamma > product_upper_bound(r_active, 2 ** q, q + 1):
            return "fail", "gamma exceeds the product upper bound"
    if halt is not None and halt.n_bound != ceil_frac(threshold):
        return "fail", "halt bound is not the threshold ceiling"
    if halt is not None and halt.reason == "below_threshold" and \
            not Fraction(n) < threshold:
        return "fail", "region is not actually below the halt threshold"
    return "ok", None


_DISPATCH = {
    "size_at_least": _replay_size_at_least,
    "count_at_least": _replay_count_at_least,
    "subset_of": _replay_subset_of,
    "zero_edges": _replay_zero_edges,
    "intersect_bound": _replay_intersect_bound,
    "profile_arithmetic": _replay_profile_arithmetic,
    "dense_pair": _replay_dense_pair,
    "no_dense_pair": _replay_no_dense_pair,
    "sparse_color": _replay_sparse_color,
    "proper_coloring": _replay_proper_coloring,
    "chromatic_at_least": _replay_chromatic_at_least,
    "halt_threshold": _replay_halt_threshold,
}


# ---------------------------------------------------------------------------
# the trace walk
# ---------------------------------------------------------------------------

def replay_trace(trace: ReductionTrace, c: ColoredCompleteGraph, *,
                 exact_cap: int = EXACT_REGION_CAP,
                 pair_budget: int = PAIR_BUDGET) -> ReplayReport:
    """Re-verify every certificate of a trace against the coloring.

    Walks the regions exactly as the engine descended them, re-derives
    each recorded verdict independently, and re-checks the structural
    chaining: profiles must hand off from step to step, surviving sets
    must nest and shrink, floors must mark exactly the vacuous bounds,
    and only the final certificate may halt or carry a witness.
    """
    budget = [pair_budget]
    ncerts = len(trace.certificates)
    replayed = 0
    skipped = 0

    def bad(ci, ki, claim, reason):
        return ReplayReport(False, ncerts, replayed, skipped,
                            ReplayIssue(ci, ki, claim, reason))

    if trace.q != trace.params.q:
        return bad(-1, -1, "structure", "trace and params disagree on q")
    if len(trace.sizes) not in (ncerts, ncerts + 1):
        return bad(-1, -1, "structure", "sizes do not align with the trace")
    if ncerts == 0 and not trace.stalled:
        return bad(-1, -1, "structure", "empty trace without a stall")

    region = VertexSet.full(c.n)
    expected_profile = RestrictionProfile.initial(
        trace.q, c.used_colors(), trace.params.eps)

    for ci, cert in enumerate(trace.certificates):
        last = ci == ncerts - 1
        if ci < len(trace.sizes) and trace.sizes[ci] != len(region):
            return bad(ci, -1, "structure",
                       "recorded size does not match the region walk")
        if cert.input_profile != expected_profile:
            return bad(ci, -1, "structure",
                       "input profile does not chain from the previous step")
        if cert.seed != trace.params.seed:
            return bad(ci, -1, "structure", "certificate seed mismatch")
        terminal = cert.halt is not None or cert.violation_witness is not None
        if not last and terminal:
            return bad(ci, -1, "structure", "halt before the final step")
        if last and not terminal and not trace.stalled:
            return bad(ci, -1, "structure",
                       "final certificate neither halts nor witnesses")
        if cert.violation_witness is not None and \
                cert.violation_witness.chi < 2 ** trace.q:
            return bad(ci, -1, "structure",
                       "witness chromatic number is below 2^q")

        ctx = _Ctx(c, trace.params, cert, region, trace.q, exact_cap, budget)
        for ki, check in enumerate(cert.guarantee_checks):
            if check.mode == "exact" and not check.passed:
                return bad(ci, ki, check.claim,
                           "failed exact check inside a certificate")
            handler = _DISPATCH.get(check.claim)
            if handler is None:
                return bad(ci, ki, check.claim, "unknown claim kind")
            status, reason = handler(check.detail, check.passed, ctx)
            if status == "fail":
                return bad(ci, ki, check.claim, reason)
            if status == "skip":
                skipped += 1
            else:
                replayed += 1
        if set(cert.floors) != ctx.fired_floors:
            return bad(ci, -1, "structure",
                       "recorded floors do not match the vacuous bounds")

        if cert.surviving_set is not None:
            if not cert.surviving_set.issubset(region):
                return bad(ci, -1, "structure",
                           "surviving set escapes the region")
            if not terminal and len(cert.surviving_set) >= len(region) \
                    and not (last and trace.stalled):
                return bad(ci, -1, "structure", "surviving set did not shrink")
        if not terminal and not last:
            if cert.surviving_set is None or cert.output_profile is None:
                return bad(ci, -1, "structure",
                           "non-final step does not descend")
            region = cert.surviving_set
            expected_profile = cert.output_profile

    return ReplayReport(True, ncerts, replayed, skipped, None)
