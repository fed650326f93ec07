"""The four color-reduction steps.

Each step re-verifies its own preconditions against the coloring, performs
the combinatorial extraction, and emits a ReductionCertificate whose
guarantee checks were actually run at emission time.  Quantities that a
small instance cannot push up to the scheduled bound are still measured;
the certificate then carries the measurement in a recorded-mode check plus
a named shortfall instead of a silent pass.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from ..chromatic import chromatic_number, find_clique, proper_coloring
from ..constructions import product_upper_bound
from ..dense_pairs import (SparsityWitness, _child_seed, ceil_frac,
                           find_dense_pair_sized, floor_frac,
                           intersect_select, is_sparse_color)
from ..errors import (BudgetExceeded, IsBalanced, NoDensePair, NotBalanced,
                      NotBaseCase, PreconditionViolation, ProfileTooSmall,
                      SparsityViolated, Stalled)
from ..graphs import ColoredCompleteGraph, VertexSet, mask_of
from ..search import compute_F_chi
from ..serialize import frac_str, vset_payload
from .certificates import (GuaranteeCheck, HaltInfo, ReductionCertificate,
                           ViolationWitness)
from .levels import (LevelStructure, build_level_sets, family_volume,
                     max_disjoint_family, nonshattered_subset,
                     well_balance_report)
from .params import EngineParams, floored_size
from .profiles import RestrictionProfile, classify_colors

BASE_SEARCH_NODES = 200_000
BASE_SEARCH_SECONDS = 5.0


def _region_of(c: ColoredCompleteGraph, within: int | None) -> VertexSet:
    full = (1 << c.n) - 1
    return VertexSet(c.n, full if within is None else (within & full))


def _densest_color(c: ColoredCompleteGraph, colors, region: VertexSet):
    """The color with the most edges in the region; ties go to the lowest id."""
    best_color, best_count = None, -1
    for color in sorted(colors):
        count = c.class_edge_count(color, region.mask)
        if count > best_count:
            best_color, best_count = color, count
    return best_color, best_count


def _partition_classes(assignment: dict[int, int], k: int,
                       universe: int) -> list[VertexSet]:
    """Group a proper-coloring assignment into k vertex sets, some empty.

    Proper colorings label classes 1..k.
    """
    masks = [0] * k
    for v, cls in assignment.items():
        masks[cls - 1] |= 1 << v
    return [VertexSet(universe, m) for m in masks]


def _size_check(label: str, achieved: int, frac: Fraction, scale: int,
                checks: list, shortfalls: list, floors: list) -> None:
    bound, fired = floored_size(frac, scale)
    if fired:
        floors.append(label)
    ok = achieved >= bound
    checks.append(GuaranteeCheck(
        "size_at_least",
        {"label": label, "achieved": achieved, "bound": bound,
         "fraction": frac_str(frac), "scale": scale},
        ok, "exact" if ok else "recorded"))
    if not ok:
        shortfalls.append("size_bound_missed")


def _count_check(label: str, value: int, target, checks: list,
                 shortfalls: list, shortfall: str) -> bool:
    ok = Fraction(value) >= Fraction(target)
    checks.append(GuaranteeCheck(
        "count_at_least",
        {"label": label, "value": value, "target": frac_str(Fraction(target))},
        ok, "exact" if ok else "recorded"))
    if not ok:
        shortfalls.append(shortfall)
    return ok


def _subset_check(label: str, inner: VertexSet, outer: VertexSet,
                  checks: list) -> None:
    checks.append(GuaranteeCheck(
        "subset_of",
        {"label": label, "inner": vset_payload(inner),
         "outer": vset_payload(outer)},
        inner.issubset(outer), "exact"))


def _zero_edges_check(c: ColoredCompleteGraph, color: int, region: VertexSet,
                      label: str, checks: list) -> bool:
    count = c.class_edge_count(color, region.mask)
    if count:
        return False
    checks.append(GuaranteeCheck(
        "zero_edges",
        {"label": label, "color": color, "region": vset_payload(region)},
        True, "exact"))
    return True


def _intersect_measured(universe: VertexSet, subsets: list[VertexSet],
                        label: str, checks: list, shortfalls: list):
    """Intersect large subsets of a common universe, recording the bound.

    The selection lemma takes the worst measured deficit as its epsilon.
    Past deficit 1/2 the lemma gives nothing, so a greedy pass keeps every
    subset that leaves the running intersection nonempty.
    """
    if not subsets:
        return universe, ()
    deficits = [Fraction(1) - Fraction(len(s), len(universe))
                for s in subsets]
    worst = max(deficits)
    if worst > Fraction(1, 2):
        inter = universe
        chosen: list[int] = []
        for i, s in enumerate(subsets):
            cand = inter.intersect(s)
            if len(cand) > 0:
                inter = cand
                chosen.append(i)
        if not chosen:
            raise Stalled(f"{label}: every subset empties the intersection")
        checks.append(GuaranteeCheck(
            "intersect_bound",
            {"label": label, "eps": frac_str(worst),
             "path": "greedy_fallback", "selected": chosen,
             "size": len(inter)},
            False, "recorded"))
        shortfalls.append("intersect_slack_exceeded")
        return inter, tuple(chosen)
    sel = intersect_select(universe, list(subsets), worst, min_sets=1)
    if len(sel.intersection) == 0:
        raise Stalled(f"{label}: selected intersection is empty")
    checks.append(GuaranteeCheck(
        "intersect_bound",
        {"label": label, "eps": frac_str(worst), "path": sel.path,
         "selected": list(sel.indices), "bound": frac_str(sel.bound),
         "size": len(sel.intersection)},
        sel.met, "exact" if sel.met else "recorded"))
    if not sel.met:
        shortfalls.append("intersect_bound_unmet")
    return sel.intersection, sel.indices


def _arith_check(rule: str, detail: dict, out: RestrictionProfile,
                 checks: list) -> None:
    payload = {"rule": rule, "r_vec": list(out.r_vec),
               "x_vec": [frac_str(x) for x in out.x_vec]}
    payload.update(detail)
    checks.append(GuaranteeCheck("profile_arithmetic", payload, True, "exact"))


def _sparse_outputs(c: ColoredCompleteGraph, out: RestrictionProfile,
                    region: VertexSet, seed, label: str,
                    checks: list) -> None:
    """Re-verify every restricted output class on the surviving set."""
    eff = out.eps_eff
    for i, cls in enumerate(out.color_partition[1:], start=1):
        x = out.x_vec[i]
        for color in sorted(cls):
            w = is_sparse_color(c, color, x, eff, "interval",
                                within=region.mask,
                                seed=_child_seed(seed, f"{label}|{color}"))
            checks.append(GuaranteeCheck(
                "sparse_color",
                {"label": label, "color": color, "x": frac_str(w.x),
                 "eps": frac_str(w.eps), "window": list(w.window),
                 "vacuous": w.vacuous},
                w.sparse, w.mode))
            if not w.sparse:
                raise Stalled(
                    f"{label}: color {color} fails its output sparsity "
                    f"window on the surviving set")


# ---------------------------------------------------------------------------
# the q = 3 dichotomy
# ---------------------------------------------------------------------------

def step_q3(c: ColoredCompleteGraph, profile: RestrictionProfile,
            params: EngineParams, *,
            within: int | None = None) -> ReductionCertificate:
    """One reduction round for q = 3: shrink C1 or drop colors outright.

    A densest-color dense pair is fixed first.  If every other unrestricted
    color has a side of the pair where its maximal disjoint dense-pair
    family is thin, those leftovers intersect into a set on which the
    covered colors become window-sparse (case 1).  Otherwise some color is
    voluminous on both sides, and slice intersection inside its family
    yields a set on which a batch of colors has no edges at all (case 2).
    """
    if params.q != 3 or profile.q != 3:
        raise PreconditionViolation("step_q3 requires q = 3")
    region = _region_of(c, within)
    n_loc = len(region)
    if n_loc < 2:
        raise PreconditionViolation("region too small for a reduction step")
    r1 = profile.r_vec[0]
    if r1 < params.r_min:
        raise ProfileTooSmall(
            f"r_1 = {r1} is below the base threshold {params.r_min}")
    classify_colors(c, profile, within=region.mask, seed=params.seed)

    checks: list[GuaranteeCheck] = []
    shortfalls: list[str] = []
    floors: list[str] = []
    notes: list[str] = []
    eps = profile.eps
    eff = profile.eps_eff
    c1 = sorted(profile.color_partition[0])

    red, red_edges = _densest_color(c, c1, region)
    if red_edges == 0:
        raise NoDensePair("the densest unrestricted color has no edges")
    structure = build_level_sets(c, (red,), params, within=region.mask)
    v_pos, v_neg = structure.level(1)
    m = len(v_pos)
    checks.append(GuaranteeCheck(
        "dense_pair",
        {"label": "red_pair", "color": red, "v1": vset_payload(v_pos),
         "v2": vset_payload(v_neg), "eps": frac_str(eff),
         "search_mode": structure.pair_modes[0][0]},
        True,
        "exact" if structure.pair_modes[0][0] == "exact" else "sampled"))
    _size_check("red_pair_part", m, params.alpha_vec[0], n_loc,
                checks, shortfalls, floors)

    sides = (v_pos, v_neg)
    others = [col for col in c1 if col != red]
    fams: dict[int, list] = {}
    vols: dict[int, tuple[int, int]] = {}
    for col in others:
        g = c.class_graph(col)
        per = []
        for side in sides:
            lo = max(1, ceil_frac(params.alpha_vec[1] * len(side)))
            fam = max_disjoint_family(g, side, eps, lo, len(side) // 2,
                                      seed=params.seed,
                                      tag=f"q3fam|{col}|{side.mask}")
            per.append(fam)
        fams[col] = per
        vols[col] = (family_volume(per[0]), family_volume(per[1]))
    margin = Fraction(8) * eps * m

    blues = [col for col in others
             if Fraction(min(vols[col])) >= margin]
    if blues:
        return _q3_case2(c, profile, params, region, structure, red,
                         blues[0], fams, vols, margin, checks, shortfalls,
                         floors, notes)
    return _q3_case1(c, profile, params, region, structure, red, fams,
                     vols, margin, checks, shortfalls, floors, notes)


def _q3_case1(c, profile, params, region, structure, red, fams, vols,
              margin, checks, shortfalls, floors, notes):
    n_loc = len(region)
    eps = profile.eps
    v_pos, v_neg = structure.level(1)
    m = len(v_pos)
    sides = (v_pos, v_neg)
    c1 = sorted(profile.color_partition[0])
    c2 = sorted(profile.color_partition[1])
    r1 = profile.r_vec[0]
    others = [col for col in c1 if col != red]

    covered = [[col for col in others if Fraction(vols[col][si]) < margin]
               for si in (0, 1)]
    pick = 0 if len(covered[0]) >= len(covered[1]) else 1
    side = sides[pick]
    cov = covered[pick]
    if not cov:
        raise Stalled("case 1 reached with no thin color on either side")
    notes.append(f"case1 side {pick} covers {len(cov)} of "
                 f"{len(others)} colors")
    _count_check("case1_side_cover", len(cov), Fraction(r1 - 1, 2),
                 checks, shortfalls, "cover_count_short")

    lo = max(1, ceil_frac(params.alpha_vec[1] * m))
    subsets = []
    for col in cov:
        left = side
        for pair in fams[col][pick]:
            left = left.minus(VertexSet(region.universe, pair.union_mask()))
        res = None
        if len(left) // 2 >= lo:
            res = find_dense_pair_sized(
                c.class_graph(col), eps, lo, len(left) // 2,
                within=left.mask,
                seed=_child_seed(params.seed, f"case1|{col}|{left.mask}"))
            if res.pair is not None:
                raise Stalled(
                    f"case 1 family for color {col} was not maximal")
        mode = "exact" if (res is None or res.exhaustive) else "sampled"
        checks.append(GuaranteeCheck(
            "no_dense_pair",
            {"label": "case1_leftover", "color": col,
             "region": vset_payload(left), "eps": frac_str(eps),
             "lo": lo, "hi": len(left) // 2},
            True, mode))
        subsets.append(left)

    surviving, sel_idx = _intersect_measured(side, subsets, "case1_sparse",
                                             checks, shortfalls)
    sel_colors = [cov[i] for i in sel_idx]
    keep_target = ceil_frac(params.z * r1)
    move_target = r1 - keep_target
    moved = sorted(sel_colors)[:move_target]
    if len(moved) < move_target:
        shortfalls.append("moved_colors_short")
        notes.append(f"case1 wanted to move {move_target} colors, "
                     f"selection provided {len(moved)}")
    if not moved:
        notes.append("case1 moved no colors")

    new_c1 = tuple(col for col in c1 if col not in set(moved))
    new_c2 = tuple(sorted(set(c2) | set(moved)))
    x2_old = profile.x_vec[1]
    scale = max(params.alpha_vec[1] * Fraction(m),
                x2_old * Fraction(n_loc))
    x2 = min(Fraction(1), scale / Fraction(len(surviving)))
    schedule_x = min(Fraction(1),
                     max(params.alpha_vec[1], x2_old)
                     / (params.beta * params.alpha_vec[0]))
    notes.append(f"case1 x2 {frac_str(x2)} (schedule form "
                 f"{frac_str(schedule_x)})")
    out = RestrictionProfile(
        3, (len(new_c1), len(new_c1) + len(new_c2)), (Fraction(1), x2),
        profile.eps, (frozenset(new_c1), frozenset(new_c2)))
    _arith_check("q3_case1",
                 {"keep_target": keep_target, "moved": list(moved),
                  "input_r_vec": list(profile.r_vec)}, out, checks)
    _sparse_outputs(c, out, surviving, params.seed, "case1_out", checks)
    _size_check("case1_surviving", len(surviving),
                params.beta * params.alpha_vec[0], n_loc,
                checks, shortfalls, floors)
    _subset_check("case1_surviving", surviving, side, checks)
    return ReductionCertificate(
        "q3_case1", profile, out, surviving, tuple(checks),
        shortfalls=tuple(shortfalls), floors=tuple(floors),
        notes=tuple(notes), seed=params.seed, level_structure=structure)


def _q3_case2(c, profile, params, region, structure, red, blue, fams, vols,
              margin, checks, shortfalls, floors, notes):
    n_loc = len(region)
    eps = profile.eps
    eff = profile.eps_eff
    v_pos, v_neg = structure.level(1)
    m = len(v_pos)
    sides = (v_pos, v_neg)
    total = profile.r_vec[-1]
    all_colors = sorted(profile.colors())
    w_region = v_pos.union(v_neg)
    notes.append(f"case2 blue color {blue}")
    checks.append(GuaranteeCheck(
        "count_at_least",
        {"label": "case2_blue_volume", "value": min(vols[blue]),
         "target": frac_str(margin)},
        True, "exact"))

    assigns: dict[int, list[VertexSet]] = {}
    for col in all_colors:
        if col in (red, blue):
            continue
        trio = tuple(sorted({red, blue, col}))
        g = c.union_graph(trio, w_region.mask)
        assignment = proper_coloring(g, 7, within=w_region.mask)
        if assignment is None:
            chi = chromatic_number(g, within=w_region.mask)
            checks.append(GuaranteeCheck(
                "chromatic_at_least",
                {"label": "case2_union", "colors": list(trio),
                 "region": vset_payload(w_region), "bound": 8, "chi": chi},
                chi >= 8, "exact"))
            return ReductionCertificate(
                "precondition_violation", profile, None, None,
                tuple(checks),
                violation_witness=ViolationWitness(trio, w_region, chi),
                shortfalls=tuple(shortfalls), floors=tuple(floors),
                notes=tuple(notes), seed=params.seed,
                level_structure=structure)
        classes = _partition_classes(assignment, 7, region.universe)
        checks.append(GuaranteeCheck(
            "proper_coloring",
            {"label": "case2_union", "colors": list(trio), "k": 7,
             "class_sizes": [len(cl) for cl in classes]},
            True, "exact"))
        assigns[col] = classes

    side_of: dict[int, int] = {}
    for col, classes in assigns.items():
        small = [sum(1 for cl in classes
                     if Fraction(len(cl.intersect(side))) <= eff * m)
                 for side in sides]
        if small[0] >= 4:
            side_of[col] = 0
        elif small[1] >= 4:
            side_of[col] = 1
        else:
            raise Stalled(f"color {col}: neither side of the red pair "
                          f"holds four small classes")
    votes = [sum(1 for s in side_of.values() if s == si) for si in (0, 1)]
    maj = 0 if votes[0] >= votes[1] else 1
    side = sides[maj]
    proceed = sorted(col for col, s in side_of.items() if s == maj)
    if len(proceed) < len(assigns):
        notes.append(f"case2 side {maj} carries {len(proceed)} of "
                     f"{len(assigns)} colors")

    fam = fams[blue][maj]
    if not fam:
        raise Stalled("blue family is empty on the majority side")
    parts: list[VertexSet] = []
    for pair in fam:
        parts.append(pair.v1)
        parts.append(pair.v2)

    slice_frac = Fraction(1) - 6 * eps
    slices: dict[tuple[int, int], VertexSet] = {}
    j_sets: dict[int, set[int]] = {}
    for col in proceed:
        classes = assigns[col]
        hits = set()
        for pi, part in enumerate(parts):
            need = max(1, ceil_frac(slice_frac * len(part)))
            for cl in classes:
                sl = cl.intersect(part)
                if len(sl) >= need and \
                        c.class_edge_count(col, sl.mask) == 0:
                    hits.add(pi)
                    slices[(col, pi)] = sl
                    break
        j_sets[col] = hits

    def cover_of(pi: int) -> int:
        return sum(1 for col in proceed if pi in j_sets[col])

    iota = max(range(len(parts)), key=lambda pi: (cover_of(pi), -pi))
    covering = [col for col in proceed if iota in j_sets[col]]
    if not covering:
        raise Stalled("no color yields a clean slice on any blue part")
    _count_check("case2_part_cover", len(covering), Fraction(total, 8),
                 checks, shortfalls, "cover_count_short")
    part = parts[iota]
    subs = [slices[(col, iota)] for col in covering]
    for col, sl in zip(covering, subs):
        if not _zero_edges_check(c, col, sl, "case2_slice", checks):
            raise Stalled(f"slice for color {col} is not edge-free")

    surviving, sel_idx = _intersect_measured(part, subs, "case2_slices",
                                             checks, shortfalls)
    sel_colors = [covering[i] for i in sel_idx]
    keep_target = ceil_frac(params.z * total)
    remove_target = total - keep_target
    removed = sorted(sel_colors)[:remove_target]
    if len(removed) < remove_target:
        shortfalls.append("removed_colors_short")
        notes.append(f"case2 wanted to remove {remove_target} colors, "
                     f"selection provided {len(removed)}")
    for col in removed:
        if not _zero_edges_check(c, col, surviving, "case2_removed",
                                 checks):
            raise Stalled(f"removed color {col} still has edges")

    remaining = tuple(sorted(set(all_colors) - set(removed)))
    out = RestrictionProfile(
        3, (len(remaining), len(remaining)), (Fraction(1), Fraction(0)),
        profile.eps, (frozenset(remaining), frozenset()))
    _arith_check("q3_case2",
                 {"keep_target": keep_target, "removed": list(removed),
                  "input_r_vec": list(profile.r_vec)}, out, checks)
    _size_check("case2_surviving", len(surviving),
                params.beta * params.alpha_vec[0] * params.alpha_vec[1],
                n_loc, checks, shortfalls, floors)
    _subset_check("case2_surviving", surviving, w_region, checks)
    return ReductionCertificate(
        "q3_case2", profile, out, surviving, tuple(checks),
        shortfalls=tuple(shortfalls), floors=tuple(floors),
        notes=tuple(notes), seed=params.seed, level_structure=structure)


# ---------------------------------------------------------------------------
# general q: the unbalanced step
# ---------------------------------------------------------------------------

def step_not_balanced(c: ColoredCompleteGraph, profile: RestrictionProfile,
                      structure: LevelStructure, params: EngineParams, *,
                      within: int | None = None) -> ReductionCertificate:
    """Shrink the leading classes when no color extends the tower.

    Every candidate color is re-measured first; if one keeps the tower
    well-balanced the step refuses with IsBalanced.  Otherwise averaging
    picks the deepest-level set that most colors fail to shatter, the
    per-color non-shattered leftovers intersect there, and the selected
    colors move into the next restricted class.
    """
    q = params.q
    if profile.q != q:
        raise PreconditionViolation("profile and params disagree on q")
    k = structure.depth
    if not 1 <= k <= q - 2:
        raise PreconditionViolation(
            f"tower depth {k} outside the unbalanced range 1..{q - 2}")
    region = _region_of(c, within)
    n_loc = len(region)
    if profile.r_vec[0] < params.r_min:
        raise ProfileTooSmall(
            f"r_1 = {profile.r_vec[0]} is below the base threshold "
            f"{params.r_min}")
    classify_colors(c, profile, within=region.mask, seed=params.seed)

    checks: list[GuaranteeCheck] = []
    shortfalls: list[str] = []
    floors: list[str] = []
    notes: list[str] = []

    pool = sorted(set(itertools.chain.from_iterable(
        profile.color_partition[:k])))
    candidates = sorted(set(c.used_colors(region.mask)) | set(pool))
    reports = {}
    for col in candidates:
        rep = well_balance_report(c, structure, col, params)
        if rep.ok:
            raise IsBalanced(
                f"color {col} keeps the tower well-balanced")
        reports[col] = rep
    checks.append(GuaranteeCheck(
        "count_at_least",
        {"label": "unbalanced_candidates", "value": len(candidates),
         "target": frac_str(Fraction(len(candidates)))},
        True, "exact"))
    notes.append(f"all {len(candidates)} candidate colors fail the "
                 f"balance threshold at depth {k}")

    r_k = profile.r_vec[k - 1]
    level_sets = structure.level(k)
    cover = [sum(1 for col in pool if idx in reports[col].nonshattered)
             for idx in range(len(level_sets))]
    vidx = max(range(len(level_sets)), key=lambda i: (cover[i], -i))
    big = level_sets[vidx]
    covering = [col for col in pool if vidx in reports[col].nonshattered]
    if not covering:
        raise Stalled("no leading color leaves a non-shattered set")
    _count_check("unbalanced_cover", len(covering),
                 Fraction(r_k, 2 ** (4 * q - 4)),
                 checks, shortfalls, "cover_count_short")

    subsets = [nonshattered_subset(big, c, col, params, k)
               for col in covering]
    surviving, sel_idx = _intersect_measured(big, subsets,
                                             "unbalanced_sparse",
                                             checks, shortfalls)
    sel_colors = [covering[i] for i in sel_idx]
    keep_target = ceil_frac(params.z * r_k)
    move_target = r_k - keep_target
    moved = sorted(sel_colors)[:move_target]
    if len(moved) < move_target:
        shortfalls.append("moved_colors_short")
        notes.append(f"wanted to move {move_target} colors, selection "
                     f"provided {len(moved)}")

    old_parts = [sorted(cl) for cl in profile.color_partition]
    new_parts: list[tuple[int, ...]] = [
        tuple(col for col in pool if col not in set(moved))]
    new_parts.extend(() for _ in range(k - 1))
    new_parts.append(tuple(sorted(set(old_parts[k]) | set(moved))))
    new_parts.extend(tuple(old_parts[j]) for j in range(k + 1, q - 1))

    xs: list[Fraction] = [Fraction(1)]
    xs.extend(Fraction(0) for _ in range(k - 1))
    scale = max(params.alpha_vec[k] * Fraction(len(big)),
                profile.x_vec[k] * Fraction(n_loc))
    xs.append(min(Fraction(1), scale / Fraction(len(surviving))))
    xs.extend(min(Fraction(1),
                  profile.x_vec[j] * Fraction(n_loc)
                  / Fraction(len(surviving)))
              for j in range(k + 1, q - 1))

    sizes = [len(p) for p in new_parts]
    r_out = tuple(itertools.accumulate(sizes))
    out = RestrictionProfile(q, r_out, tuple(xs), profile.eps,
                             tuple(frozenset(p) for p in new_parts))
    _arith_check("not_balanced",
                 {"depth": k, "keep_target": keep_target,
                  "moved": list(moved),
                  "input_r_vec": list(profile.r_vec)}, out, checks)
    _sparse_outputs(c, out, surviving, params.seed, "unbalanced_out",
                    checks)
    _size_check("unbalanced_surviving", len(surviving),
                params.gamma_vec[k - 1], n_loc, checks, shortfalls, floors)
    _subset_check("unbalanced_surviving", surviving, big, checks)
    return ReductionCertificate(
        "not_balanced", profile, out, surviving, tuple(checks),
        shortfalls=tuple(shortfalls), floors=tuple(floors),
        notes=tuple(notes), seed=params.seed, level_structure=structure)


# ---------------------------------------------------------------------------
# general q: the balanced step
# ---------------------------------------------------------------------------

def _prefix_structure(structure: LevelStructure, depth: int) -> LevelStructure:
    return LevelStructure(structure.universe, structure.within,
                          structure.colors[:depth], structure.pair_eps,
                          structure.levels[:depth],
                          structure.parents[:depth],
                          structure.pair_modes[:depth])


def step_balanced(c: ColoredCompleteGraph, profile: RestrictionProfile,
                  structure: LevelStructure, params: EngineParams, *,
                  within: int | None = None) -> ReductionCertificate:
    """Drop a batch of colors using a full well-balanced tower.

    For each color, a proper (2^q - 1)-coloring of its union with the tower
    colors is cascaded down the levels: at every step one child part keeps
    few enough big classes, and at the bottom a single class covers almost
    all of the set with no edges of the color inside.  The slices intersect
    on the most-covered bottom set, and the selected colors, having no
    edges there, leave the profile.
    """
    q = params.q
    if profile.q != q:
        raise PreconditionViolation("profile and params disagree on q")
    if structure.depth != q - 1:
        raise PreconditionViolation(
            f"balanced step needs a full tower of depth {q - 1}, "
            f"got {structure.depth}")
    region = _region_of(c, within)
    n_loc = len(region)
    if profile.r_vec[0] < params.r_min:
        raise ProfileTooSmall(
            f"r_1 = {profile.r_vec[0]} is below the base threshold "
            f"{params.r_min}")
    classify_colors(c, profile, within=region.mask, seed=params.seed)
    for mdep in range(1, structure.depth):
        rep = well_balance_report(c, _prefix_structure(structure, mdep),
                                  structure.colors[mdep], params)
        if not rep.ok:
            raise NotBalanced(
                f"chain fails the balance threshold at depth {mdep}")

    checks: list[GuaranteeCheck] = []
    shortfalls: list[str] = []
    floors: list[str] = []
    notes: list[str] = []
    eps = profile.eps
    chain = structure.colors
    kcount = 2 ** q - 1
    all_colors = sorted(profile.colors())
    r_last = profile.r_vec[-1]
    cascade_short = False

    survivors: dict[int, list[tuple[int, VertexSet]]] = {}
    for col in all_colors:
        ucolors = tuple(sorted(set(chain) | {col}))
        g = c.union_graph(ucolors, region.mask)
        assignment = proper_coloring(g, kcount, within=region.mask)
        if assignment is None:
            chi = chromatic_number(g, within=region.mask)
            checks.append(GuaranteeCheck(
                "chromatic_at_least",
                {"label": "balanced_union", "colors": list(ucolors),
                 "region": vset_payload(region), "bound": 2 ** q,
                 "chi": chi},
                chi >= 2 ** q, "exact"))
            return ReductionCertificate(
                "precondition_violation", profile, None, None,
                tuple(checks),
                violation_witness=ViolationWitness(ucolors, region, chi),
                shortfalls=tuple(shortfalls), floors=tuple(floors),
                notes=tuple(notes), seed=params.seed,
                level_structure=structure)
        classes = _partition_classes(assignment, kcount, region.universe)
        checks.append(GuaranteeCheck(
            "proper_coloring",
            {"label": "balanced_union", "colors": list(ucolors),
             "k": kcount, "class_sizes": [len(cl) for cl in classes]},
            True, "exact"))

        v_pos, v_neg = structure.level(1)
        top_thr = eps ** (q - 1)
        bigs = [sum(1 for cl in classes
                    if Fraction(len(cl.intersect(side)))
                    >= top_thr * len(side))
                for side in (v_pos, v_neg)]
        pick = 0 if bigs[0] <= bigs[1] else 1
        if bigs[pick] > 2 ** (q - 1) - 1:
            notes.append(f"color {col}: both top sides keep too many "
                         f"big classes, color skipped")
            survivors[col] = []
            continue
        frontier = [pick]
        ok_chain = True
        for mdep in range(1, q - 1):
            child_thr = eps ** (q - mdep - 1)
            cap = 2 ** (q - mdep - 1) - 1
            nxt = []
            for idx in frontier:
                for ci in structure.children_of(mdep, idx):
                    child = structure.level(mdep + 1)[ci]
                    cnt = sum(1 for cl in classes
                              if Fraction(len(cl.intersect(child)))
                              >= child_thr * len(child))
                    if cnt <= cap:
                        nxt.append(ci)
            frontier = nxt
            vol_s = sum(len(structure.level(mdep + 1)[i]) for i in frontier)
            target = Fraction(structure.vol(mdep + 1),
                              2 ** (4 * (mdep + 1) - 2))
            if Fraction(vol_s) < target:
                cascade_short = True
            if not frontier:
                ok_chain = False
                break
        if not ok_chain:
            survivors[col] = []
            continue

        need_frac = Fraction(1) - (2 ** q - 2) * eps
        found: list[tuple[int, VertexSet]] = []
        for idx in frontier:
            bottom = structure.level(q - 1)[idx]
            need = max(1, ceil_frac(need_frac * len(bottom)))
            for cl in classes:
                sl = cl.intersect(bottom)
                if len(sl) >= need and \
                        c.class_edge_count(col, sl.mask) == 0:
                    found.append((idx, sl))
                    break
        survivors[col] = found
    if cascade_short:
        shortfalls.append("cascade_volume")

    deepest = structure.level(q - 1)
    cover = [0] * len(deepest)
    for col in all_colors:
        for idx, _ in survivors[col]:
            cover[idx] += 1
    vstar = max(range(len(deepest)), key=lambda i: (cover[i], -i))
    covering = [col for col in all_colors
                if any(idx == vstar for idx, _ in survivors[col])]
    if not covering:
        raise Stalled("no color reaches the bottom level with a clean "
                      "slice")
    _count_check("balanced_cover", len(covering),
                 Fraction(r_last, 2 ** (4 * q - 6)),
                 checks, shortfalls, "cover_count_short")
    bottom = deepest[vstar]
    subs = []
    for col in covering:
        sl = next(s for idx, s in survivors[col] if idx == vstar)
        if not _zero_edges_check(c, col, sl, "balanced_slice", checks):
            raise Stalled(f"slice for color {col} is not edge-free")
        subs.append(sl)

    surviving, sel_idx = _intersect_measured(bottom, subs,
                                             "balanced_slices",
                                             checks, shortfalls)
    sel_colors = [covering[i] for i in sel_idx]
    keep_target = ceil_frac(params.z * r_last)
    remove_target = r_last - keep_target
    removed = sorted(sel_colors)[:remove_target]
    if len(removed) < remove_target:
        shortfalls.append("removed_colors_short")
        notes.append(f"wanted to remove {remove_target} colors, "
                     f"selection provided {len(removed)}")
    for col in removed:
        if not _zero_edges_check(c, col, surviving, "balanced_removed",
                                 checks):
            raise Stalled(f"removed color {col} still has edges")

    remaining = tuple(sorted(set(all_colors) - set(removed)))
    parts = [frozenset(remaining)]
    parts.extend(frozenset() for _ in range(q - 2))
    xs = [Fraction(1)]
    xs.extend(Fraction(0) for _ in range(q - 2))
    out = RestrictionProfile(q, (len(remaining),) * (q - 1), tuple(xs),
                             profile.eps, tuple(parts))
    _arith_check("balanced",
                 {"keep_target": keep_target, "removed": list(removed),
                  "input_r_vec": list(profile.r_vec)}, out, checks)
    _size_check("balanced_surviving", len(surviving),
                params.gamma_vec[q - 2], n_loc, checks, shortfalls, floors)
    _subset_check("balanced_surviving", surviving, bottom, checks)
    return ReductionCertificate(
        "balanced", profile, out, surviving, tuple(checks),
        shortfalls=tuple(shortfalls), floors=tuple(floors),
        notes=tuple(notes), seed=params.seed, level_structure=structure)


# ---------------------------------------------------------------------------
# the base case
# ---------------------------------------------------------------------------

def base_case_check(c: ColoredCompleteGraph, profile: RestrictionProfile,
                    params: EngineParams, *,
                    within: int | None = None) -> ReductionCertificate:
    """Terminal analysis once the leading class is small.

    With few unrestricted colors, a window of eps^(q-1) * n vertices either
    contains a gamma-clique in their union (which must carry a
    high-chromatic small union, yielding a violation witness) or, by
    counting, some restricted color is dense enough in the window that its
    sparsity claim breaks.  Small regions halt with the threshold bound.
    """
    if profile.q != params.q:
        raise PreconditionViolation("profile and params disagree on q")
    if profile.r_vec[0] >= params.r_min:
        raise NotBaseCase(
            f"r_1 = {profile.r_vec[0]} is not below the base threshold "
            f"{params.r_min}")
    region = _region_of(c, within)
    n_loc = len(region)
    classify_colors(c, profile, within=region.mask, seed=params.seed)

    checks: list[GuaranteeCheck] = []
    shortfalls: list[str] = []
    notes: list[str] = []
    q = params.q
    p_target = 2 ** q
    eff = profile.eps_eff
    unrestricted = sorted(profile.unrestricted_colors())
    r_active = len(unrestricted)

    if params.base_gamma is not None:
        gamma = params.base_gamma
        notes.append(f"gamma {gamma} configured")
    elif r_active <= q:
        gamma = p_target
        notes.append(f"gamma {gamma} direct: {r_active} unrestricted "
                     f"colors fit inside one union")
    else:
        cap = min(product_upper_bound(r_active, p_target, q + 1),
                  p_target + 4)
        try:
            res = compute_F_chi(r_active, p_target, q + 1, cap,
                                node_budget=BASE_SEARCH_NODES,
                                time_budget=BASE_SEARCH_SECONDS)
        except BudgetExceeded:
            res = None
        if res is not None and res.value is not None:
            gamma = res.value
            notes.append(f"gamma {gamma} computed exactly")
        elif res is not None:
            gamma = product_upper_bound(r_active, p_target, q + 1)
            notes.append(f"gamma {gamma} from the product bound "
                         f"(search unknown above {res.unknown_above})")
        else:
            gamma = product_upper_bound(r_active, p_target, q + 1)
            notes.append(f"gamma {gamma} from the product bound "
                         f"(search budget exhausted)")
    n0 = gamma * (gamma - 1)
    threshold = Fraction(n0) / eff
    checks.append(GuaranteeCheck(
        "halt_threshold",
        {"gamma": gamma, "n0": n0, "eps": frac_str(eff),
         "threshold": frac_str(threshold), "n": n_loc},
        True, "exact"))
    if Fraction(n_loc) < threshold:
        return ReductionCertificate(
            "base_case", profile, None, None, tuple(checks),
            halt=HaltInfo("below_threshold", ceil_frac(threshold),
                          {"gamma": gamma, "n0": n0}),
            shortfalls=tuple(shortfalls), notes=tuple(notes),
            seed=params.seed)

    wsize = ceil_frac(eff * n_loc)
    window = VertexSet(region.universe, mask_of(region.members()[:wsize]))
    notes.append(f"window holds the first {len(window)} region vertices")

    clique = None
    if unrestricted:
        g = c.union_graph(unrestricted, window.mask)
        clique = find_clique(g, gamma, within=window.mask)
    if clique is not None:
        cliq = VertexSet(region.universe, mask_of(clique))
        cl_colors = sorted({c.color_of(u, v)
                            for u, v in itertools.combinations(
                                sorted(clique), 2)})
        found = None
        for size in range(1, min(q, len(cl_colors)) + 1):
            for combo in itertools.combinations(cl_colors, size):
                chi = chromatic_number(c.union_graph(combo, cliq.mask),
                                       within=cliq.mask)
                if chi >= p_target:
                    found = (combo, chi)
                    break
            if found:
                break
        if found is None:
            raise PreconditionViolation(
                f"a {gamma}-clique in the unrestricted union carries no "
                f"union of at most {q} colors with chromatic number "
                f"{p_target}; the declared gamma undershoots the true "
                f"Ramsey value")
        combo, chi = found
        checks.append(GuaranteeCheck(
            "chromatic_at_least",
            {"label": "base_clique_union", "colors": list(combo),
             "region": vset_payload(cliq), "bound": p_target, "chi": chi},
            True, "exact"))
        return ReductionCertificate(
            "base_case", profile, None, None, tuple(checks),
            violation_witness=ViolationWitness(tuple(combo), cliq, chi),
            shortfalls=tuple(shortfalls), notes=tuple(notes),
            seed=params.seed)
    if unrestricted:
        notes.append(f"no {gamma}-clique in the unrestricted union "
                     f"inside the window")

    restricted = sorted(profile.restricted_colors())
    if not restricted:
        notes.append("no_restricted_colors")
        return ReductionCertificate(
            "base_case", profile, None, None, tuple(checks),
            halt=HaltInfo("inconclusive", ceil_frac(threshold),
                          {"gamma": gamma}),
            shortfalls=tuple(shortfalls), notes=tuple(notes),
            seed=params.seed)

    wedges = len(window) * (len(window) - 1) // 2
    restricted_edges = sum(c.class_edge_count(col, window.mask)
                           for col in restricted)
    _count_check("window_restricted_edges", restricted_edges,
                 Fraction(wedges, gamma), checks, shortfalls,
                 "turan_density_short")
    ordered = sorted(restricted,
                     key=lambda col: (-c.class_edge_count(col, window.mask),
                                      col))
    _count_check("densest_restricted",
                 c.class_edge_count(ordered[0], window.mask),
                 Fraction(wedges, gamma * len(restricted)),
                 checks, shortfalls, "turan_density_short")
    for col in ordered:
        x = profile.x_of(col)
        lo = max(1, ceil_frac(x * n_loc))
        hi = min(floor_frac(eff * n_loc), len(window) // 2)
        if hi < lo:
            continue
        res = find_dense_pair_sized(
            c.class_graph(col), eff, lo, hi, within=window.mask,
            seed=_child_seed(params.seed, f"base|{col}"))
        if res.pair is not None:
            witness = SparsityWitness(
                color=col, x=x, upper=eff, eps=eff, variant="interval",
                sparse=False, mode=res.pair.mode, window=(lo, hi),
                counterexample=res.pair, vacuous=False)
            raise SparsityViolated(
                f"color {col} has a window dense pair inside the base "
                f"window", witness=witness)
    shortfalls.append("dense_pair_extraction_failed")
    notes.append("no restricted color produced a window dense pair")
    return ReductionCertificate(
        "base_case", profile, None, None, tuple(checks),
        halt=HaltInfo("inconclusive", ceil_frac(threshold),
                      {"gamma": gamma}),
        shortfalls=tuple(shortfalls), notes=tuple(notes),
        seed=params.seed)
