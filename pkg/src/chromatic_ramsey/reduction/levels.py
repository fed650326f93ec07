"""Towers of nested dense pairs and the shattering bookkeeping around them.

Level 1 is one dense pair in the densest color of the sequence.  Each
deeper level is built inside every set of the previous one: a maximal
disjoint family of dense pairs in the next color, with part sizes in the
window [alpha_m * |V|, eps^(q-1) * |V|], trimmed so the family volume
stays below 2^(q+3) * eps^(q-1) * |V|.  A set is properly shattered by a
color when a subfamily's volume can land in the closed window
[2^(q+2) * eps * |V|, 2^(q+3) * eps * |V|]; sets that cannot reach the
lower threshold surrender a large dense-pair-free subset instead.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

from ..dense_pairs import (DensePair, _child_seed, as_fraction, ceil_frac,
                           find_dense_pair_sized, floor_frac)
from ..errors import (ActuallyShattered, NoDensePair, NotDisjoint, NotNested,
                      PreconditionViolation)
from ..graphs import ColoredCompleteGraph, SimpleGraph, VertexSet
from ..serialize import frac_str, parse_frac, vset_from_payload, vset_payload
from .params import EngineParams


@dataclass(frozen=True)
class LevelStructure:
    """A tower of paired vertex sets, two mates per dense pair.

    levels[m] lists the sets of level m+1 in mate order: indices 2j and
    2j+1 form the j-th pair.  parents[m][i] is the index of set i's parent
    one level up (-1 at the top level).  pair_modes[m][j] records whether
    the j-th pair's denseness was decided exactly or by sampling.
    """

    universe: int
    within: VertexSet
    colors: tuple[int, ...]
    pair_eps: Fraction
    levels: tuple[tuple[VertexSet, ...], ...]
    parents: tuple[tuple[int, ...], ...]
    pair_modes: tuple[tuple[str, ...], ...]

    def __post_init__(self) -> None:
        if len(self.levels) != len(self.colors):
            raise PreconditionViolation("one level per color")
        if len(self.parents) != len(self.levels):
            raise PreconditionViolation("parent table must match levels")
        if len(self.pair_modes) != len(self.levels):
            raise PreconditionViolation("pair_modes must match levels")
        for m, level in enumerate(self.levels):
            if len(level) % 2:
                raise PreconditionViolation("levels hold whole pairs")
            if len(self.pair_modes[m]) != len(level) // 2:
                raise PreconditionViolation("one mode per pair")
            if len(self.parents[m]) != len(level):
                raise PreconditionViolation("one parent index per set")
            above = len(self.levels[m - 1]) if m else 0
            for i, v in enumerate(level):
                if not v.issubset(self.within):
                    raise NotNested("level set escapes the host region")
                p = self.parents[m][i]
                if m == 0:
                    if p != -1:
                        raise PreconditionViolation("top level has no parents")
                elif not 0 <= p < above:
                    raise PreconditionViolation("parent index out of range")
                elif not v.issubset(self.levels[m - 1][p]):
                    raise NotNested("child escapes its parent")
            taken = 0
            for v in level:
                if taken & v.mask:
                    raise NotDisjoint("level sets overlap")
                taken |= v.mask

    @property
    def depth(self) -> int:
        return len(self.levels)

    def level(self, m: int) -> tuple[VertexSet, ...]:
        """Sets of level m, 1-based."""
        return self.levels[m - 1]

    def vol(self, m: int) -> int:
        return sum(len(v) for v in self.level(m))

    def pair_count(self, m: int) -> int:
        return len(self.level(m)) // 2

    def mates(self, m: int, j: int) -> tuple[VertexSet, VertexSet]:
        level = self.level(m)
        return level[2 * j], level[2 * j + 1]

    def children_of(self, m: int, i: int) -> tuple[int, ...]:
        """Indices at level m+1 whose parent is set i of level m."""
        if m >= self.depth:
            return ()
        return tuple(j for j, p in enumerate(self.parents[m]) if p == i)

    def child_vol(self, m: int, i: int) -> int:
        below = self.level(m + 1)
        return sum(len(below[j]) for j in self.children_of(m, i))

    def eq1_report(self, eps: Fraction | str | int,
                   q: int) -> list[tuple[int, int, Fraction, bool]]:
        """Per consecutive level pair: (vol_m, vol_{m+1}, cap, within cap)."""
        eps = as_fraction(eps)
        out = []
        for m in range(1, self.depth):
            vol_hi = self.vol(m)
            vol_lo = self.vol(m + 1)
            cap = Fraction(2 ** (q + 3)) * eps * vol_hi
            out.append((vol_hi, vol_lo, cap, Fraction(vol_lo) <= cap))
        return out

    def payload(self) -> dict[str, Any]:
        return {
            "universe": self.universe,
            "within": vset_payload(self.within),
            "colors": list(self.colors),
            "pair_eps": frac_str(self.pair_eps),
            "levels": [[vset_payload(v) for v in level]
                       for level in self.levels],
            "parents": [list(row) for row in self.parents],
            "pair_modes": [list(row) for row in self.pair_modes],
        }

    @classmethod
    def from_payload(cls, data: Mapping[str, Any]) -> "LevelStructure":
        return cls(
            universe=int(data["universe"]),
            within=vset_from_payload(data["within"]),
            colors=tuple(int(c) for c in data["colors"]),
            pair_eps=parse_frac(data["pair_eps"]),
            levels=tuple(tuple(vset_from_payload(v) for v in level)
                         for level in data["levels"]),
            parents=tuple(tuple(int(p) for p in row)
                          for row in data["parents"]),
            pair_modes=tuple(tuple(str(s) for s in row)
                             for row in data["pair_modes"]),
        )


def max_disjoint_family(g: SimpleGraph, region: VertexSet, eps: Fraction,
                        lo: int, hi: int, *, seed: int | str = 0,
                        tag: str = "fam") -> list[DensePair]:
    """Greedy maximal family of disjoint eps-dense pairs, largest first.

    Part sizes are taken from [lo, hi] regardless of how much of the region
    remains, so maximality is relative to the original window.  Extraction
    is deterministic for a fixed seed.
    """
    out: list[DensePair] = []
    remaining = region
    step = 0
    while True:
        h = min(hi, len(remaining) // 2)
        if h < lo:
            break
        found = None
        for s in range(h, lo - 1, -1):
            res = find_dense_pair_sized(g, eps, s, s, within=remaining.mask,
                                        seed=_child_seed(seed, f"{tag}|{step}|{s}"))
            if res.pair is not None:
                found = res.pair
                break
        if found is None:
            break
        out.append(found)
        used = VertexSet(region.universe, found.union_mask())
        remaining = remaining.minus(used)
        step += 1
    return out


def family_volume(pairs: Iterable[DensePair]) -> int:
    return sum(len(p.v1) + len(p.v2) for p in pairs)


def trim_family(pairs: list[DensePair], cap: Fraction) -> list[DensePair]:
    """Drop pairs from the end (the smallest) until the volume is within cap."""
    kept = list(pairs)
    while kept and Fraction(family_volume(kept)) > cap:
        kept.pop()
    return kept


def build_level_sets(c: ColoredCompleteGraph, colors: Sequence[int],
                     params: EngineParams, *,
                     within: int | None = None) -> LevelStructure:
    """Build the tower for a color sequence, one level per color.

    Level 1 is the largest dense pair of the first color found at or above
    part size alpha_0 * n.  Deeper levels use the per-parent window
    [alpha_m * |V|, eps^(q-1) * |V|] and are trimmed to keep each family's
    volume at most 2^(q+3) * eps^(q-1) * |V|.
    """
    colors = tuple(colors)
    if not colors:
        raise NoDensePair("empty color sequence has no densest color")
    universe = within if within is not None else (1 << c.n) - 1
    region = VertexSet(c.n, universe)
    n_local = len(region)
    eps_eff = params.eps_eff
    seed = params.seed

    g = c.class_graph(colors[0])
    if g.edge_count(universe) == 0:
        raise NoDensePair(f"color {colors[0]} has no edges in the region")
    lo0 = max(1, ceil_frac(params.alpha_vec[0] * n_local))
    top_pair = None
    for s in range(n_local // 2, lo0 - 1, -1):
        res = find_dense_pair_sized(g, eps_eff, s, s, within=universe,
                                    seed=_child_seed(seed, f"top|{colors[0]}|{s}"))
        if res.pair is not None:
            top_pair = res.pair
            break
    if top_pair is None:
        raise NoDensePair(
            f"color {colors[0]} has no {eps_eff}-dense pair above alpha_0")

    levels: list[tuple[VertexSet, ...]] = [(top_pair.v1, top_pair.v2)]
    parents: list[tuple[int, ...]] = [(-1, -1)]
    modes: list[tuple[str, ...]] = [(top_pair.mode,)]

    for m, color in enumerate(colors[1:], start=1):
        if m >= len(params.alpha_vec):
            raise PreconditionViolation(
                "color sequence deeper than the alpha ladder")
        g_m = c.class_graph(color)
        alpha = params.alpha_vec[m]
        new_sets: list[VertexSet] = []
        new_parents: list[int] = []
        new_modes: list[str] = []
        for pi, parent in enumerate(levels[m - 1]):
            size = len(parent)
            lo = max(1, ceil_frac(alpha * size))
            hi = floor_frac(eps_eff * size)
            family = max_disjoint_family(
                g_m, parent, eps_eff, lo, hi, seed=seed,
                tag=f"lvl|{m}|{color}|{parent.mask}")
            cap = Fraction(2 ** (params.q + 3)) * eps_eff * size
            family = trim_family(family, cap)
            for pair in family:
                new_sets.extend((pair.v1, pair.v2))
                new_parents.extend((pi, pi))
                new_modes.append(pair.mode)
        levels.append(tuple(new_sets))
        parents.append(tuple(new_parents))
        modes.append(tuple(new_modes))

    return LevelStructure(universe=c.n, within=region, colors=colors,
                          pair_eps=eps_eff, levels=tuple(levels),
                          parents=tuple(parents), pair_modes=tuple(modes))


def is_properly_shattered(V: VertexSet, children: Iterable[VertexSet],
                          eps: Fraction | str | int, q: int) -> bool:
    """Is Vol(children) inside the closed window [2^(q+2), 2^(q+3)] * eps * |V|?"""
    eps = as_fraction(eps)
    taken = 0
    vol = 0
    for ch in children:
        if not ch.issubset(V):
            raise NotNested("child escapes its parent")
        if taken & ch.mask:
            raise NotDisjoint("children overlap")
        taken |= ch.mask
        vol += len(ch)
    size = len(V)
    lo = Fraction(2 ** (q + 2)) * eps * size
    hi = Fraction(2 ** (q + 3)) * eps * size
    return lo <= Fraction(vol) <= hi


def nonshattered_subset(V: VertexSet, c: ColoredCompleteGraph, color: int,
                        params: EngineParams, level: int) -> VertexSet:
    """Large subset of V with no window-sized dense pair in the color.

    Removes a greedy maximal family whose volume sits below the lower
    shattering threshold; if the family is in fact voluminous enough to be
    trimmed into the shattering window, the set was properly shattered
    after all and ActuallyShattered is raised.
    """
    if not 0 <= level < len(params.alpha_vec):
        raise PreconditionViolation(
            f"level {level} outside the alpha ladder")
    eps_eff = params.eps_eff
    size = len(V)
    lo = max(1, ceil_frac(params.alpha_vec[level] * size))
    hi = floor_frac(eps_eff * size)
    g = c.class_graph(color)
    family = max_disjoint_family(g, V, eps_eff, lo, hi, seed=params.seed,
                                 tag=f"nsub|{level}|{color}|{V.mask}")
    vol = family_volume(family)
    threshold = Fraction(2 ** (params.q + 2)) * eps_eff * size
    if Fraction(vol) >= threshold:
        raise ActuallyShattered(
            f"maximal family volume {vol} reaches the shattering "
            f"threshold {threshold} for color {color}")
    out = V
    for pair in family:
        out = out.minus(VertexSet(V.universe, pair.union_mask()))
    return out


@dataclass(frozen=True)
class BalanceReport:
    """Measurement of how much of a level a candidate color fails to shatter."""

    color: int
    level: int
    set_vols: tuple[int, ...]
    nonshattered: tuple[int, ...]
    n_vol: int
    l_vol: int
    threshold: Fraction
    ok: bool


def well_balance_report(c: ColoredCompleteGraph, structure: LevelStructure,
                        color: int, params: EngineParams) -> BalanceReport:
    """Would appending this color keep the tower well-balanced?

    For each deepest-level set, measures the maximal disjoint dense-pair
    family of the candidate color in the child window; the set counts as
    non-shattered when that volume cannot reach the lower shattering
    threshold.  ok means Vol(N) <= 2^(-4(q-1)) * Vol(L).
    """
    k = structure.depth
    if k >= len(params.alpha_vec):
        raise PreconditionViolation("tower already at full depth")
    eps_eff = params.eps_eff
    g = c.class_graph(color)
    vols: list[int] = []
    bad: list[int] = []
    n_vol = 0
    l_vol = 0
    for idx, V in enumerate(structure.level(k)):
        size = len(V)
        l_vol += size
        lo = max(1, ceil_frac(params.alpha_vec[k] * size))
        hi = floor_frac(eps_eff * size)
        family = max_disjoint_family(g, V, eps_eff, lo, hi, seed=params.seed,
                                     tag=f"nsub|{k}|{color}|{V.mask}")
        vol = family_volume(family)
        vols.append(vol)
        if Fraction(vol) < Fraction(2 ** (params.q + 2)) * eps_eff * size:
            bad.append(idx)
            n_vol += size
    threshold = Fraction(1, 2 ** (4 * (params.q - 1)))
    return BalanceReport(color=color, level=k, set_vols=tuple(vols),
                         nonshattered=tuple(bad), n_vol=n_vol, l_vol=l_vol,
                         threshold=threshold,
                         ok=Fraction(n_vol) <= threshold * l_vol)
