"""Restricted-coloring profiles: which colors carry which sparsity claims.

A profile splits the colors of an edge coloring into q-1 classes.  Class
C_1 is unrestricted (x_1 = 1 by convention); every color in a later class
C_i is claimed to be (x_i, eps^(q-1))-sparse in the interval sense, i.e.
its class graph has no eps^(q-1)-dense pair whose parts fall in the size
window [x_i * n, eps^(q-1) * n].  The cumulative counts r_i = |C_1| + ...
+ |C_i| are what the recursion's bookkeeping tracks.

`classify_colors` re-verifies every claim against an actual coloring and
either returns the annotated profile or raises with the counterexample.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Iterable, Mapping

from ..dense_pairs import SparsityWitness, as_fraction, is_sparse_color
from ..errors import (EpsilonOutOfRange, PreconditionViolation,
                      SparsityViolated)
from ..graphs import ColoredCompleteGraph
from ..serialize import frac_str, parse_frac


@dataclass(frozen=True)
class RestrictionProfile:
    """Sparsity bookkeeping for one stage of the reduction.

    r_vec holds the cumulative class sizes (r_1, ..., r_{q-1}); x_vec the
    per-class window floors; eps is the base density parameter, of which
    the machinery uses eps^(q-1) throughout.
    """

    q: int
    r_vec: tuple[int, ...]
    x_vec: tuple[Fraction, ...]
    eps: Fraction
    color_partition: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        if self.q < 2:
            raise PreconditionViolation("q must be at least 2")
        object.__setattr__(self, "r_vec", tuple(int(r) for r in self.r_vec))
        object.__setattr__(self, "x_vec",
                           tuple(as_fraction(x) for x in self.x_vec))
        object.__setattr__(self, "eps", as_fraction(self.eps))
        object.__setattr__(self, "color_partition",
                           tuple(frozenset(cls_) for cls_ in self.color_partition))
        want = self.q - 1
        if not (len(self.r_vec) == len(self.x_vec)
                == len(self.color_partition) == want):
            raise PreconditionViolation(
                f"profile vectors must all have length q-1 = {want}")
        if not 0 < self.eps < 1:
            raise EpsilonOutOfRange("eps must lie strictly between 0 and 1")
        if self.x_vec[0] != 1:
            raise PreconditionViolation("x_1 = 1 by convention")
        for x in self.x_vec:
            if not 0 <= x <= 1:
                raise PreconditionViolation("each x_i must lie in [0, 1]")
        prev = 0
        for i, r in enumerate(self.r_vec):
            if r < prev:
                raise PreconditionViolation("r_vec must be non-decreasing")
            if len(self.color_partition[i]) != r - prev:
                raise PreconditionViolation(
                    f"|C_{i + 1}| must equal r_{i + 1} - r_{i}")
            prev = r
        seen: set[int] = set()
        for cls_ in self.color_partition:
            if seen & cls_:
                raise PreconditionViolation("color classes must be disjoint")
            seen |= cls_

    @property
    def eps_eff(self) -> Fraction:
        return self.eps ** (self.q - 1)

    def colors(self) -> frozenset[int]:
        out: frozenset[int] = frozenset()
        for cls_ in self.color_partition:
            out |= cls_
        return out

    def class_of(self, color: int) -> int:
        """0-based class index of a color."""
        for i, cls_ in enumerate(self.color_partition):
            if color in cls_:
                return i
        raise PreconditionViolation(f"color {color} not in the profile")

    def x_of(self, color: int) -> Fraction:
        return self.x_vec[self.class_of(color)]

    def unrestricted_colors(self) -> frozenset[int]:
        """Colors whose class carries the vacuous x = 1 claim."""
        out: frozenset[int] = frozenset()
        for x, cls_ in zip(self.x_vec, self.color_partition):
            if x == 1:
                out |= cls_
        return out

    def restricted_colors(self) -> frozenset[int]:
        return self.colors() - self.unrestricted_colors()

    @classmethod
    def initial(cls, q: int, colors: Iterable[int],
                eps: Fraction | int | str) -> "RestrictionProfile":
        """Everything in C_1, later classes empty: the recursion's seed."""
        first = frozenset(int(c) for c in colors)
        r = len(first)
        x_vec = [Fraction(1)] + [Fraction(0)] * (q - 2)
        partition = [first] + [frozenset()] * (q - 2)
        return cls(q=q, r_vec=(r,) * (q - 1), x_vec=tuple(x_vec),
                   eps=as_fraction(eps), color_partition=tuple(partition))

    def payload(self) -> dict[str, Any]:
        return {
            "q": self.q,
            "r_vec": list(self.r_vec),
            "x_vec": [frac_str(x) for x in self.x_vec],
            "eps": frac_str(self.eps),
            "color_partition": [sorted(cls_) for cls_ in self.color_partition],
        }

    @classmethod
    def from_payload(cls, data: Mapping[str, Any]) -> "RestrictionProfile":
        return cls(
            q=int(data["q"]),
            r_vec=tuple(int(r) for r in data["r_vec"]),
            x_vec=tuple(parse_frac(x) for x in data["x_vec"]),
            eps=parse_frac(data["eps"]),
            color_partition=tuple(frozenset(int(c) for c in cls_)
                                  for cls_ in data["color_partition"]),
        )


@dataclass(frozen=True)
class VerifiedProfile:
    """A profile whose sparsity claims were all checked against a coloring."""

    profile: RestrictionProfile
    witnesses: dict[int, SparsityWitness]
    exact_colors: tuple[int, ...]
    sampled_colors: tuple[int, ...]

    def mode_of(self, color: int) -> str:
        return self.witnesses[color].mode


def classify_colors(c: ColoredCompleteGraph, profile: RestrictionProfile, *,
                    within: int | None = None, seed: int = 0) -> VerifiedProfile:
    """Re-verify every sparsity claim in the profile on an actual coloring.

    Colors in x = 1 classes produce vacuous witnesses; every other color is
    run through is_sparse_color with its class bound at eps^(q-1).  The
    first failing color aborts with SparsityViolated carrying the witness.
    """
    used = c.used_colors(within)
    declared = profile.colors()
    missing = sorted(set(used) - declared)
    if missing:
        raise PreconditionViolation(
            f"colors {missing} are used but missing from the profile")

    eps_eff = profile.eps_eff
    witnesses: dict[int, SparsityWitness] = {}
    exact: list[int] = []
    sampled: list[int] = []
    for i, cls_ in enumerate(profile.color_partition):
        x_i = profile.x_vec[i]
        for color in sorted(cls_):
            w = is_sparse_color(c, color, x_i, eps_eff, "interval",
                                within=within, seed=seed)
            witnesses[color] = w
            (exact if w.mode == "exact" else sampled).append(color)
            if not w.sparse:
                raise SparsityViolated(
                    f"color {color} violates its ({x_i}, {eps_eff}) "
                    f"interval-sparsity claim", witness=w)
    return VerifiedProfile(profile=profile, witnesses=witnesses,
                           exact_colors=tuple(sorted(exact)),
                           sampled_colors=tuple(sorted(sampled)))
