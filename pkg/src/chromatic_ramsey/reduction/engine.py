"""Top-level recursion: run reduction steps until a halt or a violation.

A run starts from the whole vertex set with every used color unrestricted,
picks the step matching q and the current tower, and descends into each
step's surviving set.  The trace it returns is the machine-checkable
artifact: one certificate per round, the region size at every turn, and
the verdict of the up-front chromatic-(p, q) verification when the input
was small enough to verify outright.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping

from ..chromatic import EXACT_MAX, is_chromatic_pq_coloring
from ..errors import PreconditionViolation, Stalled
from ..graphs import ColoredCompleteGraph, VertexSet
from ..serialize import parse_frac
from .certificates import (GuaranteeCheck, HaltInfo, ReductionCertificate,
                           ViolationWitness)
from .levels import build_level_sets, well_balance_report
from .params import EngineParams
from .profiles import RestrictionProfile
from .steps import (_densest_color, base_case_check, step_balanced,
                    step_not_balanced, step_q3)


@dataclass(frozen=True)
class ReductionTrace:
    """A complete run: certificates in order plus the run-level verdict.

    pq_verified is True or False when the input was small enough for the
    up-front chromatic-(2^q, q+1) check to run, None when it was skipped
    (input too large, or the run was flagged expect_violation).  sizes
    holds the region size at the start of each round, so a strictly
    decreasing tail is the termination argument made explicit.
    """

    q: int
    params: EngineParams
    certificates: tuple[ReductionCertificate, ...]
    sizes: tuple[int, ...]
    pq_verified: bool | None
    expect_violation: bool = False
    stalled: bool = False

    @property
    def final(self) -> ReductionCertificate | None:
        """The last certificate, or None when the first step stalled."""
        return self.certificates[-1] if self.certificates else None

    @property
    def outcome(self) -> str:
        """"violation", "stalled", or "halt"."""
        if any(ct.violation_witness is not None for ct in self.certificates):
            return "violation"
        if self.stalled:
            return "stalled"
        return "halt"

    @property
    def witness(self) -> ViolationWitness | None:
        for ct in self.certificates:
            if ct.violation_witness is not None:
                return ct.violation_witness
        return None

    def implied_log_bound(self) -> float | None:
        """The starting size the run's own claims account for, in log space.

        Each descending step declares the fraction of its region that
        survived; chaining those declarations backwards from the halt
        bound gives log(n0) <= log(n_bound) + sum(-log(fraction)).  The
        sum is evaluated term by term so astronomically small fractions
        never leave log space.  None unless the run ended in a halt.
        """
        final = self.final
        if self.outcome != "halt" or final is None or final.halt is None:
            return None
        halt = final.halt
        total = math.log(max(halt.n_bound, 1))
        for ct in self.certificates:
            for check in ct.guarantee_checks:
                if check.claim != "size_at_least":
                    continue
                label = str(check.detail.get("label", ""))
                if not label.endswith("_surviving"):
                    continue
                frac = parse_frac(check.detail["fraction"])
                if frac > 0:
                    total += math.log(frac.denominator)
                    total -= math.log(frac.numerator)
        return total

    def payload(self) -> dict[str, Any]:
        return {
            "q": self.q,
            "params": self.params.payload(),
            "certificates": [ct.payload() for ct in self.certificates],
            "sizes": list(self.sizes),
            "pq_verified": self.pq_verified,
            "expect_violation": self.expect_violation,
            "stalled": self.stalled,
        }

    @classmethod
    def from_payload(cls, data: Mapping[str, Any]) -> "ReductionTrace":
        pq = data["pq_verified"]
        return cls(
            q=int(data["q"]),
            params=EngineParams.from_payload(data["params"]),
            certificates=tuple(ReductionCertificate.from_payload(ct)
                               for ct in data["certificates"]),
            sizes=tuple(int(s) for s in data["sizes"]),
            pq_verified=None if pq is None else bool(pq),
            expect_violation=bool(data["expect_violation"]),
            stalled=bool(data["stalled"]),
        )


def _tower_step(c: ColoredCompleteGraph, profile: RestrictionProfile,
                params: EngineParams,
                region: VertexSet) -> ReductionCertificate:
    """Grow the deepest well-balanced tower available, then step with it.

    Starts from the densest color's level-one pair and greedily appends
    any color whose balance report stays ok.  A full tower of depth q - 1
    feeds the balanced step; getting stuck earlier feeds the not-balanced
    step, which shrinks the leading classes instead.
    """
    colors = sorted(profile.colors())
    red, _ = _densest_color(c, colors, region)
    chain = [red]
    structure = build_level_sets(c, tuple(chain), params, within=region.mask)
    while structure.depth < params.q - 1:
        extension = None
        for color in colors:
            if color in chain:
                continue
            report = well_balance_report(c, structure, color, params)
            if report.ok:
                extension = color
                break
        if extension is None:
            return step_not_balanced(c, profile, structure, params,
                                     within=region.mask)
        chain.append(extension)
        structure = build_level_sets(c, tuple(chain), params,
                                     within=region.mask)
    return step_balanced(c, profile, structure, params, within=region.mask)


def run_reduction(c: ColoredCompleteGraph, q: int, params: EngineParams, *,
                  expect_violation: bool = False) -> ReductionTrace:
    """Reduce a coloring of a complete graph until it halts or refutes it.

    The input is expected to be a chromatic-(2^q, q+1)-coloring.  Unless
    the run is flagged expect_violation, that is verified outright when
    the graph has at most EXACT_MAX vertices, and a failure is returned
    as a one-certificate trace whose precondition_violation entry carries
    the offending colors.  Flagged runs skip the up-front check and let
    the steps surface a witness organically.

    Every round restricts to the previous step's surviving set, which is
    always strictly smaller, so the loop terminates.  A step that cannot
    make progress at the current degenerate size (it raises Stalled, or
    returns a surviving set that failed to shrink) ends the trace with
    stalled=True rather than looping.  Other errors raised by steps (no
    dense pair above the size floor, sparsity violations) propagate to
    the caller.
    """
    if q != params.q:
        raise PreconditionViolation(
            f"params are tuned for q = {params.q}, the run asked for q = {q}")
    region = VertexSet.full(c.n)
    profile = RestrictionProfile.initial(q, c.used_colors(), params.eps)
    pq_verified: bool | None = None

    if not expect_violation and c.n <= EXACT_MAX:
        verdict = is_chromatic_pq_coloring(c, 2 ** q, q + 1)
        pq_verified = verdict.holds
        if not verdict.holds:
            check = GuaranteeCheck(
                "chromatic_at_least",
                {"label": "input_union",
                 "colors": sorted(verdict.witness_colors),
                 "chi": verdict.witness_chi, "bound": 2 ** q},
                verdict.witness_chi >= 2 ** q, "exact")
            witness = ViolationWitness(tuple(sorted(verdict.witness_colors)),
                                       region, verdict.witness_chi)
            cert = ReductionCertificate(
                "precondition_violation", profile, None, None, (check,),
                violation_witness=witness,
                notes=("input is not a chromatic-(p, q)-coloring",),
                seed=params.seed)
            return ReductionTrace(q, params, (cert,), (c.n,), pq_verified,
                                  expect_violation)

    certificates: list[ReductionCertificate] = []
    sizes: list[int] = []
    stalled = False
    while True:
        n_loc = len(region)
        sizes.append(n_loc)
        if n_loc <= 1:
            certificates.append(ReductionCertificate(
                "base_case", profile, None, None,
                (GuaranteeCheck("halt_threshold",
                                {"label": "size_one", "n": n_loc,
                                 "threshold": "2"}, True, "exact"),),
                notes=("region has at most one vertex",),
                halt=HaltInfo("size_one", 2, {"n": n_loc}),
                seed=params.seed))
            break
        if profile.r_vec[0] < params.r_min:
            certificates.append(base_case_check(c, profile, params,
                                                within=region.mask))
            break
        try:
            if q == 3:
                cert = step_q3(c, profile, params, within=region.mask)
            else:
                cert = _tower_step(c, profile, params, region)
        except Stalled:
            stalled = True
            break
        certificates.append(cert)
        if cert.violation_witness is not None or cert.halt is not None:
            break
        surviving = cert.surviving_set
        if (surviving is None or cert.output_profile is None
                or len(surviving) >= n_loc):
            stalled = True
            break
        region = surviving
        profile = cert.output_profile

    return ReductionTrace(q, params, tuple(certificates), tuple(sizes),
                          pq_verified, expect_violation, stalled)
