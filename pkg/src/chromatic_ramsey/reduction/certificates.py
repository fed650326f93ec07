"""Machine-checkable certificates emitted by every reduction step.

A certificate packages what a step claims (the output profile and the
surviving set) together with the evidence for each claim.  Checks carry a
mode: "exact" means the claim was verified outright at emission time and
a failed exact check is a bug, so construction refuses it; "sampled"
means heuristic evidence; "recorded" means the numbers were measured and
written down without a mathematical guarantee, which is how desk-scale
runs document the gap between themselves and the asymptotic targets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

from ..errors import CertificateInvalid, PreconditionViolation
from ..graphs import VertexSet
from ..serialize import vset_from_payload, vset_payload
from .levels import LevelStructure
from .profiles import RestrictionProfile

STEP_KINDS = ("q3_case1", "q3_case2", "not_balanced", "balanced",
              "base_case", "precondition_violation")

CLAIM_KINDS = ("size_at_least", "sets_disjoint", "subset_of", "dense_pair",
               "no_dense_pair", "zero_edges", "proper_coloring",
               "chromatic_at_least", "count_at_least", "profile_arithmetic",
               "halt_threshold", "intersect_bound", "eq1_volume",
               "shattering_window", "sparse_color")

CHECK_MODES = ("exact", "sampled", "recorded")

HALT_REASONS = ("below_threshold", "size_one", "inconclusive")


@dataclass(frozen=True)
class GuaranteeCheck:
    """One verifiable claim: what was asserted, the evidence, the verdict."""

    claim: str
    detail: dict[str, Any]
    passed: bool
    mode: str = "exact"

    def __post_init__(self) -> None:
        if self.claim not in CLAIM_KINDS:
            raise PreconditionViolation(f"unknown claim kind {self.claim!r}")
        if self.mode not in CHECK_MODES:
            raise PreconditionViolation(f"unknown check mode {self.mode!r}")

    def payload(self) -> dict[str, Any]:
        return {"claim": self.claim, "detail": self.detail,
                "passed": self.passed, "mode": self.mode}

    @classmethod
    def from_payload(cls, data: Mapping[str, Any]) -> "GuaranteeCheck":
        return cls(claim=str(data["claim"]), detail=dict(data["detail"]),
                   passed=bool(data["passed"]), mode=str(data["mode"]))


@dataclass(frozen=True)
class ViolationWitness:
    """q colors whose union is 2^q-chromatic: the Ramsey conclusion itself."""

    colors: tuple[int, ...]
    within: VertexSet
    chi: int

    def payload(self) -> dict[str, Any]:
        return {"colors": list(self.colors),
                "within": vset_payload(self.within), "chi": self.chi}

    @classmethod
    def from_payload(cls, data: Mapping[str, Any]) -> "ViolationWitness":
        return cls(colors=tuple(int(c) for c in data["colors"]),
                   within=vset_from_payload(data["within"]),
                   chi=int(data["chi"]))


@dataclass(frozen=True)
class HaltInfo:
    """Why the recursion stopped and the size bound it certifies."""

    reason: str
    n_bound: int
    detail: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.reason not in HALT_REASONS:
            raise PreconditionViolation(f"unknown halt reason {self.reason!r}")

    def payload(self) -> dict[str, Any]:
        return {"reason": self.reason, "n_bound": self.n_bound,
                "detail": self.detail}

    @classmethod
    def from_payload(cls, data: Mapping[str, Any]) -> "HaltInfo":
        return cls(reason=str(data["reason"]), n_bound=int(data["n_bound"]),
                   detail=dict(data["detail"]))


@dataclass(frozen=True)
class ReductionCertificate:
    """Everything one step claims, plus the evidence, in replayable form.

    surviving_set is the region the recursion descends into (None when the
    step halts or reports a violation).  floors list thresholds that
    bottomed out at 1; shortfalls list nominal targets the desk-scale run
    measured but could not meet.  Exact-mode checks must all have passed,
    otherwise construction raises CertificateInvalid.
    """

    step_kind: str
    input_profile: RestrictionProfile
    output_profile: RestrictionProfile | None
    surviving_set: VertexSet | None
    guarantee_checks: tuple[GuaranteeCheck, ...]
    violation_witness: ViolationWitness | None = None
    shortfalls: tuple[str, ...] = ()
    floors: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()
    halt: HaltInfo | None = None
    seed: int = 0
    level_structure: LevelStructure | None = None

    def __post_init__(self) -> None:
        if self.step_kind not in STEP_KINDS:
            raise PreconditionViolation(
                f"unknown step kind {self.step_kind!r}")
        object.__setattr__(self, "guarantee_checks",
                           tuple(self.guarantee_checks))
        object.__setattr__(self, "shortfalls", tuple(self.shortfalls))
        object.__setattr__(self, "floors", tuple(self.floors))
        object.__setattr__(self, "notes", tuple(self.notes))
        for chk in self.guarantee_checks:
            if chk.mode == "exact" and not chk.passed:
                raise CertificateInvalid(
                    f"exact check {chk.claim!r} failed at emission")
        if self.step_kind == "precondition_violation":
            if self.violation_witness is None:
                raise CertificateInvalid(
                    "precondition_violation requires a witness")
        if self.step_kind == "base_case":
            if self.halt is None and self.violation_witness is None:
                raise CertificateInvalid(
                    "base_case must either halt or produce a witness")

    def checks_by_claim(self, claim: str) -> tuple[GuaranteeCheck, ...]:
        return tuple(c for c in self.guarantee_checks if c.claim == claim)

    @property
    def descends(self) -> bool:
        return (self.output_profile is not None
                and self.surviving_set is not None)

    def payload(self) -> dict[str, Any]:
        return {
            "step_kind": self.step_kind,
            "input_profile": self.input_profile.payload(),
            "output_profile": (None if self.output_profile is None
                               else self.output_profile.payload()),
            "surviving_set": (None if self.surviving_set is None
                              else vset_payload(self.surviving_set)),
            "guarantee_checks": [c.payload() for c in self.guarantee_checks],
            "violation_witness": (None if self.violation_witness is None
                                  else self.violation_witness.payload()),
            "shortfalls": list(self.shortfalls),
            "floors": list(self.floors),
            "notes": list(self.notes),
            "halt": None if self.halt is None else self.halt.payload(),
            "seed": self.seed,
            "level_structure": (None if self.level_structure is None
                                else self.level_structure.payload()),
        }

    @classmethod
    def from_payload(cls, data: Mapping[str, Any]) -> "ReductionCertificate":
        return cls(
            step_kind=str(data["step_kind"]),
            input_profile=RestrictionProfile.from_payload(
                data["input_profile"]),
            output_profile=(None if data["output_profile"] is None else
                            RestrictionProfile.from_payload(
                                data["output_profile"])),
            surviving_set=(None if data["surviving_set"] is None
                           else vset_from_payload(data["surviving_set"])),
            guarantee_checks=tuple(GuaranteeCheck.from_payload(c)
                                   for c in data["guarantee_checks"]),
            violation_witness=(None if data["violation_witness"] is None else
                               ViolationWitness.from_payload(
                                   data["violation_witness"])),
            shortfalls=tuple(str(s) for s in data["shortfalls"]),
            floors=tuple(str(s) for s in data["floors"]),
            notes=tuple(str(s) for s in data["notes"]),
            halt=(None if data["halt"] is None
                  else HaltInfo.from_payload(data["halt"])),
            seed=int(data["seed"]),
            level_structure=(None if data["level_structure"] is None else
                             LevelStructure.from_payload(
                                 data["level_structure"])),
        )
