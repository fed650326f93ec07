from fractions import Fraction

import pytest

from chromatic_ramsey.constructions import binary_coloring
from chromatic_ramsey.errors import CertificateInvalid, PreconditionViolation
from chromatic_ramsey.graphs import VertexSet
from chromatic_ramsey.reduction.certificates import (GuaranteeCheck, HaltInfo,
                                                     ReductionCertificate,
                                                     ViolationWitness)
from chromatic_ramsey.reduction.levels import build_level_sets
from chromatic_ramsey.reduction.params import EngineParams
from chromatic_ramsey.reduction.profiles import RestrictionProfile
from chromatic_ramsey.serialize import canonical_dumps


def sample_profile():
    return RestrictionProfile.initial(3, (1, 2, 3, 4), Fraction(2, 5))


def passing_check():
    return GuaranteeCheck("count_at_least",
                          {"label": "colors", "value": 4, "bound": 2}, True)


def test_check_validation():
    with pytest.raises(PreconditionViolation):
        GuaranteeCheck("made_up_claim", {}, True)
    with pytest.raises(PreconditionViolation):
        GuaranteeCheck("zero_edges", {}, True, mode="vibes")
    with pytest.raises(PreconditionViolation):
        HaltInfo("because", 5)


def test_exact_check_must_pass_at_emission():
    bad = GuaranteeCheck("zero_edges", {"region": None, "color": 3}, False)
    with pytest.raises(CertificateInvalid):
        ReductionCertificate(step_kind="balanced",
                             input_profile=sample_profile(),
                             output_profile=None, surviving_set=None,
                             guarantee_checks=(bad,),
                             halt=HaltInfo("inconclusive", 1))


def test_recorded_check_may_fail():
    missed = GuaranteeCheck("intersect_bound", {"met": False}, False,
                            mode="recorded")
    cert = ReductionCertificate(step_kind="base_case",
                                input_profile=sample_profile(),
                                output_profile=None, surviving_set=None,
                                guarantee_checks=(missed,),
                                shortfalls=("intersect_bound_unmet",),
                                halt=HaltInfo("below_threshold", 12))
    assert not cert.descends
    assert cert.checks_by_claim("intersect_bound") == (missed,)


def test_violation_and_halt_requirements():
    with pytest.raises(CertificateInvalid):
        ReductionCertificate(step_kind="precondition_violation",
                             input_profile=sample_profile(),
                             output_profile=None, surviving_set=None,
                             guarantee_checks=())
    with pytest.raises(CertificateInvalid):
        ReductionCertificate(step_kind="base_case",
                             input_profile=sample_profile(),
                             output_profile=None, surviving_set=None,
                             guarantee_checks=())
    with pytest.raises(PreconditionViolation):
        ReductionCertificate(step_kind="lemma_unknown",
                             input_profile=sample_profile(),
                             output_profile=None, surviving_set=None,
                             guarantee_checks=())


def test_certificate_payload_roundtrip_is_byte_stable():
    c = binary_coloring(4)
    params = EngineParams.manual(3, 4, 16, eps=Fraction(2, 5),
                                 z=Fraction(1, 2), beta=Fraction(1, 2),
                                 alpha_vec=(Fraction(1, 16), Fraction(1, 32)))
    structure = build_level_sets(c, (1, 2), params)
    witness = ViolationWitness(colors=(1, 2, 3),
                               within=VertexSet.full(16), chi=8)
    cert = ReductionCertificate(
        step_kind="precondition_violation",
        input_profile=sample_profile(),
        output_profile=sample_profile(),
        surviving_set=VertexSet.from_iterable(16, range(8)),
        guarantee_checks=(passing_check(),),
        violation_witness=witness,
        shortfalls=("size_bound_missed",),
        floors=("alpha_1_window",),
        notes=("desk-scale run",),
        halt=HaltInfo("inconclusive", 3, {"why": "example"}),
        seed=11,
        level_structure=structure,
    )
    data = cert.payload()
    again = ReductionCertificate.from_payload(data)
    assert again == cert
    assert canonical_dumps(data) == canonical_dumps(again.payload())
