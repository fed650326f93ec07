import math
from fractions import Fraction

import pytest

from chromatic_ramsey.constructions import binary_coloring
from chromatic_ramsey.errors import PreconditionViolation
from chromatic_ramsey.graphs import ColoredCompleteGraph
from chromatic_ramsey.reduction import (EngineParams, ReductionTrace,
                                        run_reduction)
from chromatic_ramsey.serialize import canonical_dumps, parse_frac
from helpers import (matched_halves_coloring, random_coloring,
                     red_block_coloring)

HALF = Fraction(1, 2)


def tiny_params(n, r_min=3):
    return EngineParams.manual(2, 2, n, eps=Fraction(1, 4), z=HALF,
                               beta=HALF, alpha_vec=(Fraction(1, 4),),
                               r_min=r_min)


def red_block_params(r_min=4, seed=0):
    return EngineParams.manual(3, 5, 16, eps=Fraction(2, 5), z=HALF,
                               beta=HALF,
                               alpha_vec=(Fraction(1, 16), Fraction(1, 32)),
                               r_min=r_min, seed=seed)


def test_single_vertex_halts_at_once():
    c = ColoredCompleteGraph.from_edge_colors(1, 2, [])
    trace = run_reduction(c, 2, tiny_params(1))
    assert trace.outcome == "halt"
    assert [ct.step_kind for ct in trace.certificates] == ["base_case"]
    assert trace.final.halt.reason == "size_one"
    assert trace.sizes == (1,)
    assert trace.pq_verified is True
    assert trace.implied_log_bound() == pytest.approx(math.log(2))


def test_single_edge_halts_below_threshold():
    c = ColoredCompleteGraph.from_function(2, 2, lambda u, v: 1)
    trace = run_reduction(c, 2, tiny_params(2))
    assert trace.outcome == "halt"
    assert [ct.step_kind for ct in trace.certificates] == ["base_case"]
    halt = trace.final.halt
    # one unrestricted color, so gamma = 4 directly: threshold 12 / (1/4)
    assert halt.reason == "below_threshold" and halt.n_bound == 48
    assert trace.sizes == (2,)
    assert trace.pq_verified is True
    assert trace.implied_log_bound() == pytest.approx(math.log(48))


def test_mismatched_q_is_refused():
    c = ColoredCompleteGraph.from_function(2, 2, lambda u, v: 1)
    with pytest.raises(PreconditionViolation):
        run_reduction(c, 3, tiny_params(2))


def test_invalid_input_becomes_a_violation_certificate():
    trace = run_reduction(binary_coloring(4), 3, red_block_params())
    assert trace.outcome == "violation"
    assert [ct.step_kind for ct in trace.certificates] == [
        "precondition_violation"]
    assert trace.pq_verified is False
    assert trace.witness.colors == (1, 2, 3)
    assert trace.witness.chi == 8
    assert len(trace.witness.within) == 16
    cert = trace.certificates[0]
    assert cert.halt is None and cert.surviving_set is None
    (check,) = cert.guarantee_checks
    assert check.claim == "chromatic_at_least" and check.passed
    assert trace.implied_log_bound() is None


def test_unflagged_run_catches_the_red_block():
    trace = run_reduction(red_block_coloring(), 3, red_block_params())
    assert trace.outcome == "violation"
    assert trace.pq_verified is False
    assert trace.witness.colors == (1, 2, 3)
    assert trace.witness.chi == 8


def test_flagged_run_skips_the_upfront_check():
    params = EngineParams.manual(3, 4, 16, eps=Fraction(1, 4), z=HALF,
                                 beta=HALF,
                                 alpha_vec=(Fraction(1, 16), Fraction(1, 32)),
                                 r_min=4)
    trace = run_reduction(binary_coloring(4), 3, params,
                          expect_violation=True)
    assert trace.pq_verified is None
    assert trace.expect_violation is True
    # at eps = 1/4 each color's family covers its whole side, so every
    # case-1 leftover is empty: a genuine stall, recorded not raised
    assert trace.outcome == "stalled"
    assert trace.stalled and trace.certificates == ()
    assert trace.final is None
    assert trace.sizes == (16,)
    assert trace.implied_log_bound() is None
    round_trip = ReductionTrace.from_payload(trace.payload())
    assert canonical_dumps(round_trip.payload()) == canonical_dumps(
        trace.payload())


def test_flagged_q3_run_descends_to_the_base_case():
    c = red_block_coloring()
    trace = run_reduction(c, 3, red_block_params(), expect_violation=True)
    assert trace.outcome == "halt"
    assert [ct.step_kind for ct in trace.certificates] == [
        "q3_case1", "q3_case1", "base_case"]
    assert trace.sizes == (16, 4, 2)
    assert trace.pq_verified is None
    r_chain = [ct.input_profile.r_vec[0] for ct in trace.certificates]
    assert r_chain == [5, 4, 3]
    halt = trace.final.halt
    # three unrestricted colors left: gamma = 8, so 56 / (2/5)^2 = 350
    assert halt.reason == "below_threshold" and halt.n_bound == 350
    assert any(note.startswith("gamma 8 direct")
               for note in trace.final.notes)


def test_q2_run_descends_to_a_point():
    c = matched_halves_coloring()
    params = EngineParams.manual(2, 15, 16, eps=Fraction(1, 8), z=HALF,
                                 beta=HALF, alpha_vec=(Fraction(1, 64),),
                                 r_min=3)
    trace = run_reduction(c, 2, params)
    assert trace.outcome == "halt"
    assert [ct.step_kind for ct in trace.certificates] == [
        "balanced", "balanced", "base_case"]
    assert trace.sizes == (16, 8, 1)
    assert trace.pq_verified is True
    assert trace.final.halt.reason == "size_one"
    chain = [ct.input_profile.r_vec[0] for ct in trace.certificates]
    assert chain == [15, 13, 9]

    # the implied bound is exactly the halt bound chained through the
    # declared surviving fractions, evaluated in log space
    expected = math.log(trace.final.halt.n_bound)
    for cert in trace.certificates:
        for check in cert.guarantee_checks:
            if (check.claim == "size_at_least"
                    and check.detail["label"].endswith("_surviving")):
                frac = parse_frac(check.detail["fraction"])
                expected -= math.log(float(frac))
    assert trace.implied_log_bound() == pytest.approx(expected)
    assert trace.implied_log_bound() > math.log(2)


def test_repeat_runs_are_byte_identical():
    c = matched_halves_coloring()
    params = EngineParams.manual(2, 15, 16, eps=Fraction(1, 8), z=HALF,
                                 beta=HALF, alpha_vec=(Fraction(1, 64),),
                                 r_min=3)
    first = run_reduction(c, 2, params)
    second = run_reduction(c, 2, params)
    assert canonical_dumps(first.payload()) == canonical_dumps(
        second.payload())
    round_trip = ReductionTrace.from_payload(first.payload())
    assert canonical_dumps(round_trip.payload()) == canonical_dumps(
        first.payload())


def test_verified_random_input_halts():
    # random_coloring(20, 5, 1) happens to be chromatic-(8, 4); the run
    # verifies that up front and stops at the base case with the product
    # bound standing in for the exact gamma
    c = random_coloring(20, 5, 1)
    params = EngineParams.manual(3, 5, 20, eps=HALF, z=HALF, beta=HALF,
                                 alpha_vec=(Fraction(1, 16), Fraction(1, 32)))
    trace = run_reduction(c, 3, params)
    assert trace.pq_verified is True
    assert trace.outcome == "halt"
    assert [ct.step_kind for ct in trace.certificates] == ["base_case"]
    halt = trace.final.halt
    assert halt.reason == "below_threshold" and halt.n_bound == 9800
    assert any("product bound" in note for note in trace.final.notes)
