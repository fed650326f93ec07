from fractions import Fraction

import pytest

from chromatic_ramsey.constructions import binary_coloring
from chromatic_ramsey.errors import (EpsilonOutOfRange, PreconditionViolation,
                                     SparsityViolated)
from chromatic_ramsey.reduction.profiles import (RestrictionProfile,
                                                 classify_colors)


def make_profile(q, r_vec, x_vec, eps, partition):
    return RestrictionProfile(q=q, r_vec=tuple(r_vec), x_vec=tuple(x_vec),
                              eps=eps, color_partition=tuple(
                                  frozenset(p) for p in partition))


def test_initial_profile_shape():
    p = RestrictionProfile.initial(4, [3, 1, 2], Fraction(1, 5))
    assert p.r_vec == (3, 3, 3)
    assert p.x_vec == (1, 0, 0)
    assert p.color_partition == (frozenset({1, 2, 3}), frozenset(), frozenset())
    assert p.eps_eff == Fraction(1, 125)
    assert p.unrestricted_colors() == {1, 2, 3}
    assert p.restricted_colors() == frozenset()


def test_all_colors_unrestricted_verifies_trivially():
    c = binary_coloring(2)
    p = RestrictionProfile.initial(3, c.used_colors(), Fraction(1, 4))
    verified = classify_colors(c, p)
    assert set(verified.witnesses) == {1, 2}
    assert all(w.vacuous for w in verified.witnesses.values())
    assert all(w.sparse for w in verified.witnesses.values())


def test_zero_sparsity_claim_fails_on_any_edge():
    c = binary_coloring(4)
    p = make_profile(3, (3, 4), (Fraction(1), Fraction(0)), Fraction(1, 3),
                     ({1, 2, 3}, {4}))
    with pytest.raises(SparsityViolated) as err:
        classify_colors(c, p)
    w = err.value.witness
    assert w.color == 4 and not w.sparse
    assert w.counterexample is not None
    assert w.counterexample.verify(c.class_graph(4))


def test_matching_color_verified_sparse_in_tight_window():
    # color 4 of binary_coloring(4) is a perfect matching; with eps = 3/8
    # the effective window is [2, 2] and no 2x2 pair is (9/64)-dense
    c = binary_coloring(4)
    p = make_profile(3, (3, 4), (Fraction(1), Fraction(1, 8)), Fraction(3, 8),
                     ({1, 2, 3}, {4}))
    verified = classify_colors(c, p)
    w = verified.witnesses[4]
    assert w.sparse and not w.vacuous
    assert w.window == (2, 2)
    assert w.mode == "exact"
    assert 4 in verified.exact_colors
    assert verified.mode_of(4) == "exact"


def test_partition_must_cover_used_colors():
    c = binary_coloring(3)
    p = make_profile(3, (2, 2), (Fraction(1), Fraction(0)), Fraction(1, 4),
                     ({1, 2}, set()))
    with pytest.raises(PreconditionViolation):
        classify_colors(c, p)


def test_profile_validation():
    with pytest.raises(PreconditionViolation):
        make_profile(3, (2, 1), (Fraction(1), Fraction(0)), Fraction(1, 4),
                     ({1, 2}, set()))
    with pytest.raises(PreconditionViolation):
        make_profile(3, (2, 3), (Fraction(1, 2), Fraction(0)), Fraction(1, 4),
                     ({1, 2}, {3}))
    with pytest.raises(PreconditionViolation):
        make_profile(3, (2, 3), (Fraction(1), Fraction(0)), Fraction(1, 4),
                     ({1, 2}, {2}))
    with pytest.raises(PreconditionViolation):
        make_profile(3, (2, 4), (Fraction(1), Fraction(0)), Fraction(1, 4),
                     ({1, 2}, {3}))
    with pytest.raises(EpsilonOutOfRange):
        make_profile(3, (2, 3), (Fraction(1), Fraction(0)), Fraction(1),
                     ({1, 2}, {3}))
    with pytest.raises(PreconditionViolation):
        make_profile(1, (), (), Fraction(1, 4), ())


def test_profile_lookup_helpers():
    p = make_profile(4, (2, 3, 5), (Fraction(1), Fraction(1, 8), Fraction(0)),
                     Fraction(1, 3), ({1, 2}, {3}, {4, 5}))
    assert p.class_of(3) == 1
    assert p.x_of(5) == 0
    assert p.colors() == {1, 2, 3, 4, 5}
    assert p.unrestricted_colors() == {1, 2}
    assert p.restricted_colors() == {3, 4, 5}
    with pytest.raises(PreconditionViolation):
        p.class_of(9)


def test_profile_payload_roundtrip():
    p = make_profile(4, (2, 3, 5), (Fraction(1), Fraction(1, 8), Fraction(0)),
                     Fraction(2, 7), ({1, 2}, {3}, {4, 5}))
    back = RestrictionProfile.from_payload(p.payload())
    assert back == p
