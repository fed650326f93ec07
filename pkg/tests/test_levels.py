from fractions import Fraction

import pytest

from chromatic_ramsey.constructions import binary_coloring
from chromatic_ramsey.dense_pairs import find_dense_pair_sized
from chromatic_ramsey.errors import (ActuallyShattered, NoDensePair,
                                     NotDisjoint, NotNested,
                                     PreconditionViolation)
from chromatic_ramsey.graphs import ColoredCompleteGraph, VertexSet
from chromatic_ramsey.reduction.levels import (LevelStructure,
                                               build_level_sets,
                                               family_volume,
                                               is_properly_shattered,
                                               max_disjoint_family,
                                               nonshattered_subset,
                                               well_balance_report)
from chromatic_ramsey.reduction.params import EngineParams


def desk_params(n, eps=Fraction(2, 5), alphas=(Fraction(1, 16), Fraction(1, 32))):
    return EngineParams.manual(3, 4, n, eps=eps, z=Fraction(1, 2),
                               beta=Fraction(1, 2), alpha_vec=alphas,
                               label="desk")


def test_level_one_is_the_block_split():
    c = binary_coloring(4)
    s = build_level_sets(c, (1,), desk_params(16))
    assert s.depth == 1
    assert [v.mask for v in s.level(1)] == [0x00FF, 0xFF00]
    assert s.parents[0] == (-1, -1)
    assert s.vol(1) == 16
    assert s.pair_modes[0] == ("exact",)


def test_empty_color_sequence_rejected():
    c = binary_coloring(4)
    with pytest.raises(NoDensePair):
        build_level_sets(c, (), desk_params(16))


def test_edgeless_densest_color_rejected():
    c = binary_coloring(4)
    evens = sum(1 << v for v in range(0, 16, 2))
    # color 4 is the adjacent-pair matching; even vertices carry none of it
    with pytest.raises(NoDensePair):
        build_level_sets(c, (4,), desk_params(8), within=evens)


def test_second_level_follows_color_two_bipartition():
    # window [1, floor(8 * 4/25)] = [1, 1]: singleton pairs along color 2,
    # which inside each 8-block is the K_{4,4} between its halves
    c = binary_coloring(4)
    s = build_level_sets(c, (1, 2), desk_params(16))
    assert s.depth == 2
    assert len(s.level(2)) == 16
    assert s.vol(2) == 16
    for j in range(s.pair_count(2)):
        a, b = s.mates(2, j)
        assert len(a) == 1 and len(b) == 1
        u, v = a.members()[0], b.members()[0]
        assert c.color_of(u, v) == 2
    assert s.children_of(1, 0) == tuple(range(8))
    assert s.child_vol(1, 0) == 8
    assert s.child_vol(1, 1) == 8
    for parent_index in (0, 1):
        parent = s.level(1)[parent_index]
        for j in s.children_of(1, parent_index):
            assert s.level(2)[j].issubset(parent)
    hi, lo, cap, ok = s.eq1_report(Fraction(2, 5), 3)[0]
    assert (hi, lo) == (16, 16) and ok


def test_structure_validation_catches_bad_geometry():
    c = binary_coloring(4)
    s = build_level_sets(c, (1, 2), desk_params(16))
    # the final level-2 set descends from the high block; vertex 0 escapes it
    bad_levels = (s.levels[0], s.levels[1][:-1] + (VertexSet(16, 1 << 0),))
    with pytest.raises(NotNested):
        LevelStructure(universe=16, within=s.within, colors=s.colors,
                       pair_eps=s.pair_eps, levels=bad_levels,
                       parents=s.parents, pair_modes=s.pair_modes)
    overlap = (s.levels[0], s.levels[1][:-1] + (s.levels[1][8],))
    with pytest.raises(NotDisjoint):
        LevelStructure(universe=16, within=s.within, colors=s.colors,
                       pair_eps=s.pair_eps, levels=overlap,
                       parents=s.parents, pair_modes=s.pair_modes)
    with pytest.raises(PreconditionViolation):
        LevelStructure(universe=16, within=s.within, colors=(1,),
                       pair_eps=s.pair_eps, levels=s.levels,
                       parents=s.parents, pair_modes=s.pair_modes)


def test_structure_payload_roundtrip():
    c = binary_coloring(4)
    s = build_level_sets(c, (1, 2), desk_params(16))
    assert LevelStructure.from_payload(s.payload()) == s


def test_properly_shattered_window():
    V = VertexSet.full(64)
    def chunk(a, b):
        return VertexSet.from_iterable(64, range(a, b))
    # q = 2, eps = 1/32: window is [32, 64]
    assert is_properly_shattered(V, [chunk(0, 40)], Fraction(1, 32), 2)
    assert is_properly_shattered(V, [chunk(0, 20), chunk(20, 40)],
                                 Fraction(1, 32), 2)
    assert not is_properly_shattered(V, [], Fraction(1, 32), 2)
    assert not is_properly_shattered(V, [chunk(0, 31)], Fraction(1, 32), 2)
    assert is_properly_shattered(V, [chunk(0, 32)], Fraction(1, 32), 2)
    # tighter eps pushes the window below the offered volume
    assert not is_properly_shattered(V, [chunk(0, 40)], Fraction(1, 128), 2)
    with pytest.raises(NotNested):
        is_properly_shattered(chunk(0, 8), [chunk(4, 12)], Fraction(1, 4), 2)
    with pytest.raises(NotDisjoint):
        is_properly_shattered(V, [chunk(0, 8), chunk(4, 12)], Fraction(1, 4), 2)


def test_nonshattered_subset_keeps_everything_without_edges():
    c = binary_coloring(4)
    evens = VertexSet.from_iterable(16, range(0, 16, 2))
    out = nonshattered_subset(evens, c, 4, desk_params(16), 0)
    assert out == evens


def test_nonshattered_subset_removes_one_small_pair():
    def color(u, v):
        return 2 if {u, v} == {0, 1} else 1
    c = ColoredCompleteGraph.from_function(16, 2, color)
    V = VertexSet.full(16)
    params = desk_params(16)
    out = nonshattered_subset(V, c, 2, params, 0)
    assert out.mask == V.mask & ~0b11
    assert len(out) == 14
    # the remainder is exactly the dense-pair-free region for this window
    res = find_dense_pair_sized(c.class_graph(2), params.eps_eff, 1, 2,
                                within=out.mask)
    assert res.pair is None and res.exhaustive


def test_nonshattered_subset_detects_shattering():
    # q = 2 at eps = 1/16 on 16 vertices: window [1, 1], threshold 16; a
    # perfect matching is a maximal family of volume 16
    c = binary_coloring(4)
    params = EngineParams.manual(2, 4, 16, eps=Fraction(1, 16),
                                 z=Fraction(1, 2), beta=Fraction(1, 2),
                                 alpha_vec=(Fraction(1, 32),))
    with pytest.raises(ActuallyShattered):
        nonshattered_subset(VertexSet.full(16), c, 4, params, 0)


def test_nonshattered_subset_level_bounds():
    c = binary_coloring(4)
    with pytest.raises(PreconditionViolation):
        nonshattered_subset(VertexSet.full(16), c, 4, desk_params(16), 5)


def test_max_disjoint_family_is_maximal_and_disjoint():
    c = binary_coloring(4)
    g = c.class_graph(3)
    region = VertexSet.from_iterable(16, range(8))
    fam = max_disjoint_family(g, region, Fraction(4, 25), 1, 1, seed=0)
    assert family_volume(fam) == 8
    taken = 0
    for p in fam:
        assert p.union_mask() & taken == 0
        taken |= p.union_mask()
        assert p.verify(g)


def test_well_balance_report_desk_scale_fails():
    # at 16 vertices the shattering threshold dwarfs any family volume,
    # so the candidate color leaves every level-1 set non-shattered
    c = binary_coloring(4)
    params = desk_params(16)
    s = build_level_sets(c, (1,), params)
    rep = well_balance_report(c, s, 2, params)
    assert rep.nonshattered == (0, 1)
    assert rep.n_vol == rep.l_vol == 16
    assert not rep.ok


def test_well_balance_report_can_pass_on_large_hosts():
    # 72 vertices, sides of 36 declared as level 1; the candidate color is
    # a perfect matching, whose 18-pair family reaches volume 36 >= 32
    def color(u, v):
        same_side = (u < 36) == (v < 36)
        if same_side and u // 2 == v // 2:
            return 2
        return 1
    c = ColoredCompleteGraph.from_function(72, 2, color)
    params = EngineParams.manual(3, 2, 72, eps=Fraction(1, 6),
                                 z=Fraction(1, 2), beta=Fraction(1, 2),
                                 alpha_vec=(Fraction(1, 72), Fraction(1, 72)))
    sides = (VertexSet.from_iterable(72, range(36)),
             VertexSet.from_iterable(72, range(36, 72)))
    s = LevelStructure(universe=72, within=VertexSet.full(72), colors=(1,),
                       pair_eps=params.eps_eff, levels=(sides,),
                       parents=((-1, -1),), pair_modes=(("exact",),))
    rep = well_balance_report(c, s, 2, params)
    assert rep.nonshattered == ()
    assert rep.n_vol == 0 and rep.l_vol == 72
    assert rep.ok


def test_well_balance_depth_guard():
    c = binary_coloring(4)
    params = desk_params(16)
    two = build_level_sets(c, (1, 2), params)
    with pytest.raises(PreconditionViolation):
        well_balance_report(c, two, 3, params)
