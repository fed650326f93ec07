import random
from fractions import Fraction

import pytest

from chromatic_ramsey.errors import DegenerateGraph, UnknownColor
from chromatic_ramsey.graphs import (ColoredCompleteGraph, SimpleGraph, VertexSet,
                                     density, union_color_classes)
from helpers import random_coloring


def test_vertex_set_basics():
    s = VertexSet.from_iterable(8, [1, 3, 5])
    assert len(s) == 3
    assert 3 in s and 4 not in s
    assert s.members() == [1, 3, 5]
    t = VertexSet.from_iterable(8, [3, 4])
    assert s.intersect(t).members() == [3]
    assert s.minus(t).members() == [1, 5]
    assert s.union(t).members() == [1, 3, 4, 5]
    assert not s.isdisjoint(t)
    assert VertexSet.from_iterable(8, [1, 5]).issubset(s)


def test_simple_graph_edges_and_counts():
    g = SimpleGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    assert g.has_edge(1, 0)
    assert not g.has_edge(0, 2)
    assert g.edge_count() == 3
    assert g.edges() == [(0, 1), (1, 2), (2, 3)]
    assert g.degree(1) == 2
    # restriction keeps vertex ids
    h = g.restricted(0b0111)
    assert h.edge_count() == 2
    assert not h.has_edge(2, 3)
    # cross edges between disjoint masks
    assert g.cross_edges(0b0011, 0b1100) == 1


def test_induced_reindexes():
    g = SimpleGraph.from_edges(5, [(0, 2), (2, 4), (1, 3)])
    h = g.induced([0, 2, 4])
    assert h.n == 3
    assert h.edges() == [(0, 1), (1, 2)]


def test_density_exact_rational():
    g = SimpleGraph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    assert density(g) == Fraction(3, 6)
    assert density(g, within=0b0111) == Fraction(2, 3)
    with pytest.raises(DegenerateGraph):
        density(g, within=0b0001)


def test_density_relabel_invariant():
    rng = random.Random("relabel")
    for trial in range(20):
        n = rng.randint(3, 10)
        edges = [(u, v) for v in range(n) for u in range(v) if rng.random() < 0.4]
        if not edges:
            continue
        g = SimpleGraph.from_edges(n, edges)
        perm = list(range(n))
        rng.shuffle(perm)
        h = SimpleGraph.from_edges(n, [(perm[u], perm[v]) for u, v in edges])
        assert density(g) == density(h)


def test_colored_complete_graph_validation():
    with pytest.raises(DegenerateGraph):
        ColoredCompleteGraph.from_edge_colors(3, 2, [(0, 1, 1), (0, 2, 2)])
    with pytest.raises(DegenerateGraph):
        ColoredCompleteGraph.from_edge_colors(
            3, 2, [(0, 1, 1), (0, 2, 2), (1, 2, 1), (0, 1, 2)])
    with pytest.raises(UnknownColor):
        ColoredCompleteGraph.from_edge_colors(
            3, 2, [(0, 1, 1), (0, 2, 3), (1, 2, 1)])


def test_color_classes_partition_the_complete_graph():
    c = random_coloring(9, 3, seed=7)
    total = SimpleGraph.empty(9)
    for color in range(1, 4):
        total = total.union_with(c.class_graph(color))
    assert total.edge_count() == 9 * 8 // 2
    counted = sum(c.class_edge_count(k) for k in range(1, 4))
    assert counted == 36


def test_union_color_classes_and_used_colors():
    c = ColoredCompleteGraph.from_edge_colors(
        4, 3, [(0, 1, 1), (0, 2, 1), (0, 3, 2), (1, 2, 2), (1, 3, 1), (2, 3, 1)])
    u = union_color_classes(c, [1])
    assert u.edge_count() == 4
    assert c.used_colors() == [1, 2]
    # restricted to {0,1,2} color 3 never appears and color 1 twice
    assert c.used_colors(within=0b0111) == [1, 2]
    assert c.used_colors(within=0b1011) == [1, 2]


def test_color_of_symmetry():
    c = random_coloring(8, 4, seed=1)
    for u in range(8):
        for v in range(8):
            if u != v:
                assert c.color_of(u, v) == c.color_of(v, u)
