from itertools import combinations

import pytest

from chromatic_ramsey.chromatic import chromatic_number, is_chromatic_pq_coloring
from chromatic_ramsey.constructions import (binary_coloring, check_recurrence,
                                            product_upper_bound,
                                            verify_binary_union_chromatic)
from chromatic_ramsey.errors import Overflow, TooLarge
from helpers import brute_chromatic


def test_binary_two_digit_class_tables():
    # frozen oracle output: first-differing-digit classes for r = 2
    c = binary_coloring(2)
    by_color = {1: set(), 2: set()}
    for u, v, col in c.edge_triples():
        by_color[col].add((u, v))
    assert by_color[1] == {(0, 2), (0, 3), (1, 2), (1, 3)}
    assert by_color[2] == {(0, 1), (2, 3)}


def test_binary_digit_convention_msb_first():
    c = binary_coloring(3)
    assert c.color_of(0, 4) == 1   # differ in the most significant digit
    assert c.color_of(2, 3) == 3   # differ only in the last digit
    assert c.color_of(0, 2) == 2


def test_binary_self_similarity():
    # restricting binary(r) to the low half reproduces binary(r-1) shifted by one
    for r in (2, 3, 4):
        big = binary_coloring(r)
        small = binary_coloring(r - 1)
        half = 1 << (r - 1)
        for v in range(half):
            for u in range(v):
                assert big.color_of(u, v) == small.color_of(u, v) + 1


def test_binary_classes_are_bipartite():
    for r in (2, 3, 4):
        c = binary_coloring(r)
        for color in range(1, r + 1):
            assert chromatic_number(c.class_graph(color)) == 2


def test_binary_pairwise_unions_chi_four():
    # frozen oracle: brute force gave chi = 4 for all three pairs at r = 3
    c = binary_coloring(3)
    for pair in combinations((1, 2, 3), 2):
        g = c.union_graph(pair)
        assert chromatic_number(g) == 4
        assert brute_chromatic(g) == 4


def test_verify_binary_union_chromatic_reports():
    rep = verify_binary_union_chromatic(3, 2)
    assert rep.verified
    assert len(rep.entries) == 3
    assert all(e["chi"] == 4 for e in rep.entries)
    rep1 = verify_binary_union_chromatic(4, 1)
    assert rep1.verified
    assert all(e["chi"] == 2 for e in rep1.entries)


def test_binary_is_extremal_pq_coloring():
    # binary(r) is chromatic-(2^q+1, q+1) but never chromatic-(2^q, q+1)
    for r, q in ((2, 1), (2, 2), (3, 2), (3, 3)):
        c = binary_coloring(r)
        assert is_chromatic_pq_coloring(c, (1 << q) + 1, q + 1)
        assert not is_chromatic_pq_coloring(c, 1 << q, q + 1)


def test_binary_r_cap():
    with pytest.raises(TooLarge):
        binary_coloring(7)


def test_product_upper_bound_values():
    assert product_upper_bound(4, 9, 4) == 8**2 + 1
    assert product_upper_bound(3, 9, 4) == 9
    assert product_upper_bound(2, 4, 3) == 4       # (p-1)^1 + 1
    assert product_upper_bound(5, 2, 2) == 2       # 1^5 + 1
    # consistency with the binary lower bound: 2^r + 1 <= (2^q)^{ceil(r/q)} + 1
    for q in (1, 2, 3):
        for r in range(q, 7, q):
            assert (1 << r) + 1 <= product_upper_bound(r, (1 << q) + 1, q + 1)


def test_product_upper_bound_overflow():
    with pytest.raises(Overflow):
        product_upper_bound(64, 10**6, 2)


def test_check_recurrence_table():
    table = {
        (2, 2, 2): 2, (3, 2, 2): 2,
        (2, 3, 3): 3, (3, 3, 3): 5,
        (2, 4, 3): 4,
    }
    rep = check_recurrence(table)
    assert rep.verified
    # F(3,3,3) = 5 <= 3 * F(3,2,2) = 6 must be among the checks
    claims = [e["claim"] for e in rep.entries]
    assert "F(3,3,3) <= 3 * F(3,2,2)" in claims
    bad = dict(table)
    bad[(3, 3, 3)] = 7
    assert not check_recurrence(bad).verified
