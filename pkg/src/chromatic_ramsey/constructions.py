"""Explicit lower-bound colorings and closed-form bounds.

The binary-expansion coloring of K_{2^r}: vertices are r-digit binary strings
(digit 1 = most significant) and the edge {v, w} receives the index of the
first digit where v and w differ. Unions of q classes then have chromatic
number exactly 2^q, which is what makes the coloring extremal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .chromatic import chromatic_number
from .errors import DegenerateGraph, Overflow, TooLarge
from .graphs import ColoredCompleteGraph

BINARY_R_MAX = 6
INTEROP_MAX = 2**63 - 1


def binary_coloring(r: int) -> ColoredCompleteGraph:
    """The binary-expansion coloring of K_{2^r} with colors 1..r."""
    if not 1 <= r <= BINARY_R_MAX:
        raise TooLarge(f"r must be in 1..{BINARY_R_MAX}")
    n = 1 << r

    def color(u: int, v: int) -> int:
        # first differing digit, counting from the most significant
        return r - ((u ^ v).bit_length() - 1)

    return ColoredCompleteGraph.from_function(n, r, color)


@dataclass
class BoundReport:
    """Outcome of verifying a closed-form claim against exact computation."""

    kind: str
    parameters: dict
    verified: bool
    entries: list = field(default_factory=list)
    failures: list = field(default_factory=list)


def verify_binary_union_chromatic(r: int, q: int) -> BoundReport:
    """Check chi(union of any q classes of binary_coloring(r)) == 2^q exactly."""
    if not 1 <= q <= r:
        raise DegenerateGraph("need 1 <= q <= r")
    c = binary_coloring(r)
    expected = 1 << q
    entries = []
    failures = []
    for colors in combinations(range(1, r + 1), q):
        chi = chromatic_number(c.union_graph(colors))
        entries.append({"colors": list(colors), "chi": chi})
        if chi != expected:
            failures.append({"colors": list(colors), "chi": chi, "expected": expected})
    return BoundReport(
        kind="binary_union_chromatic",
        parameters={"r": r, "q": q, "expected": expected},
        verified=not failures,
        entries=entries,
        failures=failures,
    )


def product_upper_bound(r: int, p: int, q: int) -> int:
    """(p-1)^ceil(r/(q-1)) + 1, the color-partition product bound.

    Exact integer arithmetic; values beyond 2^63-1 raise Overflow so every
    reported bound stays losslessly serializable.
    """
    if r < 1 or p < 2 or q < 2:
        raise DegenerateGraph("need r >= 1, p >= 2, q >= 2")
    blocks = -(-r // (q - 1))
    value = (p - 1) ** blocks + 1
    if value > INTEROP_MAX:
        raise Overflow(f"bound {value} exceeds 2^63-1")
    return value


def check_recurrence(f_values: dict[tuple[int, int, int], int]) -> BoundReport:
    """Verify F(r,p,q) <= r * F(r,p-1,q-1) and F(r,2,2) = 2 over a finite table.

    f_values maps (r, p, q) -> known exact value. Only pairs with both sides
    present are checked; the report lists every comparison.
    """
    entries = []
    failures = []
    for (r, p, q), value in sorted(f_values.items()):
        if q == 2 and p == 2:
            ok = value == 2
            entries.append({"claim": f"F({r},2,2) = 2", "value": value, "ok": ok})
            if not ok:
                failures.append(entries[-1])
        prev = f_values.get((r, p - 1, q - 1))
        if prev is not None and p >= 3 and q >= 3:
            bound = r * prev
            ok = value <= bound
            entries.append({
                "claim": f"F({r},{p},{q}) <= {r} * F({r},{p-1},{q-1})",
                "value": value, "bound": bound, "ok": ok,
            })
            if not ok:
                failures.append(entries[-1])
    return BoundReport(
        kind="erdos_gyarfas_recurrence",
        parameters={"table_size": len(f_values)},
        verified=not failures,
        entries=entries,
        failures=failures,
    )
