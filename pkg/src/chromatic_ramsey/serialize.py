"""Deterministic JSON building blocks shared by certificates, files, and the CLI.

Everything that ends up on disk goes through ``canonical_dumps`` so that the
same object always produces the same bytes: keys are sorted, separators are
fixed, and fractions are written as exact ``"num/den"`` strings rather than
floats.
"""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction
from typing import Any

from .graphs import VertexSet


def frac_str(value: Fraction | int) -> str:
    """Exact string form of a rational, e.g. ``Fraction(3, 8)`` -> ``"3/8"``."""
    f = Fraction(value)
    return f"{f.numerator}/{f.denominator}"


def parse_frac(text: str | int) -> Fraction:
    """Inverse of :func:`frac_str`; also accepts bare integers."""
    if isinstance(text, int):
        return Fraction(text)
    num, sep, den = text.partition("/")
    if not sep:
        return Fraction(int(num))
    return Fraction(int(num), int(den))


def vset_payload(v: VertexSet) -> dict[str, Any]:
    return {"universe": v.universe, "members": v.members()}


def vset_from_payload(payload: dict[str, Any]) -> VertexSet:
    return VertexSet.from_iterable(int(payload["universe"]),
                                   [int(x) for x in payload["members"]])


def canonical_dumps(obj: Any) -> str:
    """JSON with sorted keys and fixed separators; byte-stable across runs."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def sha256_hex(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
