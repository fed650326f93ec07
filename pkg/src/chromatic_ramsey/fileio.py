"""On-disk JSON formats: colorings, certificates, params, profiles.

Every file is UTF-8 JSON with an explicit format_version, written in a
canonical form (sorted keys, fixed separators, trailing newline) so that
identical inputs produce identical bytes.  Coloring files list every edge
of the complete graph exactly once as an (u, v, color) triple with u < v.
Certificate files bundle a reduction trace's certificates with the engine
parameters and a content digest of the inputs, which the replay command
checks before re-verifying anything.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

from .errors import ChromaticRamseyError
from .graphs import ColoredCompleteGraph
from .reduction.certificates import ReductionCertificate
from .reduction.engine import ReductionTrace
from .reduction.params import EngineParams
from .reduction.profiles import RestrictionProfile
from .reduction.replay import input_digest
from .serialize import canonical_dumps

FORMAT_VERSION = 1


class FileFormatError(ChromaticRamseyError):
    """The JSON file does not satisfy the format's invariants."""


def write_json(path: str | Path, payload: Any) -> None:
    Path(path).write_text(canonical_dumps(payload) + "\n", encoding="utf-8")


def read_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FileFormatError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path} is not valid JSON: {exc}") from exc


def _expect_version(data: Mapping[str, Any], what: str) -> None:
    if not isinstance(data, Mapping):
        raise FileFormatError(f"{what} must be a JSON object")
    if data.get("format_version") != FORMAT_VERSION:
        raise FileFormatError(
            f"{what} needs format_version {FORMAT_VERSION}, "
            f"got {data.get('format_version')!r}")


# ---------------------------------------------------------------------------
# coloring files
# ---------------------------------------------------------------------------

def coloring_payload(c: ColoredCompleteGraph,
                     metadata: Mapping[str, Any] | None = None
                     ) -> dict[str, Any]:
    edges = [[u, v, c.color_of(u, v)]
             for v in range(c.n) for u in range(v)]
    return {"format_version": FORMAT_VERSION, "n": c.n, "r": c.r,
            "edges": edges, "metadata": dict(metadata or {})}


def coloring_from_payload(data: Mapping[str, Any]
                          ) -> tuple[ColoredCompleteGraph, dict[str, Any]]:
    _expect_version(data, "coloring file")
    try:
        n = int(data["n"])
        r = int(data["r"])
        raw_edges = list(data["edges"])
        metadata = dict(data.get("metadata", {}))
    except (KeyError, TypeError, ValueError) as exc:
        raise FileFormatError(f"malformed coloring file: {exc}") from exc
    if n < 1 or r < 1:
        raise FileFormatError("n and r must be positive")
    want = n * (n - 1) // 2
    if len(raw_edges) != want:
        raise FileFormatError(
            f"expected {want} edges for n = {n}, got {len(raw_edges)}")
    seen: set[tuple[int, int]] = set()
    triples: list[tuple[int, int, int]] = []
    for entry in raw_edges:
        try:
            u, v, color = (int(x) for x in entry)
        except (TypeError, ValueError) as exc:
            raise FileFormatError(f"bad edge entry {entry!r}") from exc
        if not 0 <= u < v < n:
            raise FileFormatError(f"edge ({u}, {v}) out of range")
        if not 1 <= color <= r:
            raise FileFormatError(
                f"edge ({u}, {v}) color {color} outside 1..{r}")
        if (u, v) in seen:
            raise FileFormatError(f"duplicate edge ({u}, {v})")
        seen.add((u, v))
        triples.append((u, v, color))
    return ColoredCompleteGraph.from_edge_colors(n, r, triples), metadata


def save_coloring(path: str | Path, c: ColoredCompleteGraph,
                  metadata: Mapping[str, Any] | None = None) -> None:
    write_json(path, coloring_payload(c, metadata))


def load_coloring(path: str | Path
                  ) -> tuple[ColoredCompleteGraph, dict[str, Any]]:
    return coloring_from_payload(read_json(path))


# ---------------------------------------------------------------------------
# certificate files
# ---------------------------------------------------------------------------

def certificate_payload(trace: ReductionTrace,
                        c: ColoredCompleteGraph) -> dict[str, Any]:
    return {"format_version": FORMAT_VERSION,
            "trace": [cert.payload() for cert in trace.certificates],
            "params": trace.params.payload(),
            "replay_digest": input_digest(c, trace.params)}


def _sizes_and_stall(certs: tuple[ReductionCertificate, ...],
                     n: int) -> tuple[tuple[int, ...], bool]:
    """Recover the engine's region-size walk from the certificate chain.

    A trace ends in one of three shapes: a terminal certificate (halt or
    witness), a descending certificate whose surviving set failed to
    shrink (stall, no extra size entry), or a descending certificate whose
    next step stalled before emitting anything (extra size entry).
    """
    sizes = [n]
    for i, cert in enumerate(certs):
        terminal = cert.halt is not None or cert.violation_witness is not None
        if terminal or not cert.descends:
            break
        nxt = len(cert.surviving_set)
        if i < len(certs) - 1 or nxt < sizes[-1]:
            sizes.append(nxt)
    if not certs:
        return (n,), True
    last = certs[-1]
    stalled = last.halt is None and last.violation_witness is None
    return tuple(sizes), stalled


def certificate_from_payload(data: Mapping[str, Any], n: int
                             ) -> tuple[ReductionTrace, str]:
    _expect_version(data, "certificate file")
    extra = set(data) - {"format_version", "trace", "params", "replay_digest"}
    if extra:
        raise FileFormatError(f"unexpected certificate fields {sorted(extra)}")
    try:
        params = EngineParams.from_payload(data["params"])
        certs = tuple(ReductionCertificate.from_payload(entry)
                      for entry in data["trace"])
        digest = str(data["replay_digest"])
    except (KeyError, TypeError, ValueError, ChromaticRamseyError) as exc:
        raise FileFormatError(f"malformed certificate file: {exc}") from exc
    sizes, stalled = _sizes_and_stall(certs, n)
    trace = ReductionTrace(params.q, params, certs, sizes,
                           pq_verified=None, expect_violation=False,
                           stalled=stalled)
    return trace, digest


def save_certificate(path: str | Path, trace: ReductionTrace,
                     c: ColoredCompleteGraph) -> None:
    write_json(path, certificate_payload(trace, c))


def load_certificate(path: str | Path, n: int) -> tuple[ReductionTrace, str]:
    return certificate_from_payload(read_json(path), n)


# ---------------------------------------------------------------------------
# params and profile files
# ---------------------------------------------------------------------------

def save_params(path: str | Path, params: EngineParams) -> None:
    write_json(path, {"format_version": FORMAT_VERSION,
                      "params": params.payload()})


def load_params(path: str | Path) -> EngineParams:
    data = read_json(path)
    _expect_version(data, "params file")
    try:
        return EngineParams.from_payload(data["params"])
    except (KeyError, TypeError, ValueError, ChromaticRamseyError) as exc:
        raise FileFormatError(f"malformed params file: {exc}") from exc


def save_profile(path: str | Path, profile: RestrictionProfile) -> None:
    write_json(path, {"format_version": FORMAT_VERSION,
                      "profile": profile.payload()})


def load_profile(path: str | Path) -> RestrictionProfile:
    data = read_json(path)
    _expect_version(data, "profile file")
    try:
        return RestrictionProfile.from_payload(data["profile"])
    except (KeyError, TypeError, ValueError, ChromaticRamseyError) as exc:
        raise FileFormatError(f"malformed profile file: {exc}") from exc
