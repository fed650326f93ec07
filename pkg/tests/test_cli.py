"""The command line wires files, engine, search, and replay together.

Every test drives cli.main directly with argv lists, checking both the
exit-code contract (0 pass, 1 operational, 2 counterexample) and the
promised artifacts: JSON witnesses on stdout, deterministic output files,
and replay divergences that name the failed check.
"""

import json

import pytest

from helpers import matched_halves_coloring

from chromatic_ramsey.cli import main
from chromatic_ramsey.fileio import (load_coloring, save_coloring,
                                     save_profile)
from chromatic_ramsey.graphs import ColoredCompleteGraph
from chromatic_ramsey.reduction.profiles import RestrictionProfile

from fractions import Fraction


def parity_k5() -> ColoredCompleteGraph:
    return ColoredCompleteGraph.from_function(
        5, 2, lambda u, v: ((u + v) % 2) + 1)


def write_matched_halves(path) -> None:
    save_coloring(path, matched_halves_coloring(),
                  {"construction": "matched_halves"})


def last_json_line(captured: str) -> dict:
    lines = [ln for ln in captured.strip().splitlines() if ln]
    return json.loads(lines[-1])


def test_construct_binary_writes_a_valid_coloring(tmp_path, capsys):
    out = tmp_path / "bin2.json"
    assert main(["construct", "binary", "--r", "2",
                 "--out", str(out)]) == 0
    c, meta = load_coloring(out)
    assert c.n == 4 and c.r == 2
    assert meta == {"construction": "binary", "r": 2}
    capsys.readouterr()

    assert main(["construct", "binary", "--r", "1"]) == 0
    payload = last_json_line(capsys.readouterr().out)
    assert payload["n"] == 2 and len(payload["edges"]) == 1


def test_construct_binary_refuses_oversized_palettes(capsys):
    assert main(["construct", "binary", "--r", "7"]) == 1
    assert "TooLarge" in capsys.readouterr().err


def test_verify_chromatic_pq_passes_the_binary_coloring(tmp_path, capsys):
    out = tmp_path / "bin2.json"
    main(["construct", "binary", "--r", "2", "--out", str(out)])
    assert main(["verify", "chromatic-pq", "--p", "5", "--q", "3",
                 str(out)]) == 0


def test_verify_chromatic_pq_prints_a_witness_on_failure(tmp_path, capsys):
    path = tmp_path / "k5.json"
    save_coloring(path, parity_k5())
    capsys.readouterr()
    assert main(["verify", "chromatic-pq", "--p", "5", "--q", "3",
                 str(path)]) == 2
    witness = last_json_line(capsys.readouterr().out)
    assert witness["kind"] == "chromatic_pq_violation"
    assert witness["colors"] == [1, 2]
    assert witness["chi"] == 5


def test_verify_sparsity_both_verdicts(tmp_path, capsys):
    coloring = tmp_path / "mh.json"
    write_matched_halves(coloring)
    vacuous = tmp_path / "ok.json"
    save_profile(vacuous, RestrictionProfile(
        2, (15,), (Fraction(1),), Fraction(1, 8),
        (frozenset(range(1, 16)),)))
    assert main(["verify", "sparsity", "--profile", str(vacuous),
                 str(coloring)]) == 0
    capsys.readouterr()

    lying = tmp_path / "bad.json"
    save_profile(lying, RestrictionProfile(
        3, (1, 15), (Fraction(1), Fraction(1, 64)), Fraction(1, 2),
        (frozenset({1}), frozenset(range(2, 16)))))
    assert main(["verify", "sparsity", "--profile", str(lying),
                 str(coloring)]) == 2
    witness = last_json_line(capsys.readouterr().out)
    assert witness["kind"] == "sparsity_violation"
    assert witness["pair"] is not None


def test_reduce_writes_deterministic_certificates(tmp_path, capsys):
    coloring = tmp_path / "mh.json"
    write_matched_halves(coloring)
    one = tmp_path / "one.json"
    two = tmp_path / "two.json"
    assert main(["reduce", "--q", "2", "--out", str(one),
                 str(coloring)]) == 0
    summary = capsys.readouterr().out
    assert "steps:" in summary and "sizes:" in summary
    assert "floors:" in summary and "outcome:" in summary
    assert main(["reduce", "--q", "2", "--out", str(two),
                 str(coloring)]) == 0
    assert one.read_bytes() == two.read_bytes()

    assert main(["replay", str(one), str(coloring)]) == 0


def test_reduce_reports_the_violation_witness(tmp_path, capsys):
    coloring = tmp_path / "bin4.json"
    main(["construct", "binary", "--r", "4", "--out", str(coloring)])
    capsys.readouterr()
    code = main(["reduce", "--q", "3", "--r-min", "4", str(coloring)])
    assert code == 2
    witness = last_json_line(capsys.readouterr().out)
    assert witness["kind"] == "precondition_violation"
    assert len(witness["colors"]) == 3
    assert witness["chi"] == 8


def test_reduce_handles_a_two_vertex_graph(tmp_path, capsys):
    path = tmp_path / "k2.json"
    save_coloring(path, ColoredCompleteGraph.from_edge_colors(
        2, 2, [(0, 1, 1)]))
    cert = tmp_path / "k2.cert.json"
    assert main(["reduce", "--q", "2", "--out", str(cert),
                 str(path)]) == 0
    out = capsys.readouterr().out
    assert "steps: base_case" in out
    data = json.loads(cert.read_text())
    assert len(data["trace"]) == 1
    assert data["trace"][0]["halt"] is not None


def test_replay_catches_tampering_and_digest_mismatch(tmp_path, capsys):
    coloring = tmp_path / "mh.json"
    write_matched_halves(coloring)
    cert = tmp_path / "cert.json"
    main(["reduce", "--q", "2", "--out", str(cert), str(coloring)])

    data = json.loads(cert.read_text())
    touched = False
    for entry in data["trace"]:
        for chk in entry["guarantee_checks"]:
            if chk["claim"] == "zero_edges":
                chk["detail"]["region"]["members"] = list(range(16))
                touched = True
                break
        if touched:
            break
    assert touched
    tampered = tmp_path / "tampered.json"
    tampered.write_text(json.dumps(data))
    capsys.readouterr()
    assert main(["replay", str(tampered), str(coloring)]) == 2
    captured = capsys.readouterr()
    divergence = last_json_line(captured.out)
    assert divergence["kind"] == "replay_divergence"
    assert divergence["claim"] == "zero_edges"
    assert "zero_edges" in captured.err

    other = tmp_path / "bin4.json"
    main(["construct", "binary", "--r", "4", "--out", str(other)])
    capsys.readouterr()
    assert main(["replay", str(cert), str(other)]) == 1
    assert "digest mismatch" in capsys.readouterr().err


def test_search_finds_the_small_exact_values(tmp_path, capsys):
    assert main(["search", "--kind", "Fchi", "--r", "2", "--p", "5",
                 "--q", "3", "--n-max", "6"]) == 0
    result = last_json_line(capsys.readouterr().out)
    assert result["value"] == 5

    assert main(["search", "--kind", "F", "--r", "5", "--p", "2",
                 "--q", "2", "--n-max", "3"]) == 0
    result = last_json_line(capsys.readouterr().out)
    assert result["value"] == 2


def test_search_witness_file_passes_verification(tmp_path, capsys):
    witness = tmp_path / "w.json"
    out = tmp_path / "r.json"
    assert main(["search", "--kind", "Fchi", "--r", "2", "--p", "5",
                 "--q", "3", "--n-max", "6", "--out", str(out),
                 "--witness-out", str(witness)]) == 0
    table = json.loads(out.read_text())
    assert table["value"] == 5
    assert table["witness_path"] == str(witness)
    capsys.readouterr()
    assert main(["verify", "chromatic-pq", "--p", "5", "--q", "3",
                 str(witness)]) == 0


def test_search_budget_exhaustion_is_not_an_error(capsys, monkeypatch):
    assert main(["search", "--kind", "Fchi", "--r", "3", "--p", "4",
                 "--q", "3", "--n-max", "8", "--budget", "20"]) == 0
    result = last_json_line(capsys.readouterr().out)
    assert result["value"] is None
    assert result["unknown_above"] is not None

    monkeypatch.setenv("CHROMATIC_RAMSEY_BUDGET", "20")
    assert main(["search", "--kind", "Fchi", "--r", "3", "--p", "4",
                 "--q", "3", "--n-max", "8"]) == 0
    result = last_json_line(capsys.readouterr().out)
    assert result["value"] is None


def test_operational_problems_exit_one(tmp_path, capsys):
    assert main(["verify", "chromatic-pq", "--p", "5", "--q", "3",
                 str(tmp_path / "missing.json")]) == 1
    assert main(["search", "--kind", "F", "--r", "0", "--p", "2",
                 "--q", "2", "--n-max", "3"]) == 1
    truncated = tmp_path / "broken.json"
    truncated.write_text("{\"format_version\": 1, \"n\": 3")
    assert main(["verify", "chromatic-pq", "--p", "5", "--q", "3",
                 str(truncated)]) == 1
    capsys.readouterr()
