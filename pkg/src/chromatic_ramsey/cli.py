"""Command-line entry points tying the library together.

Exit codes follow one contract across all subcommands: 0 means the check
or computation succeeded, 1 means an operational problem (usage, IO,
malformed files, digest mismatch), and 2 means a definite mathematical
counterexample was found, in which case the witness is printed as JSON on
standard output so scripts can consume it.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Any

from .chromatic import is_chromatic_pq_coloring
from .constructions import binary_coloring
from .errors import BudgetExceeded, ChromaticRamseyError, SparsityViolated
from .fileio import (certificate_payload, coloring_payload, load_certificate,
                     load_coloring, load_params, load_profile, save_coloring,
                     write_json)
from .reduction import EngineParams, input_digest, replay_trace, run_reduction
from .reduction.profiles import classify_colors
from .search import compute_F, compute_F_chi
from .serialize import canonical_dumps, frac_str

BUDGET_ENV = "CHROMATIC_RAMSEY_BUDGET"
SEARCH_NODE_DEFAULT = 2_000_000


def _emit(payload: dict[str, Any]) -> None:
    print(canonical_dumps(payload))


def _sparsity_witness_payload(witness) -> dict[str, Any]:
    pair = witness.counterexample
    return {
        "kind": "sparsity_violation",
        "color": witness.color,
        "x": frac_str(witness.x),
        "eps": frac_str(witness.eps),
        "variant": witness.variant,
        "mode": witness.mode,
        "window": list(witness.window),
        "pair": None if pair is None else {
            "v1": pair.v1.members(), "v2": pair.v2.members(),
            "epsilon": frac_str(pair.epsilon), "mode": pair.mode},
    }


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_construct_binary(args: argparse.Namespace) -> int:
    c = binary_coloring(args.r)
    payload_meta = {"construction": "binary", "r": args.r}
    if args.out:
        save_coloring(args.out, c, payload_meta)
        print(f"wrote {args.out}: n = {c.n}, {c.r} colors")
    else:
        _emit(coloring_payload(c, payload_meta))
    return 0


def cmd_verify_chromatic_pq(args: argparse.Namespace) -> int:
    c, _ = load_coloring(args.coloring)
    verdict = is_chromatic_pq_coloring(c, args.p, args.q)
    if verdict.holds:
        print(f"PASS: every union of {args.q - 1} color classes has "
              f"chromatic number below {args.p} "
              f"({verdict.unions_checked} unions checked)")
        return 0
    _emit({"kind": "chromatic_pq_violation",
           "colors": sorted(verdict.witness_colors),
           "chi": verdict.witness_chi, "p": args.p, "q": args.q})
    return 2


def cmd_verify_sparsity(args: argparse.Namespace) -> int:
    c, _ = load_coloring(args.coloring)
    profile = load_profile(args.profile)
    try:
        verified = classify_colors(c, profile, seed=args.seed)
    except SparsityViolated as exc:
        _emit(_sparsity_witness_payload(exc.witness))
        return 2
    print(f"PASS: all {len(profile.colors())} colors satisfy their "
          f"sparsity claims ({len(verified.exact_colors)} exact, "
          f"{len(verified.sampled_colors)} sampled)")
    return 0


def _reduce_params(args: argparse.Namespace, n: int,
                   r: int) -> EngineParams:
    if args.params:
        return load_params(args.params)
    return EngineParams.paper_formula(args.q, r, n, r_min=args.r_min,
                                      base_gamma=args.base_gamma,
                                      seed=args.seed)


def cmd_reduce(args: argparse.Namespace) -> int:
    c, _ = load_coloring(args.coloring)
    params = _reduce_params(args, c.n, c.r)
    try:
        trace = run_reduction(c, args.q, params,
                              expect_violation=args.expect_violation)
    except SparsityViolated as exc:
        _emit(_sparsity_witness_payload(exc.witness))
        return 2

    summary_to = sys.stdout if args.out else sys.stderr
    kinds = [cert.step_kind for cert in trace.certificates]
    floors = [f for cert in trace.certificates for f in cert.floors]
    print(f"steps: {' '.join(kinds) if kinds else 'none'}", file=summary_to)
    print(f"sizes: {' '.join(str(s) for s in trace.sizes)}", file=summary_to)
    print(f"floors: {' '.join(floors) if floors else 'none'}",
          file=summary_to)
    final = trace.final
    if trace.outcome == "halt" and final is not None and \
            final.halt is not None:
        print(f"outcome: halt ({final.halt.reason}, bound "
              f"{final.halt.n_bound})", file=summary_to)
    else:
        print(f"outcome: {trace.outcome}", file=summary_to)

    if args.out:
        write_json(args.out, certificate_payload(trace, c))
        print(f"wrote {args.out}", file=summary_to)

    if trace.outcome == "violation":
        witness = trace.witness
        _emit({"kind": "precondition_violation", **witness.payload()})
        return 2
    if not args.out:
        _emit(certificate_payload(trace, c))
    return 0


def cmd_search(args: argparse.Namespace) -> int:
    fn = compute_F if args.kind == "F" else compute_F_chi
    budget = args.budget
    if budget is None:
        budget = int(os.environ.get(BUDGET_ENV, SEARCH_NODE_DEFAULT))
    try:
        res = fn(args.r, args.p, args.q, args.n_max,
                 node_budget=budget, time_budget=args.time_budget)
    except BudgetExceeded as exc:
        frontier_n = None
        if isinstance(exc.frontier, dict):
            frontier_n = exc.frontier.get("n")
        out = {"kind": "F" if args.kind == "F" else "F_chi",
               "parameters": [args.r, args.p, args.q],
               "value": None,
               "unknown_above": (None if frontier_n is None
                                 else int(frontier_n) - 1),
               "nodes_expanded": None, "witness_path": None,
               "budget_exhausted": True}
        if args.out:
            write_json(args.out, out)
        else:
            _emit(out)
        return 0

    witness_path = None
    if res.extremal_witness is not None and args.witness_out:
        save_coloring(args.witness_out, res.extremal_witness,
                      {"construction": "search_witness",
                       "kind": res.kind,
                       "parameters": list(res.parameters)})
        witness_path = args.witness_out
    out = {"kind": res.kind, "parameters": list(res.parameters),
           "value": res.value, "unknown_above": res.unknown_above,
           "nodes_expanded": res.nodes_expanded,
           "witness_path": witness_path, "budget_exhausted": False}
    if args.out:
        write_json(args.out, out)
        print(f"wrote {args.out}")
    else:
        _emit(out)
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    c, _ = load_coloring(args.coloring)
    trace, digest = load_certificate(args.certificate, c.n)
    if input_digest(c, trace.params) != digest:
        print("digest mismatch: this certificate was not produced from "
              "this coloring and these parameters", file=sys.stderr)
        return 1
    report = replay_trace(trace, c, exact_cap=args.exact_cap,
                          pair_budget=args.pair_budget)
    if report.ok:
        print(f"PASS: {report.replayed} checks replayed, "
              f"{report.skipped} skipped, "
              f"{report.certificates} certificates")
        return 0
    issue = report.divergence
    _emit({"kind": "replay_divergence", **issue.payload()})
    print(f"FAIL: certificate {issue.cert_index}, check "
          f"{issue.check_index}, claim {issue.claim}: {issue.reason}",
          file=sys.stderr)
    return 2


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chromatic-ramsey",
        description="Desk-scale toolkit for chromatic generalized "
                    "Ramsey numbers.")
    sub = parser.add_subparsers(dest="command", required=True)

    construct = sub.add_parser("construct",
                               help="write an explicit coloring file")
    csub = construct.add_subparsers(dest="construction", required=True)
    binary = csub.add_parser("binary",
                             help="binary-expansion coloring on 2^r vertices")
    binary.add_argument("--r", type=int, required=True,
                        help="number of colors (at most 6)")
    binary.add_argument("--out", help="output path (default: stdout)")
    binary.set_defaults(func=cmd_construct_binary)

    verify = sub.add_parser("verify", help="check a coloring against a claim")
    vsub = verify.add_subparsers(dest="check", required=True)
    vpq = vsub.add_parser("chromatic-pq",
                          help="every (q-1)-color union has chi below p")
    vpq.add_argument("--p", type=int, required=True)
    vpq.add_argument("--q", type=int, required=True)
    vpq.add_argument("coloring")
    vpq.set_defaults(func=cmd_verify_chromatic_pq)
    vsp = vsub.add_parser("sparsity",
                          help="every profile color meets its window claim")
    vsp.add_argument("--profile", required=True,
                     help="restriction profile file")
    vsp.add_argument("--seed", type=int, default=0)
    vsp.add_argument("coloring")
    vsp.set_defaults(func=cmd_verify_sparsity)

    reduce_p = sub.add_parser("reduce",
                              help="run the color-reduction engine")
    reduce_p.add_argument("--q", type=int, required=True)
    group = reduce_p.add_mutually_exclusive_group()
    group.add_argument("--params", help="engine params file")
    group.add_argument("--paper-params", action="store_true",
                       help="closed-form schedule (the default)")
    reduce_p.add_argument("--seed", type=int, default=0)
    reduce_p.add_argument("--r-min", type=int, default=8,
                          help="base-case threshold on the leading class")
    reduce_p.add_argument("--base-gamma", type=int, default=None,
                          help="override the base-case clique target")
    reduce_p.add_argument("--expect-violation", action="store_true",
                          help="skip the up-front chromatic-(p, q) check")
    reduce_p.add_argument("--out", help="certificate path (default: stdout)")
    reduce_p.add_argument("coloring")
    reduce_p.set_defaults(func=cmd_reduce)

    search = sub.add_parser("search",
                            help="exact small Ramsey values by enumeration")
    search.add_argument("--kind", choices=("F", "Fchi"), required=True)
    search.add_argument("--r", type=int, required=True)
    search.add_argument("--p", type=int, required=True)
    search.add_argument("--q", type=int, required=True)
    search.add_argument("--n-max", type=int, required=True)
    search.add_argument("--budget", type=int, default=None,
                        help=f"node budget (default from ${BUDGET_ENV} "
                             f"or {SEARCH_NODE_DEFAULT})")
    search.add_argument("--time-budget", type=float, default=600.0)
    search.add_argument("--out", help="result path (default: stdout)")
    search.add_argument("--witness-out",
                        help="write the extremal coloring here")
    search.set_defaults(func=cmd_search)

    replay = sub.add_parser("replay",
                            help="re-verify a certificate independently")
    replay.add_argument("certificate")
    replay.add_argument("coloring")
    replay.add_argument("--exact-cap", type=int, default=32,
                        help="largest region replayed exactly")
    replay.add_argument("--pair-budget", type=int, default=200_000,
                        help="subset enumeration budget for density checks")
    replay.set_defaults(func=cmd_replay)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ChromaticRamseyError as exc:
        print(f"error {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
