"""Command-line front end.

Commands map one-to-one onto library entry points:

  verify         verify_lower_bound
  refute-scan    find_refutation_degree
  oracle-compare pseudo-expectation vs honest enumeration
  decompose      decompose_square of a polynomial given in text form
  goodman        induced counts, identities, and bound for a graph file
  gap            gap_report row

Exit codes: 0 all checks pass; 1 a check failed (the JSON carries the
witness); 2 usage or resource errors.  All rationals in JSON are 'p/q'
strings.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import goodman as goodman_mod
from .caps import default_cap
from .errors import SoslabError
from .flags import decompose_square
from .moments import find_refutation_degree, verify_lower_bound
from .polynomials import from_text, monomial_text
from .rationals import rat, rat_str
from .stories import (
    Params,
    ProblemKind,
    honest_expectation,
    pseudo_expectation,
)


def _problem(name: str) -> ProblemKind:
    try:
        return ProblemKind(name)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"unknown problem {name!r} (knapsack, mod2, triangle)"
        )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="soslab",
        description="Exact verification of story-derived SOS lower-bound certificates",
    )
    parser.add_argument("--cap", type=int, default=None, help="enumeration cap")
    parser.add_argument(
        "--config", default=None, help="key=value file; flags override it"
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=1,
        help="worker count (accepted for compatibility; evaluation is pure and "
        "currently single-threaded for reproducible timing)",
    )
    parser.add_argument("--json-indent", type=int, default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, k=True):
        p.add_argument("--problem", type=_problem, required=True)
        p.add_argument("--n", type=int, required=True)
        if k:
            p.add_argument("--k", type=rat, default=None)

    p = sub.add_parser("verify", help="check constraints + moment matrix PSD")
    common(p)
    p.add_argument("--index-degree", type=int, required=True)

    p = sub.add_parser("refute-scan", help="scan even degrees for PSD failure")
    common(p)
    p.add_argument("--max-degree", type=int, required=True)

    p = sub.add_parser("oracle-compare", help="pseudo-expectation vs honest orbit")
    common(p)
    p.add_argument("--max-indexdeg", type=int, required=True)

    p = sub.add_parser("decompose", help="square decomposition of a polynomial")
    common(p)
    p.add_argument("polynomial", help="text form, e.g. 'x_1 + -1*x_2' or 'x_{1,2}'")

    p = sub.add_parser("goodman", help="triangle-count identities for a graph")
    p.add_argument("--graph", required=True, help="edge-list file (or JSON adjacency)")

    p = sub.add_parser("gap", help="certified-vs-true triangle density gap row")
    p.add_argument("--index-degree", type=int, required=True)

    return parser


def _apply_config(args) -> None:
    if args.config:
        with open(args.config) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                key, _, value = line.partition("=")
                key = key.strip()
                if key == "cap" and args.cap is None:
                    args.cap = int(value.strip())
    if args.cap is None:
        args.cap = default_cap()


def _params(args) -> Params:
    k = getattr(args, "k", None)
    return Params(args.n, k)


def _cmd_verify(args) -> tuple[int, dict]:
    report = verify_lower_bound(args.problem, _params(args), args.index_degree, args.cap)
    return (0 if report.passed else 1), report.to_json()


def _cmd_refute_scan(args) -> tuple[int, dict]:
    scan = find_refutation_degree(args.problem, _params(args), args.max_degree, args.cap)
    return (1 if scan.refutation_degree is not None else 0), scan.to_json()


def _cmd_oracle_compare(args) -> tuple[int, dict]:
    from .moments import moment_basis
    from .polynomials import relabel_key

    params = _params(args)
    pe = pseudo_expectation(args.problem, params)
    rows = []
    agree = True
    seen = set()
    for m in moment_basis(args.problem, args.n, args.max_indexdeg, args.cap):
        rep = relabel_key(m)
        if rep in seen:
            continue
        seen.add(rep)
        expected = pe.monomial_value(rep)
        honest = honest_expectation(args.problem, params, rep, args.cap)
        same = expected == honest
        agree = agree and same
        rows.append(
            {
                "orbit": monomial_text(rep),
                "pseudo_expectation": rat_str(expected),
                "honest": rat_str(honest),
                "equal": same,
            }
        )
    out = {
        "problem": args.problem.value,
        "n": args.n,
        "max_indexdeg": args.max_indexdeg,
        "orbits": rows,
        "all_equal": agree,
    }
    if params.k is not None:
        out["k"] = rat_str(params.k)
    return (0 if agree else 1), out


def _cmd_decompose(args) -> tuple[int, dict]:
    params = _params(args)
    pe = pseudo_expectation(args.problem, params)
    g = from_text(args.polynomial)
    decomposition = decompose_square(pe, g, args.n, args.cap)
    out = decomposition.to_json()
    out["problem"] = args.problem.value
    return (0 if out["match"] else 1), out


def _cmd_goodman(args) -> tuple[int, dict]:
    with open(args.graph) as fh:
        text = fh.read()
    if text.lstrip().startswith("{"):
        graph = goodman_mod.Graph.from_json(text)
    else:
        graph = goodman_mod.Graph.from_edge_list_text(text)
    counts = goodman_mod.count_induced(graph)
    identities = goodman_mod.verify_counting_identities(graph)
    rho = graph.density()
    bound = goodman_mod.goodman_bound(graph.n, rho)
    bound_holds = counts.n33 >= bound
    out = {
        "n": graph.n,
        "edges": len(graph.edges),
        "rho": rat_str(rho),
        "counts": {
            "N33": counts.n33,
            "N32": counts.n32,
            "N31": counts.n31,
            "N30": counts.n30,
        },
        "identities": identities,
        "goodman_bound": rat_str(bound),
        "bound_holds": bound_holds,
    }
    return (0 if identities and bound_holds else 1), out


def _cmd_gap(args) -> tuple[int, dict]:
    return 0, goodman_mod.gap_report(args.index_degree)


_COMMANDS = {
    "verify": _cmd_verify,
    "refute-scan": _cmd_refute_scan,
    "oracle-compare": _cmd_oracle_compare,
    "decompose": _cmd_decompose,
    "goodman": _cmd_goodman,
    "gap": _cmd_gap,
}


def run(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        _apply_config(args)
        code, payload = _COMMANDS[args.command](args)
    except SoslabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(payload, indent=args.json_indent))
    return code


def main() -> None:
    sys.exit(run(sys.argv[1:]))
