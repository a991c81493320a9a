"""Command-line surface: one subcommand per library capability.

Results go to stdout exclusively; diagnostics go to stderr, gated by the
STARSAT_LOG environment variable (error, info, debug).  Exit status is 0
on success, 1 on domain errors (bad input files, infeasible queries,
exhausted budgets, invalid certificates), 2 on usage errors — argparse
owns the usage exits.  File outputs are written to a sibling temp file
and renamed into place, so a failing run never leaves a partial file.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from fractions import Fraction
from typing import Optional

from .experiments import (
    config_from_json,
    read_records_csv,
    records_to_csv,
    run_grid,
    summarize,
    summary_to_csv,
    verify_small,
    _atomic_write,
)
from .factor import FactorResult, d_factor, max_matching
from .graph import (
    Graph,
    complete_graph,
    empty_graph,
    format_edge_list,
    graph_hash,
    load_edge_list,
    regular_circulant,
    sample_gnp,
)
from .independence import (
    DEFAULT_BUDGET,
    FirstMomentInput,
    alpha_k_exact,
    alpha_k_predicted_band,
    binomial_tail_upper,
    exact_binomial_cdf,
    first_moment_Xs,
    greedy_k_independent,
)
from .params import ProbParams
from .rng import RngSeed
from .saturation import (
    SAT_EXACT_BUDGET,
    VALID,
    SaturationCertificate,
    check_certificate,
    classical_sat_clique,
    classical_sat_star,
    construct_upper,
    greedy_saturated,
    reference_bands,
    sat_exact,
    sat_lower_bound,
)

log = logging.getLogger("starsat")


def _setup_logging() -> None:
    level = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(
        os.environ.get("STARSAT_LOG", "error").lower(), logging.ERROR
    )
    logging.basicConfig(
        stream=sys.stderr, level=level, format="starsat: %(levelname)s: %(message)s"
    )


def _emit(text: str, out: Optional[str]) -> None:
    """Deliver a result: whole file when --out is given, stdout otherwise."""
    if out is None:
        sys.stdout.write(text)
    else:
        _atomic_write(out, text)


def _load_graph(path: str) -> Graph:
    g = load_edge_list(path)
    log.info("loaded %s: n=%d m=%d", path, g.n, g.m)
    return g


def _json_line(payload) -> str:
    return json.dumps(payload, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# subcommand handlers (each returns the process exit status)


def cmd_gen(args) -> int:
    if args.family == "sample":
        g = sample_gnp(args.n, args.p, RngSeed(args.seed))
    elif args.family == "complete":
        g = complete_graph(args.n)
    elif args.family == "empty":
        g = empty_graph(args.n)
    else:  # regular circulant
        g = regular_circulant(args.n, args.d)
    _emit(format_edge_list(g), args.out)
    return 0


def cmd_alpha(args) -> int:
    g = _load_graph(args.graph)
    if args.method == "greedy":
        witness = greedy_k_independent(g, args.k)
        if args.format == "json":
            _emit(
                _json_line(
                    {"size": witness.size, "k": args.k, "vertices": list(witness.vertices)}
                ),
                args.out,
            )
        else:
            _emit(f"{witness.size}\n", args.out)
        return 0
    res = alpha_k_exact(g, args.k, budget=args.budget)
    if args.format == "json":
        payload = {
            "size": res.size,
            "k": args.k,
            "optimal": res.optimal,
            "upper_bound": res.upper_bound,
            "nodes": res.nodes,
            "vertices": list(res.witness.vertices),
        }
        _emit(_json_line(payload), args.out)
    else:
        _emit(f"{res.size}\n", args.out)
    if not res.optimal:
        log.error(
            "budget exhausted: size %d is only a lower bound (upper bound %d)",
            res.size,
            res.upper_bound,
        )
        return 1
    return 0


def cmd_sat_lower(args) -> int:
    g = _load_graph(args.graph)
    lb = sat_lower_bound(g, args.r, args.alpha_method, budget=args.budget)
    if args.format == "json":
        payload = {
            "value": float(lb.value),
            "numerator": lb.value.numerator,
            "denominator": lb.value.denominator,
            "ceiled": -(-lb.value.numerator // lb.value.denominator),
            "alpha": lb.alpha_value,
            "certified": lb.certified,
        }
        _emit(_json_line(payload), args.out)
    else:
        _emit(f"{float(lb.value)!r}\n", args.out)
    return 0


def _write_certificate(cert: SaturationCertificate, path: Optional[str]) -> None:
    if path is not None:
        _atomic_write(path, cert.to_json() + "\n")


def cmd_sat_upper(args) -> int:
    g = _load_graph(args.graph)
    rep = construct_upper(g, args.r, args.is_method, budget=args.budget)
    _write_certificate(rep.certificate, args.cert_out)
    if args.format == "json":
        payload = {
            "upper": rep.upper,
            "ell_used": rep.ell_used,
            "alpha_optimal": rep.alpha_optimal,
            "edges": [list(e) for e in rep.certificate.edges],
        }
        _emit(_json_line(payload), args.out)
    else:
        _emit(f"{rep.upper}\n", args.out)
    return 0


def cmd_sat_exact(args) -> int:
    g = _load_graph(args.graph)
    rep = sat_exact(g, args.r, budget=args.budget)
    _write_certificate(rep.certificate, args.cert_out)
    if args.format == "json":
        payload = {
            "exact": rep.exact,
            "lower": float(rep.lower),
            "upper": rep.upper,
            "nodes": rep.nodes,
            "edges": [list(e) for e in rep.certificate.edges],
        }
        _emit(_json_line(payload), args.out)
    else:
        _emit(f"{rep.exact if rep.exact is not None else rep.upper}\n", args.out)
    if rep.exact is None:
        log.error(
            "budget exhausted: bracket [%d, %d] not closed",
            rep.lower_ceiled,
            rep.upper,
        )
        return 1
    return 0


def cmd_check(args) -> int:
    g = _load_graph(args.graph)
    with open(args.cert) as fh:
        cert = SaturationCertificate.from_json(fh.read())
    if cert.n != g.n or cert.host_hash != graph_hash(g):
        print(
            f"certificate/host mismatch: cert is for n={cert.n} "
            f"hash={cert.host_hash}, graph has n={g.n} hash={graph_hash(g)}",
            file=sys.stderr,
        )
        return 1
    verdict = check_certificate(cert.edges, g, cert.r)
    _emit(f"{verdict.verdict}\n", args.out)
    return 0 if verdict.verdict == VALID else 1


def cmd_formula(args) -> int:
    if args.kind == "star":
        _emit(f"{classical_sat_star(args.n, args.r)}\n", args.out)
        return 0
    if args.kind == "clique":
        _emit(f"{classical_sat_clique(args.n, args.r)}\n", args.out)
        return 0
    bands = reference_bands(args.n, ProbParams(args.p), args.r, args.epsilon)
    if args.format == "json":
        payload = {"main": list(bands.main)}
        if bands.zito is not None:
            payload["zito"] = list(bands.zito)
        _emit(_json_line(payload), args.out)
    else:
        lines = [repr(bands.main[0]), repr(bands.main[1])]
        if bands.zito is not None:
            lines += [repr(bands.zito[0]), repr(bands.zito[1])]
        _emit("".join(s + "\n" for s in lines), args.out)
    return 0


def cmd_experiment_run(args) -> int:
    with open(args.config) as fh:
        config = config_from_json(fh.read())
    records = run_grid(config, jobs=args.jobs, record_timing=args.timing)
    _emit(records_to_csv(records), args.out)
    return 0


def cmd_experiment_summarize(args) -> int:
    records = read_records_csv(args.records)
    rows = summarize(records, epsilon=args.epsilon)
    _emit(summary_to_csv(rows), args.out)
    return 0


def cmd_experiment_verify_small(args) -> int:
    r_values = tuple(int(tok) for tok in args.r.split(","))
    violations = verify_small(args.max_n, r_values, args.count, RngSeed(args.seed))
    text = f"violations: {len(violations)}\n" + "".join(v + "\n" for v in violations)
    _emit(text, args.out)
    return 0


def cmd_moment(args) -> int:
    if args.kind == "first":
        inp = FirstMomentInput(args.n, ProbParams(args.p), args.k, args.s)
        _emit(f"{first_moment_Xs(inp)!r}\n", args.out)
        return 0
    if args.kind == "tail":
        _emit(f"{binomial_tail_upper(args.trials, args.s, args.p)!r}\n", args.out)
        return 0
    value = exact_binomial_cdf(args.trials, args.s, Fraction(args.p))
    _emit(f"{value.numerator}/{value.denominator}\n", args.out)
    return 0


def cmd_factor(args) -> int:
    g = _load_graph(args.graph)
    res: FactorResult = d_factor(g, args.d)
    if args.format == "json":
        payload = {
            "found": res.found,
            "d": res.d,
            "edges": None if res.edges is None else [list(e) for e in res.edges],
        }
        _emit(_json_line(payload), args.out)
        return 0 if res.found else 1
    if not res.found:
        print(f"no {args.d}-factor", file=sys.stderr)
        return 1
    _emit("".join(f"{u} {v}\n" for u, v in res.edges), args.out)
    return 0


def cmd_matching(args) -> int:
    g = _load_graph(args.graph)
    edges = max_matching(g)
    if args.format == "json":
        _emit(_json_line({"size": len(edges), "edges": [list(e) for e in edges]}), args.out)
    else:
        _emit("".join(f"{u} {v}\n" for u, v in edges), args.out)
    return 0


def cmd_greedy_sat(args) -> int:
    g = _load_graph(args.graph)
    cert = greedy_saturated(g, args.r)
    _write_certificate(cert, args.cert_out)
    if args.format == "json":
        payload = {"edges": [list(e) for e in cert.edges], "count": cert.edge_count}
        _emit(_json_line(payload), args.out)
    else:
        _emit(f"{cert.edge_count}\n", args.out)
    return 0


def cmd_alpha_band(args) -> int:
    lo, hi = alpha_k_predicted_band(args.n, ProbParams(args.p), args.k)
    if args.format == "json":
        _emit(_json_line({"lo": lo, "hi": hi}), args.out)
    else:
        _emit(f"{lo!r}\n{hi!r}\n", args.out)
    return 0


# ---------------------------------------------------------------------------
# parser assembly


def _add_common(sub, *, out=True, fmt=True) -> None:
    if out:
        sub.add_argument("--out", help="write the result to this path (atomic)")
    if fmt:
        sub.add_argument(
            "--format",
            choices=("plain", "json", "csv"),
            default="plain",
            help="output encoding (default plain)",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="starsat",
        description="Star-saturation numbers: bounds, exact values, experiments.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("gen", help="write a graph as an edge list")
    p.add_argument("family", choices=("sample", "complete", "empty", "regular"))
    p.add_argument("--n", type=int, required=True, help="vertex count")
    p.add_argument("--p", type=float, help="edge probability (sample)")
    p.add_argument("--seed", type=int, help="u64 seed (required for sample)")
    p.add_argument("--d", type=int, help="degree (regular)")
    _add_common(p, fmt=False)
    p.set_defaults(func=cmd_gen)

    p = subs.add_parser("alpha", help="k-independence number of a graph")
    p.add_argument("--graph", required=True, help="edge-list file")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--method", choices=("exact", "greedy"), default="exact")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    _add_common(p)
    p.set_defaults(func=cmd_alpha)

    p = subs.add_parser("alpha-band", help="predicted alpha_k band for G(n,p)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_alpha_band)

    p = subs.add_parser("sat-lower", help="alpha-based lower bound on sat")
    p.add_argument("--graph", required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument(
        "--alpha-method", choices=("exact", "greedy-upper"), default="exact"
    )
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    _add_common(p)
    p.set_defaults(func=cmd_sat_lower)

    p = subs.add_parser("sat-upper", help="constructive upper bound on sat")
    p.add_argument("--graph", required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--is-method", choices=("exact", "greedy"), default="exact")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--cert-out", help="also write the certificate JSON here")
    _add_common(p)
    p.set_defaults(func=cmd_sat_upper)

    p = subs.add_parser("sat-greedy", help="greedy saturated subgraph size")
    p.add_argument("--graph", required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--cert-out")
    _add_common(p)
    p.set_defaults(func=cmd_greedy_sat)

    p = subs.add_parser("sat-exact", help="exact sat value by branch and bound")
    p.add_argument("--graph", required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--budget", type=int, default=SAT_EXACT_BUDGET)
    p.add_argument("--cert-out")
    _add_common(p)
    p.set_defaults(func=cmd_sat_exact)

    p = subs.add_parser("check", help="verify a saturation certificate")
    p.add_argument("--graph", required=True)
    p.add_argument("--cert", required=True, help="certificate JSON file")
    _add_common(p, fmt=False)
    p.set_defaults(func=cmd_check)

    p = subs.add_parser("formula", help="closed forms and reference bands")
    kinds = p.add_subparsers(dest="kind", required=True)
    k = kinds.add_parser("star", help="sat(K_n, K_{1,r})")
    k.add_argument("n", type=int)
    k.add_argument("r", type=int)
    _add_common(k, fmt=False)
    k.set_defaults(func=cmd_formula)
    k = kinds.add_parser("clique", help="sat(K_n, K_r)")
    k.add_argument("n", type=int)
    k.add_argument("r", type=int)
    _add_common(k, fmt=False)
    k.set_defaults(func=cmd_formula)
    k = kinds.add_parser("bands", help="saturation bands for G(n,p)")
    k.add_argument("--n", type=int, required=True)
    k.add_argument("--p", type=float, required=True)
    k.add_argument("--r", type=int, required=True)
    k.add_argument("--epsilon", type=float, default=0.5)
    _add_common(k)
    k.set_defaults(func=cmd_formula)

    p = subs.add_parser("experiment", help="seeded Monte Carlo grids")
    acts = p.add_subparsers(dest="action", required=True)
    a = acts.add_parser("run", help="run a grid from a JSON config")
    a.add_argument("--config", required=True)
    a.add_argument("--jobs", type=int, default=1)
    a.add_argument(
        "--timing",
        action="store_true",
        help="fill elapsed_ms (breaks byte-identical reruns)",
    )
    _add_common(a, fmt=False)
    a.set_defaults(func=cmd_experiment_run)
    a = acts.add_parser("summarize", help="aggregate a records CSV")
    a.add_argument("--records", required=True)
    a.add_argument("--epsilon", type=float, default=0.5)
    _add_common(a, fmt=False)
    a.set_defaults(func=cmd_experiment_summarize)
    a = acts.add_parser("verify-small", help="cross-check solvers on small hosts")
    a.add_argument("--max-n", type=int, required=True)
    a.add_argument("--r", required=True, help="comma-separated r values")
    a.add_argument("--count", type=int, required=True)
    a.add_argument("--seed", type=int, required=True)
    _add_common(a, fmt=False)
    a.set_defaults(func=cmd_experiment_verify_small)

    p = subs.add_parser("moment", help="first-moment and binomial tail values")
    kinds = p.add_subparsers(dest="kind", required=True)
    k = kinds.add_parser("first", help="expected count of sparse s-sets")
    k.add_argument("--n", type=int, required=True)
    k.add_argument("--p", type=float, required=True)
    k.add_argument("--k", type=int, required=True)
    k.add_argument("--s", type=int, required=True)
    _add_common(k, fmt=False)
    k.set_defaults(func=cmd_moment)
    k = kinds.add_parser("tail", help="closed-form binomial tail upper bound")
    k.add_argument("--trials", type=int, required=True)
    k.add_argument("--s", type=int, required=True)
    k.add_argument("--p", type=float, required=True)
    _add_common(k, fmt=False)
    k.set_defaults(func=cmd_moment)
    k = kinds.add_parser("cdf", help="exact binomial CDF as a fraction")
    k.add_argument("--trials", type=int, required=True)
    k.add_argument("--s", type=int, required=True)
    k.add_argument("--p", type=Fraction, required=True)
    _add_common(k, fmt=False)
    k.set_defaults(func=cmd_moment)

    p = subs.add_parser("factor", help="find a d-regular spanning subgraph")
    p.add_argument("--graph", required=True)
    p.add_argument("--d", type=int, required=True)
    _add_common(p)
    p.set_defaults(func=cmd_factor)

    p = subs.add_parser("matching", help="maximum matching of a graph")
    p.add_argument("--graph", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_matching)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _setup_logging()
    if getattr(args, "command", None) == "gen":
        if args.family == "sample":
            if args.p is None or args.seed is None:
                parser.error("gen sample requires --p and --seed")
        if args.family == "regular" and args.d is None:
            parser.error("gen regular requires --d")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        log.debug("command failed", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
