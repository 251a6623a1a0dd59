"""Command-line interface.

Subcommands: spectrum, variance, compare, gibbs (build / replace-block /
check-improvement), certify-minimal, simulate.  Input chains are JSON
chain files (see `revmc.chainfile`); reports go to stdout (human-readable
by default, one JSON document with --json), errors to stderr.

Exit codes: 0 success, 2 parse error, 3 validation failure, 4 route
refusal (the autocovariance route on a periodic chain).
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

import numpy as np

from . import __version__
from .chainfile import (
    ChainFile,
    dumps_document,
    jsonable,
    load_chain_file,
    parse_matrix_file,
    parse_vector,
)
from .chains import (
    TargetDistribution,
    TransitionMatrix,
    require_irreducible,
    require_reversible,
    struct_tol,
    validate_structure,
)
from .composition import (
    component_improvement_verdict,
    block_gap_eigs,
    gibbs_component,
    random_scan_chain,
    replace_block,
)
from .dominance import (
    efficiency_dominates,
    eigen_dominates,
    peskun_dominates,
    strict_trace_check,
    trace_certificate,
)
from .errors import (
    BadComponentIndex,
    ChainError,
    ChainFileError,
    DimensionMismatch,
    RouteRefusal,
)
from .sampling import mc_asym_var
from .spectral import spectral_decompose
from .variance import asym_var_autocov, asym_var_resolvent, asym_var_spectral

_EXIT_OK = 0
_EXIT_PARSE = 2
_EXIT_VALIDATION = 3
_EXIT_ROUTE = 4


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _fmt_vec(v) -> str:
    return "[" + ", ".join(_fmt(x) for x in v) + "]"


def _chain_doc(pi: TargetDistribution, P: Optional[TransitionMatrix]) -> dict:
    doc = {"pi": [float(p) for p in pi.probs]}
    if P is not None:
        doc["P"] = [[float(x) for x in row] for row in P.entries]
    return doc


def _structure_doc(P: TransitionMatrix, pi: TargetDistribution, tol: float) -> dict:
    rep = validate_structure(P, pi, tol)
    return {
        "reversible": rep.reversible,
        "db_violation": rep.db_violation,
        "irreducible": rep.irreducible,
        "period": rep.period,
        "stationary_ok": rep.stationary_ok,
        "stationarity_violation": rep.stationarity_violation,
    }


def _require_matrix(cf: ChainFile, path: str) -> TransitionMatrix:
    if cf.matrix is None:
        raise ChainFileError(f"{path}: missing required key 'P'")
    return cf.matrix


def _print_structure(doc: dict):
    print(
        f"structure: reversible={doc['reversible']} "
        f"(violation {_fmt(doc['db_violation'])}), "
        f"irreducible={doc['irreducible']}, period={doc['period']}"
    )


# ----------------------------------------------------------------- spectrum


def cmd_spectrum(args) -> dict:
    cf = load_chain_file(args.chain)
    P = _require_matrix(cf, args.chain)
    tol = args.tol if args.tol is not None else struct_tol(cf.pi.n)
    dec = spectral_decompose(P, cf.pi, tol=tol)
    cert = trace_certificate(P, cf.pi)
    report = {
        "command": "spectrum",
        "file": args.chain,
        "status": 0,
        "tolerances": {"structural": tol},
        "eigenvalues": list(dec.eigenvalues),
        "structure": _structure_doc(P, cf.pi, tol),
        "pi_max": cert.pi_max,
        "trace": cert.trace,
        "trace_lower_bound": cert.lower_bound,
        "trace_minimal": cert.minimal,
    }
    if not args.json:
        print(f"eigenvalues: {_fmt_vec(dec.eigenvalues)}")
        _print_structure(report["structure"])
        print(f"pi_max: {_fmt(cert.pi_max)}")
        print(
            f"trace: {_fmt(cert.trace)}  lower bound: {_fmt(cert.lower_bound)}  "
            f"trace-minimal: {'yes' if cert.minimal else 'no'}"
        )
    return report


# ----------------------------------------------------------------- variance


def cmd_variance(args) -> dict:
    cf = load_chain_file(args.chain)
    P = _require_matrix(cf, args.chain)
    f = parse_vector(args.f)
    if f.size != cf.pi.n:
        raise DimensionMismatch(f"--f has {f.size} entries, chain has {cf.pi.n} states")
    require_irreducible(P.entries)
    results = {}
    route = args.route
    if route in ("auto", "spectral"):
        dec = spectral_decompose(P, cf.pi)
        results["spectral"] = asym_var_spectral(dec, f).value
    if route == "resolvent":
        results["resolvent"] = asym_var_resolvent(P, cf.pi, f).value
    if route == "autocov":
        dec = spectral_decompose(P, cf.pi)
        results["autocov"] = asym_var_autocov(dec, f).value
    report = {
        "command": "variance",
        "file": args.chain,
        "status": 0,
        "tolerances": {"structural": struct_tol(cf.pi.n)},
        "f": [float(x) for x in f],
        "route": route,
        "variance": results,
    }
    if args.mc:
        est = mc_asym_var(P, cf.pi, f, steps=args.steps, reps=args.reps, seed=args.seed)
        report["mc"] = {
            "mean_estimate": est.mean_estimate,
            "asym_var_estimate": est.asym_var_estimate,
            "std_error": est.std_error,
            "steps": est.steps,
            "replications": est.replications,
            "seed": est.seed,
        }
    if not args.json:
        for name, value in results.items():
            print(f"asymptotic variance ({name}): {_fmt(value)}")
        if args.mc:
            mc = report["mc"]
            print(
                f"monte carlo estimate: {_fmt(mc['asym_var_estimate'])} "
                f"+/- {_fmt(mc['std_error'])} "
                f"(steps={mc['steps']}, reps={mc['replications']}, seed={mc['seed']})"
            )
    return report


# ------------------------------------------------------------------ compare


def cmd_compare(args) -> dict:
    cfP = load_chain_file(args.first)
    cfQ = load_chain_file(args.second)
    P = _require_matrix(cfP, args.first)
    Q = _require_matrix(cfQ, args.second)
    if cfP.pi.n != cfQ.pi.n:
        raise DimensionMismatch(
            f"chains have {cfP.pi.n} and {cfQ.pi.n} states"
        )
    pi_gap = float(np.max(np.abs(cfP.pi.probs - cfQ.pi.probs)))
    if pi_gap > struct_tol(cfP.pi.n):
        raise ChainError(
            f"chain files disagree on the target distribution (max gap {pi_gap:.3e})"
        )
    pi = cfP.pi
    verdict = efficiency_dominates(P, Q, pi, tol=args.tol)
    decP = spectral_decompose(P, pi)
    decQ = spectral_decompose(Q, pi)
    report = {
        "command": "compare",
        "files": [args.first, args.second],
        "status": 0,
        "tolerances": {"verdict": verdict.tolerance_used},
        "gap_spectrum": list(verdict.gap_eigenvalues),
        "relation": verdict.relation.value,
        "peskun": {
            "first_over_second": peskun_dominates(P, Q),
            "second_over_first": peskun_dominates(Q, P),
        },
        "eigen": {
            "first_over_second": eigen_dominates(decP, decQ),
            "second_over_first": eigen_dominates(decQ, decP),
        },
        "trace": {
            "first": float(np.trace(P.entries)),
            "second": float(np.trace(Q.entries)),
            "first_strictly_smaller": strict_trace_check(P, Q, pi),
        },
        "witness": None,
    }
    if verdict.witness is not None:
        w = verdict.witness.values
        vP = asym_var_spectral(decP, w).value
        vQ = asym_var_spectral(decQ, w).value
        report["witness"] = {
            "values": [float(x) for x in w],
            "v_first": vP,
            "v_second": vQ,
        }
    if not args.json:
        print(f"gap spectrum (second - first): {_fmt_vec(verdict.gap_eigenvalues)}")
        print(f"verdict: {verdict.relation.value}")
        pk = report["peskun"]
        print(
            f"peskun: first>=second {pk['first_over_second']}, "
            f"second>=first {pk['second_over_first']}"
        )
        ei = report["eigen"]
        print(
            f"eigen-dominance: first {ei['first_over_second']}, "
            f"second {ei['second_over_first']}"
        )
        tr = report["trace"]
        print(
            f"trace: first {_fmt(tr['first'])}, second {_fmt(tr['second'])}, "
            f"first strictly smaller: {tr['first_strictly_smaller']}"
        )
        if report["witness"] is not None:
            w = report["witness"]
            print(
                f"witness: {_fmt_vec(w['values'])} with "
                f"v(first) {_fmt(w['v_first'])} > v(second) {_fmt(w['v_second'])}"
            )
    return report


# -------------------------------------------------------------------- gibbs


def _load_product_target(path: str):
    cf = load_chain_file(path)
    if cf.product is None:
        raise ChainFileError(f"{path}: missing 'product' component sizes")
    return cf


def _component_arg(args, n_components: int) -> int:
    k = args.component
    if k is None:
        raise ChainFileError("--component is required for this subcommand")
    if not 1 <= k <= n_components:
        raise BadComponentIndex(f"component {k} outside 1..{n_components}")
    return k


def cmd_gibbs(args) -> dict:
    cf = _load_product_target(args.chain)
    prod = cf.product
    ell = prod.n_components
    comps = [gibbs_component(cf.pi, prod, k) for k in range(1, ell + 1)]

    if args.subcommand == "build":
        chain = random_scan_chain(comps)
        tol = struct_tol(cf.pi.n)
        report = {
            "command": "gibbs",
            "subcommand": "build",
            "file": args.chain,
            "status": 0,
            "tolerances": {"structural": tol},
            "component_sizes": list(prod.component_sizes),
            "components": [
                {"k": c.k, "chain": _chain_doc(cf.pi, c.kernel)} for c in comps
            ],
            "chain": _chain_doc(cf.pi, chain),
            "structure": _structure_doc(chain, cf.pi, tol),
        }
        if not args.json:
            for c in comps:
                print(f"component {c.k} kernel:")
                for row in c.kernel.entries:
                    print("  " + "  ".join(_fmt(x) for x in row))
            print("random-scan chain:")
            for row in chain.entries:
                print("  " + "  ".join(_fmt(x) for x in row))
            _print_structure(report["structure"])
        return report

    k = _component_arg(args, ell)
    if args.block is None:
        raise ChainFileError("--block is required for this subcommand")
    if args.block_file is None:
        raise ChainFileError("--block-file is required for this subcommand")
    new_block = parse_matrix_file(args.block_file)
    old = comps[k - 1]
    new = replace_block(old, args.block, new_block)

    if args.subcommand == "replace-block":
        report = {
            "command": "gibbs",
            "subcommand": "replace-block",
            "file": args.chain,
            "status": 0,
            "component": k,
            "block": args.block,
            "chain": _chain_doc(cf.pi, new.kernel),
            "block_conditional": [float(x) for x in old.blocks[args.block].conditional],
        }
        if not args.json:
            print(f"component {k} with block {args.block} replaced:")
            for row in new.kernel.entries:
                print("  " + "  ".join(_fmt(x) for x in row))
        return report

    # check-improvement
    new_comps = list(comps)
    new_comps[k - 1] = new
    weights = [1.0 / ell] * ell
    verdict = component_improvement_verdict(comps, new_comps, weights, cf.pi)
    gaps = block_gap_eigs(old, new)
    report = {
        "command": "gibbs",
        "subcommand": "check-improvement",
        "file": args.chain,
        "status": 0,
        "component": k,
        "block": args.block,
        "tolerances": {"verdict": verdict.tolerance_used},
        "relation": verdict.relation.value,
        "block_gap_eigenvalues": [list(g) for g in gaps],
        "mixture_gap_spectrum": list(verdict.gap_eigenvalues),
    }
    if not args.json:
        print(f"verdict: {verdict.relation.value}")
        for b, g in enumerate(gaps):
            print(f"block {b} gap eigenvalues: {_fmt_vec(g)}")
        print(f"mixture gap spectrum: {_fmt_vec(verdict.gap_eigenvalues)}")
    return report


# --------------------------------------------------------- certify-minimal


def cmd_certify_minimal(args) -> dict:
    cf = load_chain_file(args.chain)
    P = _require_matrix(cf, args.chain)
    require_reversible(P.entries, cf.pi)
    require_irreducible(P.entries)
    cert = trace_certificate(P, cf.pi, tol=args.tol if args.tol is not None else 1e-10)
    report = {
        "command": "certify-minimal",
        "file": args.chain,
        "status": 0,
        "tolerances": {"minimality": args.tol if args.tol is not None else 1e-10},
        "trace": cert.trace,
        "trace_lower_bound": cert.lower_bound,
        "pi_max": cert.pi_max,
        "minimal": cert.minimal,
        "certified": cert.minimal,
    }
    if not args.json:
        print(
            f"trace: {_fmt(cert.trace)}  lower bound: {_fmt(cert.lower_bound)}  "
            f"pi_max: {_fmt(cert.pi_max)}"
        )
        if cert.minimal:
            print("CERTIFIED non-dominated: trace attains the lower bound")
        else:
            print("not certified: trace does not attain the lower bound")
    return report


# ----------------------------------------------------------------- simulate


def cmd_simulate(args) -> dict:
    cf = load_chain_file(args.chain)
    P = _require_matrix(cf, args.chain)
    f = parse_vector(args.f)
    if f.size != cf.pi.n:
        raise DimensionMismatch(f"--f has {f.size} entries, chain has {cf.pi.n} states")
    est = mc_asym_var(P, cf.pi, f, steps=args.steps, reps=args.reps, seed=args.seed)
    report = {
        "command": "simulate",
        "file": args.chain,
        "status": 0,
        "f": [float(x) for x in f],
        "mean_estimate": est.mean_estimate,
        "asym_var_estimate": est.asym_var_estimate,
        "std_error": est.std_error,
        "steps": est.steps,
        "replications": est.replications,
        "seed": est.seed,
    }
    if not args.json:
        print(f"mean estimate: {_fmt(est.mean_estimate)}")
        print(
            f"asymptotic variance estimate: {_fmt(est.asym_var_estimate)} "
            f"+/- {_fmt(est.std_error)}"
        )
        print(f"steps: {est.steps}  replications: {est.replications}  seed: {est.seed}")
    return report


# -------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="revmc",
        description="Exact efficiency analysis of reversible Markov chains.",
    )
    parser.add_argument("--version", action="version", version=f"revmc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_json(p):
        p.add_argument("--json", action="store_true", help="emit one JSON report")

    p = sub.add_parser("spectrum", help="eigenvalues and structural report")
    p.add_argument("chain")
    p.add_argument("--tol", type=float, default=None)
    add_json(p)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("variance", help="asymptotic variance of a function")
    p.add_argument("chain")
    p.add_argument("--f", required=True, help="inline vector 'a,b,c' or @file")
    p.add_argument(
        "--route",
        choices=["auto", "spectral", "resolvent", "autocov"],
        default="auto",
    )
    p.add_argument("--mc", action="store_true", help="add a Monte Carlo estimate")
    p.add_argument("--steps", type=int, default=200_000)
    p.add_argument("--reps", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    add_json(p)
    p.set_defaults(func=cmd_variance)

    p = sub.add_parser("compare", help="dominance verdict between two chains")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--tol", type=float, default=None)
    add_json(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("gibbs", help="build and improve random-scan samplers")
    p.add_argument(
        "subcommand", choices=["build", "replace-block", "check-improvement"]
    )
    p.add_argument("chain", help="target file with a product spec")
    p.add_argument("--component", type=int, default=None, help="1-based coordinate")
    p.add_argument("--block", type=int, default=None, help="0-based block index")
    p.add_argument("--block-file", default=None, help="JSON matrix for the new block")
    add_json(p)
    p.set_defaults(func=cmd_gibbs)

    p = sub.add_parser("certify-minimal", help="trace-minimality certificate")
    p.add_argument("chain")
    p.add_argument("--tol", type=float, default=None)
    add_json(p)
    p.set_defaults(func=cmd_certify_minimal)

    p = sub.add_parser("simulate", help="Monte Carlo estimate from simulation")
    p.add_argument("chain")
    p.add_argument("--f", required=True, help="inline vector 'a,b,c' or @file")
    p.add_argument("--steps", type=int, default=200_000)
    p.add_argument("--reps", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    add_json(p)
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        report = args.func(args)
    except ChainFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_PARSE
    except RouteRefusal as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_ROUTE
    except ChainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_VALIDATION
    if args.json:
        print(dumps_document(jsonable(report)))
    return _EXIT_OK


def entry():  # console-script entry point
    sys.exit(main())


if __name__ == "__main__":
    entry()
