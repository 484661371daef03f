"""Command-line interface: certificates, identities, simulation, regions, grids.

Exit codes are the machine contract: 0 success, 1 verification failure
(a failed certificate step, a failed identity, or a non-converging /
descent-violating orbit), 2 usage or validation error.  Data outputs are
deterministic; JSON certificate reports carry wall-clock timings unless
``--no-timing`` is given, which makes reruns byte-identical.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import certifier, dynamics
from .model import ParamsPQ, build_symbolic_model


def _rational(text: str) -> Fraction:
    """Accept integer, a/b, and decimal literals; decimals convert exactly."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _window(text: str) -> tuple[float, float, float, float]:
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(
            f"window must be xmin,xmax,ymin,ymax, got {text!r}")
    try:
        vals = tuple(float(p) for p in parts)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"window components must be numbers: {text!r}") from exc
    return vals


_CERTIFY_STEPS = {
    "identity": lambda: [certifier.verify_delta1_identity()],
    "q2q4": certifier.certify_q2q4,
    "q1": certifier.certify_q1,
    "q3": certifier.certify_q3,
    "segments": certifier.certify_segments,
}


def _cmd_certify(args) -> int:
    if args.step is None:
        summary = certifier.run_full_certificate(threads=args.threads)
    else:
        reports = sorted(_CERTIFY_STEPS[args.step](), key=lambda r: r.step)
        summary = certifier.CertificateSummary(
            overall_pass=all(r.passed for r in reports),
            reports=tuple(reports),
            counts=certifier.landmark_counts(),
        )
    payload = certifier.summary_to_json(summary, include_timing=not args.no_timing)
    if args.json is not None:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
        print(certifier.summary_to_text(summary))
    else:
        print(payload)
    return 0 if summary.overall_pass else 1


def _cmd_identity(args) -> int:
    if args.which == "delta1":
        report = certifier.verify_delta1_identity()
        print(f"delta1 closed form identity: {'holds' if report.passed else 'FAILS'} "
              f"(cross-difference monomials: {report.output_count})")
        return 0 if report.passed else 1
    built = build_symbolic_model().delta2.den
    displayed = certifier.delta2_denominator()
    const = certifier.proportionality_constant(built, displayed)
    if const is not None and const > 0:
        print(f"delta2 denominator matches the factored product "
              f"(constant {const.numerator}/{const.denominator})")
        return 0
    print("delta2 denominator does NOT match the factored product")
    return 1


def _cmd_simulate(args) -> int:
    params = ParamsPQ(args.p, args.q)
    seed = (args.xm1, args.x0)
    mode = "exact" if args.exact else "float"
    trace = dynamics.simulate(params, seed, mode=mode, tol=args.tol,
                              max_iters=args.max_iters)
    info_xbar = dynamics.equilibrium(params).xbar
    n, xp, xc = trace.states[-1]
    print(f"verdict: {trace.verdict}")
    print(f"equilibrium: {info_xbar:.17g}")
    print(f"iterations: {trace.iters_to_tol if trace.iters_to_tol is not None else n}")
    print(f"final state: x[n-1]={xp:.17g} x[n]={xc:.17g}")
    ok = trace.converged
    if params.q < params.p:
        descent = dynamics.lyapunov_descent_check(
            params, seed, steps=min(trace.iters_to_tol or 500, 2000))
        if descent.violation is None:
            print(f"descent: ok ({descent.checked} steps checked)")
        else:
            v = descent.violation
            print(f"descent: VIOLATION at n={v.index}: "
                  f"g={v.g_n:.17g} then {v.g_next:.17g}, {v.g_next2:.17g}")
            ok = False
    else:
        print("descent: not applicable (q >= p)")
    if args.csv is not None:
        with open(args.csv, "w", encoding="utf-8") as fh:
            dynamics.trace_to_csv(trace, fh)
    return 0 if ok else 1


def _cmd_regions(args) -> int:
    coverage = dynamics.classify_regions(ParamsPQ(args.p, args.q))
    print("flags:", "".join(sorted(coverage.flags)) or "(none)")
    for check in coverage.checks:
        status = ("satisfied" if check.satisfied else "not satisfied") \
            if check.applicable else "not applicable"
        print(f"  ({check.flag}) {check.description}: {status} "
              f"[lhs={check.lhs:.6g} rhs={check.rhs:.6g}]")
    return 0


def _cmd_ggrid(args) -> int:
    rows = dynamics.g_grid(args.alpha_tilde, args.window, args.res)
    if args.csv is not None:
        with open(args.csv, "w", encoding="utf-8") as fh:
            dynamics.grid_to_csv(rows, fh)
        print(f"wrote {len(rows)} rows to {args.csv}")
    else:
        dynamics.grid_to_csv(rows, sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lyness",
        description="Exact certificates and orbit tooling for "
                    "x[n+1] = (p + q*x[n]) / (1 + x[n-1]).")
    sub = parser.add_subparsers(dest="command", required=True)

    cert = sub.add_parser("certify", help="run positivity certificates")
    cert.add_argument("--step", choices=sorted(_CERTIFY_STEPS),
                      help="run a single certificate group instead of all")
    cert.add_argument("--json", metavar="PATH", help="write the JSON summary to PATH")
    cert.add_argument("--no-timing", action="store_true",
                      help="omit elapsedMs for byte-identical reruns")
    cert.add_argument("--threads", type=int, default=None,
                      help="worker threads (default: LYNESS_THREADS or 1)")
    cert.set_defaults(func=_cmd_certify)

    ident = sub.add_parser("identity", help="check symbolic closed-form identities")
    ident.add_argument("--which", required=True,
                       choices=("delta1", "delta2-denominator"))
    ident.set_defaults(func=_cmd_identity)

    sim = sub.add_parser("simulate", help="iterate the recurrence from a seed")
    sim.add_argument("--p", type=_rational, required=True)
    sim.add_argument("--q", type=_rational, required=True)
    sim.add_argument("--x0", type=_rational, required=True, help="x[0]")
    sim.add_argument("--xm1", type=_rational, required=True, help="x[-1]")
    sim.add_argument("--tol", type=float, default=1e-9)
    sim.add_argument("--max-iters", type=int, default=10**6)
    sim.add_argument("--exact", action="store_true",
                     help="iterate with exact rational arithmetic")
    sim.add_argument("--csv", metavar="PATH", help="write the trace as CSV")
    sim.set_defaults(func=_cmd_simulate)

    reg = sub.add_parser("regions", help="classify (p, q) against settled regions")
    reg.add_argument("--p", type=_rational, required=True)
    reg.add_argument("--q", type=_rational, required=True)
    reg.set_defaults(func=_cmd_regions)

    grid = sub.add_parser("ggrid", help="tabulate the invariant function g")
    grid.add_argument("--alpha-tilde", type=float, required=True)
    grid.add_argument("--window", type=_window, required=True,
                      metavar="XMIN,XMAX,YMIN,YMAX")
    grid.add_argument("--res", type=int, required=True)
    grid.add_argument("--csv", metavar="PATH")
    grid.set_defaults(func=_cmd_ggrid)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
