"""Command-line frontend: one subcommand per computation, machine-readable
output (--format human|json|csv), and a distinct exit code per failure class:
0 ok / verification passed, 2 bad input or precondition, 3 verification
failed, 4 I/O or checkpoint trouble.

The JSON payload always carries every number the human rendering shows
(the human view is generated from the same payload); CSV exposes the
per-point detail of the sweep commands.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

from . import bounds, characters, quadratic, search

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VERIFY = 3
EXIT_IO = 4


def _fmt_human(value):
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _render_human(payload, indent=""):
    for key, value in payload.items():
        if isinstance(value, dict):
            print(f"{indent}{key}:")
            _render_human(value, indent + "  ")
        elif isinstance(value, list):
            print(f"{indent}{key}: ({len(value)} entries)")
            for item in value[:20]:
                if isinstance(item, dict):
                    body = " ".join(f"{k}={_fmt_human(v)}" for k, v in item.items())
                    print(f"{indent}  {body}")
                else:
                    print(f"{indent}  {_fmt_human(item)}")
            if len(value) > 20:
                print(f"{indent}  ... ({len(value) - 20} more; see --format json)")
        else:
            print(f"{indent}{key}: {_fmt_human(value)}")


def _render_csv(rows):
    if not rows:
        return
    writer = csv.DictWriter(sys.stdout, fieldnames=list(rows[0].keys()))
    writer.writeheader()
    for row in rows:
        writer.writerow(
            {k: (f"{v:.17g}" if isinstance(v, float) else v) for k, v in row.items()}
        )


def _emit(args, payload, rows):
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    elif args.format == "csv":
        _render_csv(rows)
    else:
        _render_human(payload)


def _checkpoint_dict(point: bounds.CheckPoint) -> dict:
    return {
        "label": point.label,
        "lhs": point.lhs,
        "rhs": point.rhs,
        "rel_margin": point.rel_margin,
        "status": point.status,
    }


def _report_payload(report: bounds.VerifyReport) -> dict:
    worst = report.worst
    return {
        "name": report.name,
        "checks": len(report.points),
        "skipped": len(report.skipped),
        "passed": report.passed,
        "worst": _checkpoint_dict(worst),
        "failures": [_checkpoint_dict(p) for p in report.failures],
    }


# ---------------------------------------------------------------- handlers


def _cmd_l1(args):
    value = characters.l_one_exact(args.d)
    payload = {"d": args.d, "l_one": value}
    return EXIT_OK, payload, [payload]


def _cmd_lprime(args):
    enc = characters.l_prime_truncated(args.d, args.sigma, args.terms)
    payload = {
        "d": args.d,
        "sigma": args.sigma,
        "terms": args.terms,
        "lo": enc.lo,
        "hi": enc.hi,
        "width": enc.width,
    }
    return EXIT_OK, payload, [payload]


def _cmd_pell(args):
    sol = quadratic.pell4_min_solution(args.d)
    payload = {"d": sol.d, "v0": sol.v0, "u0": sol.u0, "eta_log": sol.eta_log}
    return EXIT_OK, payload, [payload]


def _cmd_classnumber(args):
    data = quadratic.narrow_class_number(args.d)
    payload = {
        "d": data.d,
        "h_plus": data.h_plus,
        "reduced_form_count": data.reduced_form_count,
    }
    return EXIT_OK, payload, [payload]


def _cmd_hle(args):
    h = quadratic.narrow_class_number(args.d).h_plus
    reg = quadratic.regulator_log(args.d)
    payload = {"d": args.d, "h_plus": h, "regulator_log": reg, "h_log_eta": h * reg}
    return EXIT_OK, payload, [payload]


def _cmd_verify_lower(args):
    if args.lo < 5 or args.hi < args.lo:
        raise ValueError("need 5 <= lo <= hi")
    rows = []
    violations = []
    min_value, min_d = math.inf, None
    count = 0
    for d in characters.fundamental_discriminants(args.lo, args.hi + 1):
        if args.route == "analytic":
            value = math.sqrt(d) * characters.l_one_exact(d)
        else:
            value = quadratic.h_log_eta(d)
        margin = (value - args.threshold) / args.threshold
        ok = margin >= bounds.REL_CLEARANCE
        count += 1
        rows.append({"d": d, "value": value, "rel_margin": margin})
        if value < min_value:
            min_value, min_d = value, d
        if not ok:
            violations.append({"d": d, "value": value, "rel_margin": margin})
    if count == 0:
        raise ValueError("no fundamental discriminants in the requested range")
    payload = {
        "lo": args.lo,
        "hi": args.hi,
        "threshold": args.threshold,
        "route": args.route,
        "count": count,
        "min_d": min_d,
        "min_value": min_value,
        "violations": violations,
        "passed": not violations,
    }
    return (EXIT_OK if not violations else EXIT_VERIFY), payload, rows


def _cmd_verify_charsum(args):
    sigmas = tuple(float(s) for s in args.sigmas.split(","))
    report = bounds.verify_charsum_bound(args.qmax, sigmas, truncation=args.truncation)
    rows = [_checkpoint_dict(p) for p in report.points]
    return (EXIT_OK if report.passed else EXIT_VERIFY), _report_payload(report), rows


def _cmd_verify_lprime(args):
    report = bounds.verify_lprime_bound(args.c, points=args.points)
    rows = [_checkpoint_dict(p) for p in report.points]
    return (EXIT_OK if report.passed else EXIT_VERIFY), _report_payload(report), rows


def _cmd_bound_table(args):
    rows = []
    all_pass = True
    for q_lo, q_hi, c in bounds.ADMISSIBLE_C_TABLE:
        grid_lo, grid_hi = math.log(q_lo), math.log(q_hi)
        import numpy as np

        worst = min(
            bounds.admissibility_margin(float(g), c)
            for g in np.linspace(grid_lo, grid_hi, args.points)
        )
        row = {
            "q_lo": q_lo,
            "q_hi": q_hi,
            "c": c,
            "worst_rel_margin": worst,
            "passed": worst >= bounds.REL_CLEARANCE,
        }
        if args.solve:
            row["solved_c"] = bounds.solve_c(grid_lo, grid_hi, points=args.points)
        all_pass = all_pass and row["passed"]
        rows.append(row)
    payload = {"points_per_range": args.points, "rows": rows, "passed": all_pass}
    return (EXIT_OK if all_pass else EXIT_VERIFY), payload, rows


def _cmd_solve_c(args):
    c = bounds.solve_c(math.log(args.qlo), math.log(args.qhi), points=args.points)
    payload = {"q_lo": args.qlo, "q_hi": args.qhi, "points": args.points, "c": c}
    return EXIT_OK, payload, [payload]


def _cmd_beta0(args):
    report = bounds.bound_report(math.log(args.q), args.c)
    payload = {
        "q": args.q,
        "c": report.c,
        "log_q": report.log_q,
        "l_prime_upper": report.l_prime_upper,
        "l_one_lower": report.l_one_lower,
        "beta0_upper": report.beta0_upper,
        "branch": report.branch.value,
    }
    return EXIT_OK, payload, [payload]


def _cmd_search(args):
    task = search.SearchTask(args.dmin, args.dmax, args.cap, args.threshold)
    summary = search.run_search(
        task,
        workers=args.workers,
        checkpoint_path=args.checkpoint,
        chunk_size=args.chunk,
    )
    rows = [
        {
            "d": r.d,
            "u0": r.u0,
            "v0": r.v0,
            "h_plus": r.h_plus,
            "h_log_eta": r.h_log_eta,
        }
        for r in summary.records
    ]
    payload = {
        "d_min": task.d_min,
        "d_max": task.d_max,
        "cap": task.cap,
        "threshold": task.threshold,
        "candidate_count": summary.candidate_count,
        "chunks_done": summary.chunks_done,
        "complete": summary.complete,
        "elapsed": summary.elapsed,
        "min_record": rows[
            summary.records.index(summary.min_record)
        ] if summary.min_record else None,
        "violations": [
            {"d": r.d, "h_log_eta": r.h_log_eta} for r in summary.violations
        ],
        "passed": not summary.violations,
    }
    return (EXIT_OK if not summary.violations else EXIT_VERIFY), payload, rows


# ----------------------------------------------------------------- parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="siegelzero",
        description="Evaluate and verify explicit bounds for even real "
        "Dirichlet L-functions near s = 1.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format",
        choices=("human", "json", "csv"),
        default="human",
        help="output format (human: 6 significant digits, machine: 17)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("l1", parents=[common], help="exact L(1, chi_d)")
    p.add_argument("--d", type=int, required=True, help="fundamental discriminant")
    p.set_defaults(handler=_cmd_l1)

    p = sub.add_parser(
        "lprime",
        parents=[common],
        help="rigorous enclosure of |L'(sigma, chi_d)|; CSV: d,sigma,terms,lo,hi,width",
    )
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--terms", type=int, required=True, help="truncation point N >= d")
    p.set_defaults(handler=_cmd_lprime)

    p = sub.add_parser(
        "pell", parents=[common], help="minimal (v0, u0) with v0^2 - d u0^2 = 4"
    )
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(handler=_cmd_pell)

    p = sub.add_parser(
        "classnumber", parents=[common], help="narrow class number via form cycles"
    )
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(handler=_cmd_classnumber)

    p = sub.add_parser(
        "hle", parents=[common], help="h+(d) * log(eta_d) from the form/Pell route"
    )
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(handler=_cmd_hle)

    p = sub.add_parser(
        "verify-lower",
        parents=[common],
        help="check h+ log(eta) > threshold on a discriminant range; "
        "CSV: d,value,rel_margin",
    )
    p.add_argument("--lo", type=int, required=True)
    p.add_argument("--hi", type=int, required=True)
    p.add_argument("--threshold", type=float, default=bounds.HLE_LOWER_SMALL)
    p.add_argument(
        "--route",
        choices=("analytic", "forms"),
        default="analytic",
        help="analytic: sqrt(d) L(1,chi); forms: class number times regulator",
    )
    p.set_defaults(handler=_cmd_verify_lower)

    p = sub.add_parser(
        "verify-charsum",
        parents=[common],
        help="instance-check the smoothed character-sum bound on small "
        "conductors; CSV: label,lhs,rhs,rel_margin,status",
    )
    p.add_argument("--qmax", type=int, default=5000)
    p.add_argument("--sigmas", default="0.9,0.99,0.999")
    p.add_argument("--truncation", type=int, default=10**6)
    p.set_defaults(handler=_cmd_verify_charsum)

    p = sub.add_parser(
        "verify-lprime",
        parents=[common],
        help="check the |L'| <= log^2(q)/8 bound on a conductor grid; "
        "CSV: label,lhs,rhs,rel_margin,status",
    )
    p.add_argument("--c", type=float, default=100.0)
    p.add_argument("--points", type=int, default=10_000)
    p.set_defaults(handler=_cmd_verify_lprime)

    p = sub.add_parser(
        "bound-table",
        parents=[common],
        help="verify (and optionally re-solve) the admissible-constant table; "
        "CSV: q_lo,q_hi,c,worst_rel_margin,passed[,solved_c]",
    )
    p.add_argument("--points", type=int, default=1001)
    p.add_argument("--solve", action="store_true", help="also run solve_c per range")
    p.set_defaults(handler=_cmd_bound_table)

    p = sub.add_parser(
        "solve-c", parents=[common], help="largest admissible c on a conductor range"
    )
    p.add_argument("--qlo", type=float, required=True)
    p.add_argument("--qhi", type=float, required=True)
    p.add_argument("--points", type=int, default=1001)
    p.set_defaults(handler=_cmd_solve_c)

    p = sub.add_parser(
        "beta0", parents=[common], help="zero-location bound 1 - c/(sqrt q log^2 q)"
    )
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--c", type=float, default=100.0)
    p.set_defaults(handler=_cmd_beta0)

    p = sub.add_parser(
        "search",
        parents=[common],
        help="checkpointed scan for minimal Pell solutions under a cap; "
        "CSV: d,u0,v0,h_plus,h_log_eta",
    )
    p.add_argument("--dmin", type=int, required=True)
    p.add_argument("--dmax", type=int, required=True)
    p.add_argument("--cap", type=int, required=True)
    p.add_argument("--threshold", type=float, default=bounds.HLE_LOWER_SEARCHED)
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.add_argument("--checkpoint", default="search.ckpt")
    p.add_argument("--chunk", type=int, default=search.DEFAULT_CHUNK)
    p.set_defaults(handler=_cmd_search)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        code, payload, rows = args.handler(args)
    except bounds.InadmissibleError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except search.CheckpointError as exc:
        print(f"checkpoint error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    _emit(args, payload, rows)
    return code


if __name__ == "__main__":
    sys.exit(main())
