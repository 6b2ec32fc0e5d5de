"""Command-line front end.

Subcommands: measure (theoretical table), simulate (distribution test,
multi-prime when several -p are given), moments, sweep (saturation or
convergence), verify (oracle-vs-formula suites).

Exit codes: 0 success, 1 enabled assertion failed, 2 usage/config error.
Every emitted report embeds the exact invocation, the seed and the library
version; re-running the printed invocation reproduces it bit for bit apart
from timing fields.
"""

from __future__ import annotations

import argparse
import io
import json
import sys

from ._version import __version__
from .experiments import (
    POLICIES,
    ExperimentConfig,
    ExperimentReport,
    run_convergence_sweep,
    run_distribution_experiment,
    run_moment_experiment,
    run_multiprime_experiment,
    run_saturation_sweep,
)
from .measure import CLMeasure, cl_normalizer, limiting_probability
from .partitions import format_partition, parse_partition, partitions_up_to
from .sampling import SampleSpec

FORMATS = ("pretty", "json", "csv")


def _int_list(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cokerdist",
        description="Cohen-Lenstra cokernel distributions: exact predictions "
                    "and Monte Carlo verification.")
    parser.add_argument("--version", action="version", version=f"cokerdist {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common_output(sp):
        sp.add_argument("--format", choices=FORMATS, default="pretty")
        sp.add_argument("-o", "--output", default=None, help="write to file instead of stdout")

    def common_sampling(sp, multi_prime: bool):
        if multi_prime:
            sp.add_argument("-p", "--prime", action="append", type=int, required=True,
                            dest="primes", help="prime; repeat for multi-prime mode")
        else:
            sp.add_argument("-p", "--prime", type=int, required=True, dest="p")
        sp.add_argument("-u", type=int, default=0, help="extra rows (default 0)")
        sp.add_argument("-n", type=int, default=10, help="columns (default 10)")
        sp.add_argument("-e", "--precision", type=int, default=10,
                        help="working precision exponent (default 10)")
        sp.add_argument("-N", "--samples", type=int, default=100000)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--tracked-max-size", type=int, default=8)
        sp.add_argument("--policy", choices=POLICIES, default="escalate-precision")
        sp.add_argument("--alpha", type=float, default=0.001)
        sp.add_argument("--assert", dest="assert_", action="store_true",
                        help="exit 1 if any statistical check fails")

    m = sub.add_parser("measure", help="limiting probability table")
    m.add_argument("-p", "--prime", type=int, required=True, dest="p")
    m.add_argument("-u", type=int, default=0)
    m.add_argument("--max-size", type=int, default=8)
    m.add_argument("--tolerance", type=float, default=1e-12)
    common_output(m)

    s = sub.add_parser("simulate", help="distribution experiment (multi-prime with repeated -p)")
    common_sampling(s, multi_prime=True)
    common_output(s)

    mo = sub.add_parser("moments", help="surjection-moment experiment")
    common_sampling(mo, multi_prime=False)
    mo.add_argument("--mu", action="append", required=True,
                    help='target type as comma-joined parts, e.g. "1" or "2,1"; repeatable')
    common_output(mo)

    sw = sub.add_parser("sweep", help="saturation or convergence sweep")
    sw.add_argument("kind", choices=("saturation", "convergence"))
    common_sampling(sw, multi_prime=False)
    sw.add_argument("--e-list", type=_int_list, default=None, help="saturation: precisions")
    sw.add_argument("--n-list", type=_int_list, default=None, help="convergence: matrix sizes")
    common_output(sw)

    v = sub.add_parser("verify", help="oracle-vs-formula verification suites")
    v.add_argument("-p", "--prime", type=int, default=2, dest="p")
    v.add_argument("--max-group-order", type=int, default=64)
    v.add_argument("--budget", type=int, default=10**7, help="oracle operation budget")
    v.add_argument("--duality-max-size", type=int, default=8)
    v.add_argument("--snf-checks", type=int, default=2000)
    v.add_argument("--seed", type=int, default=0)
    return parser


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _table(headers: list, rows: list) -> str:
    cells = [[str(x) for x in row] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in cells)) if cells else len(h)
              for i, h in enumerate(headers)]
    out = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
    out.append("  ".join("-" * w for w in widths))
    for row in cells:
        out.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
    return "\n".join(out) + "\n"


def _csv(headers: list, rows: list) -> str:
    buf = io.StringIO()
    buf.write(",".join(headers) + "\n")
    for row in rows:
        buf.write(",".join(str(x) for x in row) + "\n")
    return buf.getvalue()


def _report_rows(report: ExperimentReport) -> tuple:
    """Flat table view of a report for csv/pretty output."""
    kind = report.kind
    res = report.results
    if kind == "distribution":
        headers = ["partition", "count", "frequency", "theory",
                   "wilson99_low", "wilson99_high"]
        rows = [[b["partition"], b["count"], f"{b['frequency']:.6f}",
                 f"{b['theory']:.6f}", f"{b['wilson99_low']:.6f}",
                 f"{b['wilson99_high']:.6f}"] for b in res["bins"]]
        other = res["other"]
        rows.append(["other", other["count"], f"{other['frequency']:.6f}",
                     f"{other['theory']:.6f}", "", ""])
        return headers, rows
    if kind == "moments":
        headers = ["mu", "target_kind", "empirical_mean", "target", "z"]
        return headers, [[r["mu"], r["target_kind"], f"{r['empirical_mean']:.6f}",
                          f"{r['target']:.6f}", f"{r['z']:.3f}"] for r in res["rows"]]
    if kind == "saturation_sweep":
        headers = ["e", "raw_fraction", "unresolved_fraction"]
        return headers, [[r["e"], f"{r['raw_fraction']:.6g}",
                          f"{r['unresolved_fraction']:.6g}"] for r in res["rows"]]
    if kind == "convergence_sweep":
        headers = ["n", "tv_distance"]
        return headers, [[r["n"],
                          "" if r["tv_distance"] is None else f"{r['tv_distance']:.6f}"]
                         for r in res["rows"]]
    if kind == "multiprime":
        headers = ["p", "trivial_frequency", "theory_trivial"]
        rows = [[r["p"], f"{r['trivial_frequency']:.6f}", f"{r['theory_trivial']:.6f}"]
                for r in res["per_prime"]]
        joint = res.get("joint_trivial")
        if joint:
            rows.append(["joint", f"{joint['frequency']:.6f}",
                         f"{joint['theory_product']:.6f}"])
        return headers, rows
    raise ValueError(f"no table for report kind {kind}")


def _emit_report(report: ExperimentReport, fmt: str, output: str | None) -> None:
    if fmt == "json":
        _emit(report.to_json() + "\n", output)
        return
    headers, rows = _report_rows(report)
    if fmt == "csv":
        _emit(_csv(headers, rows), output)
        return
    text = _table(headers, rows)
    lines = [text]
    for chk in report.checks:
        status = "PASS" if chk["passed"] else "FAIL"
        lines.append(f"{status}  {chk['name']}")
    for warning in report.warnings:
        lines.append(f"warning: {warning}")
    t = report.timing
    if t:
        lines.append(f"{t['wall_seconds']:.2f}s, {t['samples_per_second']:.0f} samples/s")
    _emit("\n".join(lines) + "\n", output)


def cmd_measure(args, invocation: str) -> int:
    measure = CLMeasure(args.p, args.u, args.tolerance)
    rows = []
    cumulative = 0.0
    for lam in partitions_up_to(args.max_size):
        prob = float(limiting_probability(measure, lam))
        cumulative += prob
        rows.append([format_partition(lam), len(lam) and sum(lam) or 0,
                     f"{prob:.9f}", f"{cumulative:.9f}"])
    headers = ["partition", "size", "probability", "cumulative"]
    tail = 1.0 - cumulative
    norm = cl_normalizer(args.p, args.u, args.tolerance)
    if args.format == "json":
        payload = {
            "invocation": invocation,
            "library_version": __version__,
            "p": args.p, "u": args.u, "max_size": args.max_size,
            "rows": [{"partition": r[0], "size": r[1], "probability": float(r[2]),
                      "cumulative": float(r[3])} for r in rows],
            "tail_mass": tail,
            "normalizer_factors": norm.factors,
            "normalizer_tail_bound": norm.tail_bound,
        }
        _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.output)
    elif args.format == "csv":
        _emit(_csv(headers, rows), args.output)
    else:
        _emit(_table(headers, rows) + f"tail mass beyond size {args.max_size}: {tail:.9f}\n",
              args.output)
    return 0


def _build_config(args, primes=None) -> ExperimentConfig:
    primes = primes if primes is not None else [args.p]
    return ExperimentConfig(
        primes=tuple(primes),
        precisions=tuple(args.precision for _ in primes),
        n=args.n, u=args.u, seed=args.seed, count=args.samples,
        tracked_max_size=args.tracked_max_size,
        saturation_policy=args.policy, alpha=args.alpha, workers=args.workers)


def cmd_simulate(args, invocation: str) -> int:
    cfg = _build_config(args, primes=args.primes)
    if len(args.primes) == 1:
        report = run_distribution_experiment(cfg, invocation=invocation)
    else:
        report = run_multiprime_experiment(cfg, invocation=invocation)
    _emit_report(report, args.format, args.output)
    return 0 if (report.passed or not args.assert_) else 1


def cmd_moments(args, invocation: str) -> int:
    cfg = _build_config(args)
    mus = [parse_partition(text) for text in args.mu]
    report = run_moment_experiment(cfg, mus, invocation=invocation)
    _emit_report(report, args.format, args.output)
    return 0 if (report.passed or not args.assert_) else 1


def cmd_sweep(args, invocation: str) -> int:
    if args.kind == "saturation":
        e_list = args.e_list or [2, 4, 6, 8]
        report = run_saturation_sweep(args.p, args.u, args.n, e_list, args.samples,
                                      seed=args.seed, workers=args.workers,
                                      invocation=invocation)
    else:
        n_list = args.n_list or [2, 4, 8, 12]
        report = run_convergence_sweep(args.p, args.u, n_list, args.samples,
                                       e=args.precision, seed=args.seed,
                                       tracked_max_size=args.tracked_max_size,
                                       workers=args.workers, invocation=invocation)
    _emit_report(report, args.format, args.output)
    return 0 if (report.passed or not args.assert_) else 1


def cmd_verify(args, invocation: str) -> int:
    from .verification import duality_sweep, oracle_equivalence, snf_crosscheck

    failures = 0
    suites = oracle_equivalence(args.p, args.max_group_order, op_budget=args.budget)
    for name, suite in suites.items():
        status = "PASS" if suite.ok else "FAIL"
        failures += not suite.ok
        print(f"{status}  oracle:{name}  checked={suite.checked} skipped={suite.skipped}")
        for mm in suite.mismatches[:5]:
            print(f"      mismatch {mm['instance']}: oracle={mm['oracle']} formula={mm['formula']}")
    dual = duality_sweep(args.duality_max_size)
    failures += not dual.ok
    print(f"{'PASS' if dual.ok else 'FAIL'}  duality  checked={dual.checked}")
    snf = snf_crosscheck(args.snf_checks, seed=args.seed)
    failures += not snf.ok
    print(f"{'PASS' if snf.ok else 'FAIL'}  snf-crosscheck  checked={snf.checked}")
    return 1 if failures else 0


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    invocation = "cokerdist " + " ".join(argv)
    try:
        if args.command == "measure":
            return cmd_measure(args, invocation)
        if args.command == "simulate":
            return cmd_simulate(args, invocation)
        if args.command == "moments":
            return cmd_moments(args, invocation)
        if args.command == "sweep":
            return cmd_sweep(args, invocation)
        if args.command == "verify":
            return cmd_verify(args, invocation)
    except ValueError as exc:
        parser.error(str(exc))  # exits 2
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
