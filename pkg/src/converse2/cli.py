"""Command-line front end: ``converse2 verify | list-forms | euler | report-schema``.

Defaults may come from a key=value file named by $CONVERSE2_CONFIG; flags
given on the command line win.  Exit status: 0 all checks pass, 1 some
check failed or errored, 2 the input or configuration could not be parsed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .arith import primes_up_to
from .coefficients import CoefficientFileError
from .forms import FormSpecError, list_forms, load_form
from .report import REPORT_SCHEMA, all_passed, build_report, dumps
from .suite import CHECKS, SuiteConfig, SuiteError, euler_table, parse_perturb, run_suite

CONFIG_ENV = "CONVERSE2_CONFIG"
CONFIG_KEYS = ("form", "primes", "checks", "tolerance", "truncation", "precision_bits", "perturb", "jobs")


class ConfigError(ValueError):
    pass


def read_config_file(path: str | os.PathLike) -> dict[str, str]:
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not sep or key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: expected one of {', '.join(CONFIG_KEYS)} = value")
        out[key] = value.strip()
    return out


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise ConfigError(f"bad integer list {text!r}") from exc


def build_config(args: argparse.Namespace, file_values: dict[str, str]) -> SuiteConfig:
    merged = dict(file_values)
    for key in CONFIG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            merged[key] = v
    try:
        return SuiteConfig(
            form=merged.get("form", "delta"),
            primes=_int_list(merged.get("primes", "")),
            checks=tuple(c.strip() for c in merged.get("checks", "").split(",") if c.strip()),
            tolerance=float(merged["tolerance"]) if "tolerance" in merged else None,
            truncation=int(merged.get("truncation", 10_000)),
            precision_bits=int(merged["precision_bits"]) if merged.get("precision_bits") else None,
            perturb=parse_perturb(merged.get("perturb", "")),
            jobs=int(merged.get("jobs", 1)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_verify(args: argparse.Namespace) -> int:
    env = os.environ.get(CONFIG_ENV)
    file_values = read_config_file(env) if env else {}
    config = build_config(args, file_values)
    run, records = run_suite(config)
    report = build_report(run, records)
    _write(dumps(report), args.out)
    for r in records:
        if r.status in ("fail", "error"):
            print(f"{r.status.upper()}: {r.name} {r.parameters} residual={r.residual} {r.detail}", file=sys.stderr)
    s = report["summary"]
    print(f"{s['pass']} pass, {s['fail']} fail, {s['error']} error, {s['reported']} reported", file=sys.stderr)
    return 0 if all_passed(report) else 1


def cmd_list_forms(args: argparse.Namespace) -> int:
    rows = list_forms()
    if args.json:
        _write(json.dumps(rows, indent=2) + "\n", None)
    else:
        for r in rows:
            print(f"{r['descriptor']:<10} N={r['level']:<4} k={r['weight']:<3} {r['summary']}")
    return 0


def cmd_euler(args: argparse.Namespace) -> int:
    series = load_form(args.form, args.truncation)
    primes = list(_int_list(args.primes)) if args.primes else primes_up_to(args.bound)
    rows = euler_table(series, primes)
    if args.out or args.json:
        _write(json.dumps(rows, indent=2) + "\n", args.out)
    else:
        for r in rows:
            lam = complex(*r["lambda"])
            mu = complex(*r["mu"])
            print(f"p={r['p']:<4} lambda={lam:.10g} mu={mu:.10g} degree={r['degree']} "
                  f"defect={r['defect']:.3g} nonvanishing={r['nonvanishing']}")
    return 0


def cmd_report_schema(args: argparse.Namespace) -> int:
    _write(json.dumps(REPORT_SCHEMA, indent=2) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="converse2", description="Numerical checks of a converse theorem for twisted L-functions.")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run checks on one form and write a JSON report")
    v.add_argument("--form", help="delta, level11, eis15, eis35, eis:q1.i1,q2.i2 or file:path")
    v.add_argument("--primes", help="comma-separated primes q (default depends on the level)")
    v.add_argument("--checks", help=f"comma-separated subset of: {', '.join(CHECKS)}")
    v.add_argument("--tolerance", help="override every per-check tolerance")
    v.add_argument("--truncation", help="number of coefficients (default 10000)")
    v.add_argument("--precision-bits", dest="precision_bits", help="mantissa bits for the mpmath L-value path")
    v.add_argument("--perturb", help="shift coefficients, e.g. a2=+0.01")
    v.add_argument("--jobs", help="worker processes")
    v.add_argument("--out", help="report path (default stdout)")
    v.set_defaults(func=cmd_verify)

    lf = sub.add_parser("list-forms", help="list bundled forms")
    lf.add_argument("--json", action="store_true")
    lf.set_defaults(func=cmd_list_forms)

    e = sub.add_parser("euler", help="tabulate local Euler data")
    e.add_argument("--form", default="delta")
    e.add_argument("--primes")
    e.add_argument("--bound", type=int, default=97)
    e.add_argument("--truncation", type=int, default=10_000)
    e.add_argument("--json", action="store_true")
    e.add_argument("--out")
    e.set_defaults(func=cmd_euler)

    rs = sub.add_parser("report-schema", help="print the JSON schema of verify reports")
    rs.add_argument("--out")
    rs.set_defaults(func=cmd_report_schema)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SuiteError, FormSpecError, CoefficientFileError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
