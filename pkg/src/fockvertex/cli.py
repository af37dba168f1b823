"""Command-line front end: ``fockvertex run`` and ``fockvertex list``.

Every flag can also be set through an environment variable named
``FOCKVERTEX_<FLAG>`` (upper case, dashes as underscores); explicit flags win.
Exit status: 0 if all selected suites pass, 1 if any fails, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence

from .fock import TruncationConfig
from .scalars import DEFAULT_Q, is_root_of_unity, parse_complex
from .verify import SUITES, SuiteReport, VerifyConfig, run_suite

ENV_PREFIX = "FOCKVERTEX_"
log = logging.getLogger("fockvertex")

# suites whose group contains q as a free generator
NEEDS_GENERIC_Q = {"normal-order", "thm237", "limit248", "fock", "cor47", "cor410", "cor412",
                   "prop419", "prop420", "prop421", "dualpair", "sector"}


class UsageError(Exception):
    pass


def _env(name: str, default):
    return os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"), default)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fockvertex",
                                description="Brute-force identity checks on truncated Fock spaces.")
    sub = p.add_subparsers(dest="command")
    run = sub.add_parser("run", help="run verification suites")
    run.add_argument("--suite", action="append", default=None,
                     help="suite name, comma list or 'all' (repeatable)")
    run.add_argument("--m", type=int, default=None, help="number of oscillator slots M")
    run.add_argument("--n", type=int, default=None, help="matrix size N of the clock-shift algebras")
    run.add_argument("--q", default=None, help="deformation parameter, e.g. '1.3+0.45i'")
    run.add_argument("--xi-order", type=int, default=None,
                     help="torsion order used by the bracket suite (default: 2 and 3)")
    run.add_argument("--cutoff", type=int, default=None, help="degree cutoff D")
    run.add_argument("--intermediate-cutoff", type=int, default=None, help="intermediate cutoff D'")
    run.add_argument("--charge-window", type=int, default=None)
    run.add_argument("--tol", type=float, default=None)
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--samples", type=int, default=None, help="random pairs per homomorphism suite")
    run.add_argument("--jobs", type=int, default=None, help="worker processes (default 1)")
    run.add_argument("--report", default=None, help="write a JSON report to this path")
    run.add_argument("-v", "--verbose", action="store_true")
    sub.add_parser("list", help="list suites and what they check")
    return p


def _resolve(args) -> dict:
    def pick(name, cast, default):
        val = getattr(args, name.replace("-", "_"))
        if val is None:
            val = _env(name, None)
        if val is None:
            return default
        try:
            return cast(val)
        except (TypeError, ValueError) as exc:
            raise UsageError(f"invalid value for --{name}: {val!r}") from exc

    suites_raw = args.suite or [_env("suite", "all")]
    names: List[str] = []
    for chunk in suites_raw:
        for s in str(chunk).split(","):
            s = s.strip()
            if not s:
                continue
            if s == "all":
                names.extend(SUITES)
            elif s in SUITES:
                names.append(s)
            else:
                raise UsageError(f"unknown suite {s!r}; see 'fockvertex list'")
    names = list(dict.fromkeys(names))
    return {
        "suites": names,
        "M": pick("m", int, 2),
        "N": pick("n", int, 2),
        "q": pick("q", parse_complex, DEFAULT_Q),
        "xi_order": pick("xi-order", int, None),
        "cutoff": pick("cutoff", int, 6),
        "intermediate_cutoff": pick("intermediate-cutoff", int, None),
        "charge_window": pick("charge-window", int, 4),
        "tol": pick("tol", float, 1e-9),
        "seed": pick("seed", int, 42),
        "samples": pick("samples", int, 30),
        "jobs": pick("jobs", int, 1),
        "report": pick("report", str, None),
    }


def make_config(opts: dict) -> VerifyConfig:
    for key in ("M", "N", "cutoff", "charge_window", "samples", "jobs"):
        if opts[key] < 1 and not (key == "cutoff" and opts[key] == 0):
            raise UsageError(f"{key} must be positive")
    if opts["xi_order"] is not None and opts["xi_order"] < 1:
        raise UsageError("xi-order must be positive")
    if opts["tol"] <= 0:
        raise UsageError("tol must be positive")
    if opts["q"] == 0:
        raise UsageError("q must be nonzero")
    generic = [s for s in opts["suites"] if s in NEEDS_GENERIC_Q]
    if generic and is_root_of_unity(opts["q"]):
        raise UsageError(f"q={opts['q']} is a root of unity; suites {', '.join(generic)} need generic q")
    dprime = opts["intermediate_cutoff"]
    if dprime is None:
        dprime = opts["cutoff"] + 4
    try:
        tc = TruncationConfig(opts["cutoff"], dprime, opts["charge_window"], opts["tol"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return VerifyConfig(M=opts["M"], N=opts["N"], q=opts["q"], truncation=tc, tol=opts["tol"],
                        seed=opts["seed"], samples=opts["samples"], xi_order=opts["xi_order"])


def _run_one(args):
    name, cfg = args
    return run_suite(name, cfg)


def run_suites(names: Sequence[str], cfg: VerifyConfig, jobs: int = 1) -> List[SuiteReport]:
    """Run suites, in parallel if jobs > 1; results keep the input order."""
    work = [(n, cfg) for n in names]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_one, work))
    return [_run_one(w) for w in work]


def build_report(reports: Sequence[SuiteReport], cfg: VerifyConfig,
                 timestamp: Optional[str] = None) -> dict:
    rows = []
    for r in reports:
        what = SUITES[r.suite][0]
        for c in r.cases:
            rows.append({"suite": r.suite, "case": c.description,
                         "maxAbsError": c.max_abs_error, "exact": c.exact,
                         "pass": c.passed, "checks": what, "note": c.note})
    return {
        "timestamp": timestamp or time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "config": cfg.snapshot(),
        "pass": all(r.passed for r in reports),
        "suites": [{"suite": r.suite, "pass": r.passed, "checks": SUITES[r.suite][0],
                    "maxAbsError": r.max_error, "exactCases": len(r.exact_cases),
                    "notes": r.notes} for r in reports],
        "cases": rows,
    }


def dump_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, default=str) + "\n"


def cmd_list(out=None) -> int:
    out = out or sys.stdout
    width = max(len(n) for n in SUITES)
    for name, (what, _) in SUITES.items():
        print(f"{name:<{width}}  {what}", file=out)
    return 0


def cmd_run(args, out=None) -> int:
    out = out or sys.stdout
    opts = _resolve(args)
    cfg = make_config(opts)
    reports = run_suites(opts["suites"], cfg, opts["jobs"])
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status}  {r.suite:<13} cases={len(r.cases):<4} exact={len(r.exact_cases):<4} "
              f"maxAbsError={r.max_error:.3e}", file=out)
        for c in r.cases:
            if c.exact and not c.passed:
                print(f"      failed: {c.description} ({c.max_abs_error})", file=out)
        for n in r.notes:
            print(f"      note: {n}", file=out)
    if opts["report"]:
        with open(opts["report"], "w", encoding="utf-8") as fh:
            fh.write(dump_report(build_report(reports, cfg)))
    return 0 if all(r.passed for r in reports) else 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "list":
        return cmd_list()
    if args.command != "run":
        parser.print_help()
        return 2
    try:
        return cmd_run(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
