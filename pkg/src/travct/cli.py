"""Command-line front end.

Exit codes:
  0  = safe (bounded check complete / unbounded proof / verdicts agree)
  1  = memory error found, or bounded check contradicted by the CT check
  2  = no error within the bounds, but unwinding was incomplete
  3  = program is not a trav_{L,R}^Z instance, so no CT is available
  64 = usage error
  65 = parse error
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import __version__
from .bmc import UNLIMITED, BmcConfig, CounterExample, NoErrorWithinBounds, check_bounded
from .ct import (SafeForAllSizes, UnsafeAt, derive_ct, min_oracle_horizon, unbounded_verdict,
                 verify_ct_oracle)
from .interp import BudgetExhaustedError
from .lang import ParseError, parse, recognize_trav
from .vcgen import export_smt, gen_memsafe_vc, to_text

TOOL = "travct"

EXIT_OK = 0
EXIT_UNSAFE = 1
EXIT_INCOMPLETE = 2
EXIT_NOT_TRAV = 3
EXIT_USAGE = 64
EXIT_PARSE = 65

DEFAULT_HORIZON = 64

VERDICT_KINDS = ("no-error-within-bounds", "counterexample", "safe-all-sizes",
                 "unsafe-at", "not-trav", "parse-error")

REPORT_SCHEMA = {
    "type": "object",
    "required": ["tool", "version", "command", "input", "verdict", "details", "elapsedMs"],
    "additionalProperties": False,
    "properties": {
        "tool": {"type": "string"},
        "version": {"type": "string"},
        "command": {"enum": ["check", "ct", "vc", "falsify", "corpus"]},
        "input": {"type": "string"},
        "verdict": {
            "type": "object",
            "required": ["kind"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": list(VERDICT_KINDS)},
                "size": {"type": "integer", "minimum": 0},
                "accessIndex": {"type": "integer"},
                "iteration": {"type": "integer"},
                "ct": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                "unwindingComplete": {"type": "boolean"},
            },
        },
        "details": {"type": "object"},
        "elapsedMs": {"type": "integer", "minimum": 0},
    },
}

CORPUS_SCHEMA = {
    "type": "object",
    "required": ["reports", "totals"],
    "additionalProperties": False,
    "properties": {
        "reports": {"type": "array", "items": REPORT_SCHEMA},
        "totals": {
            "type": "object",
            "required": ["safe", "unsafe", "unrecognized", "parseError"],
            "additionalProperties": False,
            "properties": {k: {"type": "integer", "minimum": 0}
                           for k in ("safe", "unsafe", "unrecognized", "parseError")},
        },
    },
}


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _natural(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a natural number, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a natural number, got {text!r}")
    return value


_FROM_ENV = object()  # non-str: argparse would run `type` on a str const


def env_horizon():
    raw = os.environ.get("CT_VERIFY_HORIZON")
    if raw is None:
        return DEFAULT_HORIZON
    try:
        return _natural(raw)
    except argparse.ArgumentTypeError as e:
        raise UsageError(f"CT_VERIFY_HORIZON: {e}")


def _unwind(text):
    if text == "unlimited":
        return UNLIMITED
    return _natural(text)


# ---------------------------------------------------------------------------
# Reports

def _color(text, code):
    if os.environ.get("NO_COLOR") is not None or not sys.stdout.isatty():
        return text
    return f"\033[{code}m{text}\033[0m"


def make_report(command, source_name, verdict, details, started):
    return {
        "tool": TOOL,
        "version": __version__,
        "command": command,
        "input": source_name,
        "verdict": verdict,
        "details": details,
        "elapsedMs": int((time.perf_counter() - started) * 1000),
    }


def bounded_verdict_json(v):
    if isinstance(v, CounterExample):
        return {"kind": "counterexample", "size": v.size,
                "accessIndex": v.outcome.index, "iteration": v.outcome.iteration}
    return {"kind": "no-error-within-bounds", "unwindingComplete": v.unwinding_complete}


def unbounded_verdict_json(v, ct):
    if isinstance(v, UnsafeAt):
        return {"kind": "unsafe-at", "size": v.size, "accessIndex": v.outcome.index,
                "iteration": v.outcome.iteration, "ct": list(ct.sizes)}
    return {"kind": "safe-all-sizes", "ct": list(ct.sizes)}


def parse_error_details(err):
    return {"message": err.message, "line": err.line, "column": err.column,
            "expected": sorted(err.expected)}


def describe_bounded(v, size_bound, unwind):
    depth = "unlimited" if unwind is UNLIMITED else str(unwind)
    bounds = f"(S={size_bound}, D={depth})"
    if isinstance(v, CounterExample):
        return (_color("counterexample", "31") +
                f" {bounds}: out-of-bounds error for arrays of size {v.size}: "
                f"read index {v.outcome.index} at iteration {v.outcome.iteration}")
    if v.unwinding_complete:
        return _color("no errors within the bounds", "32") + f" {bounds}"
    return (_color("no errors within the bounds", "33") + f" {bounds}, but unwinding was "
            "incomplete: this is not a safety proof even for the checked sizes")


def describe_unbounded(v, ct):
    sizes = ", ".join(map(str, ct.sizes))
    if isinstance(v, UnsafeAt):
        return (_color("unsafe", "31") + f": out-of-bounds error for arrays of size {v.size}: "
                f"read index {v.outcome.index} at iteration {v.outcome.iteration} "
                f"(CT = {{{sizes}}})")
    return _color("memory-safe for all sizes", "32") + f" (CT = {{{sizes}}} checked)"


# ---------------------------------------------------------------------------
# Input handling

def load_source(args):
    if args.expr is not None and args.path is not None:
        raise UsageError("give either a program file or --expr, not both")
    if args.expr is not None:
        return "<expr>", args.expr
    if args.path is None:
        raise UsageError("a program file or --expr is required")
    path = Path(args.path)
    try:
        return str(path), path.read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}")


def _emit(report, as_json, human):
    if as_json:
        print(json.dumps(report))
    else:
        print(human)


def _parse_or_report(command, name, text, as_json, started):
    try:
        return parse(text)
    except ParseError as err:
        print(f"{name}:{err}", file=sys.stderr)
        if as_json:
            print(json.dumps(make_report(command, name, {"kind": "parse-error"},
                                         parse_error_details(err), started)))
        return None


def _recognize_or_report(command, name, program, as_json, started):
    trav = recognize_trav(program)
    if not trav:
        print(f"{name}: not a trav_{{L,R}}^Z program ({trav.reason}); CTs are only "
              "available for `for i in [L : s-R] do !a[i+Z]`", file=sys.stderr)
        if as_json:
            print(json.dumps(make_report(command, name, {"kind": "not-trav"},
                                         {"reason": trav.reason}, started)))
        return None
    return trav


# ---------------------------------------------------------------------------
# Subcommands

def cmd_check(args):
    started = time.perf_counter()
    name, text = load_source(args)
    program = _parse_or_report("check", name, text, args.json, started)
    if program is None:
        return EXIT_PARSE
    cfg = BmcConfig(args.size_bound, args.unwind)
    try:
        verdict = check_bounded(program, cfg)
    except BudgetExhaustedError as e:
        raise UsageError(str(e))
    details = {"sizeBound": cfg.size_bound,
               "unwind": "unlimited" if cfg.unwind_depth is UNLIMITED else cfg.unwind_depth}
    if isinstance(verdict, NoErrorWithinBounds):
        details["sizesChecked"] = list(verdict.sizes_checked)
    else:
        details["priorAccesses"] = [[a.iteration, a.index] for a in verdict.outcome.prior_accesses]
    report = make_report("check", name, bounded_verdict_json(verdict), details, started)
    _emit(report, args.json, describe_bounded(verdict, cfg.size_bound, cfg.unwind_depth))
    if isinstance(verdict, CounterExample):
        return EXIT_UNSAFE
    return EXIT_OK if verdict.unwinding_complete else EXIT_INCOMPLETE


def oracle_json(report):
    return {"horizon": report.horizon, "byCandidate": report.by_candidate,
            "byBrute": report.by_brute, "ok": report.ok}


def cmd_ct(args):
    started = time.perf_counter()
    name, text = load_source(args)
    program = _parse_or_report("ct", name, text, args.json, started)
    if program is None:
        return EXIT_PARSE
    trav = _recognize_or_report("ct", name, program, args.json, started)
    if trav is None:
        return EXIT_NOT_TRAV
    ct = derive_ct(trav)
    verdict = unbounded_verdict(trav)
    details = {"instance": {"L": trav.L, "R": trav.R, "Z": trav.Z}, "domain": ct.domain_note}
    lines = [f"{trav}: CT = {{{', '.join(map(str, ct.sizes))}}}",
             describe_unbounded(verdict, ct)]
    oracle = None
    if args.verify_oracle is not None:
        horizon = env_horizon() if args.verify_oracle is _FROM_ENV else args.verify_oracle
        if horizon < max(max(ct.sizes), min_oracle_horizon(trav)):
            raise UsageError(f"--verify-oracle horizon must be at least "
                             f"{max(max(ct.sizes), min_oracle_horizon(trav))} for {trav}")
        oracle = verify_ct_oracle(trav, ct, horizon)
        details["oracle"] = oracle_json(oracle)
        lines.append(f"oracle over sizes 0..{horizon}: "
                     + ("OK" if oracle.ok else "MISMATCH")
                     + f" (CT says {'safe' if oracle.by_candidate else 'unsafe'}, "
                     f"brute force says {'safe' if oracle.by_brute else 'unsafe'})")
    report = make_report("ct", name, unbounded_verdict_json(verdict, ct), details, started)
    _emit(report, args.json, "\n".join(lines))
    if oracle is not None and not oracle.ok:
        print(f"{name}: CT oracle mismatch; the verdict above is not trustworthy",
              file=sys.stderr)
        return EXIT_UNSAFE
    return EXIT_OK if isinstance(verdict, SafeForAllSizes) else EXIT_UNSAFE


def cmd_vc(args):
    started = time.perf_counter()
    name, text = load_source(args)
    program = _parse_or_report("vc", name, text, False, started)
    if program is None:
        return EXIT_PARSE
    trav = _recognize_or_report("vc", name, program, False, started)
    if trav is None:
        return EXIT_NOT_TRAV
    vc = gen_memsafe_vc(trav)
    print(to_text(vc))
    if args.smt is not None:
        mode = "universally over s >= 0" if args.at_size is None else f"at s = {args.at_size}"
        comment = f"memory safety of {trav}, checked {mode}\nsat = counterexample, unsat = safe"
        try:
            Path(args.smt).write_text(export_smt(vc, args.at_size, comment))
        except OSError as e:
            raise UsageError(f"cannot write {args.smt}: {e.strerror}")
    elif args.at_size is not None:
        raise UsageError("--at-size requires --smt")
    return EXIT_OK


def cmd_falsify(args):
    started = time.perf_counter()
    name, text = load_source(args)
    program = _parse_or_report("falsify", name, text, args.json, started)
    if program is None:
        return EXIT_PARSE
    trav = _recognize_or_report("falsify", name, program, args.json, started)
    if trav is None:
        return EXIT_NOT_TRAV
    bounded = check_bounded(program, BmcConfig(args.size_bound, UNLIMITED))
    ct = derive_ct(trav)
    unbounded = unbounded_verdict(trav)
    bmc_safe = isinstance(bounded, NoErrorWithinBounds)
    ct_safe = isinstance(unbounded, SafeForAllSizes)
    pitfall = bmc_safe and not ct_safe

    bmc_text = ("no error" if bmc_safe
                else f"out-of-bounds error for arrays of size {bounded.size}")
    ct_text = "safe for all sizes" if ct_safe else f"unsafe at size {unbounded.size}"
    line = f"BMC(S={args.size_bound}): {bmc_text}; CT check: {ct_text}"
    if pitfall:
        line += (f"\n{_color('pitfall', '31')}: the bounded check missed size {unbounded.size}, "
                 f"which lies above the size bound {args.size_bound}")
    elif bmc_safe == ct_safe:
        line += "\nverdicts agree"
    else:
        line += "\ninconsistent: BMC found an error the CT check did not"

    details = {"sizeBound": args.size_bound,
               "bmc": bounded_verdict_json(bounded),
               "pitfall": pitfall}
    if pitfall:
        details["missedSize"] = unbounded.size
    report = make_report("falsify", name, unbounded_verdict_json(unbounded, ct), details, started)
    _emit(report, args.json, line)
    return EXIT_OK if bmc_safe == ct_safe else EXIT_UNSAFE


def corpus_entry(path: Path):
    """CT report for one file plus its totals bucket."""
    started = time.perf_counter()
    name = str(path)
    try:
        program = parse(path.read_text())
    except ParseError as err:
        return make_report("ct", name, {"kind": "parse-error"},
                           parse_error_details(err), started), "parseError"
    except (OSError, UnicodeDecodeError) as e:
        return make_report("ct", name, {"kind": "parse-error"},
                           {"message": f"cannot read file: {e}"}, started), "parseError"
    trav = recognize_trav(program)
    if not trav:
        return make_report("ct", name, {"kind": "not-trav"},
                           {"reason": trav.reason}, started), "unrecognized"
    ct = derive_ct(trav)
    verdict = unbounded_verdict(trav)
    details = {"instance": {"L": trav.L, "R": trav.R, "Z": trav.Z}, "domain": ct.domain_note}
    bucket = "safe" if isinstance(verdict, SafeForAllSizes) else "unsafe"
    return make_report("ct", name, unbounded_verdict_json(verdict, ct), details, started), bucket


def cmd_corpus(args):
    root = Path(args.dir)
    if not root.is_dir():
        raise UsageError(f"{root} is not a directory")
    files = sorted(p for p in root.iterdir() if p.suffix == ".trav" and p.is_file())
    totals = {"safe": 0, "unsafe": 0, "unrecognized": 0, "parseError": 0}
    reports = []
    for path in files:
        report, bucket = corpus_entry(path)
        totals[bucket] += 1
        reports.append(report)
    if args.json:
        print(json.dumps({"reports": reports, "totals": totals}))
    else:
        width = max([len(p.name) for p in files] + [4])
        for path, report in zip(files, reports):
            v = report["verdict"]
            extra = ""
            if v["kind"] == "unsafe-at":
                extra = f" size={v['size']} index={v['accessIndex']}"
            elif "ct" in v:
                extra = f" ct={v['ct']}"
            print(f"{path.name:<{width}}  {v['kind']}{extra}")
        print("totals: " + ", ".join(f"{k}={n}" for k, n in totals.items()))
    return EXIT_PARSE if totals["parseError"] else EXIT_OK


# ---------------------------------------------------------------------------

def _add_input(p):
    p.add_argument("path", nargs="?", help="program file (.trav)")
    p.add_argument("--expr", help="inline program text instead of a file")


def build_parser():
    parser = _ArgumentParser(prog=TOOL, description=(
        "Memory-safety checking for array-traversal programs: bounded model "
        "checking, verification conditions and completeness thresholds."))
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p = sub.add_parser("check", help="bounded model check over sizes 0..N")
    _add_input(p)
    p.add_argument("--size-bound", type=_natural, required=True, metavar="N")
    p.add_argument("--unwind", type=_unwind, default=UNLIMITED, metavar="N|unlimited",
                   help="max iterations per loop entry (default: unlimited)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("ct", help="derive a completeness threshold and an unbounded verdict")
    _add_input(p)
    p.add_argument("--verify-oracle", type=_natural, nargs="?", metavar="N",
                   const=_FROM_ENV,
                   help="cross-check the CT against brute force over sizes 0..N "
                        "(default N from CT_VERIFY_HORIZON, else 64)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_ct)

    p = sub.add_parser("vc", help="print the memory-safety verification condition")
    _add_input(p)
    p.add_argument("--smt", metavar="PATH", help="also write an SMT-LIB2 query")
    p.add_argument("--at-size", type=_natural, metavar="N",
                   help="pin s = N in the SMT query instead of quantifying over it")
    p.set_defaults(func=cmd_vc)

    p = sub.add_parser("falsify", help="compare a bounded check with the CT verdict")
    _add_input(p)
    p.add_argument("--size-bound", type=_natural, required=True, metavar="N")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_falsify)

    p = sub.add_parser("corpus", help="CT verdicts for every *.trav file in a directory")
    p.add_argument("dir")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_corpus)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"{TOOL} {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
