"""Command line entry point: ``svlv prove | dims | oracle | audit``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .assumptions import emit_report
from .audit import Finding, audit_budget_reliance, audit_target_config, blockers, sort_findings
from .dimensions import check_dims
from .frontend import load
from .frontend.source import Loc
from .oracle import DomainTooLarge, enumerate_runs, is_fault, run as run_once
from .pipeline import (
    EXIT_BLOCKERS, EXIT_FAILED, EXIT_FRONTEND, EXIT_OK, EXIT_UNKNOWN, RunOptions, analyze, output_dir,
)
from .report import Summary, bucket, emit, emit_log
from .target import DEFAULT_TARGET, TargetConfigError, load_target

__all__ = ["RunOptions", "load_target", "main", "run"]


def run(opts: RunOptions, stdout=None, stderr=None) -> int:
    """Full pipeline with artifacts written to the output directory; returns the exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    missing = [p for p in opts.inputs if not Path(p).is_file()]
    if missing:
        for p in missing:
            print(f"svlv: no such file: {p}", file=stderr)
        return EXIT_FRONTEND
    try:
        result = analyze(opts)
    except TargetConfigError as exc:
        print(f"svlv: {exc}", file=stderr)
        return EXIT_FRONTEND
    for d in result.diagnostics:
        print(d, file=stderr)
    if result.summary is None:
        return result.exit_code
    out = output_dir(opts)
    out.mkdir(parents=True, exist_ok=True)
    s = result.summary
    if "text" in opts.formats:
        (out / "report.txt").write_bytes(emit(s, "text"))
    if "json" in opts.formats:
        (out / "report.json").write_bytes(emit(s, "json"))
    log = emit_log(s)
    for f in result.findings:
        log += f.render() + "\n"
    (out / "analysis.log").write_text(log, encoding="utf-8")
    if opts.assumptions_report:
        (out / "assumptions.txt").write_text(emit_report(result.graph), encoding="utf-8")
    stdout.write(emit(s, "text").decode("utf-8"))
    for f in result.findings:
        print(f.render(), file=stdout)
    return result.exit_code


# -- subcommands ----------------------------------------------------------------

def _cmd_prove(args) -> int:
    formats = ("text", "json") if args.format == "both" else (args.format,)
    opts = RunOptions(
        inputs=args.files, steps=args.steps, timeout_s=args.timeout, target_path=args.target,
        declared_target_path=args.declared_target, mode=args.mode, assumptions_report=args.assumptions,
        audit=args.audit, strict=args.strict, assume_exceptions_off=args.assume_exceptions_off,
        out_dir=args.out, formats=formats, timings=args.timings, partial_limit=args.partial_limit,
    )
    return run(opts)


def _cmd_dims(args) -> int:
    program, diags = load(args.files)
    if program is None or diags:
        for d in diags:
            print(d.render(), file=sys.stderr)
        return EXIT_FRONTEND
    errors = check_dims(program)
    for d in errors:
        print(d.render())
    return EXIT_FRONTEND if errors else EXIT_OK


def _parse_value(raw: str):
    low = raw.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(raw)
    except ValueError:
        return float(raw)


def _cmd_oracle(args) -> int:
    program, diags = load([args.file])
    if program is None or diags:
        for d in diags:
            print(d.render(), file=sys.stderr)
        return EXIT_FRONTEND
    target = load_target(args.target) if args.target else DEFAULT_TARGET
    subs = [s for _, s in program.subprograms() if s.key == args.sub.lower()]
    if not subs:
        print(f"svlv: no subprogram named {args.sub}", file=sys.stderr)
        return EXIT_FRONTEND
    sub = subs[0]
    values = dict(a.split("=", 1) for a in args.arg)
    faults = 0
    single = all("," not in v for v in values.values())
    if single and {p.name.lower() for p in sub.params} == {k.lower() for k in values}:
        by_name = {k.lower(): _parse_value(v) for k, v in values.items()}
        outcome = run_once(program, sub, [by_name[p.name.lower()] for p in sub.params], target, fuel=args.fuel)
        print(outcome.render())
        faults = int(is_fault(outcome))
    else:
        domains = {k: [_parse_value(x) for x in v.split(",")] for k, v in values.items()}
        try:
            runs = enumerate_runs(program, sub, domains, target, limit=args.limit, fuel=args.fuel)
        except DomainTooLarge as exc:
            print(f"svlv: {exc}", file=sys.stderr)
            return EXIT_FRONTEND
        for argv, outcome in runs:
            shown = ", ".join(f"{p.name}={v}" for p, v in zip(sub.params, argv))
            print(f"({shown}) {outcome.render()}")
            faults += int(is_fault(outcome))
    return EXIT_FAILED if faults else EXIT_OK


def _cmd_audit(args) -> int:
    """Re-check a previous report: stored findings, budget reliance and target configuration."""
    s = Summary.from_json(Path(args.report).read_text(encoding="utf-8"))
    findings = []
    unknown = failed = False
    for p in s.packages:
        for sub in p.subprograms:
            subject = f"{p.name}.{sub.name}" if p.name else sub.name
            findings += [Finding.from_dict(d, subject) for d in sub.findings if d["rule"] != "A4_budget_reliance"]
            failed |= any(bucket(v.status) == "failed" for v in sub.vcs)
            unknown |= any(bucket(v.status) == "unknown" for v in sub.vcs)
    findings += [Finding.from_dict(d) for d in s.findings if d["rule"] != "A6_target_config"]
    findings += audit_budget_reliance(_stored_vcs(s))
    try:
        if args.target:
            cfg = load_target(args.target, strict=args.strict)
            declared = load_target(args.declared_target, strict=args.strict) if args.declared_target else None
            findings += audit_target_config(cfg, declared, args.strict)
    except TargetConfigError as exc:
        print(f"svlv: {exc}", file=sys.stderr)
        return EXIT_FRONTEND
    for f in sort_findings(set(findings)):
        print(f.render())
    if failed:
        return EXIT_FAILED
    if unknown:
        return EXIT_UNKNOWN
    return EXIT_BLOCKERS if args.strict and blockers(findings) else EXIT_OK


class _StoredStatus:
    def __init__(self, label: str):
        self.state = bucket(label)
        self.reason = label[len(self.state) + 1:-1] if "(" in label else None


class _StoredVC:
    """Enough of a VC, rebuilt from a report record, for the budget rule."""

    def __init__(self, package: str, subprogram: str, rec):
        file, line, col = rec.loc.rsplit(":", 2)
        self.id, self.kind, self.loc = rec.id, rec.kind, Loc(file, int(line), int(col))
        self.package, self.subprogram = package, subprogram
        self.suppressed = rec.status == "suppressed"
        self.status = _StoredStatus(rec.status)


def _stored_vcs(s: Summary) -> list:
    return [_StoredVC(p.name, sub.name, v) for p in s.packages for sub in p.subprograms for v in sub.vcs]


# -- argument parsing -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="svlv", description="Verify SVL programs and review the proofs.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prove", help="run the full pipeline")
    p.add_argument("files", nargs="+")
    p.add_argument("--steps", type=int, help="solver decisions per VC")
    p.add_argument("--timeout", type=float, help="seconds per VC")
    p.add_argument("--target", help="target configuration assumed true")
    p.add_argument("--declared-target", help="target configuration the proofs are run with")
    p.add_argument("--assumptions", action="store_true", help="write assumptions.txt")
    p.add_argument("--audit", action="store_true", help="run the review rules")
    p.add_argument("--strict", action="store_true", help="require complete target files; blockers fail the run")
    p.add_argument("--assume-exceptions-off", action="store_true",
                   help="treat proofs that rely on failing checks as blockers")
    p.add_argument("--out", help="directory for report files (default: beside the first input)")
    p.add_argument("--format", choices=("text", "json", "both"), default="both")
    p.add_argument("--mode", choices=("quick", "nightly"), default="quick")
    p.add_argument("--timings", action="store_true", help="record wall times in the reports")
    p.add_argument("--partial-limit", type=int, default=5, help="partial operations allowed per expression")
    p.set_defaults(func=_cmd_prove)

    d = sub.add_parser("dims", help="dimension check only")
    d.add_argument("files", nargs="+")
    d.set_defaults(func=_cmd_dims)

    o = sub.add_parser("oracle", help="execute a subprogram on given or enumerated inputs")
    o.add_argument("file")
    o.add_argument("--sub", required=True, help="subprogram name")
    o.add_argument("--arg", action="append", default=[], metavar="NAME=V[,V...]",
                   help="a value, or a comma separated domain to enumerate")
    o.add_argument("--target")
    o.add_argument("--limit", type=int, default=65536, help="maximum number of argument tuples")
    o.add_argument("--fuel", type=int, default=100000, help="statement budget per run")
    o.set_defaults(func=_cmd_oracle)

    a = sub.add_parser("audit", help="review rules over a previous report.json")
    a.add_argument("report")
    a.add_argument("--target")
    a.add_argument("--declared-target")
    a.add_argument("--strict", action="store_true")
    a.set_defaults(func=_cmd_audit)
    return ap


def main(argv: list | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"svlv: {exc}", file=sys.stderr)
        return EXIT_FRONTEND


if __name__ == "__main__":
    sys.exit(main())

