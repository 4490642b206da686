"""Parse, check dimensions, generate VCs, prove, build the assumption graph, audit, summarize."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

from .assumptions import AssumptionGraph, build_graph
from .audit import DEFAULT_PARTIAL_LIMIT, Finding, blockers, run_audit
from .dimensions import check_dims
from .frontend import load
from .report import Summary, summarize
from .solver import Budget, discharge, mark_spurious, unproved_subprograms
from .target import DEFAULT_TARGET, TargetConfig, load_target
from .vcgen import ProgramVCs, generate_program

MODES = {"quick": Budget(steps=1000, wall_time=5.0), "nightly": Budget(steps=100000, wall_time=120.0)}

EXIT_OK, EXIT_FAILED, EXIT_UNKNOWN, EXIT_FRONTEND, EXIT_BLOCKERS = 0, 1, 2, 3, 4


@dataclass
class RunOptions:
    inputs: list
    steps: int | None = None
    timeout_s: float | None = None
    target_path: str | None = None
    declared_target_path: str | None = None
    mode: str = "quick"
    assumptions_report: bool = False
    audit: bool = False
    strict: bool = False
    assume_exceptions_off: bool = False
    out_dir: str | None = None
    formats: tuple = ("text", "json")
    timings: bool = False
    partial_limit: int = DEFAULT_PARTIAL_LIMIT

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")

    def budget(self) -> Budget:
        base = MODES[self.mode]
        return Budget(steps=self.steps if self.steps is not None else base.steps,
                      wall_time=self.timeout_s if self.timeout_s is not None else base.wall_time)


@dataclass
class RunResult:
    exit_code: int
    diagnostics: list = field(default_factory=list)  # rendered frontend and dimension errors
    program: object = None
    vcs: ProgramVCs | None = None
    graph: AssumptionGraph | None = None
    findings: list = field(default_factory=list)
    summary: Summary | None = None
    target: TargetConfig = DEFAULT_TARGET
    declared: TargetConfig | None = None

    @property
    def all_vcs(self) -> list:
        return self.vcs.vcs if self.vcs is not None else []


def exit_code_for(vcs: list, findings: list, strict: bool) -> int:
    live = [vc for vc in vcs if not vc.suppressed]
    if any(vc.status.state == "failed" for vc in live):
        return EXIT_FAILED
    if any(vc.status.state == "unknown" for vc in live):
        return EXIT_UNKNOWN
    if strict and blockers(findings):
        return EXIT_BLOCKERS
    return EXIT_OK


def prove(pv: ProgramVCs, budget: Budget, target: TargetConfig) -> dict:
    """Discharge every VC; returns seconds spent per VC id."""
    timings = {}
    for vc in pv.vcs:
        t0 = time.perf_counter()
        vc.status = discharge(vc, budget, target)
        timings[vc.id] = time.perf_counter() - t0
    spec_only = [sub.key for _, sub in pv.program.subprograms() if sub.body is None]
    mark_spurious(pv.vcs, unproved_subprograms(pv.vcs, spec_only))
    return timings


def analyze(opts: RunOptions) -> RunResult:
    cfg = load_target(opts.target_path, strict=opts.strict) if opts.target_path else DEFAULT_TARGET
    declared = load_target(opts.declared_target_path, strict=opts.strict) if opts.declared_target_path else None
    # proofs run with the declared configuration when there is one
    proof_target = declared if declared is not None else cfg
    program, diags = load(opts.inputs)
    if program is None or diags:
        return RunResult(EXIT_FRONTEND, [d.render() for d in diags], target=cfg, declared=declared)
    dim_errors = check_dims(program)
    if dim_errors:
        return RunResult(EXIT_FRONTEND, [d.render() for d in dim_errors], program, target=cfg, declared=declared)
    pv = generate_program(program, proof_target)
    if pv.errors:
        return RunResult(EXIT_FRONTEND, [d.render() for d in pv.errors], program, pv, target=cfg, declared=declared)
    budget = opts.budget()
    timings = prove(pv, budget, proof_target)
    graph = build_graph(pv.vcs, program)
    findings: list[Finding] = []
    if opts.audit:
        findings = run_audit(program, pv.vcs, graph, cfg=cfg, declared=declared, budget=budget,
                             strict=opts.strict, assume_exceptions_off=opts.assume_exceptions_off,
                             partial_limit=opts.partial_limit)
    summary = summarize(pv.vcs, findings, timings if opts.timings else None, budget, program, graph)
    code = exit_code_for(pv.vcs, findings, opts.strict)
    return RunResult(code, [], program, pv, graph, findings, summary, cfg, declared)


def output_dir(opts: RunOptions) -> Path:
    if opts.out_dir is not None:
        return Path(opts.out_dir)
    return Path(opts.inputs[0]).resolve().parent
