"""Verification summary: per-subprogram VC statistics as a table and as JSON."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from .assumptions import vc_assumptions
from .vcgen import VC_KINDS

STATUSES = ("proved", "failed", "unknown", "suppressed")
MAX_WIDTH = 120


def percent(proved: int, total: int) -> float:
    """Share of proved VCs in percent, rounded half-up to one decimal; 100.0 when empty."""
    if total == 0:
        return 100.0
    tenths = math.floor(Fraction(1000 * proved, total) + Fraction(1, 2))
    return tenths / 10


def bucket(label: str) -> str:
    return label.split("(", 1)[0]


@dataclass
class VcRecord:
    id: str
    kind: str
    loc: str
    status: str  # proved | failed | unknown(<reason>) | suppressed
    assumptions: list = field(default_factory=list)
    time: float | None = None  # seconds, only when timings are recorded


@dataclass
class SubprogramSummary:
    name: str
    vcs: list = field(default_factory=list)  # VcRecord
    findings: list = field(default_factory=list)  # Finding dicts

    def counts(self) -> dict:
        return _counts(self.vcs)


@dataclass
class PackageSummary:
    name: str
    subprograms: list = field(default_factory=list)

    @property
    def vcs(self) -> list:
        return [v for s in self.subprograms for v in s.vcs]


@dataclass
class Summary:
    budget: dict
    packages: list = field(default_factory=list)
    totals: dict = field(default_factory=dict)
    findings: list = field(default_factory=list)  # findings not tied to one subprogram
    timings: bool = False
    claims: list = field(default_factory=list)  # {"claim", "conditional", "depends"}

    @property
    def vcs(self) -> list:
        return [v for p in self.packages for v in p.vcs]

    def to_json(self) -> str:
        data = {
            "budget": self.budget,
            "packages": [
                {"name": p.name, "subprograms": [
                    {"name": s.name, "vcs": [_vc_json(v, self.timings) for v in s.vcs], "findings": s.findings}
                    for s in p.subprograms]}
                for p in self.packages],
            "totals": self.totals,
            "findings": self.findings,
            "timings": self.timings,
            "claims": self.claims,
        }
        return json.dumps(data, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Summary":
        data = json.loads(text)
        packages = [
            PackageSummary(p["name"], [
                SubprogramSummary(s["name"], [VcRecord(**v) for v in s["vcs"]], s["findings"])
                for s in p["subprograms"]])
            for p in data["packages"]]
        return cls(data["budget"], packages, data["totals"], data.get("findings", []),
                   data.get("timings", False), data.get("claims", []))


def _vc_json(v: VcRecord, timings: bool) -> dict:
    d = asdict(v)
    if not timings:
        d["time"] = None
    return d


def _counts(records: list) -> dict:
    by_kind: dict = {}
    for v in records:
        row = by_kind.setdefault(v.kind, dict.fromkeys(STATUSES, 0))
        row[bucket(v.status)] += 1
    return by_kind


def _totals(records: list, timings: bool) -> dict:
    by_kind = {k: row for k, row in sorted(_counts(records).items(), key=lambda kv: VC_KINDS.index(kv[0]))}
    by_status = {s: sum(row[s] for row in by_kind.values()) for s in STATUSES}
    total = len(records)
    out = {
        "vcs": total,
        "by_status": by_status,
        "by_kind": by_kind,
        "percent_proved": percent(by_status["proved"], total),
        "time": None,
        "time_share": None,
    }
    if timings:
        spent = sum(v.time or 0.0 for v in records)
        out["time"] = round(spent, 6)
        shares = {}
        for k in by_kind:
            t = sum(v.time or 0.0 for v in records if v.kind == k)
            shares[k] = round(t / spent, 4) if spent > 0 else 0.0
        out["time_share"] = shares
    return out


def summarize(vcs: list, findings: list = (), timings: dict | None = None, budget=None,
              program=None, graph=None) -> Summary:
    """Aggregate VC statuses and findings per package and subprogram.

    ``timings`` maps VC ids to seconds spent proving them; without it the
    summary carries no times and is byte-stable across runs.
    """
    budget_d = {"steps": budget.steps, "wall_time": budget.wall_time} if budget is not None else {}
    records: dict = {}
    for vc in vcs:
        rec = VcRecord(vc.id, vc.kind, str(vc.loc), vc.status_label(),
                       [str(n) for n in vc_assumptions(vc)],
                       timings.get(vc.id) if timings else None)
        records.setdefault((vc.package, vc.subprogram), []).append(rec)
    order: list = []
    if program is not None:
        for pkg, sub in program.subprograms():
            if sub.body is not None:
                order.append((pkg.key, sub.key))
    for key in records:
        if key not in order:
            order.append(key)
    by_subject: dict = {}
    loose = []
    for f in findings:
        if f.subject is not None:
            by_subject.setdefault(f.subject, []).append(f.to_dict())
        else:
            loose.append(f.to_dict())
    packages: dict = {}
    for pkg, sub in order:
        subject = f"{pkg}.{sub}" if pkg else sub
        p = packages.setdefault(pkg, PackageSummary(pkg))
        p.subprograms.append(SubprogramSummary(sub, records.get((pkg, sub), []), by_subject.pop(subject, [])))
    for rest in by_subject.values():  # subjects without a body, such as spec-only callees
        loose.extend(rest)
    s = Summary(budget_d, list(packages.values()), findings=loose, timings=bool(timings))
    s.totals = _totals(s.vcs, s.timings)
    if graph is not None:
        s.claims = [{"claim": str(c), "conditional": graph.conditional(c), "depends": [str(n) for n in graph.depends(c)]}
                    for c in graph.claims]
    return s


# -- text ---------------------------------------------------------------------------

def _table(header: list, rows: list) -> list:
    """Left column left-aligned, the rest right-aligned, split to fit MAX_WIDTH."""
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    first, rest = widths[0], list(range(1, len(header)))
    chunks, cur, used = [], [], first
    for i in rest:
        if cur and used + 2 + widths[i] > MAX_WIDTH:
            chunks.append(cur)
            cur, used = [], first
        cur.append(i)
        used += 2 + widths[i]
    if cur or not chunks:
        chunks.append(cur)
    lines = []
    for n, cols in enumerate(chunks):
        if n:
            lines.append("")
        for r in [header] + rows:
            cells = [str(r[0]).ljust(first)] + [str(r[i]).rjust(widths[i]) for i in cols]
            lines.append("  ".join(cells).rstrip())
    return lines


def _pct(x: float) -> str:
    return f"{x:.1f} %"


def _time(t, timings: bool) -> str:
    return f"{t:.2f} s" if timings and t is not None else "-"


def emit_text(s: Summary) -> str:
    lines = []
    if s.budget:
        lines.append(f"budget: steps={s.budget['steps']} wall_time={s.budget['wall_time']} s")
    groups = [(p.name, p.vcs) for p in s.packages]
    header = [""] + [name for name, _ in groups] + ["total"]
    if not s.vcs:
        lines.extend(_table(header[:1] + ["total"], []))
        lines.append(f"no VCs (VCs proven {_pct(100.0)})")
        return "\n".join(lines) + "\n"
    rows = [
        ["number of VCs"] + [str(len(v)) for _, v in groups] + [str(len(s.vcs))],
        ["VCs proven"] + [_pct(percent(sum(bucket(r.status) == "proved" for r in v), len(v))) for _, v in groups]
        + [_pct(s.totals["percent_proved"])],
        ["analysis time"] + [_time(sum(r.time or 0.0 for r in v), s.timings) for _, v in groups]
        + [_time(s.totals["time"], s.timings)],
    ]
    lines.extend(_table(header, rows))
    lines.append("")
    kinds = s.totals["by_kind"]
    header = ["VCs by type", "total", *STATUSES, "time share"]
    rows = []
    for k, row in sorted(kinds.items(), key=lambda kv: VC_KINDS.index(kv[0])):
        share = s.totals["time_share"][k] if s.timings else None
        rows.append([k, str(sum(row.values()))] + [str(row[st]) for st in STATUSES]
                    + [_pct(100 * share) if share is not None else "-"])
    rows.append(["total", str(len(s.vcs))] + [str(s.totals["by_status"][st]) for st in STATUSES] + [""])
    lines.extend(_table(header, rows))
    return "\n".join(lines) + "\n"


def emit(s: Summary, fmt: str = "text") -> bytes:
    if fmt == "text":
        return emit_text(s).encode("utf-8")
    if fmt == "json":
        return s.to_json().encode("utf-8")
    raise ValueError(f"unknown report format {fmt!r}")


def emit_log(s: Summary) -> str:
    """One line per VC, in report order."""
    out = []
    for p in s.packages:
        for sub in p.subprograms:
            for v in sub.vcs:
                out.append(f"{v.loc}: {v.kind} {v.status} [{v.id}]")
    return "\n".join(out) + ("\n" if out else "")
