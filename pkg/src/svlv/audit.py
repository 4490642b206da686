"""Review rules over proof results.

Each rule looks for a way a green proof can still be wrong, or for code
patterns that make proofs brittle:

* A1 tainted proofs: proved VCs that lean on suppressed checks, on the
  success of a check that actually failed, or on inconsistent hypotheses.
* A2 inconsistent contracts: postconditions that cannot hold or that make a
  caller's facts contradictory.
* A3 suppression hygiene: a suppression not sealed off by Assert_And_Cut.
* A4 budget reliance: VCs that ran out of budget.
* A5 saturation: clamping a value to a type bound.
* A6 target configuration: the assumed target differs from the one proofs used.
* A7 long expressions: many partial operations in one expression.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from . import logic as L
from .frontend import ast as A
from .frontend.source import Loc
from .semantics import count_partial
from .solver import Budget, check_sat, discharge
from .target import KEYS, TargetConfig
from .vcgen import qualified

RULES = (
    "A1_tainted_proof", "A2_inconsistent_contract", "A3_suppression_hygiene", "A4_budget_reliance",
    "A5_saturation", "A6_target_config", "A7_long_expression",
)
SEVERITIES = ("blocker", "warning", "info")
DEFAULT_PARTIAL_LIMIT = 5


@dataclass(frozen=True)
class Finding:
    rule: str
    severity: str
    primary: Loc
    message: str
    evidence: tuple = ()  # location strings
    subject: str | None = field(default=None, compare=False)  # qualified subprogram, if any

    def __post_init__(self) -> None:
        if self.rule not in RULES:
            raise ValueError(f"unknown rule {self.rule!r}")
        if self.severity not in SEVERITIES:
            raise ValueError(f"unknown severity {self.severity!r}")

    @property
    def short_rule(self) -> str:
        return self.rule.split("_", 1)[0]

    def sort_key(self) -> tuple:
        return (self.rule, self.primary.file, self.primary.line, self.primary.col, self.severity, self.message)

    def render(self) -> str:
        text = f"{self.primary}: [{self.short_rule}] {self.severity}: {self.message}"
        if self.evidence:
            text += f" (evidence: {', '.join(self.evidence)})"
        return text

    def to_dict(self) -> dict:
        return {
            "rule": self.rule, "severity": self.severity, "location": str(self.primary),
            "message": self.message, "evidence": list(self.evidence),
        }

    @classmethod
    def from_dict(cls, d: dict, subject: str | None = None) -> "Finding":
        file, line, col = d["location"].rsplit(":", 2)
        return cls(d["rule"], d["severity"], Loc(file, int(line), int(col)), d["message"],
                   tuple(d.get("evidence", ())), subject)


def sort_findings(findings) -> list:
    return sorted(findings, key=Finding.sort_key)


def _subject(vc) -> str:
    return f"{vc.package}.{vc.subprogram}" if vc.package else vc.subprogram


def _int_width(vc) -> int:
    for h in vc.hypotheses:
        if h.provenance == "target_axiom" and h.source == "int_width":
            return h.predicate.args[1].value
    return 32


def _consistency(vc, budget: Budget) -> str:
    """sat | unsat | unknown for the VC's hypotheses, cached on the VC."""
    if "hyps" not in vc.probes:
        r = check_sat([h.predicate for h in vc.hypotheses], budget, int_width=_int_width(vc))
        vc.probes["hyps"] = r.status
    return vc.probes["hyps"]


# -- A1 -----------------------------------------------------------------------------

def audit_taint(vcs: list, graph=None, budget: Budget = Budget(), assume_exceptions_off: bool = False) -> list:
    """Proved VCs whose proof rests on something that was never established.

    A suppressed fact the proof actually needs is a blocker; one that is
    present but not needed is reported as info. Reliance on an earlier
    failing check and vacuous proofs are warnings, or blockers when
    exceptions are assumed to be disabled.
    """
    by_id = {vc.id: vc for vc in vcs}
    weak = "blocker" if assume_exceptions_off else "warning"
    out = []
    for vc in vcs:
        if vc.status is None or not vc.status.proved or vc.suppressed:
            continue
        supp = [h for h in vc.hypotheses if h.provenance == "suppression"]
        if supp:
            sources = tuple(sorted({h.source for h in supp}))
            if _needed(vc, supp, budget):
                out.append(Finding(
                    "A1_tainted_proof", "blocker", vc.loc,
                    f"{vc.kind} check {vc.id} is proved from a suppressed check", sources, _subject(vc)))
                continue
            out.append(Finding(
                "A1_tainted_proof", "info", vc.loc,
                f"{vc.kind} check {vc.id} has a suppressed check among its hypotheses but does not need it",
                sources, _subject(vc)))
        if vc.status.steps == 0:
            continue  # the goal simplified to True without using any hypothesis
        failed = [h for h in vc.hypotheses if h.provenance == "prior_check_success"
                  and h.source in by_id and by_id[h.source].status is not None
                  and by_id[h.source].status.state == "failed"]
        if failed and _needed(vc, failed, budget):
            sources = tuple(sorted({str(by_id[h.source].loc) for h in failed}))
            out.append(Finding(
                "A1_tainted_proof", weak, vc.loc,
                f"{vc.kind} check {vc.id} is proved only because an earlier failing check "
                "is assumed to succeed", sources, _subject(vc)))
            continue
        if _consistency(vc, budget) == "unsat":
            out.append(Finding(
                "A1_tainted_proof", weak, vc.loc,
                f"{vc.kind} check {vc.id} is proved vacuously: its hypotheses are inconsistent",
                (), _subject(vc)))
    return out


def _needed(vc, facts: list, budget: Budget) -> bool:
    """Whether ``vc`` stops being provable once ``facts`` are removed."""
    if vc.status.steps == 0:
        return False
    rest = replace(vc, hypotheses=tuple(h for h in vc.hypotheses if h not in facts), probes={})
    return not discharge(rest, budget).proved


# -- A2 -----------------------------------------------------------------------------

def _post_facts(vc, name: str) -> list:
    return [h for h in vc.hypotheses if h.provenance == "callee_postcondition" and h.source.lower() == name]


def audit_contract_consistency(subs: list, vcs: list, budget: Budget = Budget()) -> list:
    """``subs`` are the subprograms to check; ``vcs`` are all VCs of the program."""
    out = []
    for sub in subs:
        if sub.post is None or _is_true(sub.post):
            continue
        name = sub.key
        subject = qualified(sub)
        own = [vc for vc in vcs if vc.subprogram == name and vc.package == _pkg(sub)]
        # (a) run-time checks inside the postcondition that are not proved
        bad = [vc for vc in own if vc.origin == "post" and vc.kind != "postcondition"
               and vc.status is not None and vc.status.state in ("failed", "unknown")]
        if bad:
            out.append(Finding(
                "A2_inconsistent_contract", "blocker", sub.loc,
                f"postcondition of {sub.name} contains a check that is not proved ({', '.join(v.id for v in bad)})",
                tuple(str(v.loc) for v in bad), subject))
        users = [vc for vc in vcs if vc.subprogram != name and _post_facts(vc, name)]
        # (b) the body can never establish the postcondition
        for vc in own:
            if vc.kind != "postcondition" or vc.goal is L.FALSE:
                continue
            if _consistency(vc, budget) != "sat":
                continue
            r = check_sat([h.predicate for h in vc.hypotheses] + [vc.goal], budget, int_width=_int_width(vc))
            if r.status == "unsat":
                proved_users = [u for u in users if u.status is not None and u.status.proved]
                out.append(Finding(
                    "A2_inconsistent_contract", "blocker", sub.loc,
                    f"body of {sub.name} contradicts its postcondition at {vc.loc}; "
                    f"{len(proved_users)} proved caller check(s) rely on it",
                    tuple([str(vc.loc)] + [str(u.loc) for u in proved_users]), subject))
                break
        # (c) the postcondition makes a caller's hypotheses contradictory
        hit = []
        for u in users:
            if _consistency(u, budget) != "unsat":
                continue
            rest = [h.predicate for h in u.hypotheses if h.provenance != "callee_postcondition"
                    or h.source.lower() != name]
            if check_sat(rest, budget, int_width=_int_width(u)).status == "sat":
                hit.append(u)
        if hit:
            out.append(Finding(
                "A2_inconsistent_contract", "blocker", sub.loc,
                f"postcondition of {sub.name} is inconsistent in its callers: "
                f"{', '.join(u.id for u in hit)} hold vacuously",
                tuple(str(u.loc) for u in hit), subject))
    return out


def _pkg(sub) -> str:
    return sub.package.key if sub.package is not None else ""


def _is_true(e) -> bool:
    return isinstance(e, A.Name) and e.ident.lower() == "true"


# -- A3 -----------------------------------------------------------------------------

def _site_locs(s) -> set:
    locs = {s.loc}
    for e in A.stmt_exprs(s):
        locs.update(n.loc for n in A.walk_expr(e))
    return locs


def _sealed(seq: list, cont, sites: set) -> bool:
    """Whether every path through ``seq`` meets Assert_And_Cut before a check site.

    ``cont`` decides the question for paths that run off the end of ``seq``.
    """
    for i, s in enumerate(seq):
        if isinstance(s, A.Pragma) and s.name == "assert_and_cut":
            return True
        if _site_locs(s) & sites or isinstance(s, A.Return):
            return False

        def rest(i=i):
            return _sealed(seq[i + 1:], cont, sites)

        if isinstance(s, A.If):
            return _sealed(s.then_body, rest, sites) and _sealed(s.else_body or [], rest, sites)
        if isinstance(s, A.While):
            return rest() and _sealed(s.body, rest, sites)
    return cont()


def _annotates(stmts: list, cont, sites: set, found: dict) -> None:
    for i, s in enumerate(stmts):
        def rest(i=i):
            return _sealed(stmts[i + 1:], cont, sites)

        if isinstance(s, A.Pragma) and s.name == "annotate":
            found[s.loc] = rest()
        elif isinstance(s, A.If):
            _annotates(s.then_body, rest, sites, found)
            _annotates(s.else_body or [], rest, sites, found)
        elif isinstance(s, A.While):
            _annotates(s.body, rest, sites, found)


def audit_suppression_hygiene(subs: list, vcs: list) -> list:
    """Suppressions must be followed by Assert_And_Cut before the next check.

    Reaching the end of the subprogram counts as unsealed: the suppressed
    fact then flows into callers.
    """
    out = []
    for sub in subs:
        if sub.body is None:
            continue
        own = [vc for vc in vcs if vc.subprogram == sub.key and vc.package == _pkg(sub)]
        by_pragma = {vc.suppression.pragma_loc: vc for vc in own if vc.suppressed}
        sites = {vc.loc for vc in own if not vc.suppressed}
        found: dict = {}
        _annotates(sub.body, lambda: False, sites, found)
        for loc, sealed in found.items():
            vc = by_pragma.get(loc)
            evidence = (str(vc.loc),) if vc is not None else ()
            if sealed:
                out.append(Finding(
                    "A3_suppression_hygiene", "info", loc,
                    "suppressed check is sealed by Assert_And_Cut; suppressions should still be avoided",
                    evidence, qualified(sub)))
            else:
                out.append(Finding(
                    "A3_suppression_hygiene", "warning", loc,
                    "suppressed check is not followed by Assert_And_Cut; its assumed success reaches later proofs",
                    evidence, qualified(sub)))
    return out


# -- A4 -----------------------------------------------------------------------------

def audit_budget_reliance(vcs: list) -> list:
    out = []
    blocked: dict = {}
    for vc in vcs:
        if vc.status is None or vc.status.state != "unknown" or vc.suppressed:
            continue
        out.append(Finding(
            "A4_budget_reliance", "warning", vc.loc,
            f"{vc.id} ({vc.kind}) is unknown ({vc.status.reason}); do not change code based on it",
            (), _subject(vc)))
        kind = "PostEstablished" if vc.kind == "postcondition" else "AoRTE"
        blocked.setdefault((_subject(vc), kind), []).append(vc)
    for (subject, kind), items in sorted(blocked.items()):
        name = subject.rsplit(".", 1)[-1]
        out.append(Finding(
            "A4_budget_reliance", "blocker", items[0].loc,
            f"claim {kind}({name}) is not established: {len(items)} VC(s) ended unknown",
            tuple(str(v.loc) for v in items), subject))
    return out


# -- A5 -----------------------------------------------------------------------------

def _bound(e) -> tuple | None:
    if isinstance(e, A.Attr) and e.attr in ("first", "last"):
        return e.prefix.lower(), e.attr
    return None


def _saturation(s: A.If) -> tuple | None:
    c = s.cond
    if not isinstance(c, A.Binary) or c.op not in (">", ">=", "<", "<="):
        return None
    op = c.op
    bound = _bound(c.right)
    if bound is None:
        bound = _bound(c.left)
        if bound is None:
            return None
        op = {">": "<", ">=": "<=", "<": ">", "<=": ">="}[op]  # normalise to `e op bound`
    beyond = op in (">", ">=") if bound[1] == "last" else op in ("<", "<=")
    branch = s.then_body if beyond else s.else_body
    for st in branch or []:
        if isinstance(st, A.Assign) and _bound(st.value) == bound:
            return bound
    return None


def lint_saturation(subs: list) -> list:
    out = []
    for sub in subs:
        for s in A.walk_stmts(sub.body or []):
            if isinstance(s, A.If):
                hit = _saturation(s)
                if hit is not None:
                    attr = "Last" if hit[1] == "last" else "First"
                    out.append(Finding(
                        "A5_saturation", "warning", s.loc,
                        f"value is saturated to {hit[0]}'{attr}; this usually hides a missing requirement",
                        (), qualified(sub)))
    return out


# -- A6 -----------------------------------------------------------------------------

def _effective(cfg: TargetConfig, key: str):
    return cfg.supports_denorm if key == "denorm" else getattr(cfg, key)


def audit_target_config(cfg: TargetConfig, declared: TargetConfig | None = None, strict: bool = False) -> list:
    """Compare the target assumed true with the one the proofs were run with."""
    out = []
    if not strict:
        for c in (cfg, declared):
            if c is not None and c.denorm is None:
                out.append(Finding(
                    "A6_target_config", "warning", Loc(c.origin, 1, 1),
                    "denorm is not specified; proofs assume subnormals are supported"))
    if declared is None:
        return out
    for key in KEYS:
        a, b = _effective(cfg, key), _effective(declared, key)
        if a != b:
            out.append(Finding(
                "A6_target_config", "blocker", Loc(declared.origin, declared.line_of(key), 1),
                f"{key} is {_fmt(a)} on the target but proofs used {_fmt(b)}; "
                "the analysis works with an incorrect premise",
                (str(Loc(cfg.origin, cfg.line_of(key), 1)),)))
    return out


def _fmt(v) -> str:
    return str(v).lower() if isinstance(v, bool) else str(v)


# -- A7 -----------------------------------------------------------------------------

def _roots(sub: A.Subprogram) -> list:
    roots = [e for e in (sub.pre, sub.post) if e is not None]
    roots += [d.init for d in sub.locals or [] if getattr(d, "init", None) is not None]
    for s in A.walk_stmts(sub.body or []):
        roots.extend(A.stmt_exprs(s))
    return roots


def lint_long_expressions(subs: list, limit: int = DEFAULT_PARTIAL_LIMIT) -> list:
    out = []
    for sub in subs:
        for e in _roots(sub):
            n = count_partial(e)
            if n > limit:
                out.append(Finding(
                    "A7_long_expression", "info", A.start_loc(e),
                    f"expression has {n} operations that can fail (limit {limit}); "
                    "split it into several statements", (), qualified(sub)))
    return out


# -- all rules ------------------------------------------------------------------------

def run_audit(program, vcs: list, graph=None, *, cfg: TargetConfig | None = None,
              declared: TargetConfig | None = None, budget: Budget = Budget(), strict: bool = False,
              assume_exceptions_off: bool = False, partial_limit: int = DEFAULT_PARTIAL_LIMIT) -> list:
    subs = [sub for _, sub in program.subprograms()] if program is not None else []
    findings = []
    findings += audit_taint(vcs, graph, budget, assume_exceptions_off)
    findings += audit_contract_consistency(subs, vcs, budget)
    findings += audit_suppression_hygiene(subs, vcs)
    findings += audit_budget_reliance(vcs)
    findings += lint_saturation(subs)
    if cfg is not None:
        findings += audit_target_config(cfg, declared, strict)
    findings += lint_long_expressions(subs, partial_limit)
    return sort_findings(findings)


def blockers(findings) -> list:
    return [f for f in findings if f.severity == "blocker"]
