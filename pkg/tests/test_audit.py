from __future__ import annotations

import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CLEAN, TARGETS, analyzed, proved_vcs, resolved, resolved_text, sub_named
from progen import generate
from svlv.assumptions import build_graph
from svlv.audit import (
    RULES,
    Finding,
    audit_budget_reliance,
    audit_target_config,
    blockers,
    lint_long_expressions,
    lint_saturation,
    run_audit,
    sort_findings,
)
from svlv.frontend import Loc, load_text
from svlv.oracle import RuntimeFault, run
from svlv.solver import Budget, prove_all
from svlv.target import DEFAULT_TARGET, load_target
from svlv.vcgen import generate_program

CLEAN_FILES = sorted(p.name for p in CLEAN.glob("*.svl"))


def _summary(findings) -> list[tuple]:
    return [(f.short_rule, f.severity, f.primary.line, f.primary.col) for f in findings]


def _target(name: str):
    return load_target(str(TARGETS / name))


class TestFinding:
    def test_render(self):
        f = Finding("A1_tainted_proof", "blocker", Loc("a.svl", 3, 4), "msg", ("a.svl:1:2",))
        assert f.render() == "a.svl:3:4: [A1] blocker: msg (evidence: a.svl:1:2)"

    def test_render_without_evidence(self):
        f = Finding("A7_long_expression", "info", Loc("a.svl", 1, 1), "m")
        assert f.render() == "a.svl:1:1: [A7] info: m"

    def test_dict_round_trip(self):
        f = Finding("A5_saturation", "warning", Loc("dir/a.svl", 7, 7), "m", ("dir/a.svl:1:1",), "p.q")
        assert Finding.from_dict(f.to_dict(), "p.q") == f

    def test_unknown_rule_and_severity(self):
        with pytest.raises(ValueError):
            Finding("A8_other", "info", Loc("a", 1, 1), "m")
        with pytest.raises(ValueError):
            Finding("A1_tainted_proof", "fatal", Loc("a", 1, 1), "m")

    def test_seven_rules(self):
        assert [r.split("_", 1)[0] for r in RULES] == [f"A{i}" for i in range(1, 8)]


class TestTaint:
    def test_mistake1_blocker_on_the_slice_precondition(self, mistake1):
        (b,) = blockers(mistake1.findings)
        assert (b.short_rule, b.primary.line, b.primary.col) == ("A1", 21, 17)
        assert "gps.poll_gps.3" in b.message
        assert b.evidence[0].endswith("mistake1.svl:12:7")

    def test_mistake1_unneeded_suppression_is_info(self, mistake1):
        infos = [f for f in mistake1.findings if f.severity == "info"]
        assert _summary(infos) == [("A1", "info", 21, 26)]

    def test_mistake1_all_findings(self, mistake1):
        assert _summary(mistake1.findings) == [
            ("A1", "blocker", 21, 17), ("A1", "info", 21, 26), ("A3", "warning", 13, 7)]

    def test_blocker_covers_every_proved_check_that_faults(self, mistake1):
        """Every proved VC whose site faults at run time is named by an A1 blocker."""
        program = mistake1.program
        out = run(program, sub_named(program, "Poll_GPS"), [])
        assert isinstance(out, RuntimeFault)
        faulting = [vc for vc in mistake1.all_vcs
                    if vc.status.proved and not vc.suppressed and vc.loc == out.loc]
        assert faulting
        flagged = {(f.primary.line, f.primary.col) for f in blockers(mistake1.findings)}
        assert all((vc.loc.line, vc.loc.col) in flagged for vc in faulting)

    def test_reliance_on_an_earlier_failing_check(self):
        r = analyzed("corpus/division.svl", audit=True)
        assert r.exit_code == 1
        (f,) = r.findings
        assert (f.short_rule, f.severity, f.primary.line, f.primary.col) == ("A1", "warning", 8, 14)
        assert "ratios.divide.3" in f.message
        assert f.evidence == (f"{r.all_vcs[0].loc.file}:7:14",)

    def test_exceptions_off_turns_warnings_into_blockers(self):
        r = analyzed("corpus/division.svl", audit=True, assume_exceptions_off=True)
        assert _summary(r.findings) == [("A1", "blocker", 8, 14)]

    def test_vacuous_proofs_under_false_invariant(self):
        r = analyzed("variants/invariants.svl", audit=True)
        vacuous = [f for f in r.findings if "vacuously" in f.message]
        assert sorted(re.search(r"inv\.absurd\.\d+", f.message).group() for f in vacuous) == [
            "inv.absurd.3", "inv.absurd.4", "inv.absurd.5"]
        assert all(f.severity == "warning" for f in vacuous)

    def test_sealed_suppression_is_not_a_blocker(self):
        r = analyzed("variants/mistake1_cut.svl", audit=True)
        assert blockers(r.findings) == []
        assert {f.severity for f in r.findings} == {"info"}


class TestContractConsistency:
    def test_mistake2_three_blockers_on_f1(self, mistake2):
        a2 = [f for f in mistake2.findings if f.short_rule == "A2"]
        assert len(a2) == 3
        assert all(f.severity == "blocker" and (f.primary.line, f.primary.col) == (3, 4) for f in a2)

    def test_mistake2_evidence(self, mistake2):
        a2 = {f.message: f for f in mistake2.findings if f.short_rule == "A2"}
        body = next(f for m, f in a2.items() if "body" in m)
        assert [e.rsplit(":", 2)[1:] for e in body.evidence] == [["6", "7"], ["12", "14"]]
        unproved = next(f for m, f in a2.items() if "contracts.f1.1" in m)
        assert unproved.evidence[0].endswith(":4:33")

    def test_caller_proof_is_flagged_as_vacuous(self, mistake2):
        a1 = [f for f in mistake2.findings if f.short_rule == "A1"]
        assert _summary(a1) == [("A1", "warning", 12, 14)]

    def test_post_true_is_not_flagged(self):
        assert analyzed("variants/post_true.svl", audit=True).findings == []

    def test_recursion_is_not_flagged(self):
        assert analyzed("variants/recursion.svl", audit=True).findings == []


class TestSuppressionHygiene:
    def test_unsealed_suppression_warns(self, mistake1):
        (f,) = [f for f in mistake1.findings if f.short_rule == "A3"]
        assert (f.severity, f.primary.line, f.primary.col) == ("warning", 13, 7)
        assert f.evidence[0].endswith(":12:7")

    def test_sealed_suppression_is_info(self):
        r = analyzed("variants/mistake1_cut.svl", audit=True)
        (f,) = [f for f in r.findings if f.short_rule == "A3"]
        assert f.severity == "info" and (f.primary.line, f.primary.col) == (13, 7)
        assert "Assert_And_Cut" in f.message


class TestBudgetReliance:
    def test_unknown_vcs_warn_and_the_claim_is_blocked(self):
        r = analyzed("corpus/division.svl", audit=True, steps=1)
        a4 = [f for f in r.findings if f.short_rule == "A4"]
        warnings = [f for f in a4 if f.severity == "warning"]
        (claim,) = [f for f in a4 if f.severity == "blocker"]
        unknown = [vc for vc in r.all_vcs if vc.status.state == "unknown"]
        assert len(warnings) == len(unknown) == 4
        assert "AoRTE(divide)" in claim.message and len(claim.evidence) == 4
        assert all("do not change code" in f.message for f in warnings)

    def test_no_unknown_no_finding(self):
        vcs = proved_vcs(resolved("clean/arrays.svl"))
        assert audit_budget_reliance(vcs) == []

    def test_postcondition_unknown_blocks_post_claim(self):
        r = analyzed("clean/contracts.svl", audit=True, steps=1)
        posts = [vc for vc in r.all_vcs if vc.kind == "postcondition" and vc.status.state == "unknown"]
        claims = [f.message for f in r.findings if f.short_rule == "A4" and f.severity == "blocker"]
        assert bool(posts) == any("PostEstablished" in m for m in claims)


class TestSaturation:
    def test_mistake4_single_warning(self):
        r = analyzed("corpus/mistake4.svl", audit=True)
        assert _summary(r.findings) == [("A5", "warning", 8, 7)]
        assert "lat_type'last" in r.findings[0].message.lower()

    def test_both_ends(self):
        program = resolved("variants/clamp_both.svl")
        found = lint_saturation([s for _, s in program.subprograms()])
        assert [(f.primary.line, f.primary.col) for f in found] == [(7, 7), (10, 7)]
        assert "Last" in found[0].message and "First" in found[1].message

    def test_ordinary_branch_is_not_saturation(self):
        src = ("package P is procedure Q (X : in out Integer) is begin "
               "if X > 3 then X := 0; end if; end Q; end P;")
        program = resolved_text(src)
        assert lint_saturation([s for _, s in program.subprograms()]) == []


class TestTargetConfig:
    def test_denorm_disagreement_is_a_blocker(self):
        (f,) = audit_target_config(_target("denorm_true.cfg"), _target("denorm_false.cfg"))
        assert (f.short_rule, f.severity) == ("A6", "blocker")
        assert "denorm" in f.message
        assert f.evidence[0].endswith("denorm_true.cfg:2:1")

    def test_matching_configs(self):
        assert audit_target_config(_target("denorm_true.cfg"), _target("denorm_true.cfg")) == []

    def test_no_declared_config(self):
        assert audit_target_config(_target("denorm_true.cfg")) == []

    def test_unspecified_key_warns(self):
        (f,) = audit_target_config(_target("partial.cfg"))
        assert (f.severity, f.primary.line) == ("warning", 1)
        assert "not specified" in f.message

    def test_through_the_pipeline(self):
        r = analyzed("corpus/mistake3.svl", audit=True, target_path=str(TARGETS / "denorm_true.cfg"),
                     declared_target_path=str(TARGETS / "denorm_false.cfg"))
        assert [(f.short_rule, f.severity) for f in blockers(r.findings)] == [("A6", "blocker")]


class TestLongExpressions:
    def test_six_partial_operations(self):
        r = analyzed("variants/long_expr.svl", audit=True)
        (f,) = r.findings
        assert (f.short_rule, f.severity, f.primary.line, f.primary.col) == ("A7", "info", 8, 12)
        assert "6 operations" in f.message and "limit 5" in f.message

    def test_split_form_is_clean(self):
        program = resolved("variants/long_expr.svl")
        split = [s for _, s in program.subprograms() if s.key == "split"]
        assert lint_long_expressions(split) == []

    def test_limit_is_configurable(self):
        src = ("package P is procedure Q (b : Integer; c : Integer; d : Integer; e : Integer; "
               "f : Integer; g : Integer; a : out Integer) is begin a := b*c + d*e + f*g; end Q; end P;")
        subs = [s for _, s in resolved_text(src).subprograms()]
        (f,) = lint_long_expressions(subs, 2)
        assert "5 operations" in f.message
        assert lint_long_expressions(subs) == []


class TestProperties:
    @pytest.mark.parametrize("name", CLEAN_FILES)
    def test_clean_fixtures_have_no_findings(self, name: str):
        r = analyzed(f"clean/{name}", audit=True)
        assert r.findings == []

    @pytest.mark.parametrize("path", ["corpus/mistake1.svl", "corpus/mistake2.svl",
                                      "variants/invariants.svl", "variants/clamp_both.svl"])
    def test_deterministic_order(self, path: str):
        a = analyzed(path, audit=True).findings
        b = analyzed(path, audit=True).findings
        assert [f.render() for f in a] == [f.render() for f in b]
        assert a == sort_findings(a)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=0, max_value=10**6), st.integers(min_value=0, max_value=3))
    def test_adding_a_suppression_never_removes_findings(self, seed: int, pick: int):
        lines = generate(seed).text.splitlines()
        sites = [i for i, line in enumerate(lines) if re.match(r"^      \w+ := .*;$", line)]
        if not sites:
            return
        i = sites[pick % len(sites)]
        patched = lines[:i + 1] + ['      pragma Annotate (GNATprove, False_Positive, "reviewed");'] + lines[i + 1:]
        before = _taint_and_hygiene("\n".join(lines))
        after = _taint_and_hygiene("\n".join(patched))
        if after is not None:
            assert after >= before


def _taint_and_hygiene(text: str) -> int | None:
    program, diags = load_text(text, "g.svl")
    assert program is not None and not diags
    pv = generate_program(program, DEFAULT_TARGET)
    if pv.errors:
        return None
    prove_all(pv.vcs, Budget(), DEFAULT_TARGET, [])
    findings = run_audit(program, pv.vcs, build_graph(pv.vcs, program), budget=Budget())
    return sum(f.short_rule in ("A1", "A3") for f in findings)

