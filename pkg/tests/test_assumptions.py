from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIXTURES, proved_vcs, resolved, resolved_text, vc_by_id
from progen import call_pair, generate
from svlv.assumptions import AssumptionGraph, Claim, Node, build_graph, calls_of, emit_report, vc_assumptions
from svlv.target import TargetConfig

ALL_FIXTURES = sorted(p.relative_to(FIXTURES) for p in FIXTURES.rglob("*.svl") if "dims" not in p.parts)
ASSUMPTION_PROVENANCES = {"pragma_assume", "suppression", "callee_postcondition"}


def _graph(path, target=TargetConfig()):
    program = resolved(path)
    vcs = proved_vcs(program, target)
    return build_graph(vcs, program), vcs


def _deps(g: AssumptionGraph, subject: str, kind: str = "AoRTE") -> list[str]:
    return [str(n) for n in g.depends(Claim(subject, kind))]


class TestBuild:
    def test_caller_rests_on_body_and_post_of_f1(self):
        g, _ = _graph("corpus/mistake2.svl")
        deps = _deps(g, "caller")
        assert "callee_body(f1)" in deps and "callee_post(f1)" in deps

    def test_leaf_rests_on_target_axioms_only(self):
        g, _ = _graph("clean/guarded.svl")
        assert _deps(g, "safe_div") == ["target_axiom(int_width)"]

    def test_subnormal_support_is_an_assumption(self):
        g, _ = _graph("corpus/mistake3.svl", TargetConfig(denorm=True))
        assert "target_axiom(denorm)" in _deps(g, "rotate")

    def test_suppression_reaches_the_caller_through_the_callee_body(self):
        g, vcs = _graph("corpus/mistake1.svl")
        sup = str(vc_by_id(vcs, "gps.read_from_device.2").loc)
        claim = Claim("poll_gps", "AoRTE")
        closure = [str(n) for n in g.closure(claim)]
        assert f"suppression({sup})" in closure
        assert "callee_body(read_from_device)" in _deps(g, "poll_gps")
        assert g.conditional(claim)

    def test_spec_only_callee_is_unverifiable(self):
        g, _ = _graph("corpus/mistake1.svl")
        assert "toint32" in g.spec_only and "toint32" in g.unverified

    def test_unproved_vcs_are_nodes(self):
        g, vcs = _graph("corpus/mistake2.svl")
        for vc in vcs:
            if not vc.status.proved:
                assert Node("unproved_vc", vc.id) in g.graph

    def test_post_claim_only_with_a_post(self):
        g, _ = _graph("corpus/mistake2.svl")
        subjects = {str(c) for c in g.claims}
        assert "PostEstablished(f1)" in subjects and "PostEstablished(caller)" not in subjects

    def test_conditional_marking(self):
        g, _ = _graph("corpus/mistake2.svl")
        assert g.conditional(Claim("caller", "AoRTE"))
        assert not g.conditional(Claim("f1", "AoRTE"))
        g2, _ = _graph("clean/guarded.svl")
        assert not g2.conditional(Claim("scale", "AoRTE"))

    def test_recursion_forms_one_group(self):
        g, _ = _graph("variants/recursion.svl")
        assert g.groups == [["even", "odd"]]
        assert _deps(g, "even") == _deps(g, "odd")
        assert g.is_acyclic_modulo_groups()

    def test_calls_of(self):
        program = resolved("corpus/mistake1.svl")
        poll = next(s for _, s in program.subprograms() if s.key == "poll_gps")
        assert sorted(c.key for c in calls_of(poll)) == ["read_from_device", "toint32"]

    def test_vc_assumptions_of_a_tainted_vc(self):
        _, vcs = _graph("corpus/mistake1.svl")
        nodes = [str(n) for n in vc_assumptions(vc_by_id(vcs, "gps.poll_gps.3"))]
        assert any(n.startswith("suppression(") for n in nodes)
        assert "callee_post(toint32)" in nodes

    def test_node_kinds_are_closed(self):
        with pytest.raises(ValueError):
            Node("rumour", "x")
        with pytest.raises(ValueError):
            Claim("x", "Termination")


class TestReport:
    def test_caller_block(self):
        g, _ = _graph("corpus/mistake2.svl")
        text = emit_report(g)
        block = text.split("claim ")[1]
        assert block.startswith("AoRTE(caller)")
        assert "  depends callee_body(f1)\n" in block and "  depends callee_post(f1)\n" in block

    def test_empty_program(self):
        program = resolved_text("package P is end P;")
        assert emit_report(build_graph([], program)) == ""

    def test_assume_line(self):
        g, _ = _graph("variants/assume.svl")
        lines = emit_report(g).splitlines()
        assume = [ln for ln in lines if "pragma_assume" in ln]
        assert len(assume) == 1 and assume[0].strip().endswith("assume.svl:5:7)")

    def test_dependencies_sorted(self):
        for path in ALL_FIXTURES:
            g, _ = _graph(path)
            for block in emit_report(g).split("claim ")[1:]:
                direct = [ln for ln in block.splitlines()[1:] if " via " not in ln]
                assert direct == sorted(direct)

    @pytest.mark.parametrize("path", ALL_FIXTURES, ids=str)
    def test_deterministic(self, path):
        assert emit_report(_graph(path)[0]) == emit_report(_graph(path)[0])

    def test_unverifiable_marker(self):
        g, _ = _graph("corpus/mistake1.svl")
        assert "  depends callee_body(toint32) [unverifiable]" in emit_report(g).splitlines()


def _check_completeness(g: AssumptionGraph, vcs: list) -> None:
    for claim in g.claims:
        deps = [n for n in g.depends(claim) if n.kind != "target_axiom"]
        if deps or claim.kind != "AoRTE":
            continue
        mine = [vc for vc in vcs if vc.subprogram == claim.subject and vc.kind != "postcondition"]
        for vc in mine:
            assert vc.status.proved and not vc.suppressed
            assert not {h.provenance for h in vc.hypotheses} & ASSUMPTION_PROVENANCES


class TestProperties:
    @pytest.mark.parametrize("path", ALL_FIXTURES, ids=str)
    def test_completeness_on_fixtures(self, path):
        _check_completeness(*_graph(path))

    @settings(max_examples=80, deadline=None)
    @given(st.integers(min_value=0, max_value=10**6))
    def test_completeness_on_generated(self, seed: int):
        g = generate(seed)
        program = resolved_text(g.text)
        vcs = proved_vcs(program, TargetConfig(int_width=g.int_width))
        _check_completeness(build_graph(vcs, program), vcs)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(min_value=0, max_value=10**6))
    def test_unproved_callee_makes_caller_conditional(self, seed: int):
        program = resolved_text(call_pair(seed, seed).text)
        vcs = proved_vcs(program)
        g = build_graph(vcs, program)
        callee_unproved = any(vc.subprogram == "f" and not vc.status.proved for vc in vcs)
        assert g.conditional(Claim("p", "AoRTE")) == callee_unproved
