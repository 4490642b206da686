from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIXTURES, resolved, sub_named
from progen import generate
from svlv.frontend import SourceUnit, load_text, parse_text, pretty
from svlv.frontend import ast as A

ALL_SOURCES = sorted(FIXTURES.rglob("*.svl"))


def _errors(src: str) -> list[str]:
    _, diags = load_text(src)
    return [d.message for d in diags]


class TestParse:
    def test_mistake1_slice_has_static_bounds(self):
        program = resolved("corpus/mistake1.svl")
        poll = sub_named(program, "Poll_GPS")
        call = poll.body[1].value
        assert isinstance(call, A.Apply) and call.kind == "call"
        sl = call.args[0]
        assert isinstance(sl, A.Slice)
        assert (sl.lo.value, sl.hi.value) == (60, 64)

    def test_empty_package(self):
        tree, diags = parse_text("package P is end P;")
        assert diags == []
        assert len(tree.packages) == 1
        assert tree.packages[0].decls == []

    def test_missing_expression_reports_and_recovers(self):
        src = "package P is\n   procedure Q is\n      X : Integer;\n   begin\n      X := ;\n      X := 1;\n      X := ;\n   end Q;\nend P;\n"
        tree, diags = parse_text(src)
        assert tree is None
        # both bad statements are reported: parsing continued past the first
        assert [(d.loc.line, d.loc.col) for d in diags] == [(5, 12), (7, 12)]
        assert all("expected an expression" in d.message for d in diags)

    def test_malformed_literal(self):
        assert "malformed literal '1.'" in _errors("package P is X : Integer := 1.; end P;")

    def test_unterminated_package(self):
        msgs = _errors("package P is")
        assert msgs and msgs[0].startswith("unterminated construct")

    def test_mismatched_end_name(self):
        assert _errors("package P is procedure Q is begin return; end Q; end R;") == [
            "syntax error: expected 'end P', found 'R'"]


class TestResolve:
    def test_result_attribute_in_post_has_return_type(self):
        program = resolved("corpus/mistake2.svl")
        f1 = sub_named(program, "f1")
        result = f1.post.left
        assert isinstance(result, A.Attr) and result.attr == "result"
        assert result.ty.base == "integer"

    def test_call_binds_one_argument(self):
        program = resolved("corpus/mistake1.svl")
        call = sub_named(program, "Poll_GPS").body[1].value
        assert call.ref is sub_named(program, "toInt32")
        assert len(call.args) == 1

    def test_undefined_name(self):
        src = "package P is\n   procedure Q is\n      X : Integer;\n   begin\n      X := Zz;\n   end Q;\nend P;\n"
        assert _errors(src) == ["undefined name 'Zz'"]

    def test_result_outside_post(self):
        src = "package P is function F (X : Integer) return Integer is begin return F'Result; end F; end P;"
        (msg,) = _errors(src)
        assert "'Result" in msg

    def test_arity_mismatch(self):
        src = ("package P is function F (X : Integer) return Integer is begin return X; end F; "
               "procedure Q is Y : Integer; begin Y := F (1, 2); end Q; end P;")
        assert _errors(src) == ["'F' expects 1 argument(s), got 2"]

    def test_type_mismatch(self):
        src = "package P is procedure Q is Y : Integer; begin Y := True; end Q; end P;"
        assert _errors(src) == ["type mismatch in assignment: expected integer, got boolean"]

    def test_identifiers_are_case_insensitive(self):
        src = "package P is procedure Q is Count : Integer := 0; begin COUNT := count + 1; end Q; end P;"
        assert _errors(src) == []


class TestProperties:
    @pytest.mark.parametrize("path", ALL_SOURCES, ids=lambda p: p.name)
    def test_fixture_round_trip(self, path: Path):
        tree, diags = parse_text(path.read_text(encoding="utf-8"), str(path))
        assert not diags
        again, diags2 = parse_text(pretty.unit(tree))
        assert not diags2
        assert again == tree

    @settings(max_examples=200, deadline=None)
    @given(st.integers(min_value=0, max_value=10**6))
    def test_generated_round_trip(self, seed: int):
        tree, diags = parse_text(generate(seed).text)
        assert not diags
        again, _ = parse_text(pretty.unit(tree))
        assert again == tree

    @pytest.mark.parametrize("path", ALL_SOURCES, ids=lambda p: p.name)
    def test_deterministic(self, path: Path):
        text = path.read_text(encoding="utf-8")
        a, da = load_text(text, str(path))
        b, db = load_text(text, str(path))
        assert a.ast == b.ast and da == db

    @settings(max_examples=200, deadline=None)
    @given(st.text(alphabet="package PQ is end ;:=()+-*/<>X1.'\n", max_size=80))
    def test_diagnostics_point_inside_source(self, text: str):
        unit = SourceUnit("<fuzz>.svl", text)
        _, diags = load_text(text, "<fuzz>.svl")
        for d in diags:
            assert unit.contains(d.loc), d.render()

    def test_diagnostics_are_sorted(self):
        src = "package P is\n procedure Q is begin\n X := ;\n Y := ;\n end Q;\nend P;\n"
        _, diags = parse_text(src)
        assert diags == sorted(diags) and len(diags) == 2

