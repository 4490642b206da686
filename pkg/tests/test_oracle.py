from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import proved_vcs, resolved, resolved_text, sub_named
from progen import generate
from svlv import oracle
from svlv.oracle import DomainTooLarge, FuelExhausted, RuntimeFault, Success, enumerate_runs, is_fault, run
from svlv.target import TargetConfig

DENORM_OFF = TargetConfig(denorm=False)
DENORM_ON = TargetConfig(denorm=True)

SMALL = """package P is
   subtype Two is Integer range -2 .. 2;
   procedure Quot (X : Two; Z : Two) is
      a : Integer;
   begin
      a := X / Z;
   end Quot;
   procedure Empty is
   begin
      return;
   end Empty;
   procedure Copy (Y : out Integer; W : out Integer) is
   begin
      W := Y;
   end Copy;
   procedure Spin is
      I : Integer := 0;
   begin
      while I < 1 loop
         I := I - 1;
      end loop;
   end Spin;
   procedure Check (X : Two) is
   begin
      pragma Assume (X > 0);
   end Check;
end P;
"""

# (fixture, subprogram, args) for straight-line programs whose every check is executed
STRAIGHT = [
    ("corpus/division.svl", "divide", [1, 2, 1]),
    ("corpus/mistake3.svl", "rotate", []),
    ("clean/loops.svl", "count_up", [None]),
]


@pytest.fixture(scope="module")
def small():
    return resolved_text(SMALL)


def _sites(program, sub, args, target=DENORM_ON):
    seen = set()
    run(program, sub, args, target, recorder=lambda kind, loc: seen.add((kind, loc)))
    return seen


class TestMistakes:
    def test_off_by_one_slice_faults_the_precondition(self):
        program = resolved("corpus/mistake1.svl")
        out = run(program, sub_named(program, "Poll_GPS"), [])
        assert isinstance(out, RuntimeFault)
        assert out.kind == "precondition"
        assert (out.loc.line, out.loc.col) == (21, 17)
        assert out.value("b").length == 5

    def test_caller_overflows(self):
        program = resolved("corpus/mistake2.svl")
        out = run(program, sub_named(program, "Caller"), [])
        assert out.kind == "overflow" and out.loc.line == 12
        assert out.value("result") == 2**31

    def test_caller_has_a_single_faulting_outcome(self):
        program = resolved("corpus/mistake2.svl")
        runs = enumerate_runs(program, sub_named(program, "Caller"))
        assert len(runs) == 1 and runs[0][0] == () and runs[0][1].kind == "overflow"

    def test_subnormal_rotation_faults_without_denormals(self):
        program = resolved("corpus/mistake3.svl")
        out = run(program, sub_named(program, "Rotate"), [], DENORM_OFF)
        assert out.kind == "float_validity"
        assert out.value() == -8.684687362499486e-41
        assert oracle.floats.classify(out.value()) == "subnormal"

    def test_subnormal_rotation_succeeds_with_denormals(self):
        program = resolved("corpus/mistake3.svl")
        assert isinstance(run(program, sub_named(program, "Rotate"), [], DENORM_ON), Success)

    def test_suppression_is_ignored_at_run_time(self):
        program = resolved("corpus/mistake1.svl")
        out = run(program, sub_named(program, "Read_From_Device"), [None])
        assert isinstance(out, Success)


class TestEnumerate:
    def test_division_faults_exactly_when_divisor_is_zero(self, small):
        runs = enumerate_runs(small, sub_named(small, "Quot"))
        assert len(runs) == 25
        # lexicographic order of argument tuples
        assert [a for a, _ in runs] == sorted(a for a, _ in runs)
        faulting = [a for a, o in runs if is_fault(o)]
        assert faulting == [(x, 0) for x in range(-2, 3)]
        assert all(o.kind == "division" for a, o in runs if is_fault(o))

    def test_no_inputs_no_checks(self, small):
        runs = enumerate_runs(small, sub_named(small, "Empty"))
        assert len(runs) == 1 and isinstance(runs[0][1], Success)

    def test_domain_limit(self, small):
        with pytest.raises(DomainTooLarge):
            enumerate_runs(small, sub_named(small, "Quot"), limit=10)

    def test_explicit_domains(self, small):
        runs = enumerate_runs(small, sub_named(small, "Quot"), {"X": [1], "Z": [0, 1]})
        assert [(a, is_fault(o)) for a, o in runs] == [((1, 0), True), ((1, 1), False)]


class TestSemantics:
    def test_reading_an_out_parameter_before_assignment(self, small):
        out = run(small, sub_named(small, "Copy"), [None, None])
        assert out.kind == "initialization"

    def test_fuel(self, small):
        out = run(small, sub_named(small, "Spin"), [], fuel=100)
        assert isinstance(out, FuelExhausted) and out.fuel == 100

    def test_assume_is_checked(self, small):
        runs = enumerate_runs(small, sub_named(small, "Check"))
        assert [a for a, o in runs if is_fault(o)] == [(-2,), (-1,), (0,)]
        assert {o.kind for _, o in runs if is_fault(o)} == {"assertion"}

    def test_int_width_from_target(self):
        program = resolved_text("package P is procedure Q (X : Integer) is Y : Integer; begin Y := X + 1; end Q; end P;")
        q = sub_named(program, "Q")
        assert is_fault(run(program, q, [127], TargetConfig(int_width=8)))
        assert not is_fault(run(program, q, [127], TargetConfig(int_width=16)))


class TestProperties:
    @settings(max_examples=60, deadline=None)
    @given(st.integers(min_value=0, max_value=10**6))
    def test_deterministic(self, seed: int):
        g = generate(seed)
        program = resolved_text(g.text)
        sub = sub_named(program, g.procedure)
        target = TargetConfig(int_width=g.int_width)
        a = enumerate_runs(program, sub, target=target, fuel=2000)
        b = enumerate_runs(program, sub, target=target, fuel=2000)
        assert [(x, o.render()) for x, o in a] == [(x, o.render()) for x, o in b]

    @pytest.mark.parametrize("path, name, args", STRAIGHT)
    def test_dynamic_checks_match_vcs(self, path, name, args):
        program = resolved(path)
        vcs = proved_vcs(program, DENORM_ON)
        static = {(vc.kind, vc.loc) for vc in vcs}
        assert _sites(program, sub_named(program, name), args) == static

    @settings(max_examples=150, deadline=None)
    @given(st.integers(min_value=0, max_value=10**6))
    def test_every_dynamic_check_has_a_vc(self, seed: int):
        g = generate(seed)
        program = resolved_text(g.text)
        target = TargetConfig(int_width=g.int_width)
        vcs = proved_vcs(program, target)
        seen = set()
        enumerate_runs(program, sub_named(program, g.procedure), target=target, fuel=2000,
                       recorder=lambda kind, loc: seen.add((kind, loc)))
        assert seen <= {(vc.kind, vc.loc) for vc in vcs}
