from __future__ import annotations

from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIXTURES, analyzed, proved_vcs, resolved_text
from progen import generate
from svlv.report import MAX_WIDTH, STATUSES, Summary, bucket, emit, emit_log, percent, summarize
from svlv.solver import Budget, ProofStatus

THREE_DIVISIONS = """package R is
   subtype Small is Integer range -8 .. 7;
   procedure D (X : Small; Z : Small; a : out Integer; b : out Integer; c : out Integer) is
   begin
      a := X / Z;
      b := X / Z;
      c := X / Z;
   end D;
end R;
"""

ALL_SOURCES = sorted(str(p.relative_to(FIXTURES)) for p in FIXTURES.rglob("*.svl") if p.parent.name != "dims")


def _three_div_two_overflow():
    vcs = proved_vcs(resolved_text(THREE_DIVISIONS))
    # drop the last overflow VC: three divisions and two overflow checks remain
    return [vc for vc in vcs if vc.id != "r.d.6"]


def _fake(n_proved: int, n_failed: int):
    vcs = proved_vcs(resolved_text(THREE_DIVISIONS))
    template = vcs[1]
    out = []
    for i in range(n_proved + n_failed):
        state = "proved" if i < n_proved else "failed"
        out.append(replace(template, id=f"r.d.{i + 1}", status=ProofStatus(state)))
    return out


class TestPercent:
    def test_nine_of_ten(self):
        assert percent(9, 10) == 90.0

    def test_empty_is_full(self):
        assert percent(0, 0) == 100.0

    def test_half_up(self):
        # 1/8 = 12.5 % exactly; 1/16 = 6.25 % rounds up to 6.3
        assert percent(1, 8) == 12.5
        assert percent(1, 16) == 6.3
        assert percent(1, 3) == 33.3
        assert percent(2, 3) == 66.7

    @given(st.integers(min_value=1, max_value=5000).flatmap(
        lambda n: st.tuples(st.integers(min_value=0, max_value=n), st.just(n))))
    def test_within_a_twentieth_of_a_percent(self, pair):
        proved, total = pair
        p = percent(proved, total)
        assert abs(p - 100 * proved / total) <= 0.05 + 1e-9
        assert 0.0 <= p <= 100.0


class TestSummarize:
    def test_nine_of_ten_proved(self):
        s = summarize(_fake(9, 1), budget=Budget())
        assert s.totals["vcs"] == 10
        assert s.totals["percent_proved"] == 90.0
        assert "VCs proven     90.0 %" in emit(s).decode()

    def test_per_kind_rows(self):
        s = summarize(_three_div_two_overflow(), budget=Budget())
        assert {k: sum(row.values()) for k, row in s.totals["by_kind"].items()} == {"division": 3, "overflow": 2}
        text = emit(s).decode()
        assert any(line.split()[:2] == ["division", "3"] for line in text.splitlines())
        assert any(line.split()[:2] == ["overflow", "2"] for line in text.splitlines())

    def test_empty_program(self):
        s = summarize([], budget=Budget())
        assert s.totals["vcs"] == 0 and s.totals["percent_proved"] == 100.0
        text = emit(s).decode()
        assert "no VCs" in text and "100.0 %" in text
        assert "number of VCs" not in text

    def test_budget_echoed(self):
        s = summarize([], budget=Budget(steps=7, wall_time=1.5))
        assert s.budget == {"steps": 7, "wall_time": 1.5}
        assert emit(s).decode().startswith("budget: steps=7 wall_time=1.5 s")

    def test_time_share_per_kind(self):
        vcs = _three_div_two_overflow()
        timings = {vc.id: (0.3 if vc.kind == "division" else 0.1) for vc in vcs}
        s = summarize(vcs, timings=timings, budget=Budget())
        assert s.totals["time"] == pytest.approx(1.1)
        assert s.totals["time_share"]["division"] == pytest.approx(0.9 / 1.1, abs=1e-4)
        assert sum(s.totals["time_share"].values()) == pytest.approx(1.0, abs=1e-3)

    def test_without_timings_no_time(self):
        s = summarize(_three_div_two_overflow(), budget=Budget())
        assert s.totals["time"] is None and all(v.time is None for v in s.vcs)
        assert "analysis time       -" in emit(s).decode()

    def test_status_labels(self):
        r = analyzed("corpus/mistake1.svl")
        labels = {v.id: v.status for v in r.summary.vcs}
        assert labels["gps.read_from_device.2"] == "suppressed"
        assert labels["gps.poll_gps.3"] == "proved"
        r = analyzed("corpus/division.svl", steps=1)
        assert {v.status for v in r.summary.vcs} == {"unknown(stepout)"}
        assert bucket("unknown(stepout)") == "unknown"

    def test_findings_attached_to_subprograms(self, mistake1):
        subs = {s.name: s for p in mistake1.summary.packages for s in p.subprograms}
        assert [f["rule"] for f in subs["poll_gps"].findings] == ["A1_tainted_proof", "A1_tainted_proof"]
        assert [f["rule"] for f in subs["read_from_device"].findings] == ["A3_suppression_hygiene"]

    def test_claims_embedded(self, mistake2):
        claims = {c["claim"]: c for c in mistake2.summary.claims}
        caller = claims["AoRTE(caller)"]
        assert "callee_body(f1)" in caller["depends"] and "callee_post(f1)" in caller["depends"]

    def test_log_has_one_line_per_vc(self, mistake1):
        log = emit_log(mistake1.summary).splitlines()
        assert len(log) == len(mistake1.all_vcs)
        assert log[1].endswith("initialization suppressed [gps.read_from_device.2]")


class TestEmit:
    def test_unknown_format(self):
        with pytest.raises(ValueError):
            emit(summarize([]), "xml")

    def test_table_rows(self):
        r = analyzed(*ALL_SOURCES)
        text = emit(r.summary).decode()
        lines = text.splitlines()
        assert any(line.startswith("number of VCs") for line in lines)
        proven = next(line for line in lines if line.startswith("VCs proven"))
        cells = proven.split()[2:]
        assert cells and all(c == "%" or (c.count(".") == 1 and len(c.split(".")[1]) == 1) for c in cells)

    def test_deterministic_bytes(self):
        a = analyzed("corpus/mistake2.svl", audit=True).summary
        b = analyzed("corpus/mistake2.svl", audit=True).summary
        assert emit(a, "json") == emit(b, "json")
        assert emit(a, "text") == emit(b, "text")


class TestProperties:
    @pytest.mark.parametrize("path", ALL_SOURCES)
    def test_json_round_trip(self, path: str):
        s = analyzed(path, audit=True, assumptions_report=True).summary
        again = Summary.from_json(s.to_json())
        assert again == s
        assert again.to_json() == s.to_json()

    @pytest.mark.parametrize("path", ALL_SOURCES)
    def test_totals_invariance(self, path: str):
        s = analyzed(path).summary
        _check_totals(s)

    def test_width_on_the_whole_corpus(self):
        for group in (ALL_SOURCES, [p for p in ALL_SOURCES if p.startswith("corpus/")]):
            text = emit(analyzed(*group).summary).decode()
            assert max(len(line) for line in text.splitlines()) <= MAX_WIDTH

    def test_wide_tables_are_split(self):
        # many packages make a row wider than the limit; the table wraps into column groups
        packages = "\n".join(
            f"package Pkg_With_A_Long_Name_{i} is\n   procedure P (X : Integer; Z : Integer; a : out Integer) is\n"
            f"   begin\n      a := X / Z;\n   end P;\nend Pkg_With_A_Long_Name_{i};" for i in range(12))
        vcs = proved_vcs(resolved_text(packages))
        text = emit(summarize(vcs, budget=Budget())).decode()
        assert max(len(line) for line in text.splitlines()) <= MAX_WIDTH
        assert sum(line.startswith("number of VCs") for line in text.splitlines()) >= 2

    @settings(max_examples=60, deadline=None)
    @given(st.integers(min_value=0, max_value=10**6))
    def test_totals_on_generated_programs(self, seed: int):
        vcs = proved_vcs(resolved_text(generate(seed).text))
        s = summarize(vcs, budget=Budget())
        _check_totals(s)
        assert Summary.from_json(s.to_json()) == s


def _check_totals(s: Summary) -> None:
    t = s.totals
    by_kind = sum(sum(row.values()) for row in t["by_kind"].values())
    by_status = sum(t["by_status"][k] for k in STATUSES)
    assert by_kind == by_status == t["vcs"] == len(s.vcs)
    proved = t["by_status"]["proved"]
    assert t["percent_proved"] == percent(proved, t["vcs"])
