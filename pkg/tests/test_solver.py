from __future__ import annotations

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import FIXTURES, proved_vcs, resolved, resolved_text, vc_by_id
from progen import generate
from svlv import floats
from svlv import logic as L
from svlv.oracle import EvalError, eval_term
from svlv.solver import (
    Budget,
    ProofStatus,
    check_sat,
    discharge,
    hypotheses_consistent,
    interval_eval,
    spurious_possible,
)
from svlv.target import TargetConfig
from svlv.vcgen import generate_program

X = L.var("x", L.INT)
Y = L.var("y", L.INT)
XP = L.var("x'", L.INT)
F = L.var("f", L.FLOAT)
DENORM_OFF = TargetConfig(denorm=False)
DENORM_ON = TargetConfig(denorm=True)
ALL_FIXTURES = sorted(p.relative_to(FIXTURES) for p in FIXTURES.rglob("*.svl") if "dims" not in p.parts)


def _fresh_vcs(path, target=TargetConfig()):
    return generate_program(resolved(path), target).vcs


class TestDischarge:
    def test_unguarded_division_fails_at_zero(self):
        vcs = proved_vcs(resolved("corpus/division.svl"))
        first = vc_by_id(vcs, "ratios.divide.1")
        assert first.status.state == "failed"
        assert dict(first.status.counterexample)["z@0"] == 0

    def test_prior_success_proves_the_second_division(self):
        vcs = proved_vcs(resolved("corpus/division.svl"))
        assert vc_by_id(vcs, "ratios.divide.3").status.proved

    def test_contradictory_axiom_proves_vacuously(self):
        vcs = proved_vcs(resolved("corpus/mistake2.svl"))
        caller = vc_by_id(vcs, "contracts.caller.1")
        assert caller.kind == "overflow" and caller.status.proved
        assert hypotheses_consistent(caller.hypotheses).status == "unsat"

    def test_subnormal_product_fails_without_denormals(self):
        vcs = proved_vcs(resolved("corpus/mistake3.svl"), DENORM_OFF)
        (vc,) = [v for v in vcs if v.kind == "float_validity"]
        assert vc.status.state == "failed"
        assert dict(vc.status.counterexample)["value"] == -8.684687362499486e-41

    def test_subnormal_product_proved_with_denormals(self):
        vcs = proved_vcs(resolved("corpus/mistake3.svl"), DENORM_ON)
        (vc,) = [v for v in vcs if v.kind == "float_validity"]
        assert vc.status.proved

    def test_counterexample_covers_goal_symbols(self):
        for path in ("corpus/division.svl", "corpus/mistake2.svl", "variants/invariants.svl"):
            for vc in proved_vcs(resolved(path)):
                if vc.status.state == "failed":
                    named = {k for k, _ in vc.status.counterexample}
                    assert {s.name for s in L.free_vars(vc.goal)} <= named

    def test_spurious_flag_follows_unproved_callees(self):
        vcs = proved_vcs(resolved("corpus/mistake2.svl"))
        caller = vc_by_id(vcs, "contracts.caller.1")
        assert spurious_possible(caller, {"f1"})
        assert not spurious_possible(caller, set())
        assert not spurious_possible(vc_by_id(vcs, "contracts.f1.1"), {"f1"})

    def test_unknown_on_tiny_budget(self):
        vc = vc_by_id(_fresh_vcs("corpus/division.svl"), "ratios.divide.2")
        status = discharge(vc, Budget(steps=1))
        assert status == ProofStatus("unknown", "stepout", steps=status.steps)
        assert status.label() == "unknown(stepout)"

    def test_trivial_goal_needs_no_steps(self):
        vc = vc_by_id(_fresh_vcs("corpus/mistake1.svl"), "gps.poll_gps.1")
        assert discharge(vc, Budget(steps=1)).proved


class TestCheckSat:
    def test_true_is_sat_with_empty_model(self):
        r = check_sat([L.TRUE])
        assert r.status == "sat" and not r.model

    def test_even_values_between_bounds(self):
        facts = [L.gt(X, L.int_(0)), L.lt(X, L.int_(5)), L.eq(L.op("rem", X, L.int_(2)), L.int_(0))]
        r = check_sat(facts)
        assert r.status == "sat"
        assert r.model[X] in {2, 4}
        # brute-force oracle over the interval
        assert {v for v in range(1, 5) if v % 2 == 0} == {2, 4}
        assert all(eval_term(f, r.model) for f in facts)

    def test_contradictory_axiom_is_unsat(self):
        facts = [L.eq(X, L.int_(2**31 - 1)), L.eq(XP, X), L.eq(XP, L.op("+", X, L.int_(1)))]
        assert check_sat(facts).status == "unsat"

    def test_empty_interval_is_unsat(self):
        assert check_sat([L.gt(X, L.int_(3)), L.lt(X, L.int_(2))]).status == "unsat"

    @settings(max_examples=200, deadline=None)
    @given(st.integers(-20, 20), st.integers(-20, 20), st.integers(1, 5))
    def test_models_satisfy_every_formula(self, a: int, b: int, k: int):
        box = [L.between(L.int_(-50), X, L.int_(50)), L.between(L.int_(-50), Y, L.int_(50))]
        facts = box + [L.le(L.int_(a), X), L.le(X, L.op("+", Y, L.int_(b))),
                       L.eq(L.op("rem", Y, L.int_(k)), L.int_(0))]
        r = check_sat(facts)
        # small boxes are searched exhaustively, so the procedure decides them
        expected = any(a <= x <= y + b and y % k == 0 for x in range(-50, 51) for y in range(-50, 51))
        assert r.status == ("sat" if expected else "unsat")
        if r.status == "sat":
            assert all(eval_term(f, r.model) for f in facts)


class TestIntervals:
    def test_translation(self):
        r = interval_eval(L.op("+", X, L.int_(1)), {X: (1, 10)})
        assert (r.lo, r.hi) == (2, 11)

    def test_division_by_interval_containing_zero(self):
        r = interval_eval(L.op("/", X, Y), {X: (1, 10), Y: (-1, 1)})
        assert r.may_fault

    def test_sine_bounded_by_its_argument(self):
        r = interval_eval(L.op("sin", F), {F: (0.004, 0.005)})
        assert -0.005 <= r.lo and r.hi <= 0.005
        for i in range(101):
            x = floats.to_f32(0.004 + i * 1e-5)
            assert floats.sin(x) in r

    def test_subnormal_product_interval(self):
        a, b = floats.to_f32(0.00429), floats.to_f32(-2.023e-38)
        r = interval_eval(L.op("f*", L.flt(a), L.flt(b)), {})
        assert -floats.MIN_NORMAL < r.lo <= r.hi < 0
        assert r.lo <= floats.mul(a, b) <= r.hi
        assert r.lo == pytest.approx(-8.68e-41, rel=1e-3) and r.hi == pytest.approx(-8.68e-41, rel=1e-3)

    @settings(max_examples=300, deadline=None)
    @given(st.data())
    def test_sound_over_sampled_points(self, data):
        term = data.draw(_int_terms(3))
        lx = data.draw(st.integers(-50, 50))
        ly = data.draw(st.integers(-50, 50))
        env = {X: (lx, lx + data.draw(st.integers(0, 20))), Y: (ly, ly + data.draw(st.integers(0, 20)))}
        r = interval_eval(term, env)
        for _ in range(20):
            point = {X: data.draw(st.integers(*env[X])), Y: data.draw(st.integers(*env[Y]))}
            try:
                v = eval_term(term, point)
            except (EvalError, ZeroDivisionError):
                assert r.may_fault
                continue
            assert v in r


def _int_terms(depth: int):
    leaves = st.one_of(st.sampled_from([X, Y]), st.integers(-9, 9).map(L.int_))
    if depth == 0:
        return leaves

    def node(children):
        return st.one_of(
            st.tuples(st.sampled_from(["+", "-", "*", "/", "rem"]), children, children).map(
                lambda t: L.op(t[0], t[1], t[2])),
            children.map(lambda c: L.op("neg", c)),
        )

    return st.recursive(leaves, node, max_leaves=6)


class TestBudget:
    def test_budget_must_be_positive(self):
        with pytest.raises(ValueError):
            Budget(steps=0)
        with pytest.raises(ValueError):
            Budget(wall_time=0.0)

    @pytest.mark.parametrize("path", ALL_FIXTURES, ids=str)
    def test_monotone(self, path):
        small = {vc.id: discharge(vc, Budget(steps=3), DENORM_ON) for vc in _fresh_vcs(path, DENORM_ON)}
        for budget in (Budget(steps=30), Budget(), Budget(steps=100000, wall_time=120.0)):
            for vc in _fresh_vcs(path, DENORM_ON):
                before, after = small[vc.id], discharge(vc, budget, DENORM_ON)
                if before.state != "unknown":
                    assert after.state == before.state, vc.id
                small[vc.id] = after

    @pytest.mark.parametrize("path", ALL_FIXTURES, ids=str)
    def test_deterministic(self, path):
        a = [discharge(vc) for vc in _fresh_vcs(path)]
        b = [discharge(vc) for vc in _fresh_vcs(path)]
        assert a == b

    @settings(max_examples=80, deadline=None)
    @given(st.integers(min_value=0, max_value=10**6))
    def test_monotone_on_generated_programs(self, seed: int):
        g = generate(seed)
        target = TargetConfig(int_width=g.int_width)
        vcs = generate_program(resolved_text(g.text), target).vcs
        for vc in vcs:
            small = discharge(vc, Budget(steps=5), target)
            large = discharge(vc, Budget(), target)
            if small.state != "unknown":
                assert large.state == small.state


class TestReplay:
    @settings(max_examples=150, deadline=None)
    @given(st.integers(min_value=0, max_value=10**6))
    def test_failed_status_has_a_confirmed_model(self, seed: int):
        g = generate(seed)
        target = TargetConfig(int_width=g.int_width)
        vcs = proved_vcs(resolved_text(g.text), target)
        failed = [vc for vc in vcs if vc.status.state == "failed" and not vc.status.spurious_possible]
        assume(failed)
        for vc in failed:
            model = vc.status.model
            assert all(eval_term(h.predicate, model) for h in vc.hypotheses)
            assert not eval_term(vc.goal, model)
