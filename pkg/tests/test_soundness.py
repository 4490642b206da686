from __future__ import annotations

from hypothesis import given, settings
from hypothesis import strategies as st

from progen import generate
from sweep import sweep


def test_generated_programs_fit_the_sweep_shape():
    for seed in range(200):
        text = generate(seed).text
        assert "pragma" not in text and "Float" not in text
        assert text.count("subtype") <= 2


def test_thousand_programs_without_violations():
    res = sweep(range(1000), replay=False)
    assert res.programs == 1000
    assert res.violations == []
    assert res.stats["faults"] > 0 and res.stats["proved"] > 0


def test_every_executed_check_has_a_vc():
    res = sweep(range(300), replay=False)
    assert res.unmatched_sites == []


def test_counterexamples_replay_as_faults():
    res = sweep(range(300), replay=True)
    assert res.replayed > 100
    assert res.replay_mismatches == []


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=10**6, max_value=10**9))
def test_fresh_seeds(seed: int):
    res = sweep([seed])
    assert res.violations == [] and res.replay_mismatches == [] and res.unmatched_sites == []
