from __future__ import annotations

import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).resolve().parent
FIXTURES = TESTS / "fixtures"
CORPUS = FIXTURES / "corpus"
CLEAN = FIXTURES / "clean"
VARIANTS = FIXTURES / "variants"
TARGETS = FIXTURES / "targets"

sys.path.insert(0, str(TESTS))

from svlv.frontend import load, load_text  # noqa: E402
from svlv.pipeline import RunOptions, analyze  # noqa: E402
from svlv.solver import Budget, prove_all  # noqa: E402
from svlv.target import DEFAULT_TARGET  # noqa: E402
from svlv.vcgen import generate_program  # noqa: E402


def fixture(path) -> str:
    return str(FIXTURES / path)


def resolved(path):
    program, diags = load([fixture(path)])
    assert program is not None and not diags, [d.render() for d in diags]
    return program


def resolved_text(text: str, path: str = "t.svl"):
    program, diags = load_text(text, path)
    assert program is not None and not diags, [d.render() for d in diags]
    return program


def proved_vcs(program, target=DEFAULT_TARGET, budget: Budget = Budget()):
    pv = generate_program(program, target)
    assert not pv.errors, [e.render() for e in pv.errors]
    spec_only = [s.key for _, s in program.subprograms() if s.body is None]
    prove_all(pv.vcs, budget, target, spec_only)
    return pv.vcs


def sub_named(program, name: str):
    return next(s for _, s in program.subprograms() if s.key == name.lower())


def vc_by_id(vcs, vc_id: str):
    return next(vc for vc in vcs if vc.id == vc_id)


def analyzed(*paths, **kw):
    return analyze(RunOptions(inputs=[fixture(p) for p in paths], **kw))


@pytest.fixture
def mistake1():
    return analyzed("corpus/mistake1.svl", audit=True)


@pytest.fixture
def mistake2():
    return analyzed("corpus/mistake2.svl", audit=True)


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
