"""Acceptance battery: criteria 1-10 from one full suite run, criterion 11 from a second run.

Each criterion adds a PASS/FAIL line to the terminal summary.
"""

import time

import pytest

from kplab import cli
from kplab.suite import CRITERIA, SuiteOptions, run_suite

from conftest import ACCEPTANCE_LINES

# wall-clock budgets in seconds, where a criterion states one
BUDGETS = {1: 120.0, 2: 1800.0, 9: 300.0}


@pytest.fixture(scope="session")
def first_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("suite_a")
    start = time.perf_counter()
    results = {r.number: r for r in run_suite(SuiteOptions(seed=0), out=out)}
    return out, results, time.perf_counter() - start


@pytest.fixture(scope="session")
def second_run(tmp_path_factory, first_run):
    out = tmp_path_factory.mktemp("suite_b")
    code = cli.main(["suite", "--seed", "0", "--out", str(out)])
    return out, code


def _record(label: str, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"{'PASS' if passed else 'FAIL'}  {label}: {detail}")


@pytest.mark.slow
@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(first_run, number):
    _, results, _ = first_run
    res = results[number]
    budget = BUDGETS.get(number)
    in_time = budget is None or res.seconds <= budget
    timing = f" [{res.seconds:.1f}s" + (f" of {budget:.0f}s budget]" if budget else "]")
    _record(f"criterion {number:2d} {res.title}", res.passed and in_time, res.detail + timing)
    assert res.passed, res.detail
    assert in_time, f"took {res.seconds:.1f}s, budget {budget}s"


@pytest.mark.slow
def test_criterion_11_determinism(first_run, second_run):
    out_a, results, _ = first_run
    out_b, code = second_run
    names = sorted(p.name for p in out_a.glob("*.csv"))
    assert names == sorted(p.name for p in out_b.glob("*.csv"))
    differing = [n for n in names if (out_a / n).read_bytes() != (out_b / n).read_bytes()]
    passed = not differing and code == 0
    _record(
        "criterion 11 Determinism",
        passed,
        f"{len(names)} CSV files compared byte for byte, {len(differing)} differ; CLI suite exit code {code}",
    )
    assert not differing, differing
    assert code == 0
