"""Acceptance gate: one test per criterion, each printing its pass/fail line.

The criteria live in bracketflow.verify so the CLI `verify` command and this
module run exactly the same checks; catalog trajectories are shared through
a module-scoped lab to keep the gate fast, while the timed criteria do their
own fresh runs internally.
"""

import pytest

from bracketflow.verify import AcceptanceLab, criteria_ids, run_criterion


@pytest.fixture(scope="module")
def lab():
    return AcceptanceLab()


@pytest.mark.parametrize("cid", criteria_ids())
def test_acceptance_criterion(cid, lab):
    result = run_criterion(cid, lab)
    status = "PASS" if result.passed else "FAIL"
    print(f"[{status}] criterion {result.cid}: {result.title} -- {result.detail}")
    assert result.passed, f"criterion {result.cid} ({result.title}): {result.detail}"
