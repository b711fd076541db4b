"""The ten acceptance criteria at their stated tolerances and time budgets.

Each test prints one pass/fail line (collected again in the terminal summary)
followed by the individual measurements.  Run with ``-s`` to see them inline.
"""
import pytest

from isodyn.harness.config import default_config
from isodyn.harness.suites import SUITES, run_suite

from conftest import ACCEPTANCE_LINES


@pytest.mark.parametrize("name", list(SUITES))
def test_criterion(name):
    res = run_suite(name, default_config())
    ACCEPTANCE_LINES.append(res.summary())
    print()
    print(res.report())
    assert res.passed, res.report()
