"""Exit criteria 1-11 at their stated tolerances, one report line each.

Run alone with ``pytest -m acceptance -s tests/test_acceptance.py``; criteria 7
and 8 are also marked slow (several minutes of Monte Carlo on one core).
"""
import pytest

from charpoly.acceptance import CRITERIA, run_criterion

SLOW = {7, 8}

pytestmark = pytest.mark.acceptance


def _case(number):
    marks = [pytest.mark.slow] if number in SLOW else []
    return pytest.param(number, marks=marks, id=f"criterion-{number}")


@pytest.mark.parametrize("number", [_case(n) for n in sorted(CRITERIA)])
def test_criterion(number, record_property):
    res = run_criterion(number)
    print(res.line())
    record_property("criterion_line", res.line())
    assert res.passed, res.line()
