"""Acceptance criteria 1-11, one pass/fail line each.

Run under pytest, or directly: ``python3 tests/test_acceptance.py``.
"""

import sys

import pytest

from qcurv.suite import CRITERIA, SuiteConfig, run_criterion

NUMBERS = [c[0] for c in CRITERIA]


@pytest.mark.parametrize("number", NUMBERS)
def test_criterion(number, capsys):
    res = run_criterion(number, SuiteConfig())
    with capsys.disabled():
        print(f"\n{res.line()}" + (f"  {res.error}" if res.error else ""))
    assert res.passed, res.to_dict()


if __name__ == "__main__":
    results = [run_criterion(k, SuiteConfig()) for k in NUMBERS]
    for res in results:
        print(res.line() + (f"  {res.error}" if res.error else ""))
    sys.exit(0 if all(r.passed for r in results) else 1)
