"""Acceptance gate: every exit criterion at its stated tolerance.

Each test prints one pass/fail line (visible with -s or in failure output);
the assertions carry the same detail.  Run `bandgap verify` for the same
table from the CLI.
"""

import pytest

from bandgap import acceptance


@pytest.mark.parametrize("check", acceptance.ALL_CHECKS, ids=lambda fn: fn.__name__)
def test_criterion(check):
    result = check()
    status = "PASS" if result.passed else "FAIL"
    print(f"[{status}] criterion {result.number}: {result.name} :: {result.detail}")
    assert result.passed, f"criterion {result.number} ({result.name}): {result.detail}"
