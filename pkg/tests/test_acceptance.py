"""Acceptance gate: every criterion runs at its pinned tolerance and prints a
pass/fail line (run with ``pytest -s`` to see them all, or ``entlab verify``)."""

import pytest

from entlab import acceptance


@pytest.mark.parametrize("name", list(acceptance.CRITERIA))
def test_acceptance_criterion(name):
    result = acceptance.run_one(name)
    print(f"[{'PASS' if result.passed else 'FAIL'}] {name} ({result.seconds:.1f}s): {result.detail}")
    assert result.passed, result.detail
