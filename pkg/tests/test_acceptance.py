"""Acceptance gate: every criterion at its stated tolerance, one line each."""

import pytest

from tmscat.acceptance import CRITERIA


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f.__name__ for f in CRITERIA])
def test_criterion(criterion, capsys):
    result = criterion()
    with capsys.disabled():
        print(result.line())
    assert result.passed, result.detail
