"""Acceptance gate: one test per exit criterion, each printing a PASS/FAIL line.

The lines are collected into an "acceptance criteria" section of the pytest
terminal summary (``pytest -s`` also shows them inline).
"""

import pytest

from bowtie_mbqc import acceptance

CASES = [
    ("c2p", {}),
    ("commutation", {}),
    ("byproduct", {}),
    ("enlargement", {}),
    ("toffoli", {"exhaustive": True}),
    ("toffoli", {"exhaustive": False}),
    ("bridging", {}),
    ("ideal", {}),
    ("fig3", {}),
    ("regime", {}),
    ("resources", {}),
    ("removal", {}),
]

LINES = []


@pytest.mark.parametrize(
    "name,kwargs",
    CASES,
    ids=[f"{n}-{'exhaustive' if k.get('exhaustive') else 'subset'}" if "exhaustive" in k else n for n, k in CASES],
)
def test_criterion(name, kwargs):
    result = acceptance.CHECKS[name](**kwargs)
    LINES.append(result.line())
    print(result.line())
    assert result.passed, result.detail

