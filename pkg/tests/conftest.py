"""Shared test plumbing.

* Acceptance results are collected and printed as one line per criterion in
  the terminal summary.
* Every :class:`PathDisagreement` raised anywhere in the session is counted.
  Tests that provoke one on purpose wrap it in ``path_disagreements.expected()``;
  anything else is an internal inconsistency.
* Acceptance tests run after the rest of the suite so the disagreement count
  they report covers everything.
"""

from __future__ import annotations

import contextlib

import pytest

from bergman_ops.errors import PathDisagreement


class DisagreementCounter:
    def __init__(self):
        self.unexpected = 0
        self.expected_count = 0
        self._expecting = 0

    @contextlib.contextmanager
    def expected(self):
        self._expecting += 1
        try:
            yield
        finally:
            self._expecting -= 1

    def hit(self):
        if self._expecting:
            self.expected_count += 1
        else:
            self.unexpected += 1


COUNTER = DisagreementCounter()
ACCEPTANCE: dict[int, tuple[bool, str]] = {}

_original_init = PathDisagreement.__init__


def _counting_init(self, *args, **kwargs):
    COUNTER.hit()
    _original_init(self, *args, **kwargs)


PathDisagreement.__init__ = _counting_init


@pytest.fixture
def path_disagreements():
    return COUNTER


@pytest.fixture
def acceptance():
    def record(number: int, ok: bool, detail: str):
        ACCEPTANCE[number] = (bool(ok), detail)
        return ok
    return record


def pytest_collection_modifyitems(items):
    items.sort(key=lambda it: it.path.name == "test_acceptance.py")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    terminalreporter.write_line(
        f"path disagreements: {COUNTER.unexpected} unexpected, {COUNTER.expected_count} provoked on purpose")
