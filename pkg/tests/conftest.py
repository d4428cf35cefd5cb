import sys
from pathlib import Path

import pytest

from timepop.model import Interaction, build_dataset

sys.path.insert(0, str(Path(__file__).parent))

DAY = 86400


def X(u, i, r, t):
    return Interaction(u, i, float(r), t)


@pytest.fixture
def four_user_records():
    """Target ``u``; u2 precedes it on two shared items, u4 on one, u3 only follows."""
    return [
        X("u", "i1", 5, 10), X("u", "i2", 4, 20), X("u", "i3", 4, 30), X("u", "i4", 3, 40),
        X("u2", "i1", 4, 5), X("u2", "i2", 5, 15), X("u2", "i5", 4, 25),
        X("u3", "i1", 3, 12), X("u3", "i4", 4, 45), X("u3", "i6", 2, 50),
        X("u4", "i3", 5, 25), X("u4", "i6", 4, 55),
    ]


@pytest.fixture
def four_users(four_user_records):
    return build_dataset(four_user_records)


ACCEPTANCE = []


@pytest.fixture
def record():
    """Log one acceptance line: ``record(name, ok, detail)``."""
    def _record(name, ok, detail=""):
        ACCEPTANCE.append((name, bool(ok), detail))
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
