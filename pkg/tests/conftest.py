import numpy as np
import pytest

_ACCEPTANCE = {}


def record(criterion: int, name: str, passed: bool, detail: str = "") -> None:
    """Store one acceptance outcome for the end-of-run summary."""
    _ACCEPTANCE[criterion] = (name, bool(passed), detail)
    print(f"[{'PASS' if passed else 'FAIL'}] criterion {criterion:2d} {name}: {detail}")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_ACCEPTANCE):
        name, ok, detail = _ACCEPTANCE[k]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {k:2d}  {name}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
