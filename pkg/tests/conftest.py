import pytest

from favsites.rng import BitStream, FixedSteps

# criterion number -> (passed, one-line summary); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(n: int, passed: bool, line: str) -> None:
    ACCEPTANCE[n] = (bool(passed), line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, line = ACCEPTANCE[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {n:2d}: {line}")


@pytest.fixture
def steps():
    return FixedSteps


@pytest.fixture
def stream():
    return BitStream(12345)
