import numpy as np
import pytest

from birkhoff_lab import RotationNumber


@pytest.fixture(scope="session")
def golden():
    return RotationNumber.golden()


@pytest.fixture(scope="session")
def silver():
    return RotationNumber.sqrt2m1()


@pytest.fixture(scope="session")
def quarter():
    # rational fixture; only operations that accept rationals may use it
    return RotationNumber.parse("fraction:1/4")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


ACCEPTANCE = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line; the line is printed now and again in the summary."""
    def record(number: int, title: str, ok: bool, detail: str) -> bool:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number:2d} {title}: {detail}"
        print(line)
        ACCEPTANCE.append((number, line))
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
