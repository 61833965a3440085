import numpy as np
import pytest


def random_disk(rng, n, r_max=0.95):
    # uniform in area up to r_max
    r = r_max * np.sqrt(rng.random(n))
    return r * np.exp(2j * np.pi * rng.random(n))


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


_ACCEPTANCE = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line: criterion(number, passed, detail)."""

    def record(number, passed, detail=""):
        line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}".rstrip()
        _ACCEPTANCE.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
