import numpy as np
import pytest

_ACCEPTANCE = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def report():
    """Record (and print) one acceptance verdict line."""
    def emit(label, ok, detail=""):
        line = f"{label}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else "")
        _ACCEPTANCE.append(line)
        print(line)
        return ok
    return emit


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
