import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

R = 1 / np.sqrt(2)
# columns (1,0), (0,1), (1/sqrt2, 1/sqrt2)
EXAMPLE_2X3 = np.array([[1.0, 0.0, R], [0.0, 1.0, R]])

_ACCEPTANCE_LINES = []


@pytest.fixture
def example_2x3():
    return EXAMPLE_2X3.copy()


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
