import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from momentcert.sequences import AtomicMeasure, CoefficientVector  # noqa: E402

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20061019)


@pytest.fixture
def two_point():
    """1/2 delta_{-1} + 1/2 delta_{+1}."""
    return AtomicMeasure(1, "real", [-1.0, 1.0], [0.5, 0.5])


@pytest.fixture
def dirac_one():
    return AtomicMeasure(1, "real", [1.0], [1.0])


def xi1(*values, dim=1):
    return CoefficientVector.from_dense(values, dim)


def measure_from_atoms(atoms, d, kind="real"):
    pts = np.array([p for p, _ in atoms]).reshape(len(atoms), d)
    return AtomicMeasure(d, kind, pts, [w for _, w in atoms])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
