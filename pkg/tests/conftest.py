import numpy as np
import pytest

from qutrit_lindblad.validation import random_density, random_hermitian, random_unitary  # noqa: F401


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def swap_operator():
    """SWAP on C^3 (x) C^3 built by enumerating basis products."""
    S = np.zeros((9, 9))
    for a in range(3):
        for b in range(3):
            S[3 * b + a, 3 * a + b] = 1.0
    return S


def unit(i, j, n=9):
    E = np.zeros((n, n), dtype=complex)
    E[i - 1, j - 1] = 1.0
    return E


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
