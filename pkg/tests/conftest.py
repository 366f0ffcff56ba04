import functools
from functools import reduce as _fold

import numpy as np
import pytest

from fermispec.experiments import chain_spectrum

SX = np.array([[0.0, 1.0], [1.0, 0.0]])
SZ = np.array([[1.0, 0.0], [0.0, -1.0]])
I2 = np.eye(2)


def kron_hamiltonian(n, h):
    """Ising chain from explicit Kronecker products (site 0 leftmost)."""

    def op(single, site):
        mats = [I2] * n
        mats[site] = single
        return _fold(np.kron, mats)

    ham = np.zeros((2**n, 2**n))
    for i in range(n - 1):
        ham -= op(SX, i) @ op(SX, i + 1)
    for i in range(n):
        ham -= h * op(SZ, i)
    return ham


@functools.lru_cache(maxsize=None)
def cached_spectrum(n, h, cut=None):
    return chain_spectrum(n, h, cut)


@pytest.fixture
def spectrum_of():
    return cached_spectrum


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record a one-line verdict for an acceptance criterion.

    Call it with the label, the pass/fail flag and a short detail string;
    the line is printed immediately and again in the terminal summary.
    """

    def record(label, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
