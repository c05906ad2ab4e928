import math

import numpy as np
import pytest
from scipy.optimize import brentq


def tanh_root(coupling: float) -> float:
    """Positive root of z = tanh(coupling * z) by Brent's method (test oracle)."""
    if coupling <= 1.0:
        return 0.0
    return brentq(lambda z: z - math.tanh(coupling * z), 1e-9, 1 - 1e-15, xtol=1e-15, rtol=1e-15)


def pairwise_energy(spins, h: float) -> float:
    """H_N from an explicit loop over unordered pairs i < j.

    The pair sum is completed with its diagonal (sigma_i^2 = 1) so that the
    interaction equals -(1/2N) (sum_i sigma_i)^2, then the constant -1/2 is added.
    """
    n = len(spins)
    pair_sum = 0
    for i in range(n):
        for j in range(i + 1, n):
            pair_sum += spins[i] * spins[j]
    interaction = -(2 * pair_sum + n) / (2 * n)
    return interaction - h * sum(spins) - 0.5


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, title: str, ok: bool, elapsed: float, limit: float, detail: str = "") -> None:
    status = "PASS" if ok and elapsed < limit else "FAIL"
    ACCEPTANCE_LINES.append(f"[{status}] criterion {number}: {title} ({elapsed:.2f}s / {limit:.0f}s) {detail}".rstrip())


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
