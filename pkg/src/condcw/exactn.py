"""Exact finite-N expectations under the conditional measure.

All configurations with the same number k of plus spins among the free sites
share one energy, so the partition function is a sum over k with binomial
multiplicities.  Everything is carried in log space.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp

from condcw.errors import ParameterError, SizeError
from condcw.model import FiniteModel, ModelParams, validate_beta
from condcw.solver import specific_magnetization

MAX_ENUMERATION = 20

_table_lock = threading.Lock()
_log_factorials = np.zeros(1)
_log_factorials.flags.writeable = False


def log_factorials(n: int) -> np.ndarray:
    """Read-only table of log(k!) for k = 0..n (or longer), grown on demand."""
    global _log_factorials
    table = _log_factorials
    if len(table) > n:
        return table
    with _table_lock:
        if len(_log_factorials) <= n:
            size = max(n + 1, 2 * len(_log_factorials))
            fresh = gammaln(np.arange(size, dtype=float) + 1.0)
            fresh.flags.writeable = False
            _log_factorials = fresh
        return _log_factorials


def log_binomials(n: int) -> np.ndarray:
    lf = log_factorials(n)
    k = np.arange(n + 1)
    # lf[k] + lf[n-k] keeps C(n, k) and C(n, n-k) bitwise equal
    return lf[n] - (lf[k] + lf[n - k])


@dataclass(frozen=True)
class ExactResult:
    log_partition: float
    mean_magnetization: float
    mean_free_spin: float
    s_n: float
    r_n: float


def _sector_log_weights(fm: FiniteModel, beta: float, h: float) -> tuple[np.ndarray, np.ndarray]:
    m = fm.sector_magnetizations()
    logw = log_binomials(fm.n_free) + beta * fm.n_total * (0.5 * m * m + h * m)
    return m, logw


def exact_moments(fm: FiniteModel, beta: float, h: float) -> ExactResult:
    """Log partition function and mean magnetization at finite N.

    Additive constants of the Hamiltonian are dropped, so ``log_partition`` is
    defined up to a (beta, h, N)-dependent shift that cancels in every ratio.
    """
    validate_beta(beta)
    if not math.isfinite(h):
        raise ParameterError(f"h must be finite, got {h!r}")
    m, logw = _sector_log_weights(fm, beta, h)
    log_z = float(logsumexp(logw))
    w = np.exp(logw - log_z)
    mean_m = float(np.dot(w, m))
    if fm.n_free:
        k = np.arange(fm.n_free + 1)
        mean_free = float(np.dot(w, (2 * k - fm.n_free) / fm.n_free))
    else:
        mean_free = 0.0
    return ExactResult(log_z, mean_m, mean_free, fm.s_n, fm.r_n)


def sector_distribution(fm: FiniteModel, beta: float, h: float) -> np.ndarray:
    """Probability of each sector k = 0..n_free."""
    _, logw = _sector_log_weights(fm, beta, h)
    return np.exp(logw - logsumexp(logw))


@dataclass(frozen=True)
class ConditionalTable:
    """Free-spin configurations with their probabilities under two measure forms.

    ``p_full`` conditions the full-system Hamiltonian on the pinned sites;
    ``p_reduced`` uses the Curie-Weiss Hamiltonian of the free sites alone with
    coupling t_N and field h + s_N - r_N.
    """

    configs: np.ndarray
    p_full: np.ndarray
    p_reduced: np.ndarray

    @property
    def max_abs_difference(self) -> float:
        return float(np.max(np.abs(self.p_full - self.p_reduced)))

    def sector_marginal(self, which: str = "full") -> np.ndarray:
        p = self.p_full if which == "full" else self.p_reduced
        k = (self.configs > 0).sum(axis=1)
        return np.bincount(k, weights=p, minlength=self.configs.shape[1] + 1)


def free_configurations(n_free: int) -> np.ndarray:
    """All 2^n_free spin vectors, row i encoding the bits of i (bit set = +1)."""
    idx = np.arange(2**n_free, dtype=np.int64)[:, None]
    bits = (idx >> np.arange(n_free, dtype=np.int64)) & 1
    return (2 * bits - 1).astype(np.int8)


def enumerate_conditional_measure(fm: FiniteModel, beta: float, h: float) -> ConditionalTable:
    validate_beta(beta)
    if fm.n_free > MAX_ENUMERATION:
        raise SizeError(f"n_free={fm.n_free} exceeds enumeration limit {MAX_ENUMERATION}")
    n = fm.n_total
    configs = free_configurations(fm.n_free)
    free_sum = configs.sum(axis=1, dtype=np.int64)

    # full system: pinned plus sites, then pinned minus sites, then free sites
    total = fm.n_plus - fm.n_minus + free_sum
    m = total / n
    energy_full = -n * (0.5 * m * m + h * m) - 0.5
    log_full = -beta * energy_full
    p_full = np.exp(log_full - logsumexp(log_full))

    x = free_sum / n
    energy_reduced = -n * (0.5 * x * x + (fm.s_n - fm.r_n + h) * x)
    log_reduced = -beta * energy_reduced
    p_reduced = np.exp(log_reduced - logsumexp(log_reduced))
    return ConditionalTable(configs, p_full, p_reduced)


@dataclass(frozen=True)
class ConvergenceRow:
    n_total: int
    s_n: float
    r_n: float
    mean_magnetization: float
    error: float


def convergence_study(
    s: float, r: float, beta: float, h: float, sizes, rounding: str = "half-up"
) -> tuple[float, list[ConvergenceRow]]:
    """Exact finite-N magnetization against its N -> infinity limit.

    Returns ``(m_inf, rows)``.
    """
    m_inf = specific_magnetization(ModelParams(beta, s, r, h))
    rows = []
    for n in sizes:
        fm = FiniteModel.from_fractions(int(n), s, r, rounding=rounding)
        res = exact_moments(fm, beta, h)
        rows.append(
            ConvergenceRow(fm.n_total, fm.s_n, fm.r_n, res.mean_magnetization, abs(res.mean_magnetization - m_inf))
        )
    return m_inf, rows


def errors_decay(errors, max_inversions: int = 1, inversion_tol: float = 1e-5) -> bool:
    """Nonincreasing sequence up to ``max_inversions`` increases each below ``inversion_tol``."""
    inversions = 0
    for prev, cur in zip(errors, errors[1:]):
        if cur > prev:
            if cur - prev >= inversion_tol:
                return False
            inversions += 1
    return inversions <= max_inversions
