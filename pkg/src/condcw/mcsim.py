"""Single-spin-flip Monte Carlo for the conditional model.

The energy depends on a configuration only through k, the number of plus
spins among the free sites, so the chain is run on k directly: picking a
uniformly random free site hits a plus spin with probability k / n_free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np
import scipy.sparse as sp
from scipy.special import expit

from condcw.errors import ParameterError, SizeError
from condcw.exactn import enumerate_conditional_measure, free_configurations
from condcw.model import FiniteModel, validate_beta

RNG_ALGORITHM = "numpy.random.PCG64"
N_BATCHES = 20
DYNAMICS = ("metropolis", "glauber")
STARTS = ("field", "plus", "minus")
_CHUNK = 1 << 20


@dataclass(frozen=True)
class ChainConfig:
    fm: FiniteModel
    beta: float
    h: float
    seed: int
    sweeps: int
    burn_in_sweeps: int = 0
    dynamics: str = "metropolis"
    start: str = "field"

    def __post_init__(self) -> None:
        validate_beta(self.beta)
        if not math.isfinite(self.h):
            raise ParameterError(f"h must be finite, got {self.h!r}")
        if self.sweeps < N_BATCHES:
            raise ParameterError(f"need at least {N_BATCHES} sweeps for batch means, got {self.sweeps}")
        if self.burn_in_sweeps < 0:
            raise ParameterError("burn_in_sweeps must be nonnegative")
        if self.dynamics not in DYNAMICS:
            raise ParameterError(f"dynamics must be one of {DYNAMICS}, got {self.dynamics!r}")
        if self.start not in STARTS:
            raise ParameterError(f"start must be one of {STARTS}, got {self.start!r}")
        if not 0 <= self.seed < 2**64:
            raise ParameterError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class McEstimate:
    mean_magnetization: float
    std_error: float
    acceptance_rate: float
    final_sector: int
    # visits to each sector k, counted after every post-burn-in proposal
    sector_counts: np.ndarray = field(repr=False, compare=False)
    rng_algorithm: str = RNG_ALGORITHM


def flip_acceptance(fm: FiniteModel, beta: float, h: float, dynamics: str) -> tuple[np.ndarray, np.ndarray]:
    """Acceptance probabilities of the moves k -> k-1 and k -> k+1, per sector.

    Flipping one free spin changes m by -+2/N, so from H_N = -N(m^2/2 + h m)
    the energy change is dH = -+2 ((m + m') / 2 + h).
    """
    m = fm.sector_magnetizations()
    step = 2.0 / fm.n_total
    dh_down = 2.0 * ((m - 0.5 * step) + h)
    dh_up = -2.0 * ((m + 0.5 * step) + h)
    if dynamics == "metropolis":
        down = np.exp(np.minimum(0.0, -beta * dh_down))
        up = np.exp(np.minimum(0.0, -beta * dh_up))
    elif dynamics == "glauber":
        down = expit(-beta * dh_down)
        up = expit(-beta * dh_up)
    else:
        raise ParameterError(f"unknown dynamics {dynamics!r}")
    down[0] = 0.0
    up[-1] = 0.0
    return down, up


@numba.njit(cache=True)
def _advance(k, n_free, uniforms, down, up, counts, series, record):
    """Apply the proposals in ``uniforms``; log k after each sweep into ``series``."""
    accepted = 0
    for i in range(uniforms.shape[0]):
        if uniforms[i, 0] * n_free < k:
            if uniforms[i, 1] < down[k]:
                k -= 1
                accepted += 1
        else:
            if uniforms[i, 1] < up[k]:
                k += 1
                accepted += 1
        if record:
            counts[k] += 1
            if (i + 1) % n_free == 0:
                series[(i + 1) // n_free - 1] = k
    return k, accepted


def _initial_sector(cfg: ChainConfig) -> int:
    fm = cfg.fm
    if cfg.start == "plus":
        return fm.n_free
    if cfg.start == "minus":
        return 0
    h_eff = cfg.h + fm.s_n - fm.r_n
    if h_eff > 0:
        return fm.n_free
    if h_eff < 0:
        return 0
    return (fm.n_free + 1) // 2  # alternating +-+-...


def run_chain(cfg: ChainConfig) -> McEstimate:
    fm = cfg.fm
    n = fm.n_free
    if n == 0:
        return McEstimate(fm.s_n - fm.r_n, 0.0, 0.0, 0, np.array([cfg.sweeps], dtype=np.int64))

    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    down, up = flip_acceptance(fm, cfg.beta, cfg.h, cfg.dynamics)
    counts = np.zeros(n + 1, dtype=np.int64)
    k = _initial_sector(cfg)

    remaining = cfg.burn_in_sweeps * n
    scratch = np.empty(0)
    while remaining:
        size = min(remaining, _CHUNK)
        k, _ = _advance(k, n, rng.random((size, 2)), down, up, counts, scratch, False)
        remaining -= size

    per_chunk = max(1, _CHUNK // n)
    series = np.empty(cfg.sweeps)
    accepted = 0
    for start in range(0, cfg.sweeps, per_chunk):
        todo = min(per_chunk, cfg.sweeps - start)
        k, acc = _advance(k, n, rng.random((todo * n, 2)), down, up, counts, series[start : start + todo], True)
        accepted += acc

    m = (fm.n_plus - fm.n_minus + 2 * series - n) / fm.n_total
    usable = (cfg.sweeps // N_BATCHES) * N_BATCHES
    batch_means = m[:usable].reshape(N_BATCHES, -1).mean(axis=1)
    return McEstimate(
        mean_magnetization=float(m.mean()),
        std_error=float(batch_means.std(ddof=1) / math.sqrt(N_BATCHES)),
        acceptance_rate=accepted / (cfg.sweeps * n),
        final_sector=int(k),
        sector_counts=counts,
    )


def transition_matrix(fm: FiniteModel, beta: float, h: float, dynamics: str = "metropolis") -> sp.csr_matrix:
    """Explicit single-flip transition matrix over all 2^n_free free-spin states."""
    n = fm.n_free
    configs = free_configurations(n)
    k = (configs > 0).sum(axis=1)
    down, up = flip_acceptance(fm, beta, h, dynamics)
    n_states = len(configs)
    states = np.arange(n_states)
    rows, cols, vals = [], [], []
    stay = np.ones(n_states)
    for site in range(n):
        target = states ^ (1 << site)
        is_plus = configs[:, site] > 0
        prob = np.where(is_plus, down[k], up[k]) / n
        rows.append(states)
        cols.append(target)
        vals.append(prob)
        stay -= prob
    rows.append(states)
    cols.append(states)
    vals.append(stay)
    return sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n_states, n_states)
    )


def transition_matrix_check(fm: FiniteModel, beta: float, h: float, dynamics: str = "metropolis") -> float:
    """Largest detailed-balance violation |pi(x)P(x,y) - pi(y)P(y,x)|."""
    if fm.n_free > 12:
        raise SizeError(f"n_free={fm.n_free} exceeds the limit of 12 for the explicit matrix")
    validate_beta(beta)
    pi = enumerate_conditional_measure(fm, beta, h).p_full
    flow = sp.diags(pi) @ transition_matrix(fm, beta, h, dynamics)
    diff = (flow - flow.T).tocoo()
    return float(np.max(np.abs(diff.data))) if diff.nnz else 0.0
