"""Domain types, Hamiltonians and the free-energy functional.

The limiting model is parametrised by the inverse temperature ``beta``, the
pinned-plus fraction ``s``, the pinned-minus fraction ``r`` and the external
field ``h``.  The free sites (fraction ``t = 1 - s - r``) behave as a
Curie-Weiss system with coupling ``t`` and effective field ``h + s - r``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from condcw.errors import DomainError, ParameterError

# s + r must stay below 1 - T_MARGIN so that the free fraction is bounded away from 0.
T_MARGIN = 1e-12


def validate_fractions(s: float, r: float) -> None:
    if not (math.isfinite(s) and math.isfinite(r)):
        raise ParameterError(f"fractions must be finite, got s={s!r}, r={r!r}")
    if s < 0 or r < 0:
        raise ParameterError(f"fractions must be nonnegative, got s={s!r}, r={r!r}")
    if s + r >= 1 - T_MARGIN:
        raise ParameterError(f"need s + r < 1, got s + r = {s + r!r}")


def validate_beta(beta: float) -> None:
    if not (math.isfinite(beta) and beta > 0):
        raise ParameterError(f"beta must be finite and positive, got {beta!r}")


@dataclass(frozen=True)
class ModelParams:
    """Parameter point (beta, s, r, h) of the limiting conditional model."""

    beta: float
    s: float
    r: float
    h: float

    def __post_init__(self) -> None:
        validate_beta(self.beta)
        validate_fractions(self.s, self.r)
        if not math.isfinite(self.h):
            raise ParameterError(f"h must be finite, got {self.h!r}")

    @property
    def t(self) -> float:
        """Free fraction, the coupling felt by the free spins."""
        return 1.0 - self.s - self.r

    @property
    def h_eff(self) -> float:
        """Effective field on the free spins."""
        return self.h + self.s - self.r

    @property
    def beta_t(self) -> float:
        return self.beta * self.t

    @property
    def singular_field(self) -> float:
        """The field value r - s at which h_eff vanishes."""
        return self.r - self.s


@dataclass(frozen=True)
class SectorMagnetization:
    k: int
    m_n: float


@dataclass(frozen=True)
class FiniteModel:
    """Integer composition of N sites into pinned-plus, pinned-minus and free."""

    n_total: int
    n_plus: int
    n_minus: int
    n_free: int

    def __post_init__(self) -> None:
        for name in ("n_total", "n_plus", "n_minus", "n_free"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
                raise ParameterError(f"{name} must be an integer, got {value!r}")
        if self.n_total <= 0:
            raise ParameterError(f"n_total must be positive, got {self.n_total}")
        if min(self.n_plus, self.n_minus, self.n_free) < 0:
            raise ParameterError("site counts must be nonnegative")
        if self.n_plus + self.n_minus + self.n_free != self.n_total:
            raise ParameterError(
                f"counts {self.n_plus}+{self.n_minus}+{self.n_free} do not sum to {self.n_total}"
            )

    @classmethod
    def from_counts(cls, n_plus: int, n_minus: int, n_free: int) -> FiniteModel:
        return cls(n_plus + n_minus + n_free, n_plus, n_minus, n_free)

    @classmethod
    def from_fractions(cls, n_total: int, s: float, r: float, rounding: str = "half-up") -> FiniteModel:
        """Round N*s and N*r to integer counts.

        ``rounding`` is ``"half-up"`` (half away from zero, the default) or
        ``"floor"``.
        """
        validate_fractions(s, r)
        if rounding == "half-up":
            n_plus = math.floor(n_total * s + 0.5)
            n_minus = math.floor(n_total * r + 0.5)
        elif rounding == "floor":
            n_plus = math.floor(n_total * s)
            n_minus = math.floor(n_total * r)
        else:
            raise ParameterError(f"unknown rounding rule {rounding!r}")
        if n_plus + n_minus >= n_total:
            raise ParameterError(f"N={n_total} leaves no free sites for s={s}, r={r}")
        return cls(n_total, n_plus, n_minus, n_total - n_plus - n_minus)

    @property
    def s_n(self) -> float:
        return self.n_plus / self.n_total

    @property
    def r_n(self) -> float:
        return self.n_minus / self.n_total

    @property
    def t_n(self) -> float:
        return self.n_free / self.n_total

    def sector(self, k: int) -> SectorMagnetization:
        if not 0 <= k <= self.n_free:
            raise DomainError(f"sector k={k} outside [0, {self.n_free}]")
        return SectorMagnetization(k, (self.n_plus - self.n_minus + 2 * k - self.n_free) / self.n_total)

    def sector_magnetizations(self) -> np.ndarray:
        """Per-site magnetization of every sector k = 0..n_free."""
        k = np.arange(self.n_free + 1)
        return (self.n_plus - self.n_minus + 2 * k - self.n_free) / self.n_total


@dataclass(frozen=True)
class MinimizerSet:
    minimizers: tuple[float, ...]
    value: float
    curvature: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.minimizers)

    @property
    def unique(self) -> bool:
        return len(self.minimizers) == 1


def _check_closed(z: float) -> None:
    if not abs(z) <= 1.0:
        raise DomainError(f"z must lie in [-1, 1], got {z!r}")


def _check_open(z: float) -> None:
    if not abs(z) < 1.0:
        raise DomainError(f"z must lie in (-1, 1), got {z!r}")


def free_energy(p: ModelParams, z: float) -> float:
    """Rate function whose global minimizer fixes the free-spin magnetization.

    The entropy terms use the continuous extension 0 log 0 = 0 at z = +-1.
    """
    _check_closed(z)
    entropy = 0.5 * (xlogy(1.0 - z, 1.0 - z) + xlogy(1.0 + z, 1.0 + z))
    return float(-0.5 * p.beta * p.t * z * z - p.beta * p.h_eff * z + entropy)


def free_energy_deriv(p: ModelParams, z: float) -> float:
    _check_open(z)
    return -p.beta * p.t * z - p.beta * p.h_eff + math.atanh(z)


def free_energy_curvature(p: ModelParams, z: float) -> float:
    _check_open(z)
    return -p.beta * p.t + 1.0 / ((1.0 - z) * (1.0 + z))


def self_consistency_residual(p: ModelParams, z: float) -> float:
    """z - tanh(beta (t z + h_eff)); zero exactly at stationary points."""
    _check_closed(z)
    return z - math.tanh(p.beta * (p.t * z + p.h_eff))


def magnetization_from_z(p: ModelParams, z: float) -> float:
    _check_closed(z)
    return p.s - p.r + p.t * z


def hamiltonian_per_site(fm: FiniteModel, h: float, k: int) -> float:
    """H_N / N for any configuration whose free sites carry k plus spins."""
    m = fm.sector(k).m_n
    return -(0.5 * m * m + h * m) - 0.5 / fm.n_total
