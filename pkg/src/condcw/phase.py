"""Critical inverse temperatures and phase-regime classification."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from condcw.errors import DomainError
from condcw.model import validate_beta, validate_fractions
from condcw.solver import MagnetizationLimits, directional_limits, spontaneous_z

BETA_REL_TOL = 1e-12
DIAGONAL_TOL = 1e-15


class Region(str, Enum):
    DIAGONAL = "Diagonal"
    DOMINANT = "Dominant"
    OFF_DIAGONAL_SMALL = "OffDiagonalSmall"


class Regime(str, Enum):
    NO_JUMP = "NoJump"
    SYMMETRIC_FLIP = "SymmetricFlip"
    JUMP_NO_PHASE_CHANGE = "JumpNoPhaseChange"
    ORDER_DISORDER = "OrderDisorder"
    ASYMMETRIC_FLIP = "AsymmetricFlip"


@dataclass(frozen=True)
class TransitionReport:
    s: float
    r: float
    beta: float
    region: Region
    beta_star: float
    beta_double_star: float | None
    regime: Regime
    limits: MagnetizationLimits
    # relative distances (beta - beta_c) / beta_c, for callers with their own thresholds
    beta_star_distance: float
    beta_double_star_distance: float | None


def beta_star(s: float, r: float) -> float:
    validate_fractions(s, r)
    return 1.0 / (1.0 - s - r)


def beta_double_star(s: float, r: float) -> float:
    """Coupling at which one directional limit of the magnetization is zero.

    Defined only for s, r < 1/2 with s != r; symmetric in (s, r).
    """
    validate_fractions(s, r)
    if s >= 0.5 or r >= 0.5:
        raise DomainError(f"beta** needs s, r < 1/2, got s={s}, r={r}")
    d = r - s
    if abs(d) <= DIAGONAL_TOL:
        raise DomainError("beta** is undefined on the diagonal s = r")
    return math.atanh(d / (1.0 - s - r)) / d


def classify_region(s: float, r: float) -> Region:
    validate_fractions(s, r)
    if abs(s - r) <= DIAGONAL_TOL and s < 0.5:
        return Region.DIAGONAL
    if s >= 0.5 or r >= 0.5:
        return Region.DOMINANT
    return Region.OFF_DIAGONAL_SMALL


def jump_magnitude(s: float, r: float, beta: float) -> float:
    validate_fractions(s, r)
    validate_beta(beta)
    t = 1.0 - s - r
    return 2.0 * t * spontaneous_z(beta * t)


def classify_transition(s: float, r: float, beta: float) -> TransitionReport:
    validate_beta(beta)
    region = classify_region(s, r)
    b1 = beta_star(s, r)
    b2 = beta_double_star(s, r) if region is Region.OFF_DIAGONAL_SMALL else None
    d1 = (beta - b1) / b1
    d2 = (beta - b2) / b2 if b2 is not None else None

    if d1 <= BETA_REL_TOL:
        regime = Regime.NO_JUMP
    elif region is Region.DIAGONAL:
        regime = Regime.SYMMETRIC_FLIP
    elif region is Region.DOMINANT:
        regime = Regime.JUMP_NO_PHASE_CHANGE
    elif abs(d2) <= BETA_REL_TOL:
        regime = Regime.ORDER_DISORDER
    elif d2 < 0:
        regime = Regime.JUMP_NO_PHASE_CHANGE
    else:
        regime = Regime.ASYMMETRIC_FLIP

    return TransitionReport(
        s=s,
        r=r,
        beta=beta,
        region=region,
        beta_star=b1,
        beta_double_star=b2,
        regime=regime,
        limits=directional_limits(beta, s, r),
        beta_star_distance=d1,
        beta_double_star_distance=d2,
    )


def sign_pattern_holds(regime: Regime, limits: MagnetizationLimits, s: float, r: float, atol: float = 1e-6) -> bool:
    """Whether the limits show the sign pattern that ``regime`` claims.

    ``atol`` is the magnitude below which a limit counts as zero.
    """
    lo, hi = limits.m_minus, limits.m_plus
    bias = s - r

    def sign(x: float) -> int:
        return 0 if abs(x) <= atol else (1 if x > 0 else -1)

    if regime is Regime.NO_JUMP:
        return abs(hi - lo) <= atol and abs(lo - bias) <= atol
    if not hi - lo > atol:
        return False
    if regime is Regime.SYMMETRIC_FLIP:
        return sign(lo) == -1 and sign(hi) == 1 and abs(hi + lo) <= atol
    if regime is Regime.JUMP_NO_PHASE_CHANGE:
        return sign(bias) != 0 and sign(lo) == sign(hi) == sign(bias)
    if regime is Regime.ORDER_DISORDER:
        if bias > 0:
            return sign(lo) == 0 and sign(hi) == 1
        return sign(hi) == 0 and sign(lo) == -1
    if regime is Regime.ASYMMETRIC_FLIP:
        return sign(lo) == -1 and sign(hi) == 1 and abs(hi + lo) > atol
    return False
