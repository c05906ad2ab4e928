"""Free-energy minimization, self-consistency roots and magnetization limits."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from condcw.errors import AmbiguityError, ConvergenceError, DomainError
from condcw.model import (
    MinimizerSet,
    ModelParams,
    free_energy,
    free_energy_curvature,
    magnetization_from_z,
    self_consistency_residual,
)

GRID_POINTS = 2001
RESIDUAL_TOL = 1e-12
# minimizers are refined past RESIDUAL_TOL so that near-edge wells also pin the minimal value
_REFINE_TOL = 1e-15
TIE_TOL = 1e-10
# largest double below 1; minimizers are kept strictly inside (-1, 1)
_Z_EDGE = math.nextafter(1.0, 0.0)


@dataclass(frozen=True)
class MagnetizationLimits:
    """One-sided limits of m(beta, s, r, h) as h approaches r - s."""

    m_minus: float
    m_plus: float
    z_minus: float
    z_plus: float

    @property
    def jump(self) -> float:
        return self.m_plus - self.m_minus


def _deriv_array(p: ModelParams, z: np.ndarray) -> np.ndarray:
    return -p.beta * p.t * z - p.beta * p.h_eff + np.arctanh(z)


def _refine_minimum(p: ModelParams, lo: float, hi: float) -> float:
    """Root of the derivative in [lo, hi], where it goes from negative to nonnegative.

    Newton steps on the derivative, falling back to bisection whenever a step
    leaves the bracket.  Stops on the self-consistency residual, which stays
    well conditioned near z = +-1 where the derivative itself does not.
    """
    a, b = lo, hi
    z = 0.5 * (a + b)
    for _ in range(200):
        if abs(self_consistency_residual(p, z)) < _REFINE_TOL:
            return z
        g = -p.beta * p.t * z - p.beta * p.h_eff + math.atanh(z)
        if g < 0:
            a = z
        else:
            b = z
        if g == 0:
            return z
        curv = free_energy_curvature(p, z)
        step = z - g / curv if curv > 0 else math.nan
        if a < step < b:
            z = step
        else:
            mid = 0.5 * (a + b)
            if mid in (a, b):
                return z
            z = mid
    return z


def minimize_free_energy(p: ModelParams, grid_points: int = GRID_POINTS) -> MinimizerSet:
    """All global minimizers of the free energy on [-1, 1].

    Sign changes (negative to nonnegative) of the derivative on a uniform grid
    bracket every local minimum; the derivative tends to -inf at -1 and +inf
    at +1, so the grid is padded with the two edge values.  Candidates whose
    values lie within TIE_TOL of the best are all reported.
    """
    if grid_points < 3:
        raise ValueError("grid_points must be at least 3")
    z = np.linspace(-1.0, 1.0, grid_points)
    z[0], z[-1] = -_Z_EDGE, _Z_EDGE
    d = _deriv_array(p, z[1:-1])
    d = np.concatenate(([-np.inf], d, [np.inf]))
    brackets = np.flatnonzero((d[:-1] < 0) & (d[1:] >= 0))

    candidates: list[float] = []
    for i in brackets:
        # a grid node with zero derivative is already exact (flat quartic wells converge slowly)
        root = float(z[i + 1]) if d[i + 1] == 0 else _refine_minimum(p, float(z[i]), float(z[i + 1]))
        if not candidates or abs(root - candidates[-1]) > 1e-9:
            candidates.append(root)

    values = [free_energy(p, c) for c in candidates]
    best = min(values)
    chosen = [c for c, v in zip(candidates, values) if v - best < TIE_TOL]
    return MinimizerSet(
        minimizers=tuple(chosen),
        value=best,
        curvature=tuple(free_energy_curvature(p, c) for c in chosen),
    )


def solve_self_consistency(
    p: ModelParams, z_init: float, max_iter: int = 10_000, tol: float = RESIDUAL_TOL
) -> float:
    """Root of z = tanh(beta (t z + h_eff)) reached from ``z_init``.

    Damped fixed-point steps, with the damping halved until the residual
    decreases (falling back to the undamped step when no damping helps),
    then safeguarded Newton once the residual is small.
    """
    if not abs(z_init) <= 1.0:
        raise DomainError(f"z_init must lie in [-1, 1], got {z_init!r}")
    bt = p.beta * p.t
    field = p.beta * p.h_eff

    def residual(z: float) -> float:
        return z - math.tanh(bt * z + field)

    z = float(z_init)
    g = residual(z)
    for _ in range(max_iter):
        if abs(g) < tol:
            return z
        if abs(g) < 1e-3:
            slope = 1.0 - bt / math.cosh(bt * z + field) ** 2
            if slope != 0.0:
                trial = z - g / slope
                if abs(trial) <= 1.0:
                    g_trial = residual(trial)
                    if abs(g_trial) < abs(g):
                        z, g = trial, g_trial
                        continue
        target = math.tanh(bt * z + field)
        lam = 1.0
        while lam > 1e-6:
            trial = (1.0 - lam) * z + lam * target
            g_trial = residual(trial)
            if abs(g_trial) < abs(g):
                break
            lam *= 0.5
        else:
            # leaving an unstable root raises the residual for every damping;
            # the plain step still converges because tanh is monotone and bounded
            trial = target
            g_trial = residual(trial)
        z, g = trial, g_trial
    if abs(g) < tol:
        return z
    raise ConvergenceError(f"no convergence within {max_iter} iterations", z, g)


def specific_magnetization(p: ModelParams) -> float:
    """Limiting magnetization s - r + t z at the unique global minimizer."""
    ms = minimize_free_energy(p)
    if not ms.unique:
        raise AmbiguityError(
            f"two global minimizers {ms.minimizers} at beta={p.beta}, h={p.h}; "
            "use directional_limits at h = r - s"
        )
    return magnetization_from_z(p, ms.minimizers[0])


def spontaneous_z(beta_t: float) -> float:
    """Nonnegative root of z = tanh(beta_t z); zero for beta_t <= 1."""
    if not beta_t > 0:
        raise DomainError(f"beta_t must be positive, got {beta_t!r}")
    if beta_t <= 1.0:
        return 0.0
    lo, hi = 1e-16, _Z_EDGE
    if lo - math.tanh(beta_t * lo) >= 0:
        return lo
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        if mid - math.tanh(beta_t * mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def directional_limits(beta: float, s: float, r: float) -> MagnetizationLimits:
    """Limits of the magnetization as h -> (r - s) from below and above.

    At h = r - s the free energy is even, and the limits from above/below pick
    the right/left well, +-z0 with z0 the spontaneous solution.
    """
    p = ModelParams(beta, s, r, r - s)
    z0 = spontaneous_z(beta * p.t)
    return MagnetizationLimits(
        m_minus=magnetization_from_z(p, -z0),
        m_plus=magnetization_from_z(p, z0),
        z_minus=-z0,
        z_plus=z0,
    )


def limit_cross_check(beta: float, s: float, r: float, exponents=range(3, 9)) -> list[tuple[int, float, float]]:
    """Deviation of m(r - s -+ 10^-k) from the reported limits.

    Returns ``(k, |m(h-) - m_minus|, |m(h+) - m_plus|)`` per exponent; the
    deviations should shrink as k grows.
    """
    lim = directional_limits(beta, s, r)
    rows = []
    for k in exponents:
        delta = 10.0 ** (-k)
        below = specific_magnetization(ModelParams(beta, s, r, r - s - delta))
        above = specific_magnetization(ModelParams(beta, s, r, r - s + delta))
        rows.append((k, abs(below - lim.m_minus), abs(above - lim.m_plus)))
    return rows
