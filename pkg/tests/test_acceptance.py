"""Exit criteria, one test per criterion, each with its runtime budget.

A summary line per criterion is printed in the pytest terminal summary.
"""

import math
import time

import numpy as np
import pytest

from condcw import (
    ChainConfig,
    FiniteModel,
    ModelParams,
    Regime,
    beta_double_star,
    beta_star,
    classify_transition,
    convergence_study,
    directional_limits,
    enumerate_conditional_measure,
    exact_moments,
    free_energy,
    free_energy_deriv,
    jump_magnitude,
    run_chain,
    specific_magnetization,
    transition_matrix_check,
)
from condcw.cli import main
from condcw.exactn import errors_decay
from condcw.phase import sign_pattern_holds
from condcw.solver import MagnetizationLimits
from conftest import record_criterion, tanh_root
from figures import FIGURES, GOLDEN_DIR, sweep_args


def sample_triangle(rng, count):
    out = []
    while len(out) < count:
        s, r = rng.uniform(0, 1, 2)
        if s + r < 1 - 1e-9:
            out.append((float(s), float(r)))
    return out


def test_criterion_1_curie_weiss_recovery():
    start = time.perf_counter()
    subcritical = [specific_magnetization(ModelParams(b, 0.0, 0.0, 0.0)) for b in (0.5, 0.9, 1.0)]
    lim = directional_limits(2.0, 0.0, 0.0)
    z0 = tanh_root(2.0)
    elapsed = time.perf_counter() - start
    ok = (
        all(abs(m) < 1e-10 for m in subcritical)
        and abs(lim.m_plus - 0.957504) <= 1e-6
        and abs(lim.m_minus + 0.957504) <= 1e-6
        and abs(lim.m_plus - z0) <= 1e-6
    )
    record_criterion(1, "s=r=0 recovers Curie-Weiss", ok, elapsed, 1, f"m+={lim.m_plus:.9f}")
    assert ok and elapsed < 1


def test_criterion_2_beta_star_detection():
    rng = np.random.default_rng(2)
    start = time.perf_counter()
    failures = []
    for s, r in sample_triangle(rng, 10):
        b = beta_star(s, r)
        if b != pytest.approx(1 / (1 - s - r), rel=1e-15):
            failures.append((s, r, "beta*"))
        if jump_magnitude(s, r, 0.999999 * b) != 0.0 or not jump_magnitude(s, r, 1.01 * b) > 1e-3:
            failures.append((s, r))
    elapsed = time.perf_counter() - start
    record_criterion(2, "jump switches on at beta*", not failures, elapsed, 5, str(failures or ""))
    assert not failures and elapsed < 5


def test_criterion_3_beta_double_star_crossing():
    s, r = 0.2, 0.1
    start = time.perf_counter()
    lo, hi = beta_star(s, r) * (1 + 1e-9), 3.0
    assert directional_limits(lo, s, r).m_minus > 0 > directional_limits(hi, s, r).m_minus
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if directional_limits(mid, s, r).m_minus > 0:
            lo = mid
        else:
            hi = mid
    crossing = 0.5 * (lo + hi)
    z0 = directional_limits(beta_double_star(s, r), s, r).z_plus
    elapsed = time.perf_counter() - start
    ok = abs(crossing - 5 * math.log(4 / 3)) <= 1e-6 and abs(z0 - 1 / 7) <= 1e-7
    record_criterion(3, "m- crosses zero at beta** = 5 ln(4/3)", ok, elapsed, 5, f"beta={crossing:.10f}")
    assert ok and elapsed < 5


REGIME_MATRIX = [
    # Diagonal (s = r < 1/2)
    (0.0, 0.0, 0.5, Regime.NO_JUMP),
    (0.3, 0.3, 1.5, Regime.NO_JUMP),
    (0.3, 0.3, 4.0, Regime.SYMMETRIC_FLIP),
    (0.1, 0.1, 2.0, Regime.SYMMETRIC_FLIP),
    # Dominant (s or r >= 1/2), including the s = 1/2 boundary
    (0.6, 0.2, 6.0, Regime.JUMP_NO_PHASE_CHANGE),
    (0.5, 0.2, 5.0, Regime.JUMP_NO_PHASE_CHANGE),
    (0.2, 0.6, 8.0, Regime.JUMP_NO_PHASE_CHANGE),
    (0.6, 0.2, 2.0, Regime.NO_JUMP),
    # small unequal groups, including beta = beta** on both sides of the diagonal
    (0.2, 0.1, 1.433, Regime.JUMP_NO_PHASE_CHANGE),
    (0.2, 0.1, "beta**", Regime.ORDER_DISORDER),
    (0.2, 0.1, 2.0, Regime.ASYMMETRIC_FLIP),
    (0.1, 0.3, "beta**", Regime.ORDER_DISORDER),
]


def test_criterion_4_corollary_regimes():
    start = time.perf_counter()
    failures = []
    for s, r, beta, expected in REGIME_MATRIX:
        if beta == "beta**":
            beta = beta_double_star(s, r)
        rep = classify_transition(s, r, beta)
        t = 1 - s - r
        z0 = tanh_root(beta * t)
        oracle = MagnetizationLimits(s - r - t * z0, s - r + t * z0, -z0, z0)
        if rep.regime is not expected or not sign_pattern_holds(expected, oracle, s, r, atol=1e-9):
            failures.append((s, r, beta, rep.regime.value))
        if abs(rep.limits.m_minus - oracle.m_minus) > 1e-9 or abs(rep.limits.m_plus - oracle.m_plus) > 1e-9:
            failures.append((s, r, beta, "limits"))
    elapsed = time.perf_counter() - start
    record_criterion(4, "regime matrix, 12 designed points", not failures, elapsed, 5, str(failures or ""))
    assert not failures and elapsed < 5


def test_criterion_5_reduction_equivalence():
    rng = np.random.default_rng(5)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(20):
        n_free = int(rng.integers(1, 9))
        pinned = int(rng.integers(0, 11 - n_free))
        n_plus = int(rng.integers(0, pinned + 1))
        fm = FiniteModel.from_counts(n_plus, pinned - n_plus, n_free)
        beta = float(rng.uniform(1e-6, 3.0))
        h = float(rng.uniform(-1.0, 1.0))
        worst = max(worst, enumerate_conditional_measure(fm, beta, h).max_abs_difference)
    elapsed = time.perf_counter() - start
    ok = worst < 1e-12
    record_criterion(5, "conditioned and reduced measures agree", ok, elapsed, 10, f"max diff={worst:.2e}")
    assert ok and elapsed < 10


def test_criterion_6_finite_n_convergence():
    start = time.perf_counter()
    _, rows = convergence_study(0.3, 0.2, 2.0, 0.05, [500 * 2**i for i in range(8)])
    errors = [row.error for row in rows]
    elapsed = time.perf_counter() - start
    ok = rows[-1].n_total == 64000 and errors[-1] < 1e-3 and errors_decay(errors)
    record_criterion(6, "exact <m_N> converges to the limit", ok, elapsed, 30, f"err(64000)={errors[-1]:.2e}")
    assert ok and elapsed < 30


def test_criterion_7_monte_carlo():
    start = time.perf_counter()
    fm = FiniteModel.from_fractions(2000, 0.3, 0.2)
    est = run_chain(ChainConfig(fm, 2.0, 0.05, seed=2024, sweeps=10_000, burn_in_sweeps=1_000))
    exact = exact_moments(fm, 2.0, 0.05).mean_magnetization
    violations = [
        transition_matrix_check(FiniteModel.from_counts(*counts), beta, h, dynamics)
        for counts, beta, h in [((2, 2, 4), 1.7, -0.3), ((3, 1, 12), 2.2, 0.1), ((0, 0, 10), 0.8, 0.0)]
        for dynamics in ("metropolis", "glauber")
    ]
    elapsed = time.perf_counter() - start
    ok = abs(est.mean_magnetization - exact) <= 3 * est.std_error and max(violations) < 1e-13
    detail = f"|mc-exact|={abs(est.mean_magnetization - exact):.2e}, 3se={3 * est.std_error:.2e}, db={max(violations):.1e}"
    record_criterion(7, "MC agrees with exact N=2000, detailed balance", ok, elapsed, 60, detail)
    assert ok and elapsed < 60


def _curve(path):
    lines = path.read_text().splitlines()[2:]
    rows = [line.split(",") for line in lines]
    return [(float(h), float(m), branch) for h, m, _, branch in rows]


def test_criterion_8_figure_reproduction(tmp_path):
    start = time.perf_counter()
    golden_ok = True
    for name in FIGURES:
        out = tmp_path / f"{name}.csv"
        golden_ok &= main(sweep_args(name, out)) == 0
        golden_ok &= out.read_bytes() == (GOLDEN_DIR / f"{name}.csv").read_bytes()

    fig2 = _curve(tmp_path / "fig2_diagonal.csv")
    antisymmetric = all(abs(a[1] + b[1]) < 1e-9 for a, b in zip(fig2, reversed(fig2)))
    fig2_jump = [m for h, m, br in fig2 if br != "regular"]
    antisymmetric &= fig2_jump[0] < 0 < fig2_jump[1]

    fig3 = _curve(tmp_path / "fig3_dominant.csv")
    fig3_jump = [m for h, m, br in fig3 if br != "regular"]
    same_sign = all(m > 0 for _, m, _ in fig3) and fig3_jump[1] - fig3_jump[0] > 1e-3
    same_sign &= all(h == pytest.approx(-0.4) for h, _, br in fig3 if br != "regular")

    fig4 = _curve(tmp_path / "fig4c_asymmetric.csv")
    lo, hi = [m for h, m, br in fig4 if br != "regular"]
    left = [m for h, m, br in fig4 if h < -0.1 - 1e-9]
    right = [m for h, m, br in fig4 if h > -0.1 + 1e-9]
    sign_change = lo < 0 < hi and abs(hi + lo) > 1e-3 and max(left) < 0 < min(right)

    elapsed = time.perf_counter() - start
    ok = golden_ok and antisymmetric and same_sign and sign_change
    detail = f"golden={golden_ok}, antisym={antisymmetric}, same-sign={same_sign}, flip={sign_change}"
    record_criterion(8, "figure sweeps match golden files", ok, elapsed, 10, detail)
    assert ok and elapsed < 10


def test_criterion_9_derivative():
    rng = np.random.default_rng(9)
    start = time.perf_counter()
    worst = 0.0
    step = 1e-6
    for s, r in sample_triangle(rng, 1000):
        p = ModelParams(float(rng.uniform(0.05, 5.0)), s, r, float(rng.uniform(-2, 2)))
        z = float(rng.uniform(-0.99, 0.99))
        fd = (free_energy(p, z + step) - free_energy(p, z - step)) / (2 * step)
        worst = max(worst, abs(free_energy_deriv(p, z) - fd))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-7
    record_criterion(9, "analytic derivative vs finite differences", ok, elapsed, 1, f"max dev={worst:.2e}")
    assert ok and elapsed < 1
