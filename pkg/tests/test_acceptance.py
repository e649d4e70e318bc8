"""Acceptance gate: the eight quantitative criteria, one line each.

Every test prints a single ACCEPTANCE line (visible in the -rA summary)
and fails hard if its criterion is not met at the stated tolerance and
budget.
"""

import math
import time

import numpy as np
from scipy.special import gammaln

from conftest import brute_maximal, random_step_fn
from morreymax import (
    MorreyParams,
    PiecewisePowerFn,
    PowerPiece,
    RadialProfile,
    TestFamily,
    check_corollary1,
    check_weak_type,
    decreasing_rearrangement,
    line_steps,
    log_functional,
    make_indicator_train,
    make_step_profile,
    maximal_1d,
    reduced_functional,
    run_counterexample,
    total_moment,
    unit_ball_volume,
)


def report(n, ok, detail):
    print(f"ACCEPTANCE {n}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {n} failed: {detail}"


def test_acceptance_1_sharp_constants():
    """rho^{-lam}: reduced = 1/(n-lam), log = 1/(n-lam)^2, ratio 1/(n-lam)."""
    t0 = time.perf_counter()
    worst = 0.0
    for n, lam in [(1, 0.25), (1, 0.5), (2, 1.0), (3, 2.0)]:
        prof = RadialProfile(PiecewisePowerFn((0.0,), (PowerPiece(1.0, lam),)), n)
        params = MorreyParams(lam=lam, dimension=n)
        red = reduced_functional(prof, params).value
        lg = log_functional(prof, params).value
        c = 1.0 / (n - lam)
        worst = max(
            worst,
            abs(red - c) / c,
            abs(lg - c * c) / (c * c),
            abs(lg / red - c) / c,
        )
    dt = time.perf_counter() - t0
    report(
        1,
        worst <= 1e-10 and dt < 1.0,
        f"sharp constants at 4 (n,lambda) pairs, max rel err {worst:.3e}, {dt:.2f}s",
    )


def test_acceptance_2_inequality_family():
    """log <= reduced/(n-lam) + 1e-10 on 500 profiles x 3 lambdas."""
    t0 = time.perf_counter()
    profiles = TestFamily(seed=424242, count=500, kind="steps").profiles()
    violations = 0
    worst_margin = -math.inf
    for lam in (0.1, 0.5, 0.9):
        params = MorreyParams(lam=lam)
        for f in profiles:
            prof = RadialProfile(f, 1)
            lg = log_functional(prof, params).value
            bound = reduced_functional(prof, params).value / (1.0 - lam)
            worst_margin = max(worst_margin, lg - bound)
            if lg > bound + 1e-10:
                violations += 1
    dt = time.perf_counter() - t0
    report(
        2,
        violations == 0 and dt < 30.0,
        f"1500 inequality checks, {violations} violations, "
        f"worst margin {worst_margin:.3e}, {dt:.1f}s",
    )


def test_acceptance_3_fubini_paths():
    """reduced(H phi) = log(phi) to 1e-8 via independent code paths."""
    t0 = time.perf_counter()
    rep = check_corollary1(TestFamily(seed=31415, count=100, lambdas=(0.5,)))
    gaps = [row["rel_gap"] for row in rep.rows]
    dt = time.perf_counter() - t0
    report(
        3,
        rep.passed and len(gaps) >= 100 and max(gaps) <= 1e-8 and dt < 30.0,
        f"{len(gaps)} profiles, max rel gap {max(gaps):.3e}, {dt:.1f}s",
    )


def test_acceptance_4_counterexample_growth():
    """Norms bounded by 1.4143 while the minorant grows like ln K."""
    t0 = time.perf_counter()
    rep = run_counterexample((1, 10, 100, 1000), 0.5)
    rows = {row["K"]: row for row in rep.rows}
    uppers_ok = all(rows[k]["upper"] <= 1.4143 for k in (1, 10, 100, 1000))
    window_ok = all(0.5 <= rows[k]["minorant_over_logK"] <= 1.5 for k in (100, 1000))
    ks = np.arange(10, 1001)
    monotone_ok = bool(np.all(np.diff(gammaln(ks) / ks) > 0.0))
    dt = time.perf_counter() - t0
    report(
        4,
        rep.passed and uppers_ok and window_ok and monotone_ok and dt < 60.0,
        f"upper max {max(rows[k]['upper'] for k in rows):.10f}, "
        f"minorant/lnK at K=1000: {rows[1000]['minorant_over_logK']:.4f}, "
        f"monotone from K=10: {monotone_ok}, {dt:.1f}s",
    )


def test_acceptance_5_weak_type_grid():
    """One constant bounds the (t, x0, r) sweep for block and trains."""
    t0 = time.perf_counter()
    rep = check_weak_type()  # block plus trains K in {10, 100}
    maxima = [row["max_ratio"] for row in rep.rows]
    spread = max(maxima) / min(maxima)
    drift = max(row["drift"] for row in rep.rows)
    dt = time.perf_counter() - t0
    report(
        5,
        rep.passed and len(maxima) == 3 and spread <= 4.0 and drift <= 1e-3 and dt < 300.0,
        f"per-instance maxima {[f'{m:.6f}' for m in maxima]}, spread {spread:.4f}, "
        f"refinement drift {drift:.2e}, {dt:.1f}s",
    )


def test_acceptance_6_maximal_brute_oracle():
    """maximal_1d vs a dense-grid oracle at resolution 1e-4."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(606060)
    worst = 0.0
    for _ in range(50):
        f = random_step_fn(rng, lo=0.0, hi=0.3, max_blocks=12)
        xs = rng.uniform(-0.05, 0.35, 20)
        for x in xs:
            exact = maximal_1d(f, float(x)).value
            ref = brute_maximal(f, float(x), h=1e-4)
            worst = max(worst, abs(exact - ref) / ref)
    dt = time.perf_counter() - t0
    report(
        6,
        worst <= 1e-6 and dt < 120.0,
        f"50 functions x 20 points, max rel diff {worst:.3e}, {dt:.1f}s",
    )


def test_acceptance_7_rearrangement():
    """Equimeasurability/integral exact; radial fixed-point identity."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(707070)
    worst_measure = 0.0
    worst_integral = 0.0
    for _ in range(100):
        f = random_step_fn(rng, hi=6.0, max_blocks=9)
        star = decreasing_rearrangement(f)
        T, V = line_steps(f)
        Ts, Vs = line_steps(star.fn)
        gaps, gaps_s = np.diff(T), np.diff(Ts)
        for mu in np.unique(V):
            d_f = float(np.sum(gaps[V > mu]))
            d_s = float(np.sum(gaps_s[Vs > mu]))
            worst_measure = max(worst_measure, abs(d_f - d_s))
        a, b = total_moment(f, 1), total_moment(star.fn, 1)
        worst_integral = max(worst_integral, abs(a - b) / a)

    worst_fixed = 0.0
    for i in range(20):
        n = 1 + i % 3
        bp = np.concatenate(([0.0], np.sort(rng.uniform(0.1, 5.0, 6))))
        vals = np.sort(rng.uniform(0.2, 3.0, 6))[::-1]
        phi = make_step_profile(bp, vals)
        star = decreasing_rearrangement(phi, dimension=n, radial=True)
        w = unit_ball_volume(n)
        rs = np.concatenate(
            [np.linspace(a, b, 6)[1:-1] for a, b in zip(bp[:-1], bp[1:])]
        )[:20]
        for r in rs:
            t = w * float(r) ** n
            got = star.fn(t)
            want = phi(float(r))
            worst_fixed = max(worst_fixed, abs(got - want) / want)
    dt = time.perf_counter() - t0
    report(
        7,
        worst_measure <= 1e-14 and worst_integral <= 1e-14 and worst_fixed <= 1e-12,
        f"measure err {worst_measure:.1e}, integral err {worst_integral:.1e}, "
        f"fixed-point err {worst_fixed:.1e}, {dt:.1f}s",
    )


def test_acceptance_8_decay():
    """x Mf(x) at x in {1e3, 1e4, 1e5} within 2% of the integral."""
    t0 = time.perf_counter()
    worst = 0.0
    for f in (make_step_profile([0.0, 1.0], [1.0]), make_indicator_train(2)):
        mass = total_moment(f, 1)
        for x in (1e3, 1e4, 1e5):
            got = x * maximal_1d(f, x).value
            worst = max(worst, abs(got - mass) / mass)
    dt = time.perf_counter() - t0
    report(
        8,
        worst <= 0.02,
        f"block and K=2 train, max deviation {worst:.2%}, {dt:.1f}s",
    )
