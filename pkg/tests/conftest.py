"""Shared fixtures and independent oracles for the test suite."""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from morreymax import line_steps, make_step_profile

settings.register_profile(
    "ci",
    deadline=None,
    derandomize=True,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


def brute_maximal(f, x, h=1e-3, even=False):
    """Dense-grid oracle for the noncentered maximal function.

    Averages are exact block overlaps: the cumulative integral of a
    step function is piecewise linear, so np.interp reproduces it
    exactly at every grid point.  The grid carries the breakpoints and
    the query point, and no window needs to reach past
    [min(T[0], x), max(T[-1], x)] because trimming zero-mass length
    only raises an average.
    """
    T, V = line_steps(f, even=even)
    if len(V) == 0 or not np.any(V > 0.0):
        return 0.0
    F = np.concatenate(([0.0], np.cumsum(V * np.diff(T))))
    lo = min(float(T[0]), x)
    hi = max(float(T[-1]), x)
    grid = np.unique(np.concatenate((np.arange(lo, hi, h), T, [x, hi])))
    cum = np.interp(grid, T, F)
    lefts = grid[grid <= x]
    flefts = cum[grid <= x]
    rights = grid[grid >= x]
    frights = cum[grid >= x]
    best = 0.0
    for i0 in range(0, len(lefts), 512):
        a = lefts[i0 : i0 + 512, None]
        fa = flefts[i0 : i0 + 512, None]
        num = frights[None, :] - fa
        den = rights[None, :] - a
        np.maximum(den, 1e-300, out=den)  # a == b only at a = b = x, num 0 there
        best = max(best, float(np.max(num / den)))
    return best


def random_step_fn(rng, lo=0.0, hi=1.0, max_blocks=10, vmax=3.0):
    """Random non-monotone step function supported inside [lo, hi]."""
    k = int(rng.integers(2, max_blocks + 1))
    bp = np.unique(rng.uniform(lo, hi, size=k + 1))
    while len(bp) < 3:
        bp = np.unique(rng.uniform(lo, hi, size=k + 1))
    vals = rng.uniform(0.0, vmax, size=len(bp) - 1)
    vals[rng.random(len(vals)) < 0.25] = 0.0
    if not np.any(vals > 0.0):
        vals[0] = 1.0
    return make_step_profile(bp, vals)


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)
