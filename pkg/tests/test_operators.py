"""Maximal, Hardy, and fractional operators plus the rearrangement."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import brute_maximal, random_step_fn
from morreymax import (
    MorreyParams,
    PiecewisePowerFn,
    PowerPiece,
    RadialProfile,
    SpecValidationError,
    decreasing_rearrangement,
    fractional_ball_functional,
    hardy_profile,
    hardy_radial,
    line_steps,
    make_indicator_train,
    make_step_profile,
    maximal_1d,
    maximal_lower_bound_train,
    maximal_values,
    moment_integral,
    total_moment,
    unit_ball_volume,
    validate_nonincreasing,
)
from morreymax.operators import MaximalEngine

BLOCK = make_step_profile([0.0, 1.0], [1.0])


def interval_average(f, a, b, even=False):
    """Exact average of the (optionally mirrored) step function over [a, b]."""
    T, V = line_steps(f, even=even)
    F = np.concatenate(([0.0], np.cumsum(V * np.diff(T))))
    ca, cb = np.interp([a, b], T, F)
    return (cb - ca) / (b - a)


class TestMaximal1d:
    def test_block_outside(self):
        ev = maximal_1d(BLOCK, 2.0)
        assert ev.value == 0.5
        assert ev.interval == (0.0, 2.0)
        assert not ev.degenerate

    def test_block_inside(self):
        # any subinterval of the block is a maximizer; value must be 1
        ev = maximal_1d(BLOCK, 0.5)
        assert ev.value == 1.0
        a, b = ev.interval
        assert 0.0 <= a <= 0.5 <= b <= 1.0 and a < b

    def test_train_gap_point(self):
        # at x=3 the best window is [0,3]: mass 2 over length 3 beats
        # anything reaching the k=2 block at [4,5]
        ev = maximal_1d(make_indicator_train(2), 3.0)
        assert ev.value == pytest.approx(2.0 / 3.0, rel=1e-15)
        assert ev.interval == (0.0, 3.0)

    def test_zero_function_degenerate(self):
        ev = maximal_1d(make_step_profile([0, 1], [0]), 0.5)
        assert ev.value == 0.0
        assert ev.degenerate

    def test_rejects_power_pieces(self):
        f = PiecewisePowerFn((0.0, 1.0), (PowerPiece(1.0, 0.5), PowerPiece(0.0, 0.0)))
        with pytest.raises((SpecValidationError, ValueError)):
            maximal_1d(f, 0.5)

    def test_witness_reproduces_value(self, rng):
        for _ in range(12):
            f = random_step_fn(rng, hi=5.0)
            x = float(rng.uniform(-1.0, 7.0))
            ev = maximal_1d(f, x)
            a, b = ev.interval
            assert a <= x <= b and a < b
            assert ev.value == pytest.approx(interval_average(f, a, b), rel=1e-12)

    def test_brute_oracle_agreement(self, rng):
        for _ in range(8):
            f = random_step_fn(rng, hi=2.0)
            for x in rng.uniform(-0.5, 3.0, 4):
                got = maximal_1d(f, float(x)).value
                ref = brute_maximal(f, float(x), h=1e-3)
                assert got == pytest.approx(ref, rel=1e-9)

    def test_batch_matches_singles(self, rng):
        f = make_indicator_train(3)
        xs = rng.uniform(-2.0, 15.0, 40)
        batch = maximal_values(f, xs)
        singles = np.array([maximal_1d(f, float(x)).value for x in xs])
        assert np.array_equal(batch, singles)

    def test_even_extension_symmetry(self):
        f = make_step_profile([0.0, 0.5, 2.0], [2.0, 0.5])
        for x in (0.1, 0.9, 3.0, 11.0):
            left = maximal_1d(f, -x, even=True)
            right = maximal_1d(f, x, even=True)
            assert left.value == pytest.approx(right.value, rel=1e-15)

    def test_dominates_function_at_midpoints(self, rng):
        f = random_step_fn(rng, hi=4.0)
        T, V = line_steps(f)
        mids = 0.5 * (T[:-1] + T[1:])
        assert np.all(maximal_values(f, mids) >= V - 1e-15)

    def test_dominates_hardy_on_even_decreasing(self, rng):
        """Mf >= Hf and Mf <= 3 Hf on even extensions of decreasing steps."""
        bp = np.concatenate(([0.0], np.sort(rng.uniform(0.05, 10.0, 5))))
        vals = np.sort(rng.uniform(0.1, 3.0, 5))[::-1]
        f = make_step_profile(bp, vals)
        prof = RadialProfile(f, 1)
        xs = np.geomspace(0.01, 40.0, 60)
        mf = maximal_values(f, xs, even=True)
        hf = np.array([hardy_radial(prof, float(x)) for x in xs])
        assert np.all(mf >= hf * (1 - 1e-12))
        assert np.max(mf / hf) <= 3.0


class TestTrainMinorant:
    def test_first_block(self):
        assert maximal_lower_bound_train(2, 0.5) == 1.0

    def test_middle_segment(self):
        # x=3 sits in [k^2+1, k^2+k+1] = [2,3] for k=1: value 1/(x-1)
        assert maximal_lower_bound_train(2, 3.0) == pytest.approx(0.5, rel=1e-15)

    def test_block_right_edges(self):
        assert maximal_lower_bound_train(2, 2.0) == 1.0
        assert maximal_lower_bound_train(2, 5.0) == 1.0

    def test_far_segment(self):
        # x=3.5 in [k^2+k+1, (k+1)^2] = [3,4] for k=1: 1/((k+1)^2+1-x)
        want = 1.0 / (4.0 + 1.0 - 3.5)
        assert maximal_lower_bound_train(2, 3.5) == pytest.approx(want, rel=1e-15)

    @pytest.mark.parametrize("count", [2, 5])
    def test_minorizes_maximal(self, count, rng):
        f = make_indicator_train(count)
        xs = rng.uniform(0.0, count**2 + 1.0, 100)
        mf = maximal_values(f, xs)
        minor = np.array([maximal_lower_bound_train(count, float(x)) for x in xs])
        assert np.all(mf >= minor * (1 - 1e-12))


class TestHardy:
    def test_block_average(self):
        assert hardy_radial(RadialProfile(BLOCK, 1), 2.0) == 0.5

    @pytest.mark.parametrize("n,lam", [(1, 0.5), (2, 1.3), (3, 2.0)])
    def test_power_closed_form(self, n, lam):
        prof = RadialProfile(
            PiecewisePowerFn((0.0,), (PowerPiece(1.0, lam),)), n
        )
        for r in (0.2, 1.0, 9.0):
            want = r ** (-lam) * n / (n - lam)
            assert hardy_radial(prof, r) == pytest.approx(want, rel=1e-14)

    def test_constant_profile_is_fixed(self):
        prof = RadialProfile(make_step_profile([0.0, 1e6], [3.25]), 2)
        for r in (0.5, 10.0, 1e4):
            assert hardy_radial(prof, r) == pytest.approx(3.25, rel=1e-14)

    def test_vectorized(self):
        prof = RadialProfile(make_indicator_train(1), 1)
        rs = np.array([0.5, 2.0, 8.0])
        batch = hardy_radial(prof, rs)
        singles = [hardy_radial(prof, float(r)) for r in rs]
        assert np.allclose(batch, singles, rtol=0, atol=0)

    def test_profile_output_nonincreasing(self, rng):
        bp = np.concatenate(([0.0], np.sort(rng.uniform(0.1, 5.0, 4))))
        vals = np.sort(rng.uniform(0.2, 2.0, 4))[::-1]
        prof = RadialProfile(make_step_profile(bp, vals), 1)
        out = hardy_profile(prof)
        assert validate_nonincreasing(out.fn).ok
        # sampled transform is exact at its own nodes
        r = out.fn.breakpoints[3]
        assert out.fn(r) == pytest.approx(hardy_radial(prof, r), rel=1e-12)


class TestFractional:
    def test_alpha_zero_matches_hardy(self, rng):
        bp = np.concatenate(([0.0], np.sort(rng.uniform(0.1, 5.0, 3))))
        vals = np.sort(rng.uniform(0.2, 2.0, 3))[::-1]
        for n in (1, 2, 3):
            prof = RadialProfile(make_step_profile(bp, vals), n)
            for r in (0.3, 1.7, 6.0):
                assert fractional_ball_functional(prof, 0.0, r) == pytest.approx(
                    hardy_radial(prof, r), rel=1e-14
                )

    def test_block_sqrt_two(self):
        got = fractional_ball_functional(RadialProfile(BLOCK, 1), 0.5, 1.0)
        assert got == pytest.approx(math.sqrt(2.0), rel=1e-14)

    def test_zero_profile(self):
        prof = RadialProfile(make_step_profile([0, 1], [0]), 2)
        assert fractional_ball_functional(prof, 0.7, 3.0) == 0.0

    def test_sharp_profile_constant_in_r(self):
        lam = 0.5
        prof = RadialProfile(PiecewisePowerFn((0.0,), (PowerPiece(1.0, lam),)), 1)
        vals = [fractional_ball_functional(prof, lam, r) for r in (0.1, 1.0, 25.0)]
        assert max(vals) == pytest.approx(min(vals), rel=1e-12)


class TestRearrangement:
    def test_block_fixed_point(self):
        star = decreasing_rearrangement(BLOCK)
        assert star.fn.breakpoints == (0.0, 1.0)
        assert star.fn(0.5) == 1.0

    def test_train_packs_to_one_block(self):
        star = decreasing_rearrangement(make_indicator_train(3))
        assert star.fn.breakpoints == (0.0, 4.0)
        assert star.fn(3.9) == 1.0 and star.fn(4.1) == 0.0

    def test_two_level_example(self):
        f = make_step_profile([0.0, 1.0, 5.0, 7.0], [2.0, 0.0, 1.0])
        star = decreasing_rearrangement(f)
        assert star.fn.breakpoints == (0.0, 1.0, 3.0)
        assert star.fn(0.5) == 2.0 and star.fn(2.0) == 1.0 and star.fn(3.5) == 0.0

    def test_integral_preserved_and_idempotent(self, rng):
        for _ in range(10):
            f = random_step_fn(rng, hi=8.0)
            star = decreasing_rearrangement(f)
            assert validate_nonincreasing(star.fn).ok
            assert total_moment(star.fn, 1) == pytest.approx(
                total_moment(f, 1), rel=1e-14
            )
            again = decreasing_rearrangement(star.fn)
            assert again.fn == star.fn

    def test_equimeasurable_at_jump_levels(self, rng):
        f = random_step_fn(rng, hi=6.0)
        star = decreasing_rearrangement(f)
        T, V = line_steps(f)
        Ts, Vs = line_steps(star.fn)
        gaps, gaps_s = np.diff(T), np.diff(Ts)
        for mu in np.unique(V):
            d_f = float(np.sum(gaps[V > mu]))
            d_s = float(np.sum(gaps_s[Vs > mu]))
            assert d_s == pytest.approx(d_f, abs=1e-14)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_radial_fixed_point_identity(self, n, rng):
        """For decreasing radial data, f*(t) = phi((t / omega_n)^{1/n})."""
        bp = np.concatenate(([0.0], np.sort(rng.uniform(0.1, 4.0, 5))))
        vals = np.sort(rng.uniform(0.2, 3.0, 5))[::-1]
        phi = make_step_profile(bp, vals)
        star = decreasing_rearrangement(phi, dimension=n, radial=True)
        w = unit_ball_volume(n)
        for r in 0.5 * (bp[:-1] + bp[1:]):
            t = w * r**n
            assert star.fn(t) == pytest.approx(phi(r), rel=1e-13)

    def test_power_pieces_only_when_monotone(self):
        # already-decreasing power data is its own rearrangement
        f = PiecewisePowerFn((0.0, 1.0), (PowerPiece(1.0, 0.5), PowerPiece(0.0, 0.0)))
        assert decreasing_rearrangement(f).fn == f
        g = PiecewisePowerFn(
            (0.0, 1.0, 2.0),
            (PowerPiece(0.5, 0.5), PowerPiece(2.0, 0.0), PowerPiece(0.0, 0.0)),
        )
        with pytest.raises((SpecValidationError, ValueError)):
            decreasing_rearrangement(g)


class TestMaximalEngine:
    def test_values_match_maximal(self, rng):
        f = random_step_fn(rng, hi=3.0)
        eng = MaximalEngine.from_function(f)
        xs = rng.uniform(-1.0, 4.0, 30)
        assert np.array_equal(eng.values(xs), maximal_values(f, xs))

    def test_covering_average_block(self):
        eng = MaximalEngine.from_function(BLOCK)
        assert eng.covering_average(0.2, 0.4) == 1.0
        assert eng.covering_average(2.0, 3.0) == pytest.approx(1.0 / 3.0, rel=1e-15)
        assert eng.covering_average(-1.0, 2.0) == pytest.approx(1.0 / 3.0, rel=1e-15)

    def test_covering_average_bounds_maximal(self, rng):
        f = random_step_fn(rng, hi=3.0)
        eng = MaximalEngine.from_function(f)
        us = rng.uniform(-0.5, 3.5, 50)
        vs = us + rng.uniform(0.0, 1.0, 50)
        cov = eng.covering_average(us, vs)
        assert np.all(cov <= eng.values(us) + 1e-12)
        assert np.all(cov <= eng.values(vs) + 1e-12)

    def test_covering_average_degenerate_cell(self, rng):
        f = random_step_fn(rng, hi=3.0)
        eng = MaximalEngine.from_function(f)
        xs = rng.uniform(-0.5, 3.5, 20)
        assert np.allclose(
            eng.covering_average(xs, xs), eng.values(xs), rtol=1e-13, atol=0
        )

    def test_quasiconvex_on_cells(self, rng):
        """Between breakpoints, Mf never exceeds its value at the cell ends."""
        f = random_step_fn(rng, hi=3.0)
        eng = MaximalEngine.from_function(f)
        T = eng.T
        for a, b in zip(T[:-1], T[1:]):
            inner = np.linspace(a, b, 9)[1:-1]
            cap = max(eng.values(a), eng.values(b))
            assert np.all(eng.values(inner) <= cap + 1e-12)


@given(
    data=st.lists(
        st.one_of(
            st.just(0.0),
            st.floats(min_value=1e-3, max_value=4.0, allow_nan=False),
        ),
        min_size=1,
        max_size=7,
    ),
    x=st.floats(min_value=-2.0, max_value=12.0, allow_nan=False),
)
def test_maximal_brute_property(data, x):
    bp = [float(i) for i in range(len(data) + 1)]
    if not any(v > 0 for v in data):
        data = data[:-1] + [1.0] if len(data) > 1 else [1.0]
    f = make_step_profile(bp, data)
    got = maximal_1d(f, x).value
    ref = brute_maximal(f, x, h=2e-3)
    # the oracle's cumulative interpolation carries ~1e-12 relative noise
    assert got >= ref * (1.0 - 1e-9)
    assert got == pytest.approx(ref, rel=5e-9)
