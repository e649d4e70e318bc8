"""Maximal, Hardy, and rearrangement operators on piecewise data.

The noncentered maximal function of a compactly supported step function,

    Mf(x) = sup { |I|^(-1) int_I |f| : I an interval containing x },

is computed exactly: for step data the supremum is attained on an
interval whose endpoints come from the breakpoint set together with x
itself (moving a free endpoint inside a constant piece changes the
average monotonically until it hits a breakpoint), so a finite candidate
search is exact, no discretization involved.  `MaximalEngine` packages
the cumulative-sum tables and a pair-maximum table so that level-set
sweeps can evaluate Mf at thousands of points cheaply.

The radial Hardy operator and its fractional variant,

    Hf(r) = n r^(-n) int_0^r phi(s) s^(n-1) ds,

are thin wrappers over the closed-form moments.  The decreasing
rearrangement is exact on step profiles (sort level blocks) and on
non-increasing profiles (reparametrize by the level-set measure).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .profiles import (
    PiecewisePowerFn,
    PowerPiece,
    RadialProfile,
    moment_integral,
    unit_ball_volume,
    validate_nonincreasing,
)

__all__ = [
    "MaximalEvaluation",
    "MaximalEngine",
    "RearrangedFn",
    "line_steps",
    "maximal_1d",
    "maximal_values",
    "maximal_lower_bound_train",
    "hardy_radial",
    "hardy_profile",
    "fractional_ball_functional",
    "decreasing_rearrangement",
    "total_moment",
]

# pair tables are O(K^2); beyond this many breakpoints fall back to a scan
_PAIR_TABLE_LIMIT = 3000


@dataclass(frozen=True)
class MaximalEvaluation:
    """Value of Mf at one point with the attaining interval.

    ``interval`` is a closed interval [a, b] with a <= point <= b and
    a < b whose average of f equals ``value``; it is None exactly when
    f vanishes identically (``degenerate`` is then set).
    """

    point: float
    value: float
    interval: tuple[float, float] | None
    degenerate: bool = False


def line_steps(f: PiecewisePowerFn, even: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Step representation (T, V) of f on the line: f = V[i] on [T[i], T[i+1]).

    With ``even=True`` the profile is reflected to f(|x|), the natural
    realization of a radial profile on R^1.  Requires a piecewise
    constant profile with compact support.
    """
    if not f.is_step:
        raise ValueError("line representation requires a piecewise-constant profile")
    if not f.has_compact_support:
        raise ValueError("line representation requires compact support")
    T = np.asarray(f.breakpoints, dtype=float)
    V = np.asarray([p.c for p in f.pieces[:-1]], dtype=float)
    if not even:
        return T, V
    if T[0] == 0.0:
        T2 = np.concatenate((-T[:0:-1], T))
        V2 = np.concatenate((V[::-1], V))
    else:
        T2 = np.concatenate((-T[::-1], T))
        V2 = np.concatenate((V[::-1], [0.0], V))
    return T2, V2


class MaximalEngine:
    """Exact evaluator for the noncentered maximal function of step data."""

    def __init__(self, T: np.ndarray, V: np.ndarray):
        T = np.asarray(T, dtype=float)
        V = np.asarray(V, dtype=float)
        if len(T) != len(V) + 1:
            raise ValueError("need one value per gap between nodes")
        if np.any(np.diff(T) <= 0):
            raise ValueError("nodes must increase strictly")
        if np.any(V < 0):
            raise ValueError("values must be >= 0")
        self.T = T
        self.V = V
        self.F = np.concatenate(([0.0], np.cumsum(V * np.diff(T))))
        self._pairs: np.ndarray | None = None

    @classmethod
    def from_function(cls, f: PiecewisePowerFn, even: bool = False) -> "MaximalEngine":
        return cls(*line_steps(f, even=even))

    @property
    def total(self) -> float:
        return float(self.F[-1])

    def cumulative(self, x):
        """int_{-inf}^x f, exact (F is piecewise linear between nodes)."""
        return np.interp(x, self.T, self.F)

    def _pair_table(self) -> np.ndarray:
        """best[i, j] = max over i' <= i < j <= j' of the average on [T_i', T_j']."""
        if self._pairs is None:
            T, F = self.T, self.F
            den = T[None, :] - T[:, None]
            with np.errstate(divide="ignore", invalid="ignore"):
                avg = (F[None, :] - F[:, None]) / den
            avg[den <= 0] = -np.inf
            np.maximum.accumulate(avg, axis=0, out=avg)
            avg = avg[:, ::-1]
            np.maximum.accumulate(avg, axis=1, out=avg)
            self._pairs = np.ascontiguousarray(avg[:, ::-1])
        return self._pairs

    def _pair_best_scan(self, x: float, iL: int, jR: int) -> float:
        T, F = self.T, self.F
        lefts = np.arange(0, iL + 1)
        rights = np.arange(jR, len(T))
        if len(lefts) == 0 or len(rights) == 0:
            return -np.inf
        den = T[rights][None, :] - T[lefts][:, None]
        num = F[rights][None, :] - F[lefts][:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            avg = np.where(den > 0, num / np.where(den > 0, den, 1.0), -np.inf)
        return float(avg.max())

    def values(self, xs) -> np.ndarray:
        """Mf at an array of points."""
        xs = np.asarray(xs, dtype=float)
        scalar = xs.ndim == 0
        xs = np.atleast_1d(xs).ravel()
        T, F = self.T, self.F
        K = len(T)
        iL = np.searchsorted(T, xs, side="right") - 1
        jR = np.searchsorted(T, xs, side="left")
        Fx = np.interp(xs, T, F)

        if K <= _PAIR_TABLE_LIMIT:
            table = self._pair_table()
            ok = (iL >= 0) & (jR <= K - 1)
            pair = np.where(ok, table[np.clip(iL, 0, K - 1), np.clip(jR, 0, K - 1)], -np.inf)
        else:
            pair = np.array(
                [self._pair_best_scan(x, i, j) for x, i, j in zip(xs, iL, jR)]
            )

        out = np.maximum(pair, 0.0)
        # intervals anchored at x: [x, T_j] and [T_i, x]
        chunk = max(1, 2_000_000 // K)
        for s in range(0, len(xs), chunk):
            xe = xs[s : s + chunk, None]
            fe = Fx[s : s + chunk, None]
            den = T[None, :] - xe
            with np.errstate(divide="ignore", invalid="ignore"):
                right = np.where(den > 0, (F[None, :] - fe) / np.where(den > 0, den, 1.0), -np.inf)
                left = np.where(den < 0, (fe - F[None, :]) / np.where(den < 0, -den, 1.0), -np.inf)
            out[s : s + chunk] = np.maximum(
                out[s : s + chunk],
                np.maximum(right.max(axis=1), left.max(axis=1)),
            )
        return float(out[0]) if scalar else out

    def covering_average(self, us, vs):
        """sup of averages over windows [a, b] with a <= u and b >= v.

        Every such window contains each point of [u, v], so the result
        is a pointwise lower bound for Mf on all of [u, v].  It is also
        tight: as v - u shrinks to zero it converges to Mf.  Optimal
        endpoints lie in the nodes or at u, v themselves, since for a
        fixed right end the average is a ratio of linear functions of
        the left end on each gap, hence monotone there.
        """
        us = np.asarray(us, dtype=float)
        vs = np.asarray(vs, dtype=float)
        scalar = us.ndim == 0 and vs.ndim == 0
        us = np.atleast_1d(us).ravel()
        vs = np.atleast_1d(vs).ravel()
        if us.shape != vs.shape:
            raise ValueError("u and v arrays must have matching shapes")
        if np.any(vs < us):
            raise ValueError("windows need u <= v")
        T, F = self.T, self.F
        K = len(T)
        iL = np.searchsorted(T, us, side="right") - 1
        jR = np.searchsorted(T, vs, side="left")
        Fu = np.interp(us, T, F)
        Fv = np.interp(vs, T, F)

        if K <= _PAIR_TABLE_LIMIT:
            table = self._pair_table()
            ok = (iL >= 0) & (jR <= K - 1)
            best = np.where(ok, table[np.clip(iL, 0, K - 1), np.clip(jR, 0, K - 1)], -np.inf)
        else:
            best = np.array(
                [self._pair_best_scan(u, i, j) for u, i, j in zip(us, iL, jR)]
            )

        span = vs - us
        with np.errstate(divide="ignore", invalid="ignore"):
            direct = np.where(span > 0, (Fv - Fu) / np.where(span > 0, span, 1.0), -np.inf)
        out = np.maximum(np.maximum(best, direct), 0.0)
        # windows anchored at u (right end at a node >= v) or at v
        chunk = max(1, 2_000_000 // K)
        for s in range(0, len(us), chunk):
            ue = us[s : s + chunk, None]
            ve = vs[s : s + chunk, None]
            fu = Fu[s : s + chunk, None]
            fv = Fv[s : s + chunk, None]
            den_r = T[None, :] - ue
            den_l = ve - T[None, :]
            ok_r = (T[None, :] >= ve) & (den_r > 0)
            ok_l = (T[None, :] <= ue) & (den_l > 0)
            with np.errstate(divide="ignore", invalid="ignore"):
                right = np.where(ok_r, (F[None, :] - fu) / np.where(ok_r, den_r, 1.0), -np.inf)
                left = np.where(ok_l, (fv - F[None, :]) / np.where(ok_l, den_l, 1.0), -np.inf)
            out[s : s + chunk] = np.maximum(
                out[s : s + chunk],
                np.maximum(right.max(axis=1), left.max(axis=1)),
            )
        return float(out[0]) if scalar else out

    def evaluate(self, x: float) -> tuple[float, float, float]:
        """Mf(x) with the attaining interval, via a direct candidate scan."""
        x = float(x)
        T, F = self.T, self.F
        iL = int(np.searchsorted(T, x, side="right")) - 1
        jR = int(np.searchsorted(T, x, side="left"))
        fx = float(np.interp(x, T, F))
        la = np.concatenate((T[: iL + 1], [x]))
        lF = np.concatenate((F[: iL + 1], [fx]))
        rb = np.concatenate(([x], T[jR:]))
        rF = np.concatenate(([fx], F[jR:]))
        den = rb[None, :] - la[:, None]
        num = rF[None, :] - lF[:, None]
        with np.errstate(divide="ignore", invalid="ignore"):
            avg = np.where(den > 0, num / np.where(den > 0, den, 1.0), -np.inf)
        k = int(np.argmax(avg))
        i, j = divmod(k, avg.shape[1])
        return float(avg[i, j]), float(la[i]), float(rb[j])


def maximal_1d(f: PiecewisePowerFn, x: float, even: bool = False) -> MaximalEvaluation:
    """Exact noncentered maximal function of a step profile at one point.

    With ``even=True`` the profile is first reflected to f(|x|).  The
    returned interval attains the supremum exactly; ties break toward
    the lexicographically smallest (a, b).
    """
    T, V = line_steps(f, even=even)
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"x must be finite, got {x}")
    if np.all(V == 0.0):
        return MaximalEvaluation(x, 0.0, None, True)
    engine = MaximalEngine(T, V)
    value, a, b = engine.evaluate(x)
    return MaximalEvaluation(x, value, (a, b))


def maximal_values(f: PiecewisePowerFn, xs, even: bool = False):
    """Mf on an array of points (no witnesses); one shared engine."""
    T, V = line_steps(f, even=even)
    if np.all(V == 0.0):
        arr = np.asarray(xs, dtype=float)
        return 0.0 if arr.ndim == 0 else np.zeros(arr.shape)
    return MaximalEngine(T, V).values(xs)


def maximal_lower_bound_train(count: int, x: float) -> float:
    """Closed-form pointwise lower bound for Mf of the indicator train.

    The train has unit blocks on [k^2, k^2+1], k = 0..count.  On the tile
    [k^2, (k+1)^2) the bound is 1 on the block, then the average of f
    over [k^2, x], and in the upper part of the tile the average over
    [x, (k+1)^2 + 1], which reaches into block k+1.  The look-ahead
    branch needs block k+1 to exist, so for the final block the bound
    continues as 1/(x - count^2) for all larger x.  Continuous in x.
    """
    if count != int(count) or count < 0:
        raise ValueError(f"count must be a non-negative integer, got {count}")
    count = int(count)
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"x must be finite, got {x}")
    if x < 0.0:
        return 0.0
    last_block = float(count) * float(count)
    if x >= last_block + 1.0:
        # beyond the final block: average of f over [count^2, x]
        return 1.0 / (x - last_block)
    k = int(math.floor(math.sqrt(x)))
    while (k + 1) * (k + 1) <= x:
        k += 1
    while k * k > x:
        k -= 1
    pos = x - float(k) * float(k)
    if pos < 1.0:
        return 1.0
    if pos < k + 1.0:
        return 1.0 / pos
    return 1.0 / (float(k + 1) * float(k + 1) + 1.0 - x)


def hardy_radial(profile: RadialProfile, r):
    """n-dimensional Hardy average Hf(r) = n r^(-n) int_0^r phi s^(n-1) ds."""
    n = profile.dimension
    rs = np.asarray(r, dtype=float)
    scalar = rs.ndim == 0
    rs = np.atleast_1d(rs)
    if np.any(~np.isfinite(rs)) or np.any(rs <= 0.0):
        raise ValueError("radius must be finite and > 0")
    vals = n * moment_integral(profile.fn, rs, n) / rs**n
    return float(vals[0]) if scalar else vals


def hardy_profile(profile: RadialProfile, radii=None) -> RadialProfile:
    """Step sample of the Hardy transform, non-increasing by construction.

    Hf of a non-increasing profile is non-increasing but leaves the
    piecewise power class, so the exact transform cannot be returned;
    this left-node sample is a step majorant that is exact at the
    nodes.  Quantitative checks should use `hardy_radial` directly.
    """
    fn = profile.fn
    if radii is None:
        positive = [b for b in fn.breakpoints if b > 0.0]
        hi = fn.support_bound
        if not math.isfinite(hi):
            hi = (positive[-1] if positive else 1.0) * 16.0
        lo = (positive[0] if positive else hi) / 16.0
        radii = np.geomspace(lo, hi * 4.0, 96)
    radii = np.asarray(radii, dtype=float)
    if np.any(np.diff(radii) <= 0) or radii[0] <= 0.0:
        raise ValueError("radii must be positive and strictly increasing")
    h = np.atleast_1d(hardy_radial(profile, radii))
    # left-node sampling: piece on [r_i, r_{i+1}) takes H(r_i), so the
    # step equals H at every node and majorizes H in between
    bp = (0.0,) + tuple(float(r) for r in radii)
    values = np.concatenate(([h[0]], h))
    pieces = tuple(PowerPiece(float(v), 0.0) for v in values)
    return RadialProfile(PiecewisePowerFn(bp, pieces).merged(), profile.dimension)


def fractional_ball_functional(profile: RadialProfile, alpha: float, r) -> float:
    """sup-generating term |B|^((alpha-n)/n) int_B f over the ball B(0, r).

    At alpha = 0 this is exactly the Hardy average `hardy_radial`.
    """
    n = profile.dimension
    if not (0.0 <= alpha < n):
        raise ValueError(f"alpha must lie in [0, {n}), got {alpha}")
    omega = unit_ball_volume(n)
    rs = np.asarray(r, dtype=float)
    scalar = rs.ndim == 0
    rs = np.atleast_1d(rs)
    if np.any(~np.isfinite(rs)) or np.any(rs <= 0.0):
        raise ValueError("radius must be finite and > 0")
    ball = omega * rs**n
    vals = ball ** ((alpha - n) / n) * n * omega * moment_integral(profile.fn, rs, n)
    return float(vals[0]) if scalar else vals


def total_moment(f: PiecewisePowerFn, n: int = 1) -> float:
    """int_0^inf f rho^(n-1) drho; +inf when the tail is not integrable."""
    tail = f.pieces[-1]
    last = f.breakpoints[-1]
    if tail.c == 0.0:
        return float(moment_integral(f, last, n))
    m = n - tail.beta
    if m >= 0.0:
        return math.inf
    return float(moment_integral(f, last, n) + tail.c * last**m / (-m))


@dataclass(frozen=True)
class RearrangedFn:
    """Decreasing rearrangement f* as a profile in the measure variable t.

    Level sets of the source are measured with d(rho^n), times the unit
    ball volume when ``radial`` is set; f* is then the non-increasing
    profile on (0, inf) equimeasurable with the source in that measure.
    """

    fn: PiecewisePowerFn
    dimension: int
    radial: bool
    source: PiecewisePowerFn

    def evaluate(self, t):
        return self.fn.evaluate(t)

    __call__ = evaluate


def decreasing_rearrangement(
    f: PiecewisePowerFn, dimension: int = 1, radial: bool = False
) -> RearrangedFn:
    """Exact decreasing rearrangement of a piecewise profile.

    Supported inputs: any piecewise-constant profile (level blocks are
    sorted by value), and any non-increasing profile (reparametrized by
    the measure of its own level sets, which for a power piece
    c rho^(-beta) yields the piece c w^(beta/n) t^(-beta/n) where w is
    the measure normalization).  Other shapes would leave the
    representable class and are rejected.
    """
    if dimension < 1 or dimension != int(dimension):
        raise ValueError(f"dimension must be a positive integer, got {dimension}")
    n = int(dimension)
    weight = unit_ball_volume(n) if radial else 1.0

    if validate_nonincreasing(f).ok:
        bp = tuple(weight * b**n for b in f.breakpoints)
        pieces = tuple(
            PowerPiece(p.c * weight ** (p.beta / n), p.beta / n) for p in f.pieces
        )
        star = PiecewisePowerFn(bp, pieces).merged()
        return RearrangedFn(star, n, radial, f)

    if not f.is_step:
        raise ValueError(
            "rearrangement is exact only for step or non-increasing profiles"
        )
    lo = np.asarray(f.breakpoints)
    hi = np.append(lo[1:], np.inf)
    vals = np.asarray([p.c for p in f.pieces])
    if vals[-1] > 0.0:
        raise ValueError("rearrangement of a step profile requires compact support")
    measures = weight * (hi**n - lo**n)
    order = np.argsort(-vals, kind="stable")
    bp = [0.0]
    out_vals: list[float] = []
    for idx in order:
        v = float(vals[idx])
        if v <= 0.0:
            break
        if out_vals and v == out_vals[-1]:
            bp[-1] += float(measures[idx])
            continue
        out_vals.append(v)
        bp.append(bp[-1] + float(measures[idx]))
    if not out_vals:
        star = PiecewisePowerFn((0.0,), (PowerPiece(0.0, 0.0),))
        return RearrangedFn(star, n, radial, f)
    pieces = tuple(PowerPiece(v, 0.0) for v in out_vals) + (PowerPiece(0.0, 0.0),)
    star = PiecewisePowerFn(tuple(bp), pieces)
    return RearrangedFn(star, n, radial, f)
