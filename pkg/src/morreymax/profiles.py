"""Piecewise power-law profiles on the half line and their weighted moments.

A profile is a one-sided function

    f(rho) = c_i * rho^(-beta_i)   for rho in [b_i, b_{i+1}),  i = 0..m-1,

with 0 <= b_0 < b_1 < ... < b_{m-1}, f = 0 below b_0, and the last piece
extending to infinity (it plays the role of the tail; a compactly supported
profile has c = 0 there).  All coefficients and exponents are non-negative,
so each piece is non-increasing; monotonicity across breakpoints is a
separate, checkable property (`validate_nonincreasing`).

The exact weighted moments used throughout the package,

    moment_integral(f, x, n)     = int_0^x f(rho) rho^(n-1) drho,
    log_moment_integral(f, x, n) = int_0^x f(rho) rho^(n-1) ln(x/rho) drho,

are evaluated in closed form per piece; both accept scalar or array x.
Summation over pieces is in fixed left-to-right order, so results are
bitwise reproducible.
"""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import NonIntegrableError, SpecValidationError

__all__ = [
    "PowerPiece",
    "PiecewisePowerFn",
    "RadialProfile",
    "MorreyParams",
    "MonotonicityReport",
    "unit_ball_volume",
    "validate_nonincreasing",
    "make_indicator_train",
    "make_step_profile",
    "moment_integral",
    "log_moment_integral",
    "function_from_json",
    "function_to_json",
    "load_function_spec",
]


def unit_ball_volume(dimension: int) -> float:
    """Volume of the unit ball in R^n, pi^(n/2) / Gamma(n/2 + 1)."""
    if dimension < 1:
        raise ValueError(f"dimension must be >= 1, got {dimension}")
    return math.pi ** (dimension / 2.0) / math.gamma(dimension / 2.0 + 1.0)


@dataclass(frozen=True)
class PowerPiece:
    """One piece c * rho^(-beta) with c >= 0 and beta >= 0."""

    c: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.c) and self.c >= 0.0):
            raise ValueError(f"piece coefficient must be finite and >= 0, got {self.c}")
        if not (math.isfinite(self.beta) and self.beta >= 0.0):
            raise ValueError(f"piece exponent must be finite and >= 0, got {self.beta}")


@dataclass(frozen=True)
class PiecewisePowerFn:
    """A non-negative piecewise power function on (0, infinity).

    ``pieces[i]`` applies on ``[breakpoints[i], breakpoints[i+1])``; the
    last piece extends to infinity.  The function is 0 below the first
    breakpoint.  Instances are immutable and hashable, which lets the
    moment evaluators cache their per-profile prefix tables.
    """

    breakpoints: tuple[float, ...]
    pieces: tuple[PowerPiece, ...]

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        pc = tuple(
            p if isinstance(p, PowerPiece) else PowerPiece(*p) for p in self.pieces
        )
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "pieces", pc)
        if len(bp) == 0:
            raise ValueError("at least one breakpoint is required")
        if len(pc) != len(bp):
            raise ValueError(
                f"pieces count {len(pc)} must equal breakpoints count {len(bp)}"
            )
        if not math.isfinite(bp[0]) or bp[0] < 0.0:
            raise ValueError(f"breakpoints must be finite and >= 0, got {bp[0]}")
        for a, b in zip(bp, bp[1:]):
            if not math.isfinite(b) or b <= a:
                raise ValueError(
                    f"breakpoints must increase strictly, got {a} then {b}"
                )

    # -- basic queries ---------------------------------------------------

    def evaluate(self, rho):
        """Pointwise values; scalar in, scalar out.  Left-closed pieces."""
        r = np.asarray(rho, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        b = np.asarray(self.breakpoints)
        c = np.asarray([p.c for p in self.pieces])
        beta = np.asarray([p.beta for p in self.pieces])
        idx = np.searchsorted(b, r, side="right") - 1
        inside = idx >= 0
        safe = np.where(inside, idx, 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            vals = c[safe] * np.power(r, -beta[safe], where=(r > 0), out=np.ones_like(r))
        # rho = 0 on a genuine power piece diverges; rho = 0 on a constant
        # piece evaluates to its coefficient.
        at_zero = (r == 0.0) & inside & (beta[safe] > 0) & (c[safe] > 0)
        vals = np.where(at_zero, np.inf, vals)
        vals = np.where(inside, vals, 0.0)
        return float(vals[0]) if scalar else vals

    __call__ = evaluate

    @property
    def is_step(self) -> bool:
        return all(p.beta == 0.0 for p in self.pieces)

    @property
    def has_compact_support(self) -> bool:
        return self.pieces[-1].c == 0.0

    @property
    def support_bound(self) -> float:
        """Supremum of the support (inf for a non-trivial tail, 0 if f = 0)."""
        if self.pieces[-1].c > 0.0:
            return math.inf
        for i in range(len(self.pieces) - 2, -1, -1):
            if self.pieces[i].c > 0.0:
                return self.breakpoints[i + 1]
        return 0.0

    @property
    def is_zero(self) -> bool:
        return all(p.c == 0.0 for p in self.pieces)

    # -- exact transformations -------------------------------------------

    def scaled(self, factor: float) -> "PiecewisePowerFn":
        """The profile factor * f, factor >= 0."""
        if not (math.isfinite(factor) and factor >= 0.0):
            raise ValueError(f"scale factor must be finite and >= 0, got {factor}")
        return PiecewisePowerFn(
            self.breakpoints,
            tuple(PowerPiece(factor * p.c, p.beta) for p in self.pieces),
        )

    def dilated(self, s: float) -> "PiecewisePowerFn":
        """The profile rho -> f(s * rho), s > 0."""
        if not (math.isfinite(s) and s > 0.0):
            raise ValueError(f"dilation factor must be finite and > 0, got {s}")
        return PiecewisePowerFn(
            tuple(b / s for b in self.breakpoints),
            tuple(PowerPiece(p.c * s ** (-p.beta), p.beta) for p in self.pieces),
        )

    def powered(self, p: float) -> "PiecewisePowerFn":
        """The profile f^p; only step profiles stay in the class exactly."""
        if not self.is_step:
            raise ValueError("powering is only exact for piecewise-constant profiles")
        if not (math.isfinite(p) and p > 0.0):
            raise ValueError(f"power must be finite and > 0, got {p}")
        return PiecewisePowerFn(
            self.breakpoints,
            tuple(PowerPiece(q.c**p, 0.0) for q in self.pieces),
        )

    def split_at(self, rho: float) -> "PiecewisePowerFn":
        """Insert a breakpoint at rho without changing any value."""
        if not (math.isfinite(rho) and rho > self.breakpoints[0]):
            raise ValueError(f"split point must lie above {self.breakpoints[0]}")
        if rho in self.breakpoints:
            return self
        i = int(np.searchsorted(self.breakpoints, rho, side="right")) - 1
        bp = self.breakpoints[: i + 1] + (rho,) + self.breakpoints[i + 1 :]
        pc = self.pieces[: i + 1] + (self.pieces[i],) + self.pieces[i + 1 :]
        return PiecewisePowerFn(bp, pc)

    def merged(self) -> "PiecewisePowerFn":
        """Canonical form: adjacent pieces with equal (c, beta) are fused."""
        bp = [self.breakpoints[0]]
        pc = [self.pieces[0]]
        for b, p in zip(self.breakpoints[1:], self.pieces[1:]):
            if p.c == pc[-1].c and (p.beta == pc[-1].beta or p.c == 0.0):
                continue
            bp.append(b)
            pc.append(p)
        return PiecewisePowerFn(tuple(bp), tuple(pc))


@dataclass(frozen=True)
class MonotonicityReport:
    """Outcome of a non-increase check: ok flag plus first violation."""

    ok: bool
    location: float | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def validate_nonincreasing(f: PiecewisePowerFn) -> MonotonicityReport:
    """Check that f is non-increasing on (0, infinity).

    Each piece is automatically non-increasing (c, beta >= 0), so only
    breakpoint jumps can violate monotonicity.  A profile that is 0 on an
    initial gap and then jumps up is a violation at the first breakpoint;
    indicator trains fail here by design.
    """
    b = f.breakpoints
    pc = f.pieces
    if b[0] > 0.0 and pc[0].c > 0.0:
        return MonotonicityReport(
            False, b[0], f"jump up from 0 to {pc[0].c:g} at rho={b[0]:g}"
        )
    for i in range(len(pc) - 1):
        edge = b[i + 1]
        left = pc[i].c * edge ** (-pc[i].beta) if pc[i].c > 0.0 else 0.0
        right = pc[i + 1].c * edge ** (-pc[i + 1].beta) if pc[i + 1].c > 0.0 else 0.0
        # allow float wobble at seams where two power pieces meet continuously
        if right > left + 1e-13 * max(left, right):
            return MonotonicityReport(
                False,
                edge,
                f"jump up from {left:g} to {right:g} at rho={edge:g}",
            )
    return MonotonicityReport(True)


@dataclass(frozen=True)
class RadialProfile:
    """A radial decreasing function x -> fn(|x|) on R^n.

    Construction enforces the two properties every consumer relies on:
    the profile is non-increasing, and its moment integrals converge at
    the origin (a piece touching 0 must have beta < n when its
    coefficient is positive).
    """

    fn: PiecewisePowerFn
    dimension: int = 1

    def __post_init__(self):
        if self.dimension < 1 or self.dimension != int(self.dimension):
            raise ValueError(f"dimension must be a positive integer, got {self.dimension}")
        object.__setattr__(self, "dimension", int(self.dimension))
        report = validate_nonincreasing(self.fn)
        if not report.ok:
            raise ValueError(f"profile is not non-increasing: {report.detail}")
        first = self.fn.pieces[0]
        if self.fn.breakpoints[0] == 0.0 and first.c > 0.0 and first.beta >= self.dimension:
            raise NonIntegrableError(
                f"beta={first.beta:g} at the origin is not integrable in dimension {self.dimension}"
            )

    def evaluate(self, radius):
        return self.fn.evaluate(radius)

    __call__ = evaluate


@dataclass(frozen=True)
class MorreyParams:
    """Parameters (p, lambda, n) of the Morrey space M_{p,lambda}(R^n).

    The normalization constant ``ball_volume`` defaults to the volume of
    the unit ball; a caller-supplied value must agree with the closed
    form to 1e-12 relative, which guards against mixing conventions.
    """

    lam: float
    p: float = 1.0
    dimension: int = 1
    ball_volume: float | None = None

    def __post_init__(self):
        if self.dimension < 1 or self.dimension != int(self.dimension):
            raise ValueError(f"dimension must be a positive integer, got {self.dimension}")
        object.__setattr__(self, "dimension", int(self.dimension))
        if not (math.isfinite(self.p) and self.p >= 1.0):
            raise ValueError(f"p must be finite and >= 1, got {self.p}")
        if not (0.0 <= self.lam <= self.dimension):
            raise ValueError(
                f"lambda must lie in [0, {self.dimension}], got {self.lam}"
            )
        exact = unit_ball_volume(self.dimension)
        if self.ball_volume is None:
            object.__setattr__(self, "ball_volume", exact)
        elif abs(self.ball_volume - exact) > 1e-12 * exact:
            raise ValueError(
                f"ball_volume {self.ball_volume!r} disagrees with {exact!r} for n={self.dimension}"
            )


# -- builders ------------------------------------------------------------


def make_indicator_train(
    count: int,
    gap_law: Callable[[int], tuple[float, float]] | None = None,
    min_index: int = 0,
) -> PiecewisePowerFn:
    """Sum of indicator blocks chi_{[a_k, b_k]} for k = min_index..count.

    The default gap law places unit blocks on [k^2, k^2 + 1]; consecutive
    blocks that touch (the k = 0 and k = 1 blocks do) are merged, so the
    result is in canonical form.  Blocks must be ordered and disjoint up
    to touching endpoints.
    """
    if count != int(count) or count < min_index:
        raise ValueError(f"count must be an integer >= {min_index}, got {count}")
    count = int(count)
    if gap_law is None:
        gap_law = lambda k: (float(k) * float(k), float(k) * float(k) + 1.0)
    blocks = []
    for k in range(min_index, count + 1):
        a, b = gap_law(k)
        a, b = float(a), float(b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise OverflowError(f"block {k} endpoints are not finite: ({a}, {b})")
        if not a < b:
            raise OverflowError(
                f"block {k} collapsed at ({a}, {b}); endpoints are not representable"
            )
        if blocks and a < blocks[-1][1]:
            raise ValueError(f"block {k} starts at {a} before block {k-1} ends")
        blocks.append((a, b))
    bp: list[float] = []
    pc: list[PowerPiece] = []
    for a, b in blocks:
        if bp and a == bp[-1]:
            # touching blocks fuse: drop the closing breakpoint of the
            # previous block and keep the indicator running
            bp.pop()
            pc.pop()
        else:
            bp.append(a)
            pc.append(PowerPiece(1.0, 0.0))
        bp.append(b)
        pc.append(PowerPiece(0.0, 0.0))
    return PiecewisePowerFn(tuple(bp), tuple(pc))


def make_step_profile(
    breakpoints: Sequence[float], values: Sequence[float]
) -> PiecewisePowerFn:
    """Step profile with the given values on consecutive intervals, 0 after."""
    bp = tuple(float(b) for b in breakpoints)
    vals = tuple(float(v) for v in values)
    if len(vals) != len(bp) - 1:
        raise ValueError(
            f"need one value per gap: {len(bp)} breakpoints, {len(vals)} values"
        )
    pieces = tuple(PowerPiece(v, 0.0) for v in vals) + (PowerPiece(0.0, 0.0),)
    return PiecewisePowerFn(bp, pieces)


# -- moment integrals ----------------------------------------------------


@functools.lru_cache(maxsize=512)
def _moment_tables(f: PiecewisePowerFn, n: int):
    """Prefix tables for O(log m) moment evaluation at arbitrary x.

    Returns (b, c, m, prefix_moment, prefix_neg_log) where per piece i
        m_i        = n - beta_i,
        prefix_moment[i]  = int_0^{b_i} f rho^(n-1) drho,
        prefix_neg_log[i] = int_0^{b_i} f rho^(n-1) (-ln rho) drho,
    so that the log moment at x is ln(x) * prefix_moment + prefix_neg_log
    plus the partial piece through x.
    """
    b = np.asarray(f.breakpoints)
    c = np.asarray([p.c for p in f.pieces])
    beta = np.asarray([p.beta for p in f.pieces])
    m = float(n) - beta

    lo = b
    hi = np.append(b[1:], np.inf)
    full = np.zeros_like(c)
    neg_log = np.zeros_like(c)
    for i in range(len(c) - 1):
        if c[i] == 0.0:
            continue
        a, t, mi, ci = lo[i], hi[i], m[i], c[i]
        if mi > 0.0:
            full[i] = ci * (t**mi - a**mi) / mi
            ha = 0.0 if a == 0.0 else a**mi * (math.log(a) / mi - 1.0 / mi**2)
            ht = t**mi * (math.log(t) / mi - 1.0 / mi**2)
            neg_log[i] = -ci * (ht - ha)
        elif mi == 0.0:
            # beta = n away from the origin: logarithmic mass
            full[i] = ci * math.log(t / a)
            neg_log[i] = -ci * (math.log(t) ** 2 - math.log(a) ** 2) / 2.0
        else:
            full[i] = ci * (t**mi - a**mi) / mi
            ha = a**mi * (math.log(a) / mi - 1.0 / mi**2)
            ht = t**mi * (math.log(t) / mi - 1.0 / mi**2)
            neg_log[i] = -ci * (ht - ha)
    prefix_moment = np.concatenate(([0.0], np.cumsum(full)))
    prefix_neg_log = np.concatenate(([0.0], np.cumsum(neg_log)))
    return b, c, m, prefix_moment, prefix_neg_log


def _check_moment_args(f: PiecewisePowerFn, n: int) -> None:
    if n != int(n) or n < 1:
        raise ValueError(f"weight dimension must be a positive integer, got {n}")
    first = f.pieces[0]
    if f.breakpoints[0] == 0.0 and first.c > 0.0 and first.beta >= n:
        raise NonIntegrableError(
            f"moment integral diverges at 0: beta={first.beta:g} >= n={n}"
        )


def moment_integral(f: PiecewisePowerFn, x, n: int = 1):
    """Exact int_0^x f(rho) rho^(n-1) drho.  x may be scalar or array."""
    _check_moment_args(f, n)
    b, c, m, prefix, _ = _moment_tables(f, int(n))
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs)
    if np.any(~np.isfinite(xs)) or np.any(xs < 0.0):
        raise ValueError("x must be finite and >= 0")
    idx = np.searchsorted(b, xs, side="right") - 1
    safe = np.maximum(idx, 0)
    lo, mi, ci = b[safe], m[safe], c[safe]
    with np.errstate(divide="ignore", invalid="ignore"):
        part = np.where(
            mi != 0.0,
            ci * (xs**mi - lo**mi) / np.where(mi != 0.0, mi, 1.0),
            ci * np.log(np.where(lo > 0.0, xs / np.where(lo > 0.0, lo, 1.0), 1.0)),
        )
    part = np.where((idx >= 0) & (ci > 0.0) & (xs > lo), part, 0.0)
    out = prefix[safe] * (idx >= 0) + part
    return float(out[0]) if scalar else out


def log_moment_integral(f: PiecewisePowerFn, x, n: int = 1):
    """Exact int_0^x f(rho) rho^(n-1) ln(x/rho) drho.

    Equals the iterated integral int_0^x t^(-1) [int_0^t f rho^(n-1) drho] dt,
    which is how the two moment kinds are cross-checked in the tests.
    """
    _check_moment_args(f, n)
    b, c, m, prefix, prefix_neg_log = _moment_tables(f, int(n))
    xs = np.asarray(x, dtype=float)
    scalar = xs.ndim == 0
    xs = np.atleast_1d(xs)
    if np.any(~np.isfinite(xs)) or np.any(xs < 0.0):
        raise ValueError("x must be finite and >= 0")
    idx = np.searchsorted(b, xs, side="right") - 1
    safe = np.maximum(idx, 0)
    lo, mi, ci = b[safe], m[safe], c[safe]
    pos = xs > 0.0
    lx = np.log(np.where(pos, xs, 1.0))

    with np.errstate(divide="ignore", invalid="ignore"):
        # partial piece int_lo^x rho^(m-1) ln(x/rho) drho via the
        # antiderivative rho^m (ln(x/rho)/m + 1/m^2)
        xm = np.where(pos, xs, 1.0) ** mi
        lom = np.where(lo > 0.0, lo, 1.0) ** mi
        f_at_x = xm / np.where(mi != 0.0, mi**2, 1.0)
        f_at_lo = np.where(
            lo > 0.0,
            lom * ((lx - np.log(np.where(lo > 0.0, lo, 1.0))) / np.where(mi != 0.0, mi, 1.0)
                   + 1.0 / np.where(mi != 0.0, mi**2, 1.0)),
            0.0,
        )
        part = ci * (f_at_x - f_at_lo)
        # beta = n pieces use -(ln(x/rho))^2 / 2 instead
        lr = lx - np.log(np.where(lo > 0.0, lo, 1.0))
        part_log = ci * lr**2 / 2.0
        part = np.where(mi != 0.0, part, part_log)
    part = np.where((idx >= 0) & (ci > 0.0) & (xs > lo), part, 0.0)
    head = np.where(idx >= 0, lx * prefix[safe] + prefix_neg_log[safe], 0.0)
    out = np.where(pos, head + part, 0.0)
    return float(out[0]) if scalar else out


def _moments_scalar(f: PiecewisePowerFn, n: int, x: float) -> tuple[float, float]:
    """(moment, log moment) at one x; cheap path for scalar root solves.

    No argument validation: callers classify integrability first.
    """
    if x <= 0.0:
        return 0.0, 0.0
    b, c, m, prefix, prefix_neg_log = _moment_tables(f, int(n))
    i = int(np.searchsorted(b, x, side="right")) - 1
    if i < 0:
        return 0.0, 0.0
    lx = math.log(x)
    mom = float(prefix[i])
    lmom = lx * mom + float(prefix_neg_log[i])
    ci, mi, lo = float(c[i]), float(m[i]), float(b[i])
    if ci > 0.0 and x > lo:
        if mi != 0.0:
            xm = x**mi
            lom = lo**mi if lo > 0.0 else 0.0
            mom += ci * (xm - lom) / mi
            f_x = xm / (mi * mi)
            f_lo = (
                lom * ((lx - math.log(lo)) / mi + 1.0 / (mi * mi)) if lo > 0.0 else 0.0
            )
            lmom += ci * (f_x - f_lo)
        else:
            lr = lx - math.log(lo)
            mom += ci * lr
            lmom += ci * lr * lr / 2.0
    return mom, lmom


# -- JSON function specs ---------------------------------------------------


def function_from_json(doc: dict) -> PiecewisePowerFn:
    """Build a profile from {"breakpoints": [...], "pieces": [{"c","beta"}]}.

    Validation reports the first violation with a path into the document,
    e.g. ``pieces[2].c: must be >= 0``.
    """
    if not isinstance(doc, dict):
        raise SpecValidationError("$", f"expected an object, got {type(doc).__name__}")
    for key in ("breakpoints", "pieces"):
        if key not in doc:
            raise SpecValidationError(key, "missing required key")
    bp = doc["breakpoints"]
    pc = doc["pieces"]
    if not isinstance(bp, list) or not bp:
        raise SpecValidationError("breakpoints", "must be a non-empty array")
    for i, v in enumerate(bp):
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
            raise SpecValidationError(f"breakpoints[{i}]", "must be a finite number")
        if v < 0:
            raise SpecValidationError(f"breakpoints[{i}]", "must be >= 0")
        if i > 0 and v <= bp[i - 1]:
            raise SpecValidationError(
                f"breakpoints[{i}]", f"must exceed breakpoints[{i-1}] = {bp[i-1]:g}"
            )
    if not isinstance(pc, list):
        raise SpecValidationError("pieces", "must be an array")
    if len(pc) != len(bp):
        raise SpecValidationError(
            "pieces", f"expected {len(bp)} entries to match breakpoints, got {len(pc)}"
        )
    pieces = []
    for i, entry in enumerate(pc):
        if not isinstance(entry, dict):
            raise SpecValidationError(f"pieces[{i}]", "must be an object with c and beta")
        for key in ("c", "beta"):
            if key not in entry:
                raise SpecValidationError(f"pieces[{i}].{key}", "missing required key")
            v = entry[key]
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise SpecValidationError(f"pieces[{i}].{key}", "must be a finite number")
            if v < 0:
                raise SpecValidationError(f"pieces[{i}].{key}", "must be >= 0")
        pieces.append(PowerPiece(float(entry["c"]), float(entry["beta"])))
    return PiecewisePowerFn(tuple(float(v) for v in bp), tuple(pieces))


def function_to_json(f: PiecewisePowerFn) -> dict:
    return {
        "breakpoints": list(f.breakpoints),
        "pieces": [{"c": p.c, "beta": p.beta} for p in f.pieces],
    }


def load_function_spec(path: str) -> PiecewisePowerFn:
    """Read and validate a JSON function spec from a file."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecValidationError("$", f"invalid JSON: {exc}") from exc
    return function_from_json(doc)
