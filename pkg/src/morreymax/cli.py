"""Command line front end: norms, maximal evaluation, verification suites.

Exit statuses partition cleanly: 0 success, 1 mathematical assertion
failure in a suite, 2 invalid input, 3 numerical non-convergence.
Identical commands with identical seeds produce byte-identical
delimited output.  The default output directory for suite artifacts is
taken from MORREYMAX_OUTDIR when set.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .errors import ConvergenceError, NonIntegrableError, SpecValidationError
from .morrey import (
    SupSearchConfig,
    log_functional,
    morrey_norm_direct_1d,
    reduced_functional,
)
from .operators import maximal_1d
from .profiles import (
    MorreyParams,
    PiecewisePowerFn,
    PowerPiece,
    RadialProfile,
    load_function_spec,
    make_indicator_train,
    make_step_profile,
)
from .report import (
    _json_safe,
    maximal_rows_csv,
    norm_result_csv,
    norm_result_row,
    write_report_files,
)
from .verify import (
    TestFamily,
    check_corollary1,
    check_lemma1_equivalence,
    check_lemma5_inequality,
    check_remark_decay,
    check_strong_type_p,
    check_theorem_boundedness,
    check_weak_type,
    run_counterexample,
)

SUITES = (
    "lemma1",
    "corollary1",
    "lemma5",
    "theorem",
    "counterexample",
    "weaktype",
    "strongtype",
    "decay",
)

EXIT_OK = 0
EXIT_SUITE_FAILED = 1
EXIT_INVALID = 2
EXIT_NO_CONVERGENCE = 3


@dataclass
class RunConfig:
    """Parsed invocation: what to run, on what, where output goes."""

    command: str
    fn_spec: str | None
    params: MorreyParams
    functional: str | None
    even: bool
    points: tuple[float, ...]
    suite: str | None
    seed: int
    count: int
    ks: tuple[int, ...]
    ps: tuple[float, ...]
    lambdas: tuple[float, ...]
    kind: str
    steps: int
    outdir: Path
    output: Path | None
    fmt: str
    search: SupSearchConfig


def parse_builtin(spec: str) -> PiecewisePowerFn:
    """Builtin function vocabulary, or a path to a JSON function spec.

    Builtins: ``zero``, ``block:a=0,b=1``, ``train:K=10``,
    ``power:beta=0.5``, ``steps:seed=7,count=40``.  Anything else is
    treated as a file path.
    """
    name, _, tail = spec.partition(":")
    args: dict[str, str] = {}
    if tail:
        for item in tail.split(","):
            key, eq, val = item.partition("=")
            if not eq:
                raise SpecValidationError("fn", f"malformed argument {item!r} in {spec!r}")
            args[key.strip()] = val.strip()

    def fetch(key: str, default: float | None = None) -> float:
        if key not in args:
            if default is None:
                raise SpecValidationError("fn", f"{name} needs {key}=, got {spec!r}")
            return default
        try:
            return float(args[key])
        except ValueError as exc:
            raise SpecValidationError("fn", f"{key} must be numeric, got {args[key]!r}") from exc

    if name == "zero":
        return make_step_profile([0.0, 1.0], [0.0])
    if name == "block":
        a, b = fetch("a", 0.0), fetch("b", 1.0)
        if not a < b:
            raise SpecValidationError("fn", f"block needs a < b, got a={a:g}, b={b:g}")
        return make_step_profile([a, b], [1.0])
    if name == "train":
        k = fetch("K")
        if k != int(k) or k < 0:
            raise SpecValidationError("fn", f"train needs an integer K >= 0, got {k}")
        return make_indicator_train(int(k))
    if name == "power":
        beta = fetch("beta")
        if not (0.0 <= beta and math.isfinite(beta)):
            raise SpecValidationError("fn", f"power needs beta >= 0, got {beta}")
        return PiecewisePowerFn((0.0,), (PowerPiece(1.0, beta),))
    if name == "steps":
        seed = fetch("seed")
        count = fetch("count", 40.0)
        if seed != int(seed) or count != int(count) or count < 1:
            raise SpecValidationError("fn", f"steps needs integer seed and count >= 1, got {spec!r}")
        family = TestFamily(seed=int(seed), count=1, kind="steps", steps=int(count))
        return family.profiles()[0]
    if not os.path.exists(spec):
        raise SpecValidationError(
            "fn", f"{spec!r} is neither a builtin (zero, block, train, power, steps) nor a file"
        )
    return load_function_spec(spec)


def _parse_float_list(text: str) -> tuple[float, ...]:
    items = [s for s in text.split(",") if s.strip()]
    try:
        return tuple(float(s) for s in items)
    except ValueError as exc:
        raise SpecValidationError("list", f"expected comma-separated numbers, got {text!r}") from exc


def _parse_int_list(text: str) -> tuple[int, ...]:
    vals = _parse_float_list(text)
    for v in vals:
        if v != int(v):
            raise SpecValidationError("list", f"expected integers, got {text!r}")
    return tuple(int(v) for v in vals)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="morreymax",
        description="Morrey norms, exact maximal functions and verification suites",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--lambda", dest="lam", default="0.5", help="lambda, or a comma list for suites")
        p.add_argument("--p", type=float, default=1.0, help="integrability exponent p >= 1")
        p.add_argument("--n", type=int, default=1, help="dimension")
        p.add_argument("--output", default=None, help="also write the report to this file")
        p.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
        p.add_argument("--points-per-decade", type=int, default=64)
        p.add_argument("--refinement-levels", type=int, default=3)
        p.add_argument("--bisect-rtol", type=float, default=1e-10)
        p.add_argument("--certificate-rtol", type=float, default=1e-6)

    p_norm = sub.add_parser("norm", help="Morrey norm or reduced/log functional of a profile")
    p_norm.add_argument("--fn", required=True, help="builtin spec or JSON path")
    p_norm.add_argument(
        "--functional", choices=("direct", "reduced", "log"), default="direct"
    )
    p_norm.add_argument("--even", action="store_true", help="reflect the profile to f(|x|) first")
    common(p_norm)

    p_max = sub.add_parser("maximal", help="exact maximal function values with witness intervals")
    p_max.add_argument("--fn", required=True)
    p_max.add_argument("--points", default="", help="comma-separated evaluation points")
    p_max.add_argument("--even", action="store_true")
    common(p_max)

    p_ver = sub.add_parser("verify", help="run a verification suite and write its report files")
    p_ver.add_argument("suite", choices=SUITES)
    p_ver.add_argument("--seed", type=int, default=42)
    p_ver.add_argument("--count", type=int, default=100)
    p_ver.add_argument("--kind", choices=("steps", "power", "mixed", "trains"), default="steps")
    p_ver.add_argument("--steps", type=int, default=40)
    p_ver.add_argument("--K", dest="ks", default="1,10,100,1000", help="train sizes")
    p_ver.add_argument("--ps", default="1.5,2,4", help="exponents for the strong-type suite")
    p_ver.add_argument(
        "--outdir",
        default=None,
        help="report directory (default: MORREYMAX_OUTDIR or the working directory)",
    )
    common(p_ver)
    return parser


def _run_config(ns: argparse.Namespace) -> RunConfig:
    lambdas = _parse_float_list(ns.lam)
    if not lambdas:
        raise SpecValidationError("lambda", "needs at least one value")
    search = SupSearchConfig(
        points_per_decade=ns.points_per_decade,
        refinement_levels=ns.refinement_levels,
        bisect_rtol=ns.bisect_rtol,
        certificate_rtol=ns.certificate_rtol,
    )
    params = MorreyParams(lam=lambdas[0], p=ns.p, dimension=ns.n)
    outdir = getattr(ns, "outdir", None) or os.environ.get("MORREYMAX_OUTDIR") or "."
    return RunConfig(
        command=ns.command,
        fn_spec=getattr(ns, "fn", None),
        params=params,
        functional=getattr(ns, "functional", None),
        even=getattr(ns, "even", False),
        points=_parse_float_list(getattr(ns, "points", "") or ""),
        suite=getattr(ns, "suite", None),
        seed=getattr(ns, "seed", 42),
        count=getattr(ns, "count", 100),
        ks=_parse_int_list(getattr(ns, "ks", "1,10,100,1000")),
        ps=_parse_float_list(getattr(ns, "ps", "1.5,2,4")),
        lambdas=lambdas,
        kind=getattr(ns, "kind", "steps"),
        steps=getattr(ns, "steps", 40),
        outdir=Path(outdir),
        output=Path(ns.output) if getattr(ns, "output", None) else None,
        fmt=ns.fmt,
        search=search,
    )


def _emit(text: str, output: Path | None) -> None:
    sys.stdout.write(text)
    if output is not None:
        output.write_text(text, encoding="utf-8")


def cmd_norm(config: RunConfig) -> int:
    f = parse_builtin(config.fn_spec)
    if config.functional == "direct":
        result = morrey_norm_direct_1d(f, config.params, config.search, even=config.even)
    else:
        profile = RadialProfile(f, dimension=config.params.dimension)
        run = reduced_functional if config.functional == "reduced" else log_functional
        result = run(profile, config.params, config.search)
    if config.fmt == "json":
        row = norm_result_row(result)
        doc = {
            "functional": row[0],
            "value": result.value,
            "argmax": row[2],
            "refine_delta": result.refine_delta,
        }
        _emit(json.dumps(_json_safe(doc), indent=2, sort_keys=True) + "\n", config.output)
    else:
        _emit(norm_result_csv(result), config.output)
    return EXIT_OK


def cmd_maximal(config: RunConfig) -> int:
    f = parse_builtin(config.fn_spec)
    if not f.is_step:
        raise SpecValidationError("fn", "maximal evaluation needs a piecewise-constant profile")
    for x in config.points:
        if not math.isfinite(x):
            raise SpecValidationError("points", f"points must be finite, got {x}")
    evaluations = [maximal_1d(f, x, even=config.even) for x in config.points]
    if config.fmt == "json":
        doc = [
            {"x": ev.point, "value": ev.value, "interval": ev.interval, "degenerate": ev.degenerate}
            for ev in evaluations
        ]
        _emit(json.dumps(_json_safe(doc), indent=2, sort_keys=True) + "\n", config.output)
    else:
        _emit(maximal_rows_csv(evaluations), config.output)
    return EXIT_OK


def cmd_verify(config: RunConfig) -> int:
    family = TestFamily(
        seed=config.seed,
        count=config.count,
        kind=config.kind,
        dimension=config.params.dimension,
        lambdas=config.lambdas,
        steps=config.steps,
    )
    lam = config.lambdas[0]
    if config.suite == "lemma1":
        report = check_lemma1_equivalence(family, config.search)
    elif config.suite == "corollary1":
        report = check_corollary1(family, config.search)
    elif config.suite == "lemma5":
        report = check_lemma5_inequality(family, config.search)
    elif config.suite == "theorem":
        report = check_theorem_boundedness(family, config.search)
    elif config.suite == "counterexample":
        report = run_counterexample(config.ks, lam, config.search)
    elif config.suite == "weaktype":
        trains = TestFamily(kind="trains", count=3, train_counts=(0, 10, 100))
        report = check_weak_type(trains, lam, config.search)
    elif config.suite == "strongtype":
        trains = TestFamily(kind="trains", count=3, train_counts=(0, 10, 50))
        report = check_strong_type_p(trains, config.ps, lam, config.search)
    else:
        report = check_remark_decay(cfg=config.search)
    paths = write_report_files(report, config.outdir)
    summary = report.to_json_summary()
    summary["files"] = {k: str(v) for k, v in paths.items()}
    sys.stdout.write(json.dumps(_json_safe(summary), indent=2, sort_keys=True) + "\n")
    return EXIT_OK if report.passed else EXIT_SUITE_FAILED


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        config = _run_config(ns)
        if config.command == "norm":
            return cmd_norm(config)
        if config.command == "maximal":
            return cmd_maximal(config)
        return cmd_verify(config)
    except ConvergenceError as exc:
        sys.stderr.write(f"error: did not converge: {exc}\n")
        return EXIT_NO_CONVERGENCE
    except (SpecValidationError, NonIntegrableError) as exc:
        sys.stderr.write(f"error: invalid input: {exc}\n")
        return EXIT_INVALID
    except (ValueError, OverflowError) as exc:
        sys.stderr.write(f"error: invalid input: {exc}\n")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
