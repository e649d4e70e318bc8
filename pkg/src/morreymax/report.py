"""Delimited, JSON and figure output for norms and verification suites.

Floats are rendered with %.12g so identical runs produce byte-identical
files.  Figures are drawn with the Agg backend and land next to the
delimited output: a ratio scatter for equivalence suites, growth curves
for the counterexample table.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .morrey import NormResult
from .operators import MaximalEvaluation
from .verify import EquivalenceReport


def fmt(value) -> str:
    """Stable scalar rendering: %.12g for floats, plain str otherwise."""
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return f"{value:.12g}"
    if value is None:
        return ""
    return str(value)


def norm_result_row(result: NormResult) -> list[str]:
    if isinstance(result.argmax, tuple):
        argmax = f"{result.argmax[0]:.12g}..{result.argmax[1]:.12g}"
    else:
        argmax = fmt(result.argmax)
    return [result.functional, fmt(result.value), argmax, fmt(result.refine_delta)]


def norm_result_csv(result: NormResult) -> str:
    lines = ["functional,value,argmax,refine_delta", ",".join(norm_result_row(result))]
    return "\n".join(lines) + "\n"


def maximal_rows_csv(evaluations: list[MaximalEvaluation]) -> str:
    lines = ["x,value,a,b"]
    for ev in evaluations:
        if ev.interval is None:
            lines.append(f"{fmt(ev.point)},{fmt(ev.value)},,")
        else:
            a, b = ev.interval
            lines.append(f"{fmt(ev.point)},{fmt(ev.value)},{fmt(a)},{fmt(b)}")
    return "\n".join(lines) + "\n"


def report_csv(report: EquivalenceReport) -> str:
    """One row per instance record; columns in first-seen order."""
    columns: list[str] = []
    for row in report.rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    out = [",".join(columns)]
    for row in report.rows:
        out.append(",".join(fmt(row.get(col)) for col in columns))
    return "\n".join(out) + "\n"


def write_report_files(report: EquivalenceReport, outdir: str | Path) -> dict[str, Path]:
    """Write {suite}.csv, {suite}.json and {suite}.png; returns the paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = {
        "csv": outdir / f"{report.suite}.csv",
        "json": outdir / f"{report.suite}.json",
        "png": outdir / f"{report.suite}.png",
    }
    paths["csv"].write_text(report_csv(report), encoding="utf-8")
    summary = report.to_json_summary()
    summary["notes"] = report.notes
    summary["failures"] = report.failures
    paths["json"].write_text(
        json.dumps(_json_safe(summary), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    render_report_figure(report, paths["png"])
    return paths


def _json_safe(obj):
    """Strict-JSON copy: non-finite floats become their string names."""
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return fmt(obj)
    return obj


def render_report_figure(report: EquivalenceReport, path: str | Path) -> None:
    if report.suite == "counterexample":
        _growth_figure(report, path)
    else:
        _ratio_figure(report, path)


def _finite(xs):
    return [x for x in xs if isinstance(x, (int, float)) and math.isfinite(x)]


def _ratio_figure(report: EquivalenceReport, path: str | Path) -> None:
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ratios = report.ratios
    xs = range(len(ratios))
    ax.scatter(xs, ratios, s=14, color="#2060a0", label="per-instance ratio")
    finite = _finite(ratios)
    if finite:
        ax.axhline(min(finite), color="#808080", lw=0.8, ls="--")
        ax.axhline(max(finite), color="#808080", lw=0.8, ls="--")
        if min(finite) > 0 and max(finite) / min(finite) > 30:
            ax.set_yscale("log")
    ax.set_xlabel("instance")
    ax.set_ylabel("ratio")
    status = "pass" if report.passed else "FAIL"
    ax.set_title(f"suite {report.suite}: {status}")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _growth_figure(report: EquivalenceReport, path: str | Path) -> None:
    rows = report.rows
    ks = [r["K"] for r in rows]
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.plot(ks, [r["upper"] for r in rows], "o-", color="#2060a0", label="norm of the train")
    ax.plot(ks, [r["minorant"] for r in rows], "s-", color="#c03020", label="maximal-norm minorant")
    ax.plot(
        ks,
        [r["integral_minorant"] for r in rows],
        "d-",
        color="#e08030",
        label="integrated minorant",
    )
    logbound = [math.log(k) if k > 1 else math.nan for k in ks]
    ax.plot(ks, logbound, ":", color="#808080", label="ln K")
    ax.set_xscale("log")
    ax.set_xlabel("K")
    ax.set_ylabel("value")
    status = "pass" if report.passed else "FAIL"
    ax.set_title(f"bounded norms, unbounded images: {status}")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
