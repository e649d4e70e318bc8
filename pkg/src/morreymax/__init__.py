"""Morrey norms, maximal operators, and radial reduction checks.

The package computes exact Morrey norms of piecewise-constant data on
the line, the reduced and log-kernel functionals that replace those
norms for radial decreasing profiles, and runs verification suites for
the equivalences, the boundedness result they imply, and the indicator
train counterexample showing how boundedness fails off the monotone
cone.
"""

from .errors import ConvergenceError, NonIntegrableError, SpecValidationError
from .morrey import (
    NormResult,
    SupSearchConfig,
    log_functional,
    morrey_norm_direct_1d,
    reduced_functional,
    weak_type_ratio,
)
from .operators import (
    MaximalEngine,
    MaximalEvaluation,
    RearrangedFn,
    decreasing_rearrangement,
    fractional_ball_functional,
    hardy_profile,
    hardy_radial,
    line_steps,
    maximal_1d,
    maximal_lower_bound_train,
    maximal_values,
    total_moment,
)
from .profiles import (
    MonotonicityReport,
    MorreyParams,
    PiecewisePowerFn,
    PowerPiece,
    RadialProfile,
    function_from_json,
    function_to_json,
    load_function_spec,
    log_moment_integral,
    make_indicator_train,
    make_step_profile,
    moment_integral,
    unit_ball_volume,
    validate_nonincreasing,
)
from .report import (
    maximal_rows_csv,
    norm_result_csv,
    render_report_figure,
    report_csv,
    write_report_files,
)
from .verify import (
    EquivalenceReport,
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

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "NonIntegrableError",
    "SpecValidationError",
    "NormResult",
    "SupSearchConfig",
    "log_functional",
    "morrey_norm_direct_1d",
    "reduced_functional",
    "weak_type_ratio",
    "MaximalEngine",
    "MaximalEvaluation",
    "RearrangedFn",
    "decreasing_rearrangement",
    "fractional_ball_functional",
    "hardy_profile",
    "hardy_radial",
    "line_steps",
    "maximal_1d",
    "maximal_lower_bound_train",
    "maximal_values",
    "total_moment",
    "MonotonicityReport",
    "MorreyParams",
    "PiecewisePowerFn",
    "PowerPiece",
    "RadialProfile",
    "function_from_json",
    "function_to_json",
    "load_function_spec",
    "log_moment_integral",
    "make_indicator_train",
    "make_step_profile",
    "moment_integral",
    "unit_ball_volume",
    "validate_nonincreasing",
    "maximal_rows_csv",
    "norm_result_csv",
    "render_report_figure",
    "report_csv",
    "write_report_files",
    "EquivalenceReport",
    "TestFamily",
    "check_corollary1",
    "check_lemma1_equivalence",
    "check_lemma5_inequality",
    "check_remark_decay",
    "check_strong_type_p",
    "check_theorem_boundedness",
    "check_weak_type",
    "run_counterexample",
    "__version__",
]
