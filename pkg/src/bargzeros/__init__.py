"""Zero sets of noisy Bargmann transforms on finite grids.

Simulates the weighted transform of "deterministic signal + complex white
noise", detects its zeros with the AMN / MGN / ST grid algorithms, and
validates the resulting point processes against closed-form benchmarks
(Kac-Rice intensity, expected counts) and against high-resolution
reference runs (consistency certificates, failure-probability tables).
"""

from .errors import (
    BoundaryError,
    ConfigError,
    DataError,
    DomainError,
    SubsampleError,
)
from .grid import GridSpec, Method, PointSet, make_grid, subsample
from .signal import (
    SignalKind,
    SignalModel,
    bargmann_closed_form,
    bargmann_derivative,
    intensity_scale,
    model_for,
    parse_signal,
    sample_signal,
)
from .simulate import (
    FieldSource,
    NoiseDraw,
    WeightedField,
    draw_noise,
    evaluate_continuous,
    read_field,
    refine_zero,
    synthesize_field,
    window,
    write_field,
    zero_noise,
)
from .detect import (
    amn,
    amn_margin,
    amn_select,
    mgn,
    raw_threshold,
    read_pointset_csv,
    sieve,
    st,
    write_pointset_csv,
)
from .stats import (
    StatRow,
    count_error_estimator,
    count_error_summary,
    count_in_box,
    covariance_probe,
    expected_count,
    intensity_estimator,
    rho1,
    variance_benchmark,
    write_stats_csv,
)
from .consistency import (
    ConsistencyRow,
    MatchResult,
    aggregate_failure_table,
    certificate,
    failure_rate,
    greedy_match,
    wasserstein_within,
    write_consistency_csv,
)

__all__ = [
    "BoundaryError",
    "ConfigError",
    "DataError",
    "DomainError",
    "SubsampleError",
    "GridSpec",
    "Method",
    "PointSet",
    "make_grid",
    "subsample",
    "SignalKind",
    "SignalModel",
    "bargmann_closed_form",
    "bargmann_derivative",
    "intensity_scale",
    "model_for",
    "parse_signal",
    "sample_signal",
    "FieldSource",
    "NoiseDraw",
    "WeightedField",
    "draw_noise",
    "evaluate_continuous",
    "read_field",
    "refine_zero",
    "synthesize_field",
    "window",
    "write_field",
    "zero_noise",
    "amn",
    "amn_margin",
    "amn_select",
    "mgn",
    "raw_threshold",
    "read_pointset_csv",
    "sieve",
    "st",
    "write_pointset_csv",
    "StatRow",
    "count_error_estimator",
    "count_error_summary",
    "count_in_box",
    "covariance_probe",
    "expected_count",
    "intensity_estimator",
    "rho1",
    "variance_benchmark",
    "write_stats_csv",
    "ConsistencyRow",
    "MatchResult",
    "aggregate_failure_table",
    "certificate",
    "failure_rate",
    "greedy_match",
    "wasserstein_within",
    "write_consistency_csv",
]

__version__ = "0.1.0"
