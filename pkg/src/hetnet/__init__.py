"""Coverage, rate, and energy analysis for a massive MIMO cell with an
underlaid field of device-to-device pairs.

The closed-form results live in :mod:`hetnet.coverage` and
:mod:`hetnet.metrics`; :mod:`hetnet.montecarlo` is an independent
simulator used to validate them.  :mod:`hetnet.sweeps` drives parameter
grids and ships the named presets, and :mod:`hetnet.cli` exposes it all
on the command line.
"""

from .config import (
    DerivedConstants,
    SystemConfig,
    build_config,
    db_to_linear,
    dbm_to_watts,
    default_raw,
    derive_constants,
    linear_to_db,
    load_config,
    table_defaults,
    watts_to_dbm,
)
from .coverage import (
    CoverageEval,
    CoverageQuery,
    QuadratureSpec,
    cue_coverage,
    cue_coverage_curve,
    cue_coverage_interference_limited,
    cue_coverage_no_d2d,
    cue_coverage_zf_equal,
    d2d_coverage,
    d2d_coverage_curve,
    d2d_coverage_high_snr,
)
from .errors import (
    DomainError,
    GuardExceeded,
    InvalidRange,
    MissingParameter,
    PreconditionViolated,
    RankDeficient,
    UnboundedObjective,
)
from .metrics import (
    PowerModel,
    RateResult,
    average_sum_rate,
    best_constant_rate,
    energy_efficiency,
    optimal_d2d_density,
    total_power,
)
from .montecarlo import McEstimate, draw_sinr_samples, estimate_coverage
from .sweeps import (
    PRESETS,
    Axis,
    SweepResult,
    SweepSpec,
    ValidationReport,
    emit_csv,
    load_sweep_spec,
    run_sweep,
    validate_case,
)

__version__ = "0.1.0"

__all__ = [
    "Axis",
    "CoverageEval",
    "CoverageQuery",
    "DerivedConstants",
    "DomainError",
    "GuardExceeded",
    "InvalidRange",
    "McEstimate",
    "MissingParameter",
    "PRESETS",
    "PowerModel",
    "PreconditionViolated",
    "QuadratureSpec",
    "RankDeficient",
    "RateResult",
    "SweepResult",
    "SweepSpec",
    "SystemConfig",
    "UnboundedObjective",
    "ValidationReport",
    "average_sum_rate",
    "best_constant_rate",
    "build_config",
    "cue_coverage",
    "cue_coverage_curve",
    "cue_coverage_interference_limited",
    "cue_coverage_no_d2d",
    "cue_coverage_zf_equal",
    "d2d_coverage",
    "d2d_coverage_curve",
    "d2d_coverage_high_snr",
    "db_to_linear",
    "dbm_to_watts",
    "default_raw",
    "derive_constants",
    "draw_sinr_samples",
    "emit_csv",
    "energy_efficiency",
    "estimate_coverage",
    "linear_to_db",
    "load_config",
    "load_sweep_spec",
    "optimal_d2d_density",
    "run_sweep",
    "table_defaults",
    "total_power",
    "validate_case",
    "watts_to_dbm",
]
