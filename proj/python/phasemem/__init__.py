"""Phase-field solver with thermal memory."""

from ._phasemem import (
    ConfigError,
    DomainError,
    MemoryKernel,
    MonotoneGraph,
    NumericError,
    PreconditionError,
    RunSettings,
    StepFailure,
    SweepFailure,
    check_positive_type_sufficient,
    cumulative_kernel,
    estimate_coercivity_constant,
    eval_kernel,
    kernel_report,
    l1_deviation,
    load_config,
    mms,
    parse_config,
    resolvent,
    run,
    solve_scalar_log,
    sweep,
    yosida,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
