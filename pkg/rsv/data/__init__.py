from .sample_log import SampleLog, SampleLogError, read_sample_log, write_sample_log
from .perturbation import (
    PerturbationError,
    PerturbationMode,
    PerturbationSpec,
    per_run_kernels,
)
from .simulate import block_count, simulate_counts, simulate_samples
from .empirical import (
    CoverageError,
    EmpiricalChain,
    empirical_chain,
    empirical_radius,
    export_empirical_chain,
    solve_empirical_robust_safety,
)
