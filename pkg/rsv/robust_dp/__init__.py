from .greedy import worst_case_expectation_greedy
from .backup import (
    BackupRangeError,
    BackupResult,
    NonStochasticRowError,
    dual_objective,
    kappa,
    payoff_vector,
    robust_backup,
    stage_cost,
)
from .solver import (
    BackupError,
    SafetyTable,
    Scheme,
    Verdict,
    is_robust_p_safe,
    solve_robust_safety,
)
from .intervals import implied_intervals
