from .trajectory import (
    HitKind,
    MonteCarloEstimate,
    StartStateError,
    TrajectoryOutcome,
    mc_safety,
    simulate_trajectory,
)
from .exhaustive import InstanceTooLargeError, exhaustive_safety, kappa_sum_safety
from .bound import BoundTrialReport, averaged_true_chain, validate_bound
