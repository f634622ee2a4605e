from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from rsv.data.empirical import EmpiricalChain, solve_empirical_robust_safety
from rsv.data.perturbation import PerturbationSpec
from rsv.data.simulate import simulate_counts
from rsv.metric.distance import DistributionShapeError
from rsv.model.chain import InducedChain
from rsv.model.partition import StatePartition
from rsv.robust_dp.solver import solve_robust_safety
from rsv.utils.env import debug
from rsv.utils.ray_executor import RayExecutor

BOUND_TOLERANCE = 1e-9


class BoundTrialReport(BaseModel):
    """Outcome of repeated sample-and-solve trials against the exact robust table.

    A trial is a violation when any living (t, x) of the empirical robust
    table falls below the exact robust value at radius delta.
    """

    model_config = ConfigDict(frozen=True)

    trials: int
    violations: int
    empirical_confidence: float
    beta: float
    delta: float
    n_runs: int
    per_trial_max_gap: list[float]
    cell_violations: list[list[int]]

    @property
    def meets_confidence(self) -> bool:
        return self.empirical_confidence >= 1.0 - self.beta


def averaged_true_chain(
    partition: StatePartition, kernels: np.ndarray | list[np.ndarray]
) -> InducedChain:
    """Mean of per-run kernel families (N, horizon, |X|, |X|) as a chain."""
    try:
        stacked = np.stack([np.asarray(k, dtype=float) for k in kernels])
    except ValueError as e:
        raise DistributionShapeError(f"per-run kernels differ in shape: {e}") from e
    if stacked.ndim != 4 or stacked.shape[2:] != (partition.size, partition.size):
        raise DistributionShapeError(
            f"expected kernels of shape (N, horizon, {partition.size}, "
            f"{partition.size}), got {stacked.shape}"
        )
    return InducedChain(
        partition=partition, horizon=stacked.shape[1], rows=stacked.mean(axis=0)
    )


def trial_seed(seed: int, trial: int) -> int:
    return int(np.random.SeedSequence([seed, trial]).generate_state(1)[0])


def validate_bound(
    chain: InducedChain,
    delta: float,
    beta: float,
    n_runs: int,
    trials: int,
    seed: int,
    threads: int = 1,
    advance: Optional[Callable[[], None]] = None,
) -> BoundTrialReport:
    """Count how often the data-driven robust table fails to dominate the exact one."""
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    reference = solve_robust_safety(chain, delta).living_values()

    def run_trial(trial: int) -> np.ndarray:
        spec = PerturbationSpec(delta=delta, seed=trial_seed(seed, trial))
        counts = simulate_counts(chain, spec, n_runs)
        emp = EmpiricalChain.from_counts(chain.partition, counts)
        table = solve_empirical_robust_safety(emp, delta, beta)
        return reference - table.living_values()

    results = RayExecutor.map(
        run_trial, list(range(trials)), threads=threads, advance=advance
    )
    gaps = np.stack(results)
    violated = gaps > BOUND_TOLERANCE
    violations = int(violated.reshape(trials, -1).any(axis=1).sum())
    debug(f"bound check: {violations} of {trials} trials violated")
    return BoundTrialReport(
        trials=trials,
        violations=violations,
        empirical_confidence=1.0 - violations / trials,
        beta=beta,
        delta=delta,
        n_runs=n_runs,
        per_trial_max_gap=[float(g) for g in gaps.reshape(trials, -1).max(axis=1)],
        cell_violations=violated.sum(axis=0).tolist(),
    )
