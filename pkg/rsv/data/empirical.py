import numpy as np
import pandas as pd
from pydantic import field_validator, model_validator

from rsv.data.sample_log import SampleLog, SampleLogError
from rsv.metric.radius import AmbiguityRadius, hoeffding_radius
from rsv.model.chain import InducedChain, absorbing_rows
from rsv.model.partition import StatePartition
from rsv.robust_dp.solver import SafetyTable, Scheme, solve_robust_safety
from rsv.utils.arrays import frozen_array


class CoverageError(ValueError):
    def __init__(self, message: str, gaps: list[tuple[int, str]] | None = None):
        self.gaps = gaps or []
        super().__init__(message)


class EmpiricalChain(InducedChain):
    """Counting estimator of the chain: rows are successor counts divided by N."""

    counts: np.ndarray
    n_samples: int

    @field_validator("counts", mode="before")
    @classmethod
    def freeze_counts(cls, value) -> np.ndarray:
        return frozen_array(value, dtype=np.int64)

    @model_validator(mode="after")
    def validate_counts(self) -> "EmpiricalChain":
        if self.counts.shape != self.rows.shape:
            raise ValueError("counts and rows must have the same shape")
        return self

    @classmethod
    def from_counts(
        cls, partition: StatePartition, counts: np.ndarray
    ) -> "EmpiricalChain":
        """Rows from a (horizon, |X|, |X|) count tensor; H rows must share one N."""
        counts = np.asarray(counts, dtype=np.int64)
        living = partition.living_indices
        per_cell = counts[:, living].sum(axis=-1)
        n_samples = int(per_cell.max()) if per_cell.size else 0
        if n_samples == 0 or (per_cell != n_samples).any():
            raise CoverageError("every (t, x) in H needs the same positive count")

        rows = absorbing_rows(partition, counts.shape[0])
        rows[:, living] = counts[:, living] / n_samples
        return cls(
            partition=partition,
            horizon=counts.shape[0],
            rows=rows,
            counts=counts,
            n_samples=n_samples,
        )


def empirical_chain(
    log: SampleLog, partition: StatePartition, horizon: int
) -> EmpiricalChain:
    """Empirical rows P^(y) = (1/N) #{i : successor of run i at (t, x) is y}."""
    if tuple(log.states) != tuple(partition.states):
        raise SampleLogError("sample log and model use different state orderings")
    n = partition.size
    if len(log) == 0:
        raise CoverageError("sample log holds no records")
    if log.t.min() < 0 or log.t.max() >= horizon:
        raise SampleLogError(f"time indices must lie in [0, {horizon - 1}]")
    absorbing = ~partition.living_mask[log.x]
    if absorbing.any():
        state = partition.states[log.x[np.argmax(absorbing)]]
        raise SampleLogError(f"observations from absorbing state {state!r}")

    cells = log.t * n + log.x
    stats = (
        pd.DataFrame({"cell": cells, "run": log.run})
        .groupby("cell")["run"]
        .agg(["count", "min", "max", "nunique"])
    )

    living = partition.living_indices
    expected = [t * n + i for t in range(horizon) for i in living]
    missing = [cell for cell in expected if cell not in stats.index]
    if missing:
        gaps = [(cell // n, partition.states[cell % n]) for cell in missing]
        shown = ", ".join(f"(t={t}, x={x})" for t, x in gaps[:10])
        raise CoverageError(f"{len(gaps)} (t, x) pairs have no samples: {shown}", gaps)

    sizes = stats["count"].unique()
    if len(sizes) != 1:
        raise CoverageError(
            f"unequal sample counts across (t, x): {sorted(int(s) for s in sizes)}"
        )
    n_samples = int(sizes[0])
    contiguous = (
        (stats["min"] == 1)
        & (stats["max"] == n_samples)
        & (stats["nunique"] == n_samples)
    )
    if not contiguous.all():
        cell = int(stats.index[~contiguous.to_numpy()][0])
        raise SampleLogError(
            f"runs at (t={cell // n}, x={partition.states[cell % n]}) "
            f"do not form the index set 1..{n_samples}"
        )

    flat = np.bincount(cells * n + log.y, minlength=horizon * n * n)
    return EmpiricalChain.from_counts(partition, flat.reshape(horizon, n, n))


def empirical_radius(emp: EmpiricalChain, delta: float, beta: float) -> AmbiguityRadius:
    return hoeffding_radius(emp.partition.size, emp.n_samples, beta, delta)


def solve_empirical_robust_safety(
    emp: EmpiricalChain, delta: float, beta: float, advance=None
) -> SafetyTable:
    """Robust table on the empirical rows with the inflated radius delta + rho."""
    radius = empirical_radius(emp, delta, beta)
    return solve_robust_safety(
        emp,
        radius.total,
        scheme=Scheme.EMPIRICAL_ROBUST,
        ambiguity=radius,
        advance=advance,
    )


def export_empirical_chain(emp: EmpiricalChain, radius: AmbiguityRadius) -> dict:
    """JSON document of the empirical rows, in the model file's chain layout."""
    partition = emp.partition
    per_t = []
    for t in range(emp.horizon):
        per_t.append(
            {
                x: {
                    y: float(emp.rows[t, i, j])
                    for j, y in enumerate(partition.states)
                    if emp.counts[t, i, j] > 0
                }
                for i, x in zip(partition.living_indices, partition.living)
            }
        )
    return {
        "states": list(partition.states),
        "goal": [s for s in partition.states if s in partition.goal],
        "unsafe": [s for s in partition.states if s in partition.unsafe],
        "horizon": emp.horizon,
        "chain": {"per_t": per_t},
        "n_samples": emp.n_samples,
        "rho": radius.rho,
    }
