from enum import Enum
from typing import Callable, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from rsv.metric.radius import AmbiguityRadius, RadiusDomainError
from rsv.model.chain import InducedChain
from rsv.model.partition import StatePartition
from rsv.robust_dp.backup import robust_backup
from rsv.utils.arrays import frozen_array
from rsv.utils.env import debug


class Scheme(str, Enum):
    NOMINAL = "nominal"
    ROBUST = "robust"
    EMPIRICAL_ROBUST = "empirical-robust"


class BackupError(ValueError):
    def __init__(self, t: int, x: str, cause: Exception):
        self.t, self.x, self.cause = t, x, cause
        super().__init__(f"backup failed at (t={t}, x={x}): {cause}")


class SafetyTable(BaseModel):
    """Safety values per (t, x), shape (horizon + 1, |X|)."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    partition: StatePartition
    horizon: int
    values: np.ndarray
    scheme: Scheme
    radius: float = 0.0
    ambiguity: Optional[AmbiguityRadius] = None

    @field_validator("values", mode="before")
    @classmethod
    def freeze_values(cls, value) -> np.ndarray:
        return frozen_array(value)

    def value(self, t: int, x: str) -> float:
        return float(self.values[t, self.partition.index(x)])

    def living_values(self) -> np.ndarray:
        """Values on [0 : horizon-1] x H, the cells a verdict ranges over."""
        return self.values[: self.horizon, self.partition.living_indices]

    def witness(self) -> tuple[int, str, float]:
        """(t, x, value) of the largest living value; first in (t, x) order."""
        living = self.living_values()
        t, i = np.unravel_index(int(np.argmax(living)), living.shape)
        x = self.partition.states[self.partition.living_indices[i]]
        return int(t), x, float(living[t, i])


class Verdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    status: Literal["safe", "unsafe"]
    p: float
    t: int
    x: str
    value: float

    @property
    def safe(self) -> bool:
        return self.status == "safe"


def boundary_values(partition: StatePartition, horizon: int) -> np.ndarray:
    """1 on U and 0 on E at every t; 0 on H at the horizon."""
    values = np.zeros((horizon + 1, partition.size))
    values[:, partition.unsafe_mask] = 1.0
    return values


def solve_robust_safety(
    chain: InducedChain,
    radius: float = 0.0,
    scheme: Optional[Scheme] = None,
    ambiguity: Optional[AmbiguityRadius] = None,
    distances: Optional[np.ndarray] = None,
    advance: Optional[Callable[[], None]] = None,
) -> SafetyTable:
    """Backward induction of the worst-case unsafe-before-goal probability.

    Rows are perturbed independently per (t, x) inside the radius ball.
    """
    if radius < 0:
        raise RadiusDomainError(f"radius must be nonnegative, got {radius}")
    if scheme is None:
        scheme = Scheme.NOMINAL if radius == 0 else Scheme.ROBUST

    partition = chain.partition
    values = boundary_values(partition, chain.horizon)

    for t in range(chain.horizon - 1, -1, -1):
        for i in partition.living_indices:
            x = partition.states[i]
            try:
                result = robust_backup(
                    chain.rows[t, i], values[t + 1], x, radius, partition, distances
                )
            except (ValueError, ArithmeticError) as e:
                raise BackupError(t, x, e) from e
            values[t, i] = result.value
        if advance is not None:
            advance()

    debug(f"solved {scheme.value} table with radius {radius:.6g}")
    return SafetyTable(
        partition=partition,
        horizon=chain.horizon,
        values=values,
        scheme=scheme,
        radius=radius,
        ambiguity=ambiguity,
    )


def is_robust_p_safe(table: SafetyTable, p: float) -> Verdict:
    """Safe iff the largest value over [0 : horizon-1] x H is at most p."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    t, x, value = table.witness()
    status = "safe" if value <= p else "unsafe"
    return Verdict(status=status, p=p, t=t, x=x, value=value)
