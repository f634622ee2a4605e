from typing import Optional

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    PositiveInt,
    field_validator,
    model_validator,
)

from rsv.model.partition import StatePartition
from rsv.utils.arrays import frozen_array

STOCHASTIC_TOLERANCE = 1e-9


class Violation(BaseModel):
    model_config = ConfigDict(frozen=True)

    check: str
    t: Optional[int] = None
    x: Optional[str] = None
    a: Optional[str] = None

    def __str__(self) -> str:
        where = ", ".join(
            f"{name}={value}"
            for name, value in (("t", self.t), ("x", self.x), ("a", self.a))
            if value is not None
        )
        return f"({where}) {self.check}" if where else self.check


class ModelValidationError(ValueError):
    def __init__(self, violations: list[Violation]):
        self.violations = violations
        lines = "\n".join(f"  - {violation}" for violation in violations)
        super().__init__(f"{len(violations)} model violation(s):\n{lines}")


class ImdpModel(BaseModel):
    """Finite MDP with per-(t, x, a) nominal rows.

    `kernel` has shape (horizon, |X|, |A|, |X|). Rows of goal and unsafe
    states are not read: those states are absorbing. Missing rows are NaN.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    partition: StatePartition
    actions: tuple[str, ...]
    horizon: PositiveInt
    kernel: np.ndarray

    @field_validator("kernel", mode="before")
    @classmethod
    def freeze_kernel(cls, value) -> np.ndarray:
        return frozen_array(value)

    @model_validator(mode="after")
    def validate_shape(self) -> "ImdpModel":
        n = self.partition.size
        expected = (self.horizon, n, len(self.actions), n)
        if self.kernel.shape != expected:
            raise ValueError(
                f"kernel has shape {self.kernel.shape}, expected {expected}"
            )
        return self

    @property
    def states(self) -> tuple[str, ...]:
        return self.partition.states


def row_violations(
    rows: np.ndarray, labels, tolerance: float = STOCHASTIC_TOLERANCE
) -> list[Violation]:
    """Check rows (..., n) for missing, negative or non-normalised entries.

    `labels` maps the leading index tuple of an offending row to the
    keyword arguments (t, x, a) of its `Violation`.
    """
    violations = []
    missing = np.isnan(rows).any(axis=-1)
    negative = (np.nan_to_num(rows, nan=0.0) < 0).any(axis=-1)
    sums = np.nansum(rows, axis=-1)
    off = np.abs(sums - 1.0) > tolerance

    for index in np.argwhere(missing | negative | off):
        index = tuple(int(i) for i in index)
        if missing[index]:
            check = "missing row"
        elif negative[index]:
            check = "negative probability"
        else:
            check = f"row sums to {sums[index]:.12g}, not 1"
        violations.append(Violation(check=check, **labels(index)))
    return violations


def validate_model(model: ImdpModel) -> list[Violation]:
    """Return every broken invariant of `model`; an empty list means well formed."""
    violations = [Violation(check=problem) for problem in model.partition.check()]

    if len(set(model.actions)) != len(model.actions):
        violations.append(Violation(check="duplicate action identifier"))
    if violations:
        return violations

    living = model.partition.living_indices
    states, actions = model.states, model.actions
    violations.extend(
        row_violations(
            model.kernel[:, living],
            lambda i: {"t": i[0], "x": states[living[i[1]]], "a": actions[i[2]]},
        )
    )
    return violations
