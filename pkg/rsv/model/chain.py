import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    PositiveInt,
    field_validator,
    model_validator,
)

from rsv.model.imdp import (
    ImdpModel,
    ModelValidationError,
    row_violations,
    validate_model,
)
from rsv.model.partition import StatePartition
from rsv.model.policy import MissingPolicyError, Policy, validate_policy
from rsv.utils.arrays import frozen_array


class InducedChain(BaseModel):
    """Policy-marginalised Markov chain, `rows[t, x]` is P_{t,x}(.).

    Shape (horizon, |X|, |X|). Rows of goal and unsafe states are the
    absorbing unit rows.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    partition: StatePartition
    horizon: PositiveInt
    rows: np.ndarray

    @field_validator("rows", mode="before")
    @classmethod
    def freeze_rows(cls, value) -> np.ndarray:
        return frozen_array(value)

    def __init__(self, **data):
        super().__init__(**data)
        # ModelValidationError must reach the caller unwrapped by pydantic
        states = self.partition.states
        violations = row_violations(
            self.rows, lambda i: {"t": i[0], "x": states[i[1]]}
        )
        if violations:
            raise ModelValidationError(violations)

    @model_validator(mode="after")
    def validate_shape(self) -> "InducedChain":
        n = self.partition.size
        if self.rows.shape != (self.horizon, n, n):
            raise ValueError(
                f"chain rows have shape {self.rows.shape}, "
                f"expected {(self.horizon, n, n)}"
            )
        return self

    @classmethod
    def from_living_rows(
        cls, partition: StatePartition, living_rows: np.ndarray
    ) -> "InducedChain":
        """Build a chain from rows of the living states, shape (T, |H|, |X|)."""
        living_rows = np.asarray(living_rows, dtype=float)
        rows = absorbing_rows(partition, living_rows.shape[0])
        rows[:, partition.living_indices] = living_rows
        return cls(partition=partition, horizon=living_rows.shape[0], rows=rows)

    @property
    def states(self) -> tuple[str, ...]:
        return self.partition.states

    def row(self, t: int, x: str) -> np.ndarray:
        return self.rows[t, self.partition.index(x)]

    def matrix(self, t: int) -> np.ndarray:
        return self.rows[t]

    def family(self, t: int) -> np.ndarray:
        """Rows for every k in [t : horizon-1]."""
        return self.rows[t:]

    def living_rows(self) -> np.ndarray:
        return self.rows[:, self.partition.living_indices]

    def residual_living_mass(self) -> np.ndarray:
        """Probability of still being in H at the horizon, per (t, x).

        Zero everywhere when every path is absorbed by the horizon.
        Shape (horizon + 1, |X|).
        """
        living = self.partition.living_mask.astype(float)
        mass = np.zeros((self.horizon + 1, self.partition.size))
        mass[self.horizon] = living
        for t in range(self.horizon - 1, -1, -1):
            mass[t] = living * (self.rows[t] @ mass[t + 1])
        return mass


def absorbing_rows(partition: StatePartition, horizon: int) -> np.ndarray:
    n = partition.size
    return np.broadcast_to(np.eye(n), (horizon, n, n)).copy()


def induce_chain(model: ImdpModel, policy: Policy) -> InducedChain:
    """Marginalise the model's action rows under `policy`."""
    violations = validate_model(model)
    if violations:
        raise ModelValidationError(violations)

    living = model.partition.living_indices
    rules = policy.rules
    if rules.shape != (model.horizon, model.partition.size, len(model.actions)):
        raise ModelValidationError(validate_policy(model, policy))

    undefined = np.isnan(rules[:, living]).any(axis=-1)
    if undefined.any():
        t, i = (int(v) for v in np.argwhere(undefined)[0])
        raise MissingPolicyError(t, model.states[living[i]])

    violations = validate_policy(model, policy)
    if violations:
        raise ModelValidationError(violations)

    living_rows = np.einsum(
        "txa,txay->txy", rules[:, living], model.kernel[:, living]
    )
    return InducedChain.from_living_rows(model.partition, living_rows)
