import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from rsv.model.imdp import ImdpModel, Violation, row_violations
from rsv.utils.arrays import frozen_array


class MissingPolicyError(ValueError):
    def __init__(self, t: int, x: str):
        self.t, self.x = t, x
        super().__init__(f"policy has no rule at (t={t}, x={x})")


class Policy(BaseModel):
    """Time-varying randomized policy, `rules[t, x]` is a row over actions.

    Shape (horizon, |X|, |A|); undefined rules are NaN, rows of absorbing
    states are ignored.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    rules: np.ndarray

    @field_validator("rules", mode="before")
    @classmethod
    def freeze_rules(cls, value) -> np.ndarray:
        rules = frozen_array(value)
        if rules.ndim != 3:
            raise ValueError(f"policy rules must be 3-dimensional, got {rules.ndim}")
        return rules

    @classmethod
    def mix(cls, first: "Policy", second: "Policy", weight: float) -> "Policy":
        """The `weight`-mixture of two policies, row by row."""
        return cls(rules=weight * first.rules + (1.0 - weight) * second.rules)


def validate_policy(model: ImdpModel, policy: Policy) -> list[Violation]:
    expected = (model.horizon, model.partition.size, len(model.actions))
    if policy.rules.shape != expected:
        return [
            Violation(
                check=f"policy has shape {policy.rules.shape}, expected {expected}"
            )
        ]
    living = model.partition.living_indices
    states = model.states
    return row_violations(
        policy.rules[:, living],
        lambda i: {"t": i[0], "x": states[living[i[1]]]},
    )
