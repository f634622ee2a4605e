import json
from pathlib import Path
from typing import Any, Optional

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PositiveInt,
    ValidationError,
    model_validator,
)

from rsv.model.imdp import (
    STOCHASTIC_TOLERANCE,
    ImdpModel,
    ModelValidationError,
    Violation,
    validate_model,
)
from rsv.model.partition import StatePartition
from rsv.model.policy import Policy, validate_policy

WILDCARD = "*"

Row = dict[str, float]


class ModelFileError(ValueError):
    pass


class KernelSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    stationary: Optional[dict[str, dict[str, Row]]] = None
    per_t: Optional[list[dict[str, dict[str, Row]]]] = None

    @model_validator(mode="after")
    def exactly_one(self) -> "KernelSection":
        if (self.stationary is None) == (self.per_t is None):
            raise ValueError("kernel needs exactly one of 'stationary' or 'per_t'")
        return self


class PolicySection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    stationary: Optional[dict[str, Row]] = None
    per_t: Optional[list[dict[str, Row]]] = None
    default: Optional[dict[str, Row]] = None
    overrides: dict[str, dict[str, Row]] = Field(default_factory=dict)

    @model_validator(mode="after")
    def exactly_one(self) -> "PolicySection":
        given = [s is not None for s in (self.stationary, self.per_t, self.default)]
        if sum(given) != 1:
            raise ValueError(
                "policy needs exactly one of 'stationary', 'per_t' or 'default'"
            )
        if self.overrides and self.default is None:
            raise ValueError("'overrides' is only allowed together with 'default'")
        return self


class ModelFile(BaseModel):
    """JSON model document: partition, actions, horizon, kernel and policy."""

    model_config = ConfigDict(extra="forbid")

    states: list[str] = Field(min_length=1)
    goal: list[str] = Field(default_factory=list)
    unsafe: list[str] = Field(default_factory=list)
    actions: list[str] = Field(min_length=1)
    horizon: PositiveInt
    kernel: KernelSection
    policy: PolicySection


def _expand(section: dict[str, Any], partition: StatePartition, what: str) -> dict:
    """Resolve the wildcard to every living state the section does not name."""
    expanded = {}
    for x, value in section.items():
        if x == WILDCARD:
            continue
        if x not in partition.positions:
            raise ModelFileError(f"{what} names unknown state {x!r}")
        if not partition.is_living(x):
            raise ModelFileError(
                f"{what} gives a row for absorbing state {x!r}; those rows are implied"
            )
        expanded[x] = value
    if WILDCARD in section:
        for x in partition.living:
            expanded.setdefault(x, section[WILDCARD])
    return expanded


def _dense_row(row: Row, labels: dict[str, int], what: str) -> np.ndarray:
    dense = np.zeros(len(labels))
    for label, probability in row.items():
        if label not in labels:
            raise ModelFileError(f"{what} refers to unknown identifier {label!r}")
        dense[labels[label]] = probability
    return dense


def _per_t(sections, horizon: int, what: str) -> list:
    if len(sections) != horizon:
        raise ModelFileError(
            f"{what}.per_t has {len(sections)} entries, horizon is {horizon}"
        )
    return sections


def _policy_sections(policy: PolicySection, horizon: int) -> list[dict[str, Row]]:
    if policy.stationary is not None:
        return [policy.stationary] * horizon
    if policy.per_t is not None:
        return _per_t(policy.per_t, horizon, "policy")
    sections = [policy.default] * horizon
    for key, section in policy.overrides.items():
        try:
            t = int(key)
        except ValueError as e:
            raise ModelFileError(f"policy override key {key!r} is not a time") from e
        if not 0 <= t < horizon:
            raise ModelFileError(f"policy override t={t} outside [0, {horizon - 1}]")
        sections[t] = {**policy.default, **section}
    return sections


def renormalise(rows: np.ndarray) -> np.ndarray:
    """Divide rows whose sum is within tolerance of 1 by that sum."""
    sums = rows.sum(axis=-1, keepdims=True)
    near = (np.abs(sums - 1.0) <= STOCHASTIC_TOLERANCE) & (sums > 0)
    return np.where(near, rows / np.where(near, sums, 1.0), rows)


def parse_model(document: dict) -> tuple[ImdpModel, Policy]:
    """Build a validated model and policy from a decoded model document."""
    try:
        spec = ModelFile.model_validate(document)
    except ValidationError as e:
        raise ModelFileError(f"invalid model file:\n{e}") from e

    partition = StatePartition(
        states=tuple(spec.states),
        goal=frozenset(spec.goal),
        unsafe=frozenset(spec.unsafe),
    )
    problems = partition.check()
    if problems:
        raise ModelValidationError([Violation(check=problem) for problem in problems])

    horizon, n, n_actions = spec.horizon, partition.size, len(spec.actions)
    states = partition.positions
    actions = {a: k for k, a in enumerate(spec.actions)}

    if spec.kernel.stationary is not None:
        kernel_sections = [spec.kernel.stationary] * horizon
    else:
        kernel_sections = _per_t(spec.kernel.per_t, horizon, "kernel")

    kernel = np.full((horizon, n, n_actions, n), np.nan)
    for i in range(n):
        if not partition.living_mask[i]:
            kernel[:, i, :, :] = 0.0
            kernel[:, i, :, i] = 1.0
    for t, section in enumerate(kernel_sections):
        for x, by_action in _expand(section, partition, "kernel").items():
            for a, row in by_action.items():
                if a not in actions:
                    raise ModelFileError(f"kernel refers to unknown action {a!r}")
                kernel[t, states[x], actions[a]] = _dense_row(row, states, "kernel")

    rules = np.full((horizon, n, n_actions), np.nan)
    rules[:, ~partition.living_mask] = 1.0 / n_actions
    for t, section in enumerate(_policy_sections(spec.policy, horizon)):
        for x, row in _expand(section, partition, "policy").items():
            rules[t, states[x]] = _dense_row(row, actions, "policy")

    model = ImdpModel(
        partition=partition,
        actions=tuple(spec.actions),
        horizon=horizon,
        kernel=renormalise(kernel),
    )
    policy = Policy(rules=renormalise(rules))
    violations = validate_model(model) + validate_policy(model, policy)
    if violations:
        raise ModelValidationError(violations)
    return model, policy


def load_model(path: Path) -> tuple[ImdpModel, Policy]:
    """Read a JSON model file into a validated (model, policy) pair."""
    try:
        with open(path, "r", encoding="utf-8") as file:
            document = json.load(file)
    except FileNotFoundError as e:
        raise ModelFileError(f"the file {path} doesn't exist") from e
    except json.JSONDecodeError as e:
        raise ModelFileError(f"malformed JSON in {path}: {e}") from e
    if not isinstance(document, dict):
        raise ModelFileError(f"{path} must hold a JSON object")
    return parse_model(document)
