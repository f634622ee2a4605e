from functools import cached_property

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class StatePartition(BaseModel):
    """Ordered state space split into goal (E), unsafe (U) and living (H) states.

    Construction does not enforce disjointness so that `validate_model` can
    report a broken partition instead of failing on it.
    """

    model_config = ConfigDict(frozen=True)

    states: tuple[str, ...]
    goal: frozenset[str] = Field(default_factory=frozenset)
    unsafe: frozenset[str] = Field(default_factory=frozenset)

    def __eq__(self, other) -> bool:
        if not isinstance(other, StatePartition):
            return NotImplemented
        return (self.states, self.goal, self.unsafe) == (
            other.states,
            other.goal,
            other.unsafe,
        )

    def __hash__(self) -> int:
        return hash((self.states, self.goal, self.unsafe))

    @property
    def size(self) -> int:
        return len(self.states)

    @cached_property
    def living(self) -> tuple[str, ...]:
        absorbing = self.goal | self.unsafe
        return tuple(s for s in self.states if s not in absorbing)

    @cached_property
    def positions(self) -> dict[str, int]:
        return {state: position for position, state in enumerate(self.states)}

    def index(self, state: str) -> int:
        try:
            return self.positions[state]
        except KeyError:
            raise KeyError(f"Unknown state: {state}") from None

    @cached_property
    def goal_mask(self) -> np.ndarray:
        return self._mask(self.goal)

    @cached_property
    def unsafe_mask(self) -> np.ndarray:
        return self._mask(self.unsafe)

    @cached_property
    def living_mask(self) -> np.ndarray:
        return ~(self.goal_mask | self.unsafe_mask)

    @cached_property
    def living_indices(self) -> np.ndarray:
        return np.flatnonzero(self.living_mask)

    def is_living(self, state: str) -> bool:
        return state in self.states and state not in self.goal | self.unsafe

    def _mask(self, names: frozenset[str]) -> np.ndarray:
        mask = np.array([state in names for state in self.states], dtype=bool)
        mask.flags.writeable = False
        return mask

    def check(self) -> list[str]:
        """Return the partition invariants that do not hold."""
        problems = []
        seen = set()
        for state in self.states:
            if state in seen:
                problems.append(f"duplicate state identifier {state!r}")
            seen.add(state)
        for label, names in (("goal", self.goal), ("unsafe", self.unsafe)):
            unknown = sorted(names - seen)
            if unknown:
                problems.append(f"{label} set references unknown states {unknown}")
        overlap = sorted(self.goal & self.unsafe)
        if overlap:
            problems.append(f"goal and unsafe sets intersect on {overlap}")
        if not self.living:
            problems.append("living set H is empty")
        return problems
