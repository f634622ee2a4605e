import math
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, computed_field


class RadiusDomainError(ValueError):
    pass


class AmbiguityRadius(BaseModel):
    """Model-variability radius plus the finite-sample radius, with provenance."""

    model_config = ConfigDict(frozen=True)

    delta: float = Field(default=0.0, ge=0.0)
    rho: float = Field(default=0.0, ge=0.0)
    epsilon: float = Field(default=0.0, ge=0.0)
    n_samples: Optional[int] = None
    confidence_beta: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    state_count: Optional[int] = None

    @computed_field
    @property
    def total(self) -> float:
        return self.delta + self.rho

    @classmethod
    def exact(cls, delta: float) -> "AmbiguityRadius":
        """Radius for a known nominal model: no statistical inflation."""
        return cls(delta=delta)

    def with_delta(self, delta: float) -> "AmbiguityRadius":
        return self.model_copy(update={"delta": delta})


def hoeffding_radius(
    state_count: int, n_samples: int, beta: float, delta: float = 0.0
) -> AmbiguityRadius:
    """Statistical radius from a per-coordinate Hoeffding bound and a union bound.

    epsilon = sqrt(ln(2|X| / beta) / (2N)) and rho = (|X| / 2) * epsilon.
    """
    if not 0.0 < beta < 1.0:
        raise RadiusDomainError(f"beta must lie in (0, 1), got {beta}")
    if n_samples < 1:
        raise RadiusDomainError(f"n_samples must be positive, got {n_samples}")
    if state_count < 1:
        raise RadiusDomainError(f"state_count must be positive, got {state_count}")
    if delta < 0.0:
        raise RadiusDomainError(f"delta must be nonnegative, got {delta}")

    epsilon = math.sqrt(math.log(2 * state_count / beta) / (2 * n_samples))
    return AmbiguityRadius(
        delta=delta,
        rho=state_count / 2 * epsilon,
        epsilon=epsilon,
        n_samples=n_samples,
        confidence_beta=beta,
        state_count=state_count,
    )
