from typing import Union

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, field_validator

from rsv.model.imdp import STOCHASTIC_TOLERANCE
from rsv.utils.arrays import frozen_array


class DistributionShapeError(ValueError):
    pass


class DiscreteDistribution(BaseModel):
    """Probability masses aligned to the state ordering."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    masses: np.ndarray

    @field_validator("masses", mode="before")
    @classmethod
    def validate_masses(cls, value) -> np.ndarray:
        masses = frozen_array(value)
        if masses.ndim != 1:
            raise ValueError("masses must be a vector")
        if (masses < -STOCHASTIC_TOLERANCE).any():
            raise ValueError("masses must be nonnegative")
        if abs(masses.sum() - 1.0) > STOCHASTIC_TOLERANCE:
            raise ValueError(f"masses sum to {masses.sum():.12g}, not 1")
        return masses

    def __len__(self) -> int:
        return len(self.masses)


Masses = Union[DiscreteDistribution, ArrayLike]


def as_masses(value: Masses) -> np.ndarray:
    if isinstance(value, DiscreteDistribution):
        return value.masses
    return np.asarray(value, dtype=float)


def tv_distance(mu: Masses, nu: Masses) -> float:
    """Total variation distance, half the l1 norm of the difference."""
    mu, nu = as_masses(mu), as_masses(nu)
    if mu.shape != nu.shape:
        raise DistributionShapeError(
            f"distributions have mismatched supports {mu.shape} and {nu.shape}"
        )
    return float(0.5 * np.abs(mu - nu).sum())


def wasserstein_hamming(mu: Masses, nu: Masses) -> float:
    """1-Wasserstein distance under the Hamming ground metric (equals TV)."""
    return tv_distance(mu, nu)


def hamming_matrix(size: int) -> np.ndarray:
    """d(x, y) = 1 if x != y else 0."""
    return 1.0 - np.eye(size)


def kernel_distance(a: ArrayLike, b: ArrayLike, living: ArrayLike) -> float:
    """Largest row-wise TV distance between two kernels at one time index.

    Only the rows selected by `living` (a boolean mask or index array over H)
    are compared; absorbing rows never count.
    """
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 2:
        raise DistributionShapeError(
            f"kernels have mismatched shapes {a.shape} and {b.shape}"
        )
    a, b = a[np.asarray(living)], b[np.asarray(living)]
    if a.shape[0] == 0:
        return 0.0
    return float(0.5 * np.abs(a - b).sum(axis=1).max())


def family_distance(a: ArrayLike, b: ArrayLike, living: ArrayLike) -> float:
    """`kernel_distance` maximised over the time index of two (T, n, n) families."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 3:
        raise DistributionShapeError(
            f"kernel families have mismatched shapes {a.shape} and {b.shape}"
        )
    return max(kernel_distance(a[t], b[t], living) for t in range(a.shape[0]))
