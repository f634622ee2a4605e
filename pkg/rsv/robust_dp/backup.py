from typing import Optional

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict

from rsv.metric.distance import DiscreteDistribution, Masses, as_masses
from rsv.metric.radius import RadiusDomainError
from rsv.model.imdp import STOCHASTIC_TOLERANCE
from rsv.model.partition import StatePartition
from rsv.robust_dp.greedy import worst_case_expectation_greedy


class NonStochasticRowError(ValueError):
    pass


class BackupRangeError(ArithmeticError):
    pass


class BackupResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float
    lambda_star: float
    worst_distribution: Optional[DiscreteDistribution] = None
    breakpoints_evaluated: int


def stage_cost(x: str, successor: str, partition: StatePartition) -> int:
    """1 when the successor is unsafe. `x` has no influence under Hamming."""
    return int(successor in partition.unsafe)


def kappa(row: Masses, partition: StatePartition) -> float:
    """One-step probability mass on the unsafe set."""
    return float(as_masses(row)[partition.unsafe_mask].sum())


def payoff_vector(next_values: ArrayLike, partition: StatePartition) -> np.ndarray:
    """w(l) = c(x, l) + v(l), with continuation counted on living states only.

    Absorbing successors contribute their stage cost and nothing else, so a
    full table row (1 on U, 0 on E) and a cost-to-go vector give the same w.
    """
    next_values = np.asarray(next_values, dtype=float)
    if next_values.shape != (partition.size,):
        raise ValueError(
            f"next_values has shape {next_values.shape}, expected ({partition.size},)"
        )
    continuation = np.where(partition.living_mask, next_values, 0.0)
    return partition.unsafe_mask.astype(float) + continuation


def check_stochastic(row: np.ndarray) -> None:
    if row.ndim != 1:
        raise NonStochasticRowError("nominal row must be a vector")
    if np.isnan(row).any() or (row < -STOCHASTIC_TOLERANCE).any():
        raise NonStochasticRowError("nominal row has negative or missing entries")
    if abs(row.sum() - 1.0) > STOCHASTIC_TOLERANCE:
        raise NonStochasticRowError(f"nominal row sums to {row.sum():.12g}, not 1")


def _excluded_maxima(payoffs: np.ndarray) -> np.ndarray:
    """max_{l != y} w(l) for every y."""
    if payoffs.size == 1:
        return np.array([-np.inf])
    order = np.argsort(-payoffs, kind="stable")
    excluded = np.full(payoffs.shape, payoffs[order[0]])
    excluded[order[0]] = payoffs[order[1]]
    return excluded


def dual_values(
    lambdas: np.ndarray,
    row: np.ndarray,
    payoffs: np.ndarray,
    radius: float,
    distances: Optional[np.ndarray] = None,
) -> np.ndarray:
    """lambda * radius + sum_y max_l (w(l) - lambda d(l, y)) row(y), per lambda."""
    lambdas = np.atleast_1d(np.asarray(lambdas, dtype=float))
    if distances is None:
        terms = np.maximum(
            payoffs[None, :], _excluded_maxima(payoffs)[None, :] - lambdas[:, None]
        )
    else:
        terms = (
            payoffs[None, None, :] - lambdas[:, None, None] * distances[None, :, :]
        ).max(axis=-1)
    return lambdas * radius + terms @ row


def dual_breakpoints(
    row: np.ndarray, payoffs: np.ndarray, distances: Optional[np.ndarray] = None
) -> np.ndarray:
    """Sorted kink locations of the dual objective on lambda >= 0, with 0 included."""
    support = np.flatnonzero(row > 0)
    if distances is None:
        candidates = _excluded_maxima(payoffs)[support] - payoffs[support]
    else:
        # every crossing of two lines l, l' inside the max at a supported y
        d = distances[support]
        gaps = d[:, :, None] - d[:, None, :]
        rises = payoffs[None, :, None] - payoffs[None, None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            candidates = np.where(gaps != 0, rises / gaps, -1.0).ravel()
    candidates = candidates[np.isfinite(candidates) & (candidates >= 0)]
    return np.unique(np.concatenate(([0.0], candidates)))


def dual_objective(
    lam: float,
    nominal_row: Masses,
    next_values: ArrayLike,
    x: str,
    radius: float,
    partition: StatePartition,
    distances: Optional[np.ndarray] = None,
) -> float:
    if lam < 0:
        raise ValueError(f"dual multiplier must be nonnegative, got {lam}")
    if radius < 0:
        raise RadiusDomainError(f"radius must be nonnegative, got {radius}")
    partition.index(x)
    row = as_masses(nominal_row)
    payoffs = payoff_vector(next_values, partition)
    return float(dual_values(np.array([lam]), row, payoffs, radius, distances)[0])


def minimize_dual(
    row: np.ndarray,
    payoffs: np.ndarray,
    radius: float,
    distances: Optional[np.ndarray] = None,
) -> tuple[float, float, int]:
    """Exact minimum of the convex piecewise-linear dual over its breakpoints.

    Returns (value, minimising lambda, number of breakpoints evaluated); ties
    go to the smallest lambda.
    """
    lambdas = dual_breakpoints(row, payoffs, distances)
    values = dual_values(lambdas, row, payoffs, radius, distances)
    best = int(np.argmin(values))
    return float(values[best]), float(lambdas[best]), len(lambdas)


def _clamp_unit(value: float) -> float:
    if -STOCHASTIC_TOLERANCE <= value < 0.0:
        return 0.0
    if 1.0 < value <= 1.0 + STOCHASTIC_TOLERANCE:
        return 1.0
    if not 0.0 <= value <= 1.0:
        raise BackupRangeError(f"backup value {value!r} lies outside [0, 1]")
    return value


def robust_backup(
    nominal_row: Masses,
    next_values: ArrayLike,
    x: str,
    radius: float,
    partition: StatePartition,
    distances: Optional[np.ndarray] = None,
) -> BackupResult:
    """Worst-case one-step backup over the radius ball around `nominal_row`."""
    if radius < 0:
        raise RadiusDomainError(f"radius must be nonnegative, got {radius}")
    partition.index(x)
    row = as_masses(nominal_row)
    check_stochastic(row)
    payoffs = payoff_vector(next_values, partition)

    value, lambda_star, evaluated = minimize_dual(row, payoffs, radius, distances)

    worst = None
    if distances is None:
        _, worst = worst_case_expectation_greedy(row, payoffs, min(radius, 1.0))

    return BackupResult(
        value=_clamp_unit(value),
        lambda_star=lambda_star,
        worst_distribution=worst,
        breakpoints_evaluated=evaluated,
    )
