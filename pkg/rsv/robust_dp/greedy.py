import numpy as np
from numpy.typing import ArrayLike

from rsv.metric.distance import DiscreteDistribution, Masses, as_masses
from rsv.metric.radius import RadiusDomainError


def worst_case_expectation_greedy(
    nominal_row: Masses, payoffs: ArrayLike, radius: float
) -> tuple[float, DiscreteDistribution]:
    """Largest expectation of `payoffs` over the TV ball, by direct transport.

    Mass is drained from the lowest-payoff states first (ties in index order)
    and placed on the lowest-index maximiser, up to `radius` in total.
    """
    if not 0.0 <= radius <= 1.0:
        raise RadiusDomainError(f"radius must lie in [0, 1], got {radius}")
    row = as_masses(nominal_row)
    payoffs = np.asarray(payoffs, dtype=float)
    if payoffs.shape != row.shape:
        raise ValueError(
            f"payoffs have shape {payoffs.shape}, expected {row.shape}"
        )

    top = payoffs.max()
    receiver = int(np.flatnonzero(payoffs == top)[0])
    donors = np.flatnonzero(payoffs < top)
    donors = donors[np.lexsort((donors, payoffs[donors]))]

    worst = row.copy()
    moved = min(radius, float(row[donors].sum()))
    remaining = moved
    for donor in donors:
        if remaining <= 0.0:
            break
        take = min(worst[donor], remaining)
        worst[donor] -= take
        remaining -= take
    worst[receiver] += moved

    return float(payoffs @ worst), DiscreteDistribution(masses=worst)
