import numpy as np

from rsv.metric.radius import RadiusDomainError
from rsv.model.chain import InducedChain


def implied_intervals(
    chain: InducedChain, radius: float
) -> tuple[np.ndarray, np.ndarray]:
    """Per-entry interval view [P(y) - r, P(y) + r] clipped to [0, 1].

    Absorbing rows carry no ambiguity and come back as degenerate intervals.
    """
    if radius < 0:
        raise RadiusDomainError(f"radius must be nonnegative, got {radius}")
    lower = np.clip(chain.rows - radius, 0.0, 1.0)
    upper = np.clip(chain.rows + radius, 0.0, 1.0)
    absorbing = ~chain.partition.living_mask
    lower[:, absorbing] = chain.rows[:, absorbing]
    upper[:, absorbing] = chain.rows[:, absorbing]
    return lower, upper
