import numpy as np

from rsv.model.chain import InducedChain
from rsv.oracle.trajectory import _start_index

MAX_PATHS = 10**7


class InstanceTooLargeError(ValueError):
    pass


def exhaustive_safety(chain: InducedChain, start: tuple[int, str]) -> float:
    """Unsafe-before-goal probability by summing over every trajectory."""
    t, x = start
    partition = chain.partition
    if x in partition.unsafe:
        return 1.0
    if x in partition.goal:
        return 0.0
    t, i = _start_index(chain, start)

    paths = partition.size ** (chain.horizon - t)
    if paths > MAX_PATHS:
        raise InstanceTooLargeError(
            f"{paths} paths from t={t} exceed the enumeration limit {MAX_PATHS}"
        )

    total = 0.0
    stack = [(t, i, 1.0)]
    while stack:
        k, state, probability = stack.pop()
        row = chain.rows[k, state]
        for successor in np.flatnonzero(row > 0):
            mass = probability * row[successor]
            if partition.unsafe_mask[successor]:
                total += mass
            elif partition.living_mask[successor] and k + 1 < chain.horizon:
                stack.append((k + 1, int(successor), mass))
    return total


def kappa_sum_safety(chain: InducedChain, start: tuple[int, str]) -> float:
    """Expected sum of one-step unsafe mass kappa along the not-yet-absorbed path."""
    t, i = _start_index(chain, start)
    partition = chain.partition
    living = partition.living_mask.astype(float)

    distribution = np.zeros(partition.size)
    distribution[i] = 1.0
    total = 0.0
    for k in range(t, chain.horizon):
        surviving = distribution * living
        kappas = chain.rows[k][:, partition.unsafe_mask].sum(axis=1)
        total += float(surviving @ kappas)
        distribution = surviving @ chain.rows[k]
    return total
