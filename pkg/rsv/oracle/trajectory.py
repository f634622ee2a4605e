import math
from enum import Enum
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from rsv.model.chain import InducedChain

MC_CHUNK = 100_000
Z_95 = 1.959963984540054


class StartStateError(ValueError):
    pass


class HitKind(str, Enum):
    UNSAFE_FIRST = "unsafe-first"
    GOAL_FIRST = "goal-first"
    CENSORED = "censored"


_CODES = {0: HitKind.CENSORED, 1: HitKind.UNSAFE_FIRST, 2: HitKind.GOAL_FIRST}


class TrajectoryOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    hit: HitKind
    hitting_time: int


class MonteCarloEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    estimate: float
    half_width: float
    trials: int
    unsafe: int
    goal: int
    censored: int


def _start_index(chain: InducedChain, start: tuple[int, str]) -> tuple[int, int]:
    t, x = start
    if not 0 <= t < chain.horizon:
        raise StartStateError(f"start time {t} outside [0, {chain.horizon - 1}]")
    if not chain.partition.is_living(x):
        raise StartStateError(
            f"start state {x!r} is not a living state; its value is definitional"
        )
    return t, chain.partition.index(x)


def simulate_outcomes(
    chain: InducedChain, t: int, x: int, size: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Outcome codes (0 censored, 1 unsafe-first, 2 goal-first) and hitting times."""
    partition = chain.partition
    state = np.full(size, x)
    alive = np.ones(size, dtype=bool)
    outcome = np.zeros(size, dtype=np.int8)
    steps = np.full(size, chain.horizon - t)

    for k in range(t, chain.horizon):
        active = np.flatnonzero(alive)
        if active.size == 0:
            break
        cdf = np.cumsum(chain.rows[k], axis=1)
        cdf /= cdf[:, -1:]
        draws = rng.random(active.size)
        successor = (cdf[state[active]] <= draws[:, None]).sum(axis=1)
        state[active] = successor

        unsafe = partition.unsafe_mask[successor]
        goal = partition.goal_mask[successor]
        outcome[active[unsafe]] = 1
        outcome[active[goal]] = 2
        absorbed = active[unsafe | goal]
        steps[absorbed] = k - t + 1
        alive[absorbed] = False

    return outcome, steps


def simulate_trajectory(
    chain: InducedChain, start: tuple[int, str], rng: np.random.Generator
) -> TrajectoryOutcome:
    t, x = _start_index(chain, start)
    outcome, steps = simulate_outcomes(chain, t, x, 1, rng)
    return TrajectoryOutcome(hit=_CODES[int(outcome[0])], hitting_time=int(steps[0]))


def mc_safety(
    chain: InducedChain,
    start: tuple[int, str],
    trials: int,
    seed: int,
    advance: Optional[Callable[[], None]] = None,
) -> MonteCarloEstimate:
    """Fraction of simulated paths that hit U before E, with a 95% half-width."""
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    t, x = _start_index(chain, start)

    counts = np.zeros(3, dtype=np.int64)
    for chunk, first in enumerate(range(0, trials, MC_CHUNK)):
        rng = np.random.default_rng([seed, chunk])
        outcome, _ = simulate_outcomes(
            chain, t, x, min(MC_CHUNK, trials - first), rng
        )
        counts += np.bincount(outcome, minlength=3)
        if advance is not None:
            advance()

    estimate = counts[1] / trials
    return MonteCarloEstimate(
        estimate=float(estimate),
        half_width=Z_95 * math.sqrt(estimate * (1 - estimate) / trials),
        trials=trials,
        unsafe=int(counts[1]),
        goal=int(counts[2]),
        censored=int(counts[0]),
    )
