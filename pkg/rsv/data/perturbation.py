from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from rsv.metric.distance import family_distance
from rsv.model.chain import InducedChain
from rsv.model.imdp import STOCHASTIC_TOLERANCE
from rsv.utils.arrays import frozen_array

# runs per random stream; even, so antithetic pairs never straddle two streams
RUN_BLOCK = 1024


class PerturbationError(ValueError):
    pass


class PerturbationMode(str, Enum):
    PER_RUN_BALL = "per-run-ball"
    ADVERSARIAL_PRESET = "adversarial-preset"


class PerturbationSpec(BaseModel):
    """How each run's kernel departs from the nominal chain.

    Every run kernel stays within delta/2 (TV, row-wise) of the nominal rows,
    so any two runs are within delta of each other.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    delta: float = Field(ge=0.0)
    mode: PerturbationMode = PerturbationMode.PER_RUN_BALL
    seed: int = Field(default=0, ge=0)
    presets: Optional[np.ndarray] = None

    @field_validator("delta")
    @classmethod
    def validate_delta(cls, value: float) -> float:
        if value > 1.0:
            raise PerturbationError(f"delta must not exceed 1, got {value}")
        return value

    @field_validator("presets", mode="before")
    @classmethod
    def freeze_presets(cls, value) -> Optional[np.ndarray]:
        if value is None:
            return None
        presets = frozen_array(value)
        if presets.ndim != 4:
            raise ValueError("presets must have shape (K, horizon, |X|, |X|)")
        return presets

    @model_validator(mode="after")
    def validate_mode(self) -> "PerturbationSpec":
        if self.mode is PerturbationMode.ADVERSARIAL_PRESET and self.presets is None:
            raise ValueError("adversarial-preset mode needs a list of preset kernels")
        return self

    def describe(self) -> str:
        return f"{self.mode.value} delta={self.delta:g} seed={self.seed}"


def check_presets(chain: InducedChain, spec: PerturbationSpec) -> None:
    """Every preset must be stochastic and within delta/2 of the nominal rows."""
    if spec.presets.shape[1:] != chain.rows.shape:
        raise PerturbationError(
            f"preset kernels have shape {spec.presets.shape[1:]}, "
            f"expected {chain.rows.shape}"
        )
    living = chain.partition.living_mask
    for k, preset in enumerate(spec.presets):
        _check_rows(preset[:, living])
        distance = family_distance(preset, chain.rows, living)
        if distance > spec.delta / 2 + STOCHASTIC_TOLERANCE:
            raise PerturbationError(
                f"preset {k} lies {distance:.6g} from the nominal chain, "
                f"more than delta/2 = {spec.delta / 2:.6g}"
            )


def _check_rows(rows: np.ndarray) -> np.ndarray:
    if (rows < -1e-12).any() or (
        np.abs(rows.sum(axis=-1) - 1.0) > STOCHASTIC_TOLERANCE
    ).any():
        raise PerturbationError("perturbation produced a non-stochastic row")
    return np.maximum(rows, 0.0)


def ball_directions(
    rows: np.ndarray, delta: float, rng: np.random.Generator
) -> np.ndarray:
    """Zero-sum moves D with rows + D and rows - D both feasible, TV(D) <= delta/2.

    A random receiver and a random donor set are drawn inside each row's
    support; a mass m ~ U[0, delta/2] leaves the donors in proportion to
    their mass and lands on the receiver, capped by what both sides hold.
    """
    support = rows > 0
    scores = np.where(support, rng.random(rows.shape), -1.0)
    receiver = np.argmax(scores, axis=-1)
    is_receiver = np.arange(rows.shape[-1]) == receiver[..., None]
    donors = support & ~is_receiver & (rng.random(rows.shape) < 0.5)

    available = np.where(donors, rows, 0.0).sum(axis=-1)
    held = np.take_along_axis(rows, receiver[..., None], axis=-1)[..., 0]
    moved = np.minimum(rng.uniform(0.0, delta / 2, rows.shape[:-1]), available)
    moved = np.minimum(moved, held)

    with np.errstate(divide="ignore", invalid="ignore"):
        share = np.where(donors, rows / available[..., None], 0.0)
    directions = -moved[..., None] * share
    directions += np.where(is_receiver, moved[..., None], 0.0)
    return directions


def block_kernels(
    chain: InducedChain, spec: PerturbationSpec, block: int, n_runs: int
) -> tuple[np.ndarray, np.random.Generator]:
    """Living-row kernels of the runs in `block`, shape (B, horizon, |H|, |X|).

    Also returns the block's generator, positioned after the kernel draws,
    so that successor sampling continues the same stream.
    """
    rng = np.random.default_rng([spec.seed, block])
    first = block * RUN_BLOCK
    size = min(RUN_BLOCK, n_runs - first)
    nominal = chain.living_rows()

    if spec.mode is PerturbationMode.ADVERSARIAL_PRESET:
        living = chain.partition.living_indices
        picks = np.arange(first, first + size) % len(spec.presets)
        return spec.presets[picks][:, :, living], rng

    pairs = (size + 1) // 2
    directions = ball_directions(
        np.broadcast_to(nominal, (pairs,) + nominal.shape), spec.delta, rng
    )
    signs = np.where(np.arange(size) % 2 == 0, 1.0, -1.0)
    kernels = nominal[None] + signs[:, None, None, None] * np.repeat(
        directions, 2, axis=0
    )[:size]
    return _check_rows(kernels), rng


def per_run_kernels(
    chain: InducedChain, spec: PerturbationSpec, runs: list[int], n_runs: int
) -> np.ndarray:
    """Full kernel families (len(runs), horizon, |X|, |X|) of the given runs.

    Runs are numbered from 1 as in the sample log.
    """
    if spec.mode is PerturbationMode.ADVERSARIAL_PRESET:
        check_presets(chain, spec)
    living = chain.partition.living_indices
    families = np.broadcast_to(chain.rows, (len(runs),) + chain.rows.shape).copy()
    blocks: dict[int, np.ndarray] = {}
    for position, run in enumerate(runs):
        if not 1 <= run <= n_runs:
            raise PerturbationError(f"run {run} outside [1, {n_runs}]")
        block, offset = divmod(run - 1, RUN_BLOCK)
        if block not in blocks:
            blocks[block] = block_kernels(chain, spec, block, n_runs)[0]
        families[position][:, living] = blocks[block][offset]
    return families
