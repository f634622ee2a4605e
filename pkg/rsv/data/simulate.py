from typing import Callable, Optional

import numpy as np

from rsv.data.perturbation import (
    RUN_BLOCK,
    PerturbationMode,
    PerturbationSpec,
    block_kernels,
    check_presets,
)
from rsv.data.sample_log import SampleLog
from rsv.model.chain import InducedChain
from rsv.utils.env import debug
from rsv.utils.ray_executor import RayExecutor


def sample_block(chain: InducedChain, spec: PerturbationSpec, block: int, n_runs: int):
    """One successor per (run, t, x in H) for the runs of `block`.

    Returns an integer array of shape (B, horizon, |H|).
    """
    kernels, rng = block_kernels(chain, spec, block, n_runs)
    cdf = np.cumsum(kernels, axis=-1)
    cdf /= cdf[..., -1:]
    draws = rng.random(kernels.shape[:-1])
    return (cdf <= draws[..., None]).sum(axis=-1)


def block_count(n_runs: int) -> int:
    return (n_runs + RUN_BLOCK - 1) // RUN_BLOCK


def _prepare(chain: InducedChain, spec: PerturbationSpec, n_runs: int) -> list[int]:
    if n_runs < 1:
        raise ValueError(f"n_runs must be positive, got {n_runs}")
    if spec.mode is PerturbationMode.ADVERSARIAL_PRESET:
        check_presets(chain, spec)
    return list(range(block_count(n_runs)))


def simulate_samples(
    chain: InducedChain,
    spec: PerturbationSpec,
    n_runs: int,
    threads: int = 1,
    advance: Optional[Callable[[], None]] = None,
) -> SampleLog:
    """Draw N runs, each with its own perturbed kernel, one successor per (t, x in H).

    Records are ordered by run, then t, then x. The result depends only on
    the seed, never on `threads`.
    """
    blocks = _prepare(chain, spec, n_runs)
    successors = RayExecutor.map(
        lambda block: sample_block(chain, spec, block, n_runs),
        blocks,
        threads=threads,
        advance=advance,
    )
    successors = np.concatenate(successors, axis=0)

    runs, horizon, n_living = successors.shape
    living = chain.partition.living_indices
    run_index, t_index, x_index = np.meshgrid(
        np.arange(1, runs + 1), np.arange(horizon), living, indexing="ij"
    )
    debug(f"simulated {successors.size} successors from {runs} runs")
    return SampleLog(
        states=chain.states,
        t=t_index.ravel(),
        x=x_index.ravel(),
        run=run_index.ravel(),
        y=successors.ravel(),
        n_runs=n_runs,
        seed=spec.seed,
        generator=spec.describe(),
    )


def simulate_counts(
    chain: InducedChain,
    spec: PerturbationSpec,
    n_runs: int,
    threads: int = 1,
    advance: Optional[Callable[[], None]] = None,
) -> np.ndarray:
    """Successor counts (horizon, |X|, |X|) of the log `simulate_samples` would draw."""
    blocks = _prepare(chain, spec, n_runs)
    n = chain.partition.size

    def count_block(block: int) -> np.ndarray:
        successors = sample_block(chain, spec, block, n_runs)
        horizon, n_living = successors.shape[1:]
        cells = np.arange(horizon * n_living).reshape(horizon, n_living)
        flat = cells[None] * n + successors
        return np.bincount(flat.ravel(), minlength=horizon * n_living * n)

    totals = sum(RayExecutor.map(count_block, blocks, threads=threads, advance=advance))
    counts = np.zeros((chain.horizon, n, n), dtype=np.int64)
    counts[:, chain.partition.living_indices] = totals.reshape(
        chain.horizon, len(chain.partition.living_indices), n
    )
    return counts
