from pathlib import Path
from typing import Optional

import numpy as np
import typer

from rsv import benchmark
from rsv.cli.common import (
    EXIT_VERDICT,
    BetaOption,
    CacheOption,
    ConfigOption,
    DeltaOption,
    FormatOption,
    OutOption,
    RunsOption,
    SeedOption,
    ThreadsOption,
    handle_errors,
)
from rsv.cli.report import Reporter, table_document
from rsv.config.run_config import OutputFormat, RunConfig
from rsv.data.empirical import EmpiricalChain, solve_empirical_robust_safety
from rsv.data.perturbation import PerturbationSpec
from rsv.data.simulate import block_count, simulate_counts
from rsv.metric.radius import AmbiguityRadius
from rsv.model.chain import InducedChain
from rsv.progress_manager import ProgressManager
from rsv.robust_dp.solver import SafetyTable, Scheme, solve_robust_safety
from rsv.utils.cache import CountsCache

EXACT_TOLERANCE = 5e-4
SAMPLED_TOLERANCE = 1e-2


def sampled_counts(chain: InducedChain, spec: PerturbationSpec, config: RunConfig):
    """Successor counts of a seeded sampling run, cached by their inputs."""
    cache = CountsCache()
    key = CountsCache.make_key(
        kind="simulate",
        rows=CountsCache.digest_array(chain.rows),
        spec=spec.describe(),
        n_runs=config.n_runs,
    )
    counts = cache.get(key, config.cache)
    if counts is None:
        enabled = config.format is OutputFormat.TABLE
        progress = ProgressManager("sample", enabled=enabled)
        total = block_count(config.n_runs)
        with progress.task("sampling runs", total=total) as advance:
            counts = simulate_counts(
                chain, spec, config.n_runs, threads=config.threads, advance=advance
            )
        cache.set(key, counts, config.cache)
    return counts


def _living(table: SafetyTable) -> np.ndarray:
    return table.values[: table.horizon]


def reproduce_command(
    delta: Optional[float] = DeltaOption,
    beta: Optional[float] = BetaOption,
    n_runs: Optional[int] = RunsOption,
    seed: Optional[int] = SeedOption,
    format: Optional[str] = FormatOption,
    out: Optional[Path] = OutOption,
    threads: Optional[int] = ThreadsOption,
    cache: Optional[bool] = CacheOption,
    config_file: Optional[Path] = ConfigOption,
):
    """Recompute the reference problem's three tables and diff them against print."""
    with handle_errors():
        config = RunConfig.resolve(
            config_file,
            command="reproduce",
            delta=delta,
            beta=beta,
            n_runs=n_runs,
            seed=seed,
            format=format,
            out=out,
            threads=threads,
            cache=cache,
        )
        chain = benchmark.benchmark_chain()
        states = chain.states

        robust = solve_robust_safety(
            chain,
            config.delta,
            scheme=Scheme.ROBUST,
            ambiguity=AmbiguityRadius.exact(config.delta),
        )
        spec = PerturbationSpec(delta=config.delta, seed=config.seed)
        emp = EmpiricalChain.from_counts(
            chain.partition, sampled_counts(chain, spec, config)
        )
        empirical_robust = solve_empirical_robust_safety(emp, config.delta, config.beta)
        empirical_delta = solve_robust_safety(
            emp,
            config.delta,
            scheme=Scheme.EMPIRICAL_ROBUST,
            ambiguity=AmbiguityRadius.exact(config.delta),
        )

        comparisons = {
            "robust": (
                robust,
                benchmark.printed_table(benchmark.ROBUST_COLUMN),
                EXACT_TOLERANCE,
            ),
            "empirical robust": (
                empirical_robust,
                benchmark.printed_table(benchmark.EMPIRICAL_ROBUST_PRINTED),
                SAMPLED_TOLERANCE,
            ),
            "empirical delta-only": (
                empirical_delta,
                benchmark.printed_table(benchmark.EMPIRICAL_DELTA_PRINTED),
                SAMPLED_TOLERANCE,
            ),
        }

        frames, summary = {}, {}
        for name, (table, printed, tolerance) in comparisons.items():
            diff = benchmark.compare_printed(_living(table), states, printed)
            computed = diff + printed
            frames[name] = computed
            frames[f"{name} minus published"] = diff
            worst = float(diff.abs().to_numpy().max())
            summary[name] = {
                "max_abs_diff": worst,
                "tolerance": tolerance,
                "within": worst <= tolerance,
            }

        ambiguity = empirical_robust.ambiguity
        document = {
            "rho": ambiguity.rho,
            "epsilon": ambiguity.epsilon,
            "n_runs": config.n_runs,
            "seed": config.seed,
            "tables": {
                "robust": table_document(robust),
                "empirical_robust": table_document(empirical_robust),
                "empirical_delta": table_document(empirical_delta),
            },
            "comparison": summary,
        }
        reporter = Reporter(config.format, config.out)
        reporter.emit(
            document, frames, signed={f"{name} minus published" for name in summary}
        )

        reporter.note(f"rho = {ambiguity.rho:.5f} (epsilon = {ambiguity.epsilon:.6g})")
        for name, entry in summary.items():
            colour = "green" if entry["within"] else "yellow"
            reporter.note(
                f"[{colour}]{name}: max |diff| {entry['max_abs_diff']:.4f} "
                f"(tolerance {entry['tolerance']:g})[/]"
            )
        exact_ok = summary["robust"]["within"]

    if not exact_ok:
        raise typer.Exit(EXIT_VERDICT)
