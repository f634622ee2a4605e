from pathlib import Path
from typing import Optional

import pandas as pd
import typer

from rsv import benchmark
from rsv.cli.common import (
    EXIT_VERDICT,
    BetaOption,
    ConfigOption,
    DeltaOption,
    FormatOption,
    ModelOption,
    OutOption,
    RunsOption,
    SeedOption,
    ThreadsOption,
    handle_errors,
)
from rsv.cli.report import Reporter
from rsv.config.model_file import load_model
from rsv.config.run_config import OutputFormat, RunConfig
from rsv.model.chain import induce_chain
from rsv.oracle.bound import validate_bound
from rsv.progress_manager import ProgressManager


def validate_command(
    model: Optional[Path] = ModelOption,
    delta: Optional[float] = DeltaOption,
    beta: Optional[float] = BetaOption,
    n_runs: Optional[int] = RunsOption,
    trials: Optional[int] = typer.Option(
        None, "--trials", "-M", help="Number of sample-and-solve trials (default 100)"
    ),
    seed: Optional[int] = SeedOption,
    format: Optional[str] = FormatOption,
    out: Optional[Path] = OutOption,
    threads: Optional[int] = ThreadsOption,
    config_file: Optional[Path] = ConfigOption,
):
    """Check how often the data-driven table fails to bound the exact robust one.

    Without --model the built-in reference problem is used.
    """
    with handle_errors():
        config = RunConfig.resolve(
            config_file,
            command="validate",
            model=model,
            delta=delta,
            beta=beta,
            n_runs=n_runs,
            trials=trials,
            seed=seed,
            format=format,
            out=out,
            threads=threads,
        )
        if config.model is None:
            chain = benchmark.benchmark_chain()
        else:
            chain = induce_chain(*load_model(config.model))

        progress = ProgressManager(
            "validate", enabled=config.format is OutputFormat.TABLE
        )
        with progress.task("trials", total=config.trials) as advance:
            report = validate_bound(
                chain,
                config.delta,
                config.beta,
                config.n_runs,
                config.trials,
                config.seed,
                threads=config.threads,
                advance=advance,
            )

        name = "per-trial max gap"
        gaps = pd.DataFrame({"max_gap": report.per_trial_max_gap}).rename_axis("trial")
        reporter = Reporter(config.format, config.out)
        reporter.emit(report.model_dump(), {name: gaps}, signed={name})
        colour = "green" if report.meets_confidence else "red"
        reporter.note(
            f"[{colour}]{report.violations} of {report.trials} trials violated the "
            f"bound; empirical confidence {report.empirical_confidence:.4f} "
            f"(target {1 - report.beta:.4f})[/]"
        )

    if not report.meets_confidence:
        raise typer.Exit(EXIT_VERDICT)
