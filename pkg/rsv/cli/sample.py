import json
from pathlib import Path
from typing import Optional

import typer

from rsv.cli.common import (
    BetaOption,
    ConfigOption,
    DeltaOption,
    ModelOption,
    OutOption,
    RunsOption,
    SeedOption,
    ThreadsOption,
    handle_errors,
    require,
)
from rsv.config.model_file import load_model
from rsv.config.run_config import RunConfig
from rsv.data.empirical import (
    empirical_chain,
    empirical_radius,
    export_empirical_chain,
)
from rsv.data.perturbation import PerturbationSpec
from rsv.data.sample_log import write_sample_log
from rsv.data.simulate import block_count, simulate_samples
from rsv.model.chain import induce_chain
from rsv.progress_manager import ProgressManager
from rsv.utils.env import CONSOLE


def sample_command(
    model: Optional[Path] = ModelOption,
    n_runs: Optional[int] = RunsOption,
    delta: Optional[float] = DeltaOption,
    beta: Optional[float] = BetaOption,
    seed: Optional[int] = SeedOption,
    out: Optional[Path] = OutOption,
    chain_out: Optional[Path] = typer.Option(
        None, "--chain-out", help="Also write the empirical chain as JSON"
    ),
    threads: Optional[int] = ThreadsOption,
    config_file: Optional[Path] = ConfigOption,
):
    """Draw a transition sample log from perturbed copies of the model's chain."""
    with handle_errors():
        config = RunConfig.resolve(
            config_file,
            command="sample",
            model=model,
            n_runs=n_runs,
            delta=delta,
            beta=beta,
            seed=seed,
            out=out,
            chain_out=chain_out,
            threads=threads,
        )
        destination = require(config.out, "--out")
        chain = induce_chain(*load_model(require(config.model, "--model")))
        spec = PerturbationSpec(delta=config.delta, seed=config.seed)

        progress = ProgressManager("sample")
        blocks = block_count(config.n_runs)
        with progress.task("sampling runs", total=blocks) as advance:
            log = simulate_samples(
                chain, spec, config.n_runs, threads=config.threads, advance=advance
            )
        write_sample_log(log, destination)
        CONSOLE.print(
            f"wrote {len(log)} records from {config.n_runs} runs to {destination}"
        )

        if config.chain_out is not None:
            emp = empirical_chain(log, chain.partition, chain.horizon)
            radius = empirical_radius(emp, config.delta, config.beta)
            with open(config.chain_out, "w", encoding="utf-8") as file:
                json.dump(export_empirical_chain(emp, radius), file, indent=2)
            CONSOLE.print(f"wrote empirical chain to {config.chain_out}")
