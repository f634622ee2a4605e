from pathlib import Path
from typing import Optional

import typer

from rsv.cli.common import (
    EXIT_VERDICT,
    BetaOption,
    CacheOption,
    ConfigOption,
    DeltaOption,
    FormatOption,
    ModelOption,
    OutOption,
    fail,
    handle_errors,
    require,
)
from rsv.cli.report import Reporter, intervals_document, table_document, table_frame
from rsv.config.model_file import load_model
from rsv.config.run_config import OutputFormat, RunConfig
from rsv.data.empirical import (
    EmpiricalChain,
    empirical_chain,
    solve_empirical_robust_safety,
)
from rsv.data.sample_log import read_sample_log
from rsv.metric.radius import AmbiguityRadius
from rsv.model.chain import InducedChain, induce_chain
from rsv.progress_manager import ProgressManager
from rsv.robust_dp.intervals import implied_intervals
from rsv.robust_dp.solver import (
    SafetyTable,
    Scheme,
    is_robust_p_safe,
    solve_robust_safety,
)
from rsv.utils.cache import CountsCache

RESIDUAL_TOLERANCE = 1e-12


def load_empirical(
    chain: InducedChain, samples: Path, use_cache: bool = True
) -> EmpiricalChain:
    """Empirical chain of a sample log, reusing cached counts of the same file."""
    cache = CountsCache()
    key = CountsCache.make_key(
        kind="samples",
        samples=CountsCache.digest_file(samples),
        states=list(chain.states),
        horizon=chain.horizon,
    )
    counts = cache.get(key, use_cache)
    if counts is not None:
        return EmpiricalChain.from_counts(chain.partition, counts)
    log = read_sample_log(samples, chain.states)
    emp = empirical_chain(log, chain.partition, chain.horizon)
    cache.set(key, emp.counts, use_cache)
    return emp


def solve(config: RunConfig, chain: InducedChain) -> tuple[SafetyTable, InducedChain]:
    """Robust table and the chain it was computed on."""
    progress = ProgressManager("solve", enabled=config.format is OutputFormat.TABLE)
    with progress.task("backward induction", total=chain.horizon) as advance:
        if config.exact_model:
            table = solve_robust_safety(
                chain,
                config.delta,
                scheme=Scheme.ROBUST,
                ambiguity=AmbiguityRadius.exact(config.delta),
                advance=advance,
            )
            return table, chain
        emp = load_empirical(chain, config.samples, config.cache)
        return (
            solve_empirical_robust_safety(emp, config.delta, config.beta, advance),
            emp,
        )


def verify_command(
    model: Optional[Path] = ModelOption,
    samples: Optional[Path] = typer.Option(
        None, "--samples", help="Sample log; the radius becomes delta + rho"
    ),
    delta: Optional[float] = DeltaOption,
    beta: Optional[float] = BetaOption,
    p: Optional[float] = typer.Option(None, "--p", help="Safety threshold in (0, 1)"),
    exact_model: Optional[bool] = typer.Option(
        None,
        "--exact-model/--no-exact-model",
        help="Treat the model as the nominal kernel and use radius delta",
    ),
    intervals: Optional[bool] = typer.Option(
        None, "--intervals/--no-intervals", help="Add implied intervals to JSON"
    ),
    format: Optional[str] = FormatOption,
    out: Optional[Path] = OutOption,
    cache: Optional[bool] = CacheOption,
    config_file: Optional[Path] = ConfigOption,
):
    """Compute the robust safety table and decide robust p-safety."""
    with handle_errors():
        config = RunConfig.resolve(
            config_file,
            command="verify",
            model=model,
            samples=samples,
            delta=delta,
            beta=beta,
            p=p,
            exact_model=exact_model,
            intervals=intervals,
            format=format,
            out=out,
            cache=cache,
        )
        threshold = require(config.p, "--p")
        if not config.exact_model and config.samples is None:
            fail("either --exact-model or --samples is required")

        chain = induce_chain(*load_model(require(config.model, "--model")))
        table, solved_on = solve(config, chain)
        verdict = is_robust_p_safe(table, threshold)
        residual = chain.residual_living_mass()[: chain.horizon][
            :, chain.partition.living_indices
        ]

        reporter = Reporter(config.format, config.out)
        document = {
            "table": table_document(table),
            "verdict": verdict.model_dump(),
            "residual_living_mass": float(residual.max(initial=0.0)),
        }
        if config.intervals:
            lower, upper = implied_intervals(solved_on, table.radius)
            document["intervals"] = intervals_document(lower, upper, table)
        reporter.emit(document, {f"{table.scheme.value} safety": table_frame(table)})

        reporter.note(f"radius: {table.radius:.6g}")
        if document["residual_living_mass"] > RESIDUAL_TOLERANCE:
            reporter.note(
                "[yellow]warning: paths may still be living at the horizon "
                f"(mass up to {document['residual_living_mass']:.3g})[/]"
            )
        colour = "green" if verdict.safe else "red"
        reporter.note(
            f"max {verdict.value:.4f} at (t={verdict.t}, x={verdict.x}): "
            f"[{colour}]{verdict.status}[/] for p = {verdict.p:g}"
        )

    if not verdict.safe:
        raise typer.Exit(EXIT_VERDICT)
