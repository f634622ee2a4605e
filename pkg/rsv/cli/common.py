from contextlib import contextmanager
from typing import NoReturn

import typer
from pydantic import ValidationError

ModelOption = typer.Option(
    None, "--model", "-m", help="Path to the JSON model file", dir_okay=False
)
DeltaOption = typer.Option(
    None, "--delta", "-d", help="Model-variability radius in [0, 1] (default 0.2)"
)
BetaOption = typer.Option(
    None, "--beta", "-b", help="Confidence parameter in (0, 1) (default 0.05)"
)
RunsOption = typer.Option(
    None, "--n-runs", "-n", help="Number of sampling runs N (default 100000)"
)
SeedOption = typer.Option(None, "--seed", "-s", help="Random seed (default 0)")
FormatOption = typer.Option(
    None, "--format", "-f", help="Output format: table, json or csv"
)
OutOption = typer.Option(None, "--out", "-o", help="Write the report to this file")
ThreadsOption = typer.Option(
    None, "--threads", "-t", help="Worker cap; falls back to RSV_THREADS, then 1"
)
CacheOption = typer.Option(
    None, "--cache/--no-cache", help="Reuse cached empirical counts"
)
ConfigOption = typer.Option(
    None,
    "--config",
    "-c",
    help="YAML run configuration; flags override its values",
    exists=True,
    dir_okay=False,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VERDICT = 2


def fail(message: str) -> NoReturn:
    typer.secho(message, fg=typer.colors.RED, err=True)
    raise typer.Exit(EXIT_ERROR)


@contextmanager
def handle_errors():
    """Turn data and usage errors into a red diagnostic and exit code 1."""
    try:
        yield
    except (ValidationError, ValueError, ArithmeticError, OSError) as e:
        fail(str(e))


def require(value, flag: str):
    if value is None:
        fail(f"{flag} is required")
    return value
