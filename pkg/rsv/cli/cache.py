from enum import Enum

import typer

from rsv.utils.cache import CountsCache


class CacheAction(str, Enum):
    CLEAR = "clear"
    INFO = "info"


def cache_command(
    action: CacheAction = typer.Argument(..., help="Action to perform: clear or info"),
):
    """Manage the cache of empirical successor counts."""
    cache = CountsCache()

    if action == CacheAction.CLEAR:
        cache.clear()
        typer.echo("Cache cleared")
    elif action == CacheAction.INFO:
        typer.echo(f"Cache directory: {cache.directory}")
        typer.echo(f"Cache entries: {len(cache)}")
        typer.echo(f"Cache size: {cache.volume()} bytes")
