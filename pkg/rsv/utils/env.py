import os

from dotenv import load_dotenv
from rich.console import Console


load_dotenv()

CONSOLE = Console()
ERROR_CONSOLE = Console(stderr=True)


def is_debug_enabled() -> bool:
    return os.getenv("RSV_DEBUG", "false").lower() == "true"


def debug(message: str) -> None:
    if is_debug_enabled():
        ERROR_CONSOLE.print(f"[dim]{message}[/]")


def get_threads(default: int = 1) -> int:
    """Worker cap from RSV_THREADS, falling back to `default` when unset or bad."""
    try:
        threads = int(os.environ.get("RSV_THREADS", default))
    except ValueError:
        return default
    return max(threads, 1)
