from contextlib import contextmanager
from enum import Enum

from rich.console import Console
from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    SpinnerColumn,
    TaskProgressColumn,
    TextColumn,
    TimeElapsedColumn,
)


class PhaseColor(Enum):
    SAMPLE = "green"
    SOLVE = "cyan"
    VALIDATE = "yellow"
    MONTE_CARLO = "magenta"


class ProgressManager:
    def __init__(self, phase: str, enabled: bool = True):
        self.console = Console(stderr=True)
        self.color = PhaseColor[phase.upper()].value
        self.enabled = enabled
        self.progress = Progress(
            SpinnerColumn(speed=2),
            TextColumn(f"[{self.color}]" + "{task.description}", justify="right"),
            BarColumn(),
            MofNCompleteColumn(),
            TaskProgressColumn(),
            TimeElapsedColumn(),
            console=self.console,
            disable=not enabled,
        )

    @contextmanager
    def task(
        self, description: str, total: int, completed: int = 0, transient: bool = True
    ):
        with self.progress as progress:
            task_id = progress.add_task(description, total=total, completed=completed)
            yield lambda: progress.advance(task_id)
            if transient:
                progress.remove_task(task_id)
