import json
import sys
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
from rich.console import Console
from rich.measure import Measurement
from rich.table import Table

from rsv.config.run_config import OutputFormat
from rsv.robust_dp.solver import SafetyTable
from rsv.utils.env import CONSOLE, ERROR_CONSOLE


def table_frame(table: SafetyTable) -> pd.DataFrame:
    """Living values indexed by t, one column per living state."""
    return pd.DataFrame(
        table.living_values(), columns=list(table.partition.living)
    ).rename_axis("t")


def table_document(table: SafetyTable) -> dict:
    document = {
        "scheme": table.scheme.value,
        "radius": table.radius,
        "horizon": table.horizon,
        "values": [
            {x: float(v) for x, v in zip(table.partition.living, row)}
            for row in table.living_values()
        ],
    }
    if table.ambiguity is not None:
        document["ambiguity"] = table.ambiguity.model_dump()
    return document


def intervals_document(lower: np.ndarray, upper: np.ndarray, table: SafetyTable):
    states = table.partition.states
    living = table.partition.living_indices
    return [
        {
            states[i]: {
                y: [float(lower[t, i, j]), float(upper[t, i, j])]
                for j, y in enumerate(states)
            }
            for i in living
        }
        for t in range(table.horizon)
    ]


def rich_table(frame: pd.DataFrame, title: str, signed: bool = False) -> Table:
    """Four-decimal rendering; `signed` prints differences with their sign."""
    pattern = "{:+.4f}" if signed else "{:.4f}"
    table = Table(title=title, header_style="bold cyan")
    table.add_column(frame.index.name or "", justify="right", no_wrap=True)
    cells = [[pattern.format(v) for v in row] for _, row in frame.iterrows()]
    for position, column in enumerate(frame.columns):
        width = max([len(str(column))] + [len(row[position]) for row in cells])
        table.add_column(str(column), justify="right", no_wrap=True, min_width=width)
    for index, row in zip(frame.index, cells):
        table.add_row(str(index), *row)
    return table


def print_table(table: Table, file=None) -> None:
    """Print on a console at least as wide as the table, so no cell is cut."""
    wide = Console(file=file, width=10_000)
    width = Measurement.get(wide, wide.options, table).maximum
    Console(file=file, width=max(width, 80)).print(table)


def long_frame(frames: dict[str, pd.DataFrame]) -> pd.DataFrame:
    """Stack named frames into (table, index, column, value) records."""
    parts = []
    for name, frame in frames.items():
        melted = frame.reset_index().melt(
            id_vars=frame.index.name, var_name="x", value_name="value"
        )
        melted.insert(0, "table", name)
        parts.append(melted)
    return pd.concat(parts, ignore_index=True)


class Reporter:
    """Routes a command's results to stdout or `--out` in the chosen format.

    Human-readable notes go to stdout for tables and to stderr otherwise, so
    JSON and CSV output stays machine-readable.
    """

    def __init__(self, fmt: OutputFormat, out: Optional[Path] = None):
        self.format = fmt
        self.out = out

    @property
    def notes(self) -> Console:
        return CONSOLE if self.format is OutputFormat.TABLE else ERROR_CONSOLE

    def note(self, message: str) -> None:
        self.notes.print(message)

    def emit(
        self,
        document: dict,
        frames: dict[str, pd.DataFrame],
        signed: Optional[set[str]] = None,
    ) -> None:
        signed = signed or set()
        if self.format is OutputFormat.JSON:
            self._write(json.dumps(document, sort_keys=True, indent=2) + "\n")
        elif self.format is OutputFormat.CSV:
            self._write(long_frame(frames).to_csv(index=False))
        elif self.out is None:
            for name, frame in frames.items():
                print_table(rich_table(frame, name, name in signed))
        else:
            with open(self.out, "w", encoding="utf-8") as file:
                for name, frame in frames.items():
                    print_table(rich_table(frame, name, name in signed), file)

    def _write(self, text: str) -> None:
        if self.out is None:
            sys.stdout.write(text)
        else:
            with open(self.out, "w", encoding="utf-8") as file:
                file.write(text)
