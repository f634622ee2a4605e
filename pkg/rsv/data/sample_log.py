import re
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from rsv.utils.arrays import frozen_array

HEADER = "#rsv-samples v1"
HEADER_PATTERN = re.compile(r"^#rsv-samples v1 N=(\d+) seed=(-?\d+|none)\s*$")
COLUMNS = ["t", "x", "run", "y"]


class SampleLogError(ValueError):
    pass


class SampleLog(BaseModel):
    """Observed successors (t, x, run, y) from N runs, stored column-wise.

    States are dense indices into `states`; runs are numbered from 1.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    states: tuple[str, ...]
    t: np.ndarray
    x: np.ndarray
    run: np.ndarray
    y: np.ndarray
    n_runs: int
    seed: Optional[int] = None
    generator: str = ""

    @field_validator("t", "x", "run", "y", mode="before")
    @classmethod
    def freeze_column(cls, value) -> np.ndarray:
        return frozen_array(value, dtype=np.int64)

    @model_validator(mode="after")
    def validate_columns(self) -> "SampleLog":
        lengths = {len(self.t), len(self.x), len(self.run), len(self.y)}
        if len(lengths) != 1:
            raise ValueError("sample log columns have different lengths")
        n = len(self.states)
        for name in ("x", "y"):
            column = getattr(self, name)
            if len(column) and (column.min() < 0 or column.max() >= n):
                raise ValueError(f"column {name} references states outside [0, {n})")
        return self

    def __len__(self) -> int:
        return len(self.t)

    def records(self) -> pd.DataFrame:
        """Records with state identifiers, in file order."""
        names = np.asarray(self.states, dtype=object)
        return pd.DataFrame(
            {"t": self.t, "x": names[self.x], "run": self.run, "y": names[self.y]}
        )


def write_sample_log(log: SampleLog, path: Path) -> None:
    seed = "none" if log.seed is None else str(log.seed)
    with open(path, "w", encoding="utf-8", newline="\n") as file:
        file.write(f"{HEADER} N={log.n_runs} seed={seed}\n")
        if log.generator:
            file.write(f"# generator: {log.generator}\n")
        log.records().to_csv(
            file, sep="\t", header=False, index=False, lineterminator="\n"
        )


def read_sample_log(path: Path, states: tuple[str, ...]) -> SampleLog:
    """Load a sample log; successor and state names must belong to `states`."""
    try:
        with open(path, "r", encoding="utf-8") as file:
            header = file.readline().rstrip("\n")
    except FileNotFoundError:
        raise SampleLogError(f"The file {path} doesn't exist") from None

    match = HEADER_PATTERN.match(header)
    if match is None:
        raise SampleLogError(
            f"{path}: first line must read '{HEADER} N=<int> seed=<int>', "
            f"got {header!r}"
        )
    n_runs = int(match.group(1))
    seed = None if match.group(2) == "none" else int(match.group(2))

    try:
        df = pd.read_csv(
            path,
            sep="\t",
            comment="#",
            header=None,
            names=COLUMNS,
            dtype={"t": np.int64, "x": "category", "run": np.int64, "y": "category"},
        )
    except (ValueError, pd.errors.ParserError) as e:
        raise SampleLogError(f"{path}: unable to parse sample records: {e}") from e

    missing = df[COLUMNS].isna().any(axis=1).to_numpy()
    if missing.any():
        record = int(np.flatnonzero(missing)[0]) + 1
        raise SampleLogError(f"{path}: sample record {record} has an empty field")

    positions = {state: i for i, state in enumerate(states)}
    columns = {}
    for name in ("x", "y"):
        categories = df[name].cat.categories
        unknown = sorted(str(c) for c in categories if str(c) not in positions)
        if unknown:
            raise SampleLogError(f"{path}: unknown states in column {name}: {unknown}")
        codes = df[name].cat.codes.to_numpy()
        if (codes < 0).any():
            record = int(np.flatnonzero(codes < 0)[0]) + 1
            raise SampleLogError(f"{path}: sample record {record} has no {name}")
        lookup = np.array([positions[str(c)] for c in categories], dtype=np.int64)
        columns[name] = lookup[codes]

    return SampleLog(
        states=states,
        t=df["t"].to_numpy(),
        x=columns["x"],
        run=df["run"].to_numpy(),
        y=columns["y"],
        n_runs=n_runs,
        seed=seed,
    )
