"""The 20-state reference problem and the values published for it.

Living states 1..10, unsafe 11..12, goal 13..20. Action a_H moves uniformly
inside H, a_U uniformly into U and a_E uniformly into E. The evaluation
policy mixes them (0.4, 0.3, 0.3) up to t = 8 and (0, 0.5, 0.5) at t = 9,
so every path is absorbed by the horizon 10.
"""

import numpy as np
import pandas as pd

from rsv.config.model_file import parse_model
from rsv.model.chain import InducedChain, induce_chain
from rsv.model.imdp import ImdpModel
from rsv.model.policy import Policy

HORIZON = 10
DELTA = 0.2
BETA = 0.05
N_SAMPLES = 100_000

LIVING = [str(i) for i in range(1, 11)]
UNSAFE = ["11", "12"]
GOAL = [str(i) for i in range(13, 21)]

# states whose empirical values were published
PRINTED_STATES = ["1", "2", "3", "4"]

# robust values on the nominal chain at radius DELTA, identical for every x in H
ROBUST_COLUMN = [
    0.8332, 0.8332, 0.8331, 0.8327, 0.8319,
    0.8299, 0.8248, 0.8120, 0.7800, 0.7000,
]  # fmt: skip

# empirical rows at radius DELTA + rho, t = 0..9 by PRINTED_STATES
EMPIRICAL_ROBUST_PRINTED = [
    [0.9305, 0.9274, 0.9309, 0.9312],
    [0.9291, 0.9286, 0.9297, 0.9278],
    [0.9291, 0.9299, 0.9296, 0.9293],
    [0.9306, 0.9288, 0.9313, 0.9292],
    [0.9296, 0.9291, 0.9259, 0.9284],
    [0.9269, 0.9259, 0.9231, 0.9247],
    [0.9187, 0.9170, 0.9200, 0.9191],
    [0.9007, 0.9012, 0.9016, 0.9018],
    [0.8608, 0.8600, 0.8638, 0.8593],
    [0.7575, 0.7607, 0.7587, 0.7553],
]

# empirical rows at radius DELTA only
EMPIRICAL_DELTA_PRINTED = [
    [0.8342, 0.8313, 0.8343, 0.8348],
    [0.8328, 0.8321, 0.8332, 0.8317],
    [0.8327, 0.8334, 0.8334, 0.8331],
    [0.8343, 0.8326, 0.8350, 0.8330],
    [0.8336, 0.8333, 0.8302, 0.8322],
    [0.8313, 0.8305, 0.8278, 0.8293],
    [0.8250, 0.8231, 0.8261, 0.8253],
    [0.8107, 0.8111, 0.8115, 0.8115],
    [0.7798, 0.7790, 0.7828, 0.7784],
    [0.6997, 0.7029, 0.7009, 0.6975],
]


def _uniform(states: list[str]) -> dict[str, float]:
    return {y: 1.0 / len(states) for y in states}


def benchmark_document() -> dict:
    """The reference problem as a model-file document."""
    return {
        "states": LIVING + UNSAFE + GOAL,
        "goal": GOAL,
        "unsafe": UNSAFE,
        "actions": ["a_H", "a_U", "a_E"],
        "horizon": HORIZON,
        "kernel": {
            "stationary": {
                "*": {
                    "a_H": _uniform(LIVING),
                    "a_U": _uniform(UNSAFE),
                    "a_E": _uniform(GOAL),
                }
            }
        },
        "policy": {
            "default": {"*": {"a_H": 0.4, "a_U": 0.3, "a_E": 0.3}},
            "overrides": {
                str(HORIZON - 1): {"*": {"a_H": 0.0, "a_U": 0.5, "a_E": 0.5}}
            },
        },
    }


def benchmark_model() -> tuple[ImdpModel, Policy]:
    return parse_model(benchmark_document())


def benchmark_chain() -> InducedChain:
    return induce_chain(*benchmark_model())


def printed_table(values: list[list[float]] | list[float]) -> pd.DataFrame:
    """Published values as a frame indexed by t with one column per state."""
    array = np.asarray(values, dtype=float)
    if array.ndim == 1:
        return pd.DataFrame({x: array for x in LIVING}).rename_axis("t")
    return pd.DataFrame(array, columns=PRINTED_STATES).rename_axis("t")


def compare_printed(
    values: np.ndarray, states: tuple[str, ...], printed: pd.DataFrame
) -> pd.DataFrame:
    """Signed differences computed minus published over the published cells.

    `values` is a (horizon, |X|) slice of a safety table.
    """
    columns = [states.index(x) for x in printed.columns]
    computed = pd.DataFrame(
        values[: len(printed), columns], columns=printed.columns
    ).rename_axis("t")
    return computed - printed
