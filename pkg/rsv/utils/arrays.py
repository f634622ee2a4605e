import numpy as np


def frozen_array(value, dtype=float) -> np.ndarray:
    """Private read-only copy, so immutable records never alias caller buffers."""
    array = np.array(value, dtype=dtype, copy=True)
    array.flags.writeable = False
    return array
