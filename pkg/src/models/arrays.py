"""
Numpy array field types for immutable pydantic models.
"""
from typing import Annotated

import numpy as np
from pydantic import BeforeValidator, ConfigDict, PlainSerializer


def _readonly_float_array(value) -> np.ndarray:
    arr = np.array(value, dtype=float)
    arr.setflags(write=False)
    return arr


def _to_list(arr: np.ndarray) -> list:
    return arr.tolist()


FloatArray = Annotated[
    np.ndarray,
    BeforeValidator(_readonly_float_array),
    PlainSerializer(_to_list, return_type=list),
]

FROZEN_ARRAYS = ConfigDict(frozen=True, arbitrary_types_allowed=True)
