"""
Data models for shrinkage paths realized on a lattice of m-extents.
"""
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from src.models.arrays import FROZEN_ARRAYS, FloatArray


class PathKind(str, Enum):
    EFFICIENT = "efficient"
    QM = "qm"
    YONX = "yonx"


class YonXDisplay(BaseModel):
    """Three fitted lines of a simple regression in original units."""

    model_config = FROZEN_ARRAYS

    m: FloatArray = Field(..., description="m-extents of the OLS, minimum-MSE and double-shrunk fits")
    slopes: FloatArray = Field(..., description="Slopes in original units")
    intercepts: FloatArray = Field(..., description="Intercepts in original units")
    x_mean: float = Field(..., description="Predictor mean in original units")
    y_mean: float = Field(..., description="Outcome mean in original units")


class ShrinkagePath(BaseModel):
    """Named shrinkage path with one delta-vector per lattice point."""

    model_config = FROZEN_ARRAYS

    kind: PathKind = Field(..., description="efficient, qm or yonx")
    p: int = Field(..., ge=1, description="Dimension")
    steps: int = Field(..., ge=1, description="Lattice density per unit m")
    lattice: FloatArray = Field(..., description="Ordered m-extents from 0 to p")
    deltas: FloatArray = Field(..., description="Delta-vector per lattice point (len(lattice) x p)")
    m_star: float = Field(..., description="Knot m-extent, or the lattice m of minimal -2 log(LR) for qm")
    delta_star: FloatArray = Field(..., description="Delta-vector at m_star")
    knot_index: int = Field(..., ge=0, description="Lattice index of m_star")
    degenerate: bool = Field(False, description="Knot sits at m = 0 or m = p; the spline has one piece")
    q: Optional[float] = Field(None, description="Shape parameter (qm only)")
    k_values: Optional[FloatArray] = Field(None, description="Ridge k per lattice point (qm only)")
    lr_values: Optional[FloatArray] = Field(None, description="-2 log(LR) per lattice point (qm only)")
    display: Optional[YonXDisplay] = Field(None, description="Fitted lines (yonx only)")

    @model_validator(mode="after")
    def _check_lattice(self):
        n_points = self.lattice.shape[0]
        if self.deltas.shape != (n_points, self.p):
            raise ValueError(f"deltas must be {n_points} x {self.p}")
        if np.any(np.diff(self.lattice) <= 0):
            raise ValueError("lattice must be strictly increasing")
        if self.lattice[0] != 0.0 or abs(self.lattice[-1] - self.p) > 1e-12:
            raise ValueError("lattice must span [0, p]")
        if np.any(self.deltas < 0.0) or np.any(self.deltas > 1.0):
            raise ValueError("delta components must lie in [0, 1]")
        if self.knot_index >= n_points:
            raise ValueError("knot index outside the lattice")
        return self

    @property
    def size(self) -> int:
        return int(self.lattice.shape[0])
