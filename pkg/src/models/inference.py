"""
Data models for elliptical confidence regions of coefficient pairs.
"""
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from src.models.arrays import FROZEN_ARRAYS, FloatArray


class EllipseSpec(BaseModel):
    """Confidence ellipses for one coefficient pair with the shrinkage trajectory overlaid."""

    model_config = FROZEN_ARRAYS

    pair: Tuple[int, int] = Field(..., description="Coefficient indices")
    names: Tuple[str, str] = Field(..., description="Coefficient labels")
    center: FloatArray = Field(..., description="OLS values of the pair")
    cov2: FloatArray = Field(..., description="2 x 2 covariance block of the OLS pair")
    levels: FloatArray = Field(..., description="Confidence levels in (0, 1)")
    thresholds: FloatArray = Field(..., description="Quadratic-form bound 2 F(2, n-p-1, level) per level")
    boundaries: List[FloatArray] = Field(..., description="Boundary points (k x 2) per level")
    overlay: FloatArray = Field(..., description="Path trajectory of the pair (lattice x 2)")
    overlay_m: FloatArray = Field(..., description="m-extent of each overlay point")
    knot: FloatArray = Field(..., description="Pair values at the path knot")
    units: str = Field("standardized", description="standardized or original")

    @model_validator(mode="after")
    def _check_covariance(self):
        if self.cov2.shape != (2, 2) or not np.allclose(self.cov2, self.cov2.T, rtol=0, atol=1e-14 * np.abs(self.cov2).max()):
            raise ValueError("cov2 must be a symmetric 2 x 2 matrix")
        if len(self.boundaries) != len(self.levels) or len(self.thresholds) != len(self.levels):
            raise ValueError("one boundary and threshold per level")
        return self
