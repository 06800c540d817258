"""
Data models for TRACE diagnostic bundles and bundled datasets.
"""
from typing import List, Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, model_validator

from src.models.arrays import FROZEN_ARRAYS, FloatArray
from src.models.paths import ShrinkagePath
from src.models.risk import RiskMode

TRACE_TYPES = ("coef", "spat", "rmse", "exev", "infd", "lr")


class TraceBundle(BaseModel):
    """Every diagnostic series of one path, evaluated on its lattice."""

    model_config = FROZEN_ARRAYS

    path: ShrinkagePath = Field(..., description="Path the series were evaluated on")
    mode: RiskMode = Field(..., description="Bias-vector convention used for risk series")
    x_names: List[str] = Field(..., description="Coefficient labels")
    coef: FloatArray = Field(..., description="Shrunken coefficients per lattice point")
    spat: FloatArray = Field(..., description="Shrinkage pattern (delta-factors) per lattice point")
    rmse: FloatArray = Field(..., description="Relative MSE per coefficient per lattice point")
    exev: FloatArray = Field(..., description="Excess eigenvalues per lattice point")
    infd: List[Optional[FloatArray]] = Field(..., description="Inferior direction cosines or None per lattice point")
    lr: FloatArray = Field(..., description="-2 log(LR) per lattice point, inf where unattainable")
    exact_fit: bool = Field(False, description="Risk series are undefined because the fit is exact")

    @model_validator(mode="after")
    def _check_lengths(self):
        size = self.path.size
        for name in ("coef", "spat", "rmse", "exev", "lr"):
            if getattr(self, name).shape[0] != size:
                raise ValueError(f"{name} series must have {size} rows")
        if len(self.infd) != size:
            raise ValueError(f"infd series must have {size} rows")
        return self

    @property
    def lattice(self) -> np.ndarray:
        return self.path.lattice

    @property
    def m_star(self) -> float:
        return self.path.m_star

    @property
    def p(self) -> int:
        return self.path.p


class FavorabilityReport(BaseModel):
    """Whether shrinkage beyond m = 1 is supported by both risk diagnostics."""

    m_risk_min: float = Field(..., description="Lattice m minimising the summed relative MSE")
    m_inferior_onset: Optional[float] = Field(None, description="First lattice m with an inferior direction")
    favorable: bool = Field(..., description="Risk minimum beyond m = 1 and no inferior direction up to m = 1")


class Dataset(BaseModel):
    """Bundled numeric table with labelled columns."""

    model_config = FROZEN_ARRAYS

    name: str = Field(..., description="Dataset identifier")
    columns: List[str] = Field(..., description="Column labels")
    values: FloatArray = Field(..., description="Rows x columns numeric table")
    source: str = Field("", description="Citation for the values")

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(np.array(self.values), columns=self.columns)
