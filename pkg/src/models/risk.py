"""
Data models for MSE risk and likelihood estimates.
"""
from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field

from src.models.arrays import FROZEN_ARRAYS, FloatArray


class RiskMode(str, Enum):
    ML = "ml"
    UNBIASED = "unbiased"


class RiskEstimates(BaseModel):
    """Plug-in estimates behind the optimal delta-factors and the rank-one bias model."""

    model_config = FROZEN_ARRAYS

    mode: RiskMode = Field(..., description="Bias-vector plug-in convention")
    phi2_hat: FloatArray = Field(..., description="ML non-centrality estimates n rho^2 / (1 - R^2)")
    delta_star: FloatArray = Field(..., description="Optimal delta-factors phi^2 / (phi^2 + 1)")
    gamma_ml: FloatArray = Field(..., description="ML estimates of the true components")
    bias_vec: FloatArray = Field(..., description="Estimated gamma / sigma per component")
    sigma2: float = Field(..., description="Error variance the relative risks are measured against")


class ExcessEigen(BaseModel):
    """Eigen-analysis of MSE(OLS) - MSE(shrunken), relative to sigma^2."""

    model_config = FROZEN_ARRAYS

    eigenvalues: FloatArray = Field(..., description="Excess eigenvalues, descending")
    inferior_direction: Optional[FloatArray] = Field(
        None, description="Unit direction cosines in x-space, present iff the smallest eigenvalue is negative"
    )

    @property
    def has_inferior_direction(self) -> bool:
        return self.inferior_direction is not None


class QSearchResult(BaseModel):
    """Best q-shape on a mesh."""

    q_best: float = Field(..., description="Shape with the smallest lattice -2 log(LR)")
    m_best: float = Field(..., description="Lattice m of that minimum")
    lr_min: float = Field(..., description="Minimum -2 log(LR)")
    lr_by_q: dict[float, float] = Field(default_factory=dict, description="Minimum -2 log(LR) per searched q")
