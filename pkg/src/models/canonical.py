"""
Data models for standardized regression data and its SVD canonical form.
"""
import math
from typing import List

import numpy as np
from pydantic import BaseModel, Field, model_validator

from src.models.arrays import FROZEN_ARRAYS, FloatArray

EXACT_FIT_TOLERANCE = 1e-12


class StandardizedModel(BaseModel):
    """Centered, unit-variance y-vector and X-matrix plus back-transformation constants."""

    model_config = FROZEN_ARRAYS

    n: int = Field(..., ge=2, description="Observation count")
    p: int = Field(..., ge=1, description="Predictor count")
    y: FloatArray = Field(..., description="Standardized outcome vector (length n)")
    x: FloatArray = Field(..., description="Standardized predictor matrix (n x p)")
    y_mean: float = Field(..., description="Outcome mean in original units")
    y_scale: float = Field(..., gt=0, description="Outcome standard deviation in original units")
    x_means: FloatArray = Field(..., description="Predictor means in original units")
    x_scales: FloatArray = Field(..., description="Predictor standard deviations in original units")
    y_name: str = Field(..., description="Outcome label")
    x_names: List[str] = Field(..., description="Predictor labels in column order")

    @model_validator(mode="after")
    def _check_standardization(self):
        if self.y.shape != (self.n,) or self.x.shape != (self.n, self.p):
            raise ValueError(f"shape mismatch: y {self.y.shape}, x {self.x.shape} for n={self.n}, p={self.p}")
        if self.p > self.n - 1:
            raise ValueError(f"p={self.p} predictors need at least {self.p + 1} observations")
        if self.x_means.shape != (self.p,) or self.x_scales.shape != (self.p,) or len(self.x_names) != self.p:
            raise ValueError("predictor means, scales and names must have length p")
        if np.any(self.x_scales <= 0):
            raise ValueError("predictor scales must be strictly positive")

        columns = np.column_stack([self.y, self.x])
        if np.max(np.abs(columns.mean(axis=0))) > 1e-12:
            raise ValueError("standardized columns must have mean 0")
        if np.max(np.abs(columns.var(axis=0, ddof=1) - 1.0)) > 1e-10:
            raise ValueError("standardized columns must have variance 1")
        return self


class CanonicalForm(BaseModel):
    """SVD-derived quantities X = H diag(lambda)^1/2 G' consumed by every estimator."""

    model_config = FROZEN_ARRAYS

    n: int = Field(..., description="Observation count")
    p: int = Field(..., description="Predictor count")
    x_names: List[str] = Field(..., description="Predictor labels in column order")
    lam: FloatArray = Field(..., description="Eigenvalues of X'X, descending")
    g: FloatArray = Field(..., description="p x p orthogonal rotation G")
    h: FloatArray = Field(..., description="n x p semi-orthogonal basis H")
    c: FloatArray = Field(..., description="Uncorrelated components of the OLS solution")
    rho: FloatArray = Field(..., description="Principal correlations between y and the columns of H")
    r2: float = Field(..., ge=0, le=1, description="Coefficient of determination")
    yty: float = Field(..., gt=0, description="y'y of the standardized outcome")
    rss: float = Field(..., ge=0, description="Residual sum of squares y'y(1 - R^2)")
    sigma2_ml: float = Field(..., ge=0, description="RSS / n")
    sigma2_unb: float = Field(..., description="RSS / (n - p - 1); NaN without residual degrees of freedom")
    f_ratios: FloatArray = Field(..., description="F statistics for testing each component")
    beta_ols: FloatArray = Field(..., description="OLS coefficients in standardized units")

    @model_validator(mode="after")
    def _check_shapes(self):
        p = self.p
        for name in ("lam", "c", "rho", "f_ratios", "beta_ols"):
            if getattr(self, name).shape != (p,):
                raise ValueError(f"{name} must have length {p}")
        if self.g.shape != (p, p) or self.h.shape != (self.n, p):
            raise ValueError("G must be p x p and H must be n x p")
        if np.any(self.lam <= 0) or np.any(np.diff(self.lam) > 0):
            raise ValueError("eigenvalues must be positive and sorted descending")
        return self

    @property
    def residual_df(self) -> int:
        return self.n - self.p - 1

    @property
    def exact_fit(self) -> bool:
        """True when the OLS fit reproduces y (R^2 = 1 limit)."""
        return 1.0 - self.r2 <= EXACT_FIT_TOLERANCE

    @property
    def neg2_log_lr_terminus(self) -> float:
        """-n ln(1 - R^2), shared by every path at m = p."""
        if self.exact_fit:
            return math.inf
        return -self.n * math.log1p(-self.r2)
