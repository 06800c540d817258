"""
Elliptical confidence regions for pairs of OLS coefficients.
"""
import logging
import math
from typing import Sequence

import numpy as np
from scipy import optimize, special

from src.errors import InferenceError
from src.models.canonical import CanonicalForm, StandardizedModel
from src.models.inference import EllipseSpec
from src.models.paths import ShrinkagePath
from src.services.shrink_paths import path_coefficients
from src.tracing import get_tracer, instrument_function

logger = logging.getLogger(__name__)
tracer = get_tracer()

DEFAULT_BOUNDARY_POINTS = 128
QUANTILE_TOLERANCE = 1e-12


def f_cdf(x: float, df1: int, df2: int) -> float:
    """Lower tail probability of an F(df1, df2) variate."""
    if x <= 0.0:
        return 0.0
    return float(special.betainc(df1 / 2.0, df2 / 2.0, df1 * x / (df1 * x + df2)))


def f_quantile(df1: int, df2: int, prob: float) -> float:
    """
    Inverse CDF of the F distribution.

    The CDF is a regularized incomplete beta function of df1 x / (df1 x + df2);
    the root is bracketed by doubling and refined with Brent's method.

    Args:
        df1: Numerator degrees of freedom
        df2: Denominator degrees of freedom
        prob: Lower tail probability in (0, 1)

    Returns:
        x with P(F <= x) = prob
    """
    if df1 < 1 or df2 < 1:
        raise InferenceError(f"Degrees of freedom must be positive, got ({df1}, {df2})")
    if not 0.0 < prob < 1.0:
        raise InferenceError(f"Probability must lie strictly between 0 and 1, got {prob}")

    def excess(x: float) -> float:
        return f_cdf(x, df1, df2) - prob

    hi = 1.0
    while excess(hi) < 0.0:
        hi *= 2.0
        if hi > 1e300:
            raise InferenceError(f"F quantile overflow for prob={prob}")

    return float(optimize.brentq(excess, 0.0, hi, xtol=QUANTILE_TOLERANCE, rtol=4 * np.finfo(float).eps, maxiter=500))


def ols_covariance(cf: CanonicalForm) -> np.ndarray:
    """Unbiased covariance of the standardized OLS coefficients, sigma^2 G diag(1/lambda) G'."""
    if cf.residual_df < 1:
        raise InferenceError(f"No residual degrees of freedom (n={cf.n}, p={cf.p})")
    return cf.sigma2_unb * (cf.g / cf.lam) @ cf.g.T


@instrument_function(tracer, "confidence_ellipse")
def confidence_ellipse(
    cf: CanonicalForm,
    i: int,
    j: int,
    levels: Sequence[float],
    path: ShrinkagePath,
    points: int = DEFAULT_BOUNDARY_POINTS,
) -> EllipseSpec:
    """
    Unbiased confidence ellipses for coefficients i and j.

    Args:
        cf: Canonical form
        i: First coefficient index
        j: Second coefficient index
        levels: Confidence levels in (0, 1)
        path: Shrinkage path whose trajectory is overlaid
        points: Boundary points per ellipse

    Returns:
        EllipseSpec in standardized units
    """
    if i == j:
        raise InferenceError(f"Ellipse needs two distinct coefficients, got ({i}, {j})")
    if not (0 <= i < cf.p and 0 <= j < cf.p):
        raise InferenceError(f"Coefficient indices ({i}, {j}) outside 0..{cf.p - 1}")
    levels = [float(level) for level in levels]
    if not levels:
        raise InferenceError("At least one confidence level is required")
    for level in levels:
        if not 0.0 < level < 1.0:
            raise InferenceError(f"Confidence level must lie strictly between 0 and 1, got {level}")
    if points < 3:
        raise InferenceError(f"At least 3 boundary points are required, got {points}")

    idx = [i, j]
    cov2 = ols_covariance(cf)[np.ix_(idx, idx)]
    cov2 = 0.5 * (cov2 + cov2.T)
    try:
        chol = np.linalg.cholesky(cov2)
    except np.linalg.LinAlgError as e:
        raise InferenceError(f"Degenerate covariance for coefficients ({i}, {j}): {e}") from e

    center = cf.beta_ols[idx]
    theta = 2.0 * np.pi * np.arange(points) / points
    circle = np.vstack([np.cos(theta), np.sin(theta)])
    thresholds = [2.0 * f_quantile(2, cf.residual_df, level) for level in levels]
    boundaries = [center + (math.sqrt(t) * chol @ circle).T for t in thresholds]

    overlay = path_coefficients(cf, path)[:, idx]

    logger.info(
        f"Confidence ellipses for ({cf.x_names[i]}, {cf.x_names[j]}) at levels {levels}: thresholds "
        + ", ".join(f"{t:.4f}" for t in thresholds)
    )
    return EllipseSpec(
        pair=(i, j),
        names=(cf.x_names[i], cf.x_names[j]),
        center=center,
        cov2=cov2,
        levels=levels,
        thresholds=thresholds,
        boundaries=boundaries,
        overlay=overlay,
        overlay_m=path.lattice,
        knot=overlay[path.knot_index],
    )


def quadratic_form(spec: EllipseSpec, point) -> float:
    """(point - center)' cov2^-1 (point - center)."""
    d = np.asarray(point, dtype=float) - spec.center
    return float(d @ np.linalg.solve(spec.cov2, d))


def inside_region(spec: EllipseSpec, point, level: float) -> bool:
    """
    Whether a coefficient pair lies in the confidence region at `level`.

    Args:
        spec: Ellipse specification (point must use the same units)
        point: Coefficient pair
        level: One of spec.levels

    Returns:
        True when the quadratic form does not exceed the level's threshold
    """
    matches = np.flatnonzero(np.isclose(spec.levels, level, rtol=0.0, atol=1e-12))
    if matches.size == 0:
        raise InferenceError(f"Level {level} not among the ellipse levels {list(spec.levels)}")
    return quadratic_form(spec, point) <= spec.thresholds[matches[0]]


def ellipse_to_original(spec: EllipseSpec, model: StandardizedModel) -> EllipseSpec:
    """
    Rescale an ellipse from standardized to original coefficient units.

    Args:
        spec: Ellipse in standardized units
        model: Model holding the original scales

    Returns:
        EllipseSpec with units "original"
    """
    if spec.units != "standardized":
        raise InferenceError(f"Ellipse is already in {spec.units} units")

    scale = model.y_scale / model.x_scales[list(spec.pair)]
    return EllipseSpec(
        pair=spec.pair,
        names=spec.names,
        center=spec.center * scale,
        cov2=spec.cov2 * np.outer(scale, scale),
        levels=spec.levels,
        thresholds=spec.thresholds,
        boundaries=[b * scale for b in spec.boundaries],
        overlay=spec.overlay * scale,
        overlay_m=spec.overlay_m,
        knot=spec.knot * scale,
        units="original",
    )
