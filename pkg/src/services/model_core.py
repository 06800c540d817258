"""
Standardization and SVD canonical form of a linear model.
"""
import logging
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from src.errors import DataError, RankDeficiencyError
from src.models.canonical import CanonicalForm, StandardizedModel
from src.services.linalg import fix_column_signs, jacobi_svd
from src.tracing import get_tracer, instrument_function

logger = logging.getLogger(__name__)
tracer = get_tracer()

MIN_OBSERVATIONS = 5
RANK_TOLERANCE = 1e-9


def read_table(path: Path | str) -> pd.DataFrame:
    """
    Load a comma-separated table with a header row of column names.

    Args:
        path: CSV file (UTF-8, '.' decimal separator)

    Returns:
        DataFrame with one column per header name
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"Data file not found: {path}")

    frame = pd.read_csv(path, encoding="utf-8", skipinitialspace=True)
    logger.info(f"Read {len(frame)} rows x {frame.shape[1]} columns from {path}")
    return frame


def _numeric_column(table: pd.DataFrame, name: str) -> np.ndarray:
    if name not in table.columns:
        raise DataError(f"Unknown column '{name}'; available: {', '.join(map(str, table.columns))}")

    column = table[name]
    if not pd.api.types.is_numeric_dtype(column) or pd.api.types.is_bool_dtype(column):
        bad = pd.to_numeric(column, errors="coerce").isna() & column.notna()
        row = int(np.argmax(bad.to_numpy())) if bad.any() else 0
        raise DataError(f"Non-numeric cell in column '{name}' at row {row + 1}: {column.iloc[row]!r}")
    if column.isna().any():
        raise DataError(f"Missing value in column '{name}' at row {int(column.isna().to_numpy().argmax()) + 1}")

    values = column.to_numpy(dtype=float)
    if not np.all(np.isfinite(values)):
        raise DataError(f"Non-finite value in column '{name}'")
    return values


def _scale(values: np.ndarray, name: str) -> tuple[float, float]:
    mean = float(values.mean())
    scale = float(values.std(ddof=1))
    if scale <= 1e-12 * max(1.0, abs(mean)):
        raise DataError(f"zero-variance column '{name}'")
    return mean, scale


def _unit_variance(values: np.ndarray, mean: float, scale: float) -> np.ndarray:
    z = (values - mean) / scale
    # second pass removes the rounding left by large offsets
    z = z - z.mean()
    return z / z.std(ddof=1)


def standardize(table: pd.DataFrame, y_name: str, x_names: Sequence[str]) -> StandardizedModel:
    """
    Center and rescale y and each named X column to mean 0, variance 1.

    Args:
        table: Labelled numeric columns
        y_name: Outcome column
        x_names: Predictor columns in model order

    Returns:
        StandardizedModel with the original means and scales recorded
    """
    x_names = list(x_names)
    if not x_names:
        raise DataError("At least one predictor column is required")

    y_raw = _numeric_column(table, y_name)
    x_raw = np.column_stack([_numeric_column(table, name) for name in x_names])
    n, p = x_raw.shape

    if n < MIN_OBSERVATIONS:
        raise DataError(f"Need at least {MIN_OBSERVATIONS} observations, got {n}")
    if n <= p:
        raise DataError(f"Fat data unsupported: n={n} observations for p={p} predictors (need n > p)")

    y_mean, y_scale = _scale(y_raw, y_name)
    x_stats = [_scale(x_raw[:, j], name) for j, name in enumerate(x_names)]

    y = _unit_variance(y_raw, y_mean, y_scale)
    x = np.column_stack([_unit_variance(x_raw[:, j], *x_stats[j]) for j in range(p)])

    logger.info(f"Standardized {y_name} ~ {' + '.join(x_names)} (n={n}, p={p})")
    return StandardizedModel(
        n=n,
        p=p,
        y=y,
        x=x,
        y_mean=y_mean,
        y_scale=y_scale,
        x_means=[m for m, _ in x_stats],
        x_scales=[s for _, s in x_stats],
        y_name=y_name,
        x_names=x_names,
    )


@instrument_function(tracer, "canonicalize")
def canonicalize(model: StandardizedModel) -> CanonicalForm:
    """
    Compute the SVD canonical form X = H diag(lambda)^1/2 G'.

    Args:
        model: Standardized model

    Returns:
        CanonicalForm with eigenvalues descending and each column of G
        sign-fixed so its largest-magnitude entry is positive
    """
    h, s, g = jacobi_svd(model.x)

    deficient = int(np.sum(s <= RANK_TOLERANCE * s[0]))
    if deficient:
        raise RankDeficiencyError(deficient, float(s[-1]), float(s[0]))

    signs = fix_column_signs(g)
    g = g * signs
    h = h * signs

    n, p = model.n, model.p
    lam = s ** 2
    yty = float(model.y @ model.y)
    z = h.T @ model.y
    c = z / s
    rho = z / np.sqrt(yty)
    r2 = float(min(1.0, np.sum(rho ** 2)))
    rss = max(0.0, yty * (1.0 - r2))
    df = n - p - 1

    with np.errstate(divide="ignore", invalid="ignore"):
        f_ratios = np.where(rho == 0.0, 0.0, df * rho ** 2 / (1.0 - r2)) if df > 0 else np.full(p, np.nan)

    cf = CanonicalForm(
        n=n,
        p=p,
        x_names=model.x_names,
        lam=lam,
        g=g,
        h=h,
        c=c,
        rho=rho,
        r2=r2,
        yty=yty,
        rss=rss,
        sigma2_ml=rss / n,
        sigma2_unb=rss / df if df > 0 else float("nan"),
        f_ratios=f_ratios,
        beta_ols=g @ c,
    )

    if cf.exact_fit:
        logger.warning("Exact fit (R^2 = 1): residual variance is zero and risk estimates are undefined")
    logger.info(f"Canonical form: R^2={r2:.4f}, condition number={s[0] / s[-1]:.1f}")
    return cf


def back_transform(model: StandardizedModel, beta_std: np.ndarray) -> tuple[np.ndarray, float]:
    """
    Express standardized coefficients in original units.

    Args:
        model: Standardized model holding the original means and scales
        beta_std: Length-p coefficients in standardized units

    Returns:
        (coefficients, intercept) in original units
    """
    beta_std = np.asarray(beta_std, dtype=float)
    if beta_std.shape != (model.p,):
        raise DataError(f"Expected {model.p} coefficients, got shape {beta_std.shape}")
    if not np.all(np.isfinite(beta_std)):
        raise DataError("Coefficients must be finite")

    beta_orig = beta_std * model.y_scale / model.x_scales
    intercept = float(model.y_mean - beta_orig @ model.x_means)
    return beta_orig, intercept
