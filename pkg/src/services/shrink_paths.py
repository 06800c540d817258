"""
Shrinkage paths on a lattice of m-extents.

Three kinds are built here: the efficient two-piece linear spline through the
minimum-MSE knot, the one-parameter q-shape ridge family, and the simple
regression (p = 1) path used for the YonX display.
"""
import logging
import math
from typing import Optional

import numpy as np
from scipy import optimize, special

from src.errors import ConvergenceError, PathError
from src.models.canonical import CanonicalForm, StandardizedModel
from src.models.paths import PathKind, ShrinkagePath, YonXDisplay
from src.services.model_core import back_transform, canonicalize
from src.services.risk_lab import check_delta, delta_knot, neg2_log_lr
from src.tracing import get_tracer, instrument_function

logger = logging.getLogger(__name__)
tracer = get_tracer()

KNOT_TOLERANCE = 1e-12
LOG_K_LIMIT = 1e4


def mcal(delta) -> float:
    """
    m-extent of a shrinkage pattern, p minus the sum of its delta-factors.

    Args:
        delta: Delta-factors in [0, 1]

    Returns:
        m in [0, p]
    """
    delta = np.asarray(delta, dtype=float)
    if delta.ndim != 1 or delta.shape[0] == 0:
        raise PathError(f"Expected a non-empty delta vector, got shape {delta.shape}")
    delta = check_delta(delta, delta.shape[0])
    return float(delta.shape[0] - delta.sum())


def efficient_delta(delta_star, m: float) -> np.ndarray:
    """
    Delta-factors of the efficient spline at any m-extent.

    The first piece runs straight from all-ones (m = 0) to the knot, the second
    from the knot to all-zeros (m = p).

    Args:
        delta_star: Knot delta-factors
        m: Target m-extent in [0, p]

    Returns:
        Delta-factors at m
    """
    delta_star = np.asarray(delta_star, dtype=float)
    p = delta_star.shape[0]
    if not 0.0 <= m <= p:
        raise PathError(f"m-extent {m} outside [0, {p}]")

    m_star = mcal(delta_star)
    if m_star > KNOT_TOLERANCE and m <= m_star:
        delta = 1.0 - (m / m_star) * (1.0 - delta_star)
    else:
        delta = delta_star * (p - m) / (p - m_star)
    return np.clip(delta, 0.0, 1.0)


def _lattice(p: int, steps: int, knot: Optional[float] = None) -> tuple[np.ndarray, int]:
    """Regular m-lattice, with the knot inserted when it falls between lattice points."""
    if steps < 1:
        raise PathError(f"steps must be a positive integer, got {steps}")

    lattice = np.arange(p * steps + 1) / steps
    if knot is None:
        return lattice, 0

    nearest = int(np.argmin(np.abs(lattice - knot)))
    if abs(lattice[nearest] - knot) <= 1e-9:
        return lattice, nearest

    index = int(np.searchsorted(lattice, knot))
    return np.insert(lattice, index, knot), index


def _is_degenerate(m_star: float, p: int) -> bool:
    return m_star <= KNOT_TOLERANCE or m_star >= p - KNOT_TOLERANCE


@instrument_function(tracer, "build_efficient_path")
def build_efficient_path(cf: CanonicalForm, steps: int = 8) -> ShrinkagePath:
    """
    Shortest path from OLS to the origin passing through the knot.

    Args:
        cf: Canonical form
        steps: Lattice points per unit m

    Returns:
        Efficient ShrinkagePath with the knot on its lattice
    """
    delta_star = delta_knot(cf)
    m_star = mcal(delta_star)
    lattice, knot_index = _lattice(cf.p, steps, m_star)

    deltas = np.array([efficient_delta(delta_star, m) for m in lattice])
    deltas[0] = 1.0
    deltas[-1] = 0.0
    if abs(lattice[knot_index] - m_star) > KNOT_TOLERANCE:
        logger.debug(f"Knot m={m_star:.6f} snapped to lattice m={lattice[knot_index]:.6f}")

    degenerate = _is_degenerate(m_star, cf.p)
    if degenerate:
        logger.warning(f"Degenerate knot at m={m_star:.4f}: efficient path reduces to a single linear piece")

    logger.info(f"Efficient path: p={cf.p}, steps={steps}, knot m*={m_star:.4f}, {lattice.shape[0]} lattice points")
    return ShrinkagePath(
        kind=PathKind.EFFICIENT,
        p=cf.p,
        steps=steps,
        lattice=lattice,
        deltas=deltas,
        m_star=m_star,
        delta_star=delta_star,
        knot_index=knot_index,
        degenerate=degenerate,
    )


def qm_delta(cf: CanonicalForm, q: float, k: float) -> np.ndarray:
    """
    Delta-factors of the q-shape ridge family, 1 / (1 + k lambda^(q-1)).

    Args:
        cf: Canonical form
        q: Shape; 0 is ordinary ridge, 1 shrinks every component equally
        k: Ridge parameter; math.inf gives the terminus

    Returns:
        Delta-factors
    """
    if k < 0 or math.isnan(k):
        raise PathError(f"Ridge parameter k must be nonnegative, got {k}")
    if k == 0.0:
        return np.ones(cf.p)
    if math.isinf(k):
        return np.zeros(cf.p)
    return special.expit(-(math.log(k) + (q - 1.0) * np.log(cf.lam)))


def _delta_at_log_k(cf: CanonicalForm, q: float, log_k: float) -> np.ndarray:
    return special.expit(-(log_k + (q - 1.0) * np.log(cf.lam)))


def solve_k_for_m(cf: CanonicalForm, q: float, m_target: float) -> float:
    """
    Ridge parameter placing a q-shape path at a given m-extent.

    m increases strictly with ln k, so the root is bracketed and refined on ln k.

    Args:
        cf: Canonical form
        q: Shape parameter
        m_target: Target m-extent in [0, p]

    Returns:
        k (0 at m = 0, math.inf at m = p)
    """
    p = cf.p
    if not -KNOT_TOLERANCE <= m_target <= p + KNOT_TOLERANCE:
        raise PathError(f"m-extent {m_target} outside [0, {p}]")
    if m_target <= 0.0:
        return 0.0
    if m_target >= p:
        return math.inf

    def excess(log_k: float) -> float:
        return float(p - _delta_at_log_k(cf, q, log_k).sum()) - m_target

    lo, hi = -1.0, 1.0
    while excess(lo) > 0.0:
        lo *= 2.0
        if lo < -LOG_K_LIMIT:
            raise ConvergenceError(f"Cannot bracket k for m={m_target} (q={q})")
    while excess(hi) < 0.0:
        hi *= 2.0
        if hi > LOG_K_LIMIT:
            raise ConvergenceError(f"Cannot bracket k for m={m_target} (q={q})")

    log_k = optimize.brentq(excess, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=500)
    return math.exp(log_k)


@instrument_function(tracer, "build_qm_path")
def build_qm_path(cf: CanonicalForm, q: float, steps: int = 8) -> ShrinkagePath:
    """
    q-shape ridge path realized on the regular m-lattice.

    Args:
        cf: Canonical form
        q: Shape parameter
        steps: Lattice points per unit m

    Returns:
        qm ShrinkagePath whose m_star is the lattice point of minimal -2 log(LR)
    """
    lattice, _ = _lattice(cf.p, steps)
    k_values = np.array([solve_k_for_m(cf, q, m) for m in lattice])
    deltas = np.array([qm_delta(cf, q, k) for k in k_values])
    lr_values = np.array([neg2_log_lr(cf, d) for d in deltas])

    knot_index = int(np.argmin(lr_values))
    logger.info(
        f"q-shape path q={q}: minimum -2log(LR)={lr_values[knot_index]:.3f} at m={lattice[knot_index]:.3f}"
    )
    return ShrinkagePath(
        kind=PathKind.QM,
        p=cf.p,
        steps=steps,
        lattice=lattice,
        deltas=deltas,
        m_star=float(lattice[knot_index]),
        delta_star=deltas[knot_index],
        knot_index=knot_index,
        q=float(q),
        k_values=k_values,
        lr_values=lr_values,
    )


def coef_at_delta(cf: CanonicalForm, delta) -> np.ndarray:
    """Shrunken coefficients G diag(delta) c in standardized units."""
    delta = check_delta(delta, cf.p)
    return cf.g @ (delta * cf.c)


def path_coefficients(cf: CanonicalForm, path: ShrinkagePath) -> np.ndarray:
    """Shrunken coefficients at every lattice point (rows) of a path."""
    if path.p != cf.p:
        raise PathError(f"Path dimension {path.p} does not match the model's p={cf.p}")
    return (path.deltas * cf.c) @ cf.g.T


@instrument_function(tracer, "build_yonx_path")
def build_yonx_path(model: StandardizedModel, steps: int = 8) -> ShrinkagePath:
    """
    Shrinkage path of a simple regression of y on one x.

    Args:
        model: Standardized model with exactly one predictor
        steps: Lattice points per unit m

    Returns:
        yonx ShrinkagePath with delta(m) = 1 - m and the OLS, minimum-MSE and
        double-shrunk fitted lines in original units
    """
    if model.p != 1:
        raise PathError(f"YonX needs exactly one predictor, got p={model.p}")

    cf = canonicalize(model)
    delta_star = delta_knot(cf)
    m_star = mcal(delta_star)
    lattice, knot_index = _lattice(1, steps, m_star)
    deltas = (1.0 - lattice)[:, None]

    degenerate = _is_degenerate(m_star, 1)
    if degenerate:
        logger.warning(f"Degenerate knot at m={m_star:.4f} for {model.y_name} ~ {model.x_names[0]}")

    display_m = np.array([0.0, m_star, min(2.0 * m_star, 1.0)])
    fits = [back_transform(model, coef_at_delta(cf, [1.0 - m])) for m in display_m]
    display = YonXDisplay(
        m=display_m,
        slopes=[float(beta[0]) for beta, _ in fits],
        intercepts=[intercept for _, intercept in fits],
        x_mean=float(model.x_means[0]),
        y_mean=model.y_mean,
    )

    logger.info(f"YonX path {model.y_name} ~ {model.x_names[0]}: m*={m_star:.4f}, OLS slope={display.slopes[0]:.4f}")
    return ShrinkagePath(
        kind=PathKind.YONX,
        p=1,
        steps=steps,
        lattice=lattice,
        deltas=deltas,
        m_star=m_star,
        delta_star=delta_star,
        knot_index=knot_index,
        degenerate=degenerate,
        display=display,
    )
