"""
Maximum-likelihood and unbiased risk estimators for generalized ridge shrinkage.

All quantities live in the canonical (gamma) coordinates of a CanonicalForm
and are rotated back to coefficient space only where a diagnostic is read in
terms of the original x-variables.
"""
import logging
import math
from typing import Optional, Sequence

import numpy as np
from scipy import stats

from src.errors import EstimationError, PathError
from src.models.canonical import CanonicalForm
from src.models.paths import ShrinkagePath
from src.models.risk import ExcessEigen, QSearchResult, RiskEstimates, RiskMode
from src.services.linalg import fix_column_signs, jacobi_eigh
from src.tracing import get_tracer, instrument_function

logger = logging.getLogger(__name__)
tracer = get_tracer()

DELTA_TOLERANCE = 1e-12
LR_TIE_TOLERANCE = 1e-9


def check_delta(delta, p: int) -> np.ndarray:
    """Validate a length-p delta vector with components in [0, 1]."""
    delta = np.asarray(delta, dtype=float)
    if delta.shape != (p,):
        raise PathError(f"Expected a delta vector of length {p}, got shape {delta.shape}")
    if np.any(delta < -DELTA_TOLERANCE) or np.any(delta > 1.0 + DELTA_TOLERANCE) or np.any(np.isnan(delta)):
        raise PathError(f"Delta components must lie in [0, 1]: {delta}")
    return np.clip(delta, 0.0, 1.0)


def delta_knot(cf: CanonicalForm) -> np.ndarray:
    """
    Delta-factors most likely to have minimum MSE risk.

    delta*_j = n rho_j^2 / (n rho_j^2 + 1 - R^2); all ones in the R^2 = 1 limit.
    """
    if cf.exact_fit:
        return np.ones(cf.p)
    nr2 = cf.n * cf.rho ** 2
    return nr2 / (nr2 + (1.0 - cf.r2))


def gamma_ml(cf: CanonicalForm) -> np.ndarray:
    """ML estimates of the uncorrelated components: n rho^3 / (n rho^2 + 1 - R^2) * sqrt(y'y / lambda)."""
    if cf.exact_fit:
        return np.array(cf.c)
    nr2 = cf.n * cf.rho ** 2
    return cf.n * cf.rho ** 3 / (nr2 + (1.0 - cf.r2)) * np.sqrt(cf.yty / cf.lam)


def risk_estimates(cf: CanonicalForm, mode: RiskMode = RiskMode.ML) -> RiskEstimates:
    """
    Plug-in estimates for the rank-one bias model.

    Args:
        cf: Canonical form
        mode: ml uses b = c / sigma_ML (sign(c) phi / sqrt(lambda));
            unbiased uses b^2 = max(0, c^2 / sigma^2 - 1 / lambda)
            with sigma^2 = RSS / (n-p-1)

    Returns:
        RiskEstimates
    """
    mode = RiskMode(mode)
    if cf.exact_fit:
        raise EstimationError("Relative MSE risk is undefined for an exact fit (zero residual variance)")

    phi2 = cf.n * cf.rho ** 2 / (1.0 - cf.r2)
    if mode is RiskMode.ML:
        sigma2 = cf.sigma2_ml
        bias = cf.c / math.sqrt(sigma2)
    else:
        sigma2 = cf.sigma2_unb
        b2 = np.maximum(0.0, cf.c ** 2 / sigma2 - 1.0 / cf.lam)
        bias = np.where(cf.c < 0, -1.0, 1.0) * np.sqrt(b2)

    return RiskEstimates(
        mode=mode,
        phi2_hat=phi2,
        delta_star=delta_knot(cf),
        gamma_ml=gamma_ml(cf),
        bias_vec=bias,
        sigma2=sigma2,
    )


def mse_matrix(cf: CanonicalForm, delta, mode: RiskMode = RiskMode.ML, estimates: Optional[RiskEstimates] = None) -> np.ndarray:
    """Relative MSE matrix in gamma coordinates: diag(delta^2 / lambda) + (I - D) b b' (I - D)."""
    delta = check_delta(delta, cf.p)
    est = estimates or risk_estimates(cf, mode)
    w = (1.0 - delta) * est.bias_vec
    m = np.outer(w, w)
    m[np.diag_indices_from(m)] += delta ** 2 / cf.lam
    return m


def relative_mse_diag(cf: CanonicalForm, delta, mode: RiskMode = RiskMode.ML, estimates: Optional[RiskEstimates] = None) -> np.ndarray:
    """
    Relative MSE risk of each shrunken coefficient.

    Args:
        cf: Canonical form
        delta: Shrinkage factors
        mode: Bias-vector convention
        estimates: Precomputed estimates for the same cf and mode

    Returns:
        diag(G M G') per coefficient
    """
    m = mse_matrix(cf, delta, mode, estimates)
    return np.einsum("ij,jk,ik->i", cf.g, m, cf.g)


def excess_eigen(cf: CanonicalForm, delta, mode: RiskMode = RiskMode.ML, estimates: Optional[RiskEstimates] = None) -> ExcessEigen:
    """
    Eigenvalues of MSE(OLS) - MSE(shrunken) and the inferior direction.

    The difference is a diagonal PSD matrix minus a rank-one term, so at most
    one eigenvalue can be negative.

    Args:
        cf: Canonical form
        delta: Shrinkage factors
        mode: Bias-vector convention
        estimates: Precomputed estimates for the same cf and mode

    Returns:
        ExcessEigen with the direction cosines of the negative eigenvalue, if any
    """
    delta = check_delta(delta, cf.p)
    est = estimates or risk_estimates(cf, mode)
    w = (1.0 - delta) * est.bias_vec
    e = np.diag((1.0 - delta ** 2) / cf.lam) - np.outer(w, w)

    values, vectors = jacobi_eigh(e)
    scale = max(1.0, float(np.max(np.abs(values))))
    values = np.where(np.abs(values) <= DELTA_TOLERANCE * scale, 0.0, values)

    direction = None
    if values[-1] < 0.0:
        d = cf.g @ vectors[:, -1]
        d = d / np.linalg.norm(d)
        direction = d * fix_column_signs(d[:, None])[0]
    return ExcessEigen(eigenvalues=values, inferior_direction=direction)


def inferior_terminal_alignment(cf: CanonicalForm, path: ShrinkagePath, mode: RiskMode = RiskMode.ML) -> float:
    """
    |Pearson correlation| between the inferior direction at m = p and the OLS direction cosines.

    Args:
        cf: Canonical form the path was built from
        path: Any path; all share the terminus delta = 0
        mode: Bias-vector convention

    Returns:
        Alignment in [0, 1]; 1 by convention when p = 1
    """
    terminal = excess_eigen(cf, path.deltas[-1], mode)
    if not terminal.has_inferior_direction:
        raise EstimationError("No inferior direction exists at the shrinkage terminus")
    if cf.p == 1:
        return 1.0
    if cf.p == 2:
        # two points always correlate perfectly
        return 1.0

    ols = cf.beta_ols / np.linalg.norm(cf.beta_ols)
    corr = np.corrcoef(terminal.inferior_direction, ols)[0, 1]
    return float(min(1.0, abs(corr)))


def neg2_log_lr(cf: CanonicalForm, delta) -> float:
    """
    -2 log(likelihood ratio) that delta has minimum MSE risk.

    The constrained likelihood sets |gamma_j| = sigma sqrt(d_j / lambda_j),
    d_j = delta_j / (1 - delta_j), with signs and sigma chosen to maximize it.

    Args:
        cf: Canonical form
        delta: Shrinkage factors

    Returns:
        Chi-square scale statistic; inf when some delta_j = 1 (constraint unattainable)
    """
    delta = check_delta(delta, cf.p)
    if cf.exact_fit or np.any(delta >= 1.0):
        return math.inf

    n = cf.n
    v = np.sqrt(delta / (1.0 - delta))
    u = np.sqrt(cf.lam) * np.abs(cf.c)
    s = float(u @ v)
    sigma = 2.0 * cf.yty / (s + math.sqrt(s * s + 4.0 * n * cf.yty))
    q = cf.rss + float(np.sum((u - sigma * v) ** 2))
    return n * math.log(sigma ** 2 / cf.sigma2_ml) + q / sigma ** 2 - n


def lr_critical(df: int, level: float) -> float:
    """Upper `level` point of a chi-square variate with `df` degrees of freedom."""
    return float(stats.chi2.ppf(level, df))


@instrument_function(tracer, "q_search")
def q_search(cf: CanonicalForm, mesh: Sequence[float], steps: int = 8) -> QSearchResult:
    """
    Mesh search for the q-shape whose path gets closest to the knot.

    Args:
        cf: Canonical form
        mesh: Candidate q values
        steps: Lattice density of each candidate path

    Returns:
        QSearchResult; ties go to the q nearest 0
    """
    from src.services.shrink_paths import build_qm_path

    mesh = list(mesh)
    if not mesh:
        raise EstimationError("q mesh must not be empty")

    lr_by_q = {}
    m_by_q = {}
    for q in mesh:
        path = build_qm_path(cf, q, steps)
        lr_by_q[float(q)] = float(path.lr_values[path.knot_index])
        m_by_q[float(q)] = path.m_star

    lr_min = min(lr_by_q.values())
    tied = [q for q, lr in lr_by_q.items() if lr - lr_min <= LR_TIE_TOLERANCE * max(1.0, abs(lr_min))]
    q_best = min(tied, key=abs)

    logger.info(f"q-shape search over {len(mesh)} values: best q={q_best}, -2log(LR)={lr_by_q[q_best]:.3f}")
    return QSearchResult(q_best=q_best, m_best=m_by_q[q_best], lr_min=lr_by_q[q_best], lr_by_q=lr_by_q)


def q_best_p2(cf: CanonicalForm) -> float:
    """
    MSE-optimal q-shape of a rank-two model.

    Each component is MSE-optimal when k lambda_i^(q-1) = sigma^2 / (lambda_i gamma_i^2);
    equating k across both gives q = -ln(c1^2 / c2^2) / ln(lambda1 / lambda2)
    with the OLS components c standing in for gamma.
    """
    if cf.p != 2:
        raise EstimationError(f"Optimal q-shape needs exactly 2 predictors, got {cf.p}")
    lam1, lam2 = cf.lam
    if lam1 == lam2:
        raise EstimationError("Optimal q-shape is undefined for equal eigenvalues")
    c1, c2 = cf.c
    if c1 == 0.0 or c2 == 0.0:
        raise EstimationError("Optimal q-shape is undefined when an OLS component estimate is zero")
    return -math.log(c1 ** 2 / c2 ** 2) / math.log(lam1 / lam2)
