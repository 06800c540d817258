"""
Jacobi rotations for the small dense problems of generalized ridge regression.

p is at most a few dozen in every supported case, so plain cyclic sweeps are
fast enough and easy to verify.
"""
import logging
import math

import numpy as np

from src.errors import ConvergenceError

logger = logging.getLogger(__name__)

SVD_TOLERANCE = 1e-14
SVD_MAX_SWEEPS = 60
EIGEN_TOLERANCE = 1e-12
EIGEN_MAX_SWEEPS = 100


def _rotation(zeta: float) -> tuple[float, float]:
    """Cosine and sine of the smaller Jacobi rotation angle for cot(2θ) = zeta."""
    t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
    c = 1.0 / math.sqrt(1.0 + t * t)
    return c, c * t


def jacobi_svd(a: np.ndarray, tol: float = SVD_TOLERANCE, max_sweeps: int = SVD_MAX_SWEEPS):
    """
    One-sided (Hestenes) Jacobi SVD of a tall matrix.

    Columns are rotated pairwise until every pair is orthogonal to within
    ``tol`` relative to the product of their norms.

    Args:
        a: n x p matrix with n >= p
        tol: Relative orthogonality threshold
        max_sweeps: Sweep limit

    Returns:
        (u, s, v) with a = u @ diag(s) @ v.T, s descending. Columns of u that
        belong to zero singular values are returned unnormalized (zero).
    """
    u = np.array(a, dtype=float, copy=True)
    n_rows, p = u.shape
    v = np.eye(p)

    for sweep in range(max_sweeps):
        off = 0.0
        for i in range(p - 1):
            for j in range(i + 1, p):
                alpha = float(u[:, i] @ u[:, i])
                beta = float(u[:, j] @ u[:, j])
                gamma = float(u[:, i] @ u[:, j])
                scale = math.sqrt(alpha * beta)
                if gamma == 0.0 or scale == 0.0:
                    continue
                off = max(off, abs(gamma) / scale)
                if abs(gamma) <= tol * scale:
                    continue

                c, s = _rotation((beta - alpha) / (2.0 * gamma))
                ui = u[:, i].copy()
                u[:, i] = c * ui - s * u[:, j]
                u[:, j] = s * ui + c * u[:, j]
                vi = v[:, i].copy()
                v[:, i] = c * vi - s * v[:, j]
                v[:, j] = s * vi + c * v[:, j]

        if off <= tol:
            logger.debug(f"Jacobi SVD converged after {sweep + 1} sweep(s)")
            break
    else:
        # rounding can keep the measure hovering just above tol
        if off > 1e-12:
            raise ConvergenceError(f"Jacobi SVD did not converge in {max_sweeps} sweeps (off={off:.2e})")

    s = np.linalg.norm(u, axis=0)
    order = np.argsort(-s, kind="stable")
    s = s[order]
    u = u[:, order]
    v = v[:, order]
    nonzero = s > 0
    u[:, nonzero] = u[:, nonzero] / s[nonzero]
    return u, s, v


def jacobi_eigh(a: np.ndarray, tol: float = EIGEN_TOLERANCE, max_sweeps: int = EIGEN_MAX_SWEEPS):
    """
    Cyclic Jacobi eigen-decomposition of a symmetric matrix.

    Args:
        a: Symmetric p x p matrix
        tol: Off-diagonal threshold relative to the Frobenius norm
        max_sweeps: Sweep limit

    Returns:
        (eigenvalues descending, eigenvectors as columns)
    """
    a = np.array(a, dtype=float, copy=True)
    p = a.shape[0]
    v = np.eye(p)
    norm = np.linalg.norm(a)
    threshold = tol * norm

    for sweep in range(max_sweeps):
        off = math.sqrt(float(np.sum(np.tril(a, -1) ** 2)))
        if off <= threshold:
            break
        for k in range(p - 1):
            for l in range(k + 1, p):
                if a[k, l] == 0.0:
                    continue
                c, s = _rotation((a[l, l] - a[k, k]) / (2.0 * a[k, l]))

                ak = a[:, k].copy()
                a[:, k] = c * ak - s * a[:, l]
                a[:, l] = s * ak + c * a[:, l]
                ak = a[k, :].copy()
                a[k, :] = c * ak - s * a[l, :]
                a[l, :] = s * ak + c * a[l, :]
                a[k, l] = a[l, k] = 0.0

                vk = v[:, k].copy()
                v[:, k] = c * vk - s * v[:, l]
                v[:, l] = s * vk + c * v[:, l]
    else:
        off = math.sqrt(float(np.sum(np.tril(a, -1) ** 2)))
        if off > threshold:
            raise ConvergenceError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps")

    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    return values[order], v[:, order]


def fix_column_signs(vectors: np.ndarray) -> np.ndarray:
    """Sign per column that makes its largest-magnitude entry positive."""
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return signs
