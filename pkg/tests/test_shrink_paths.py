import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.errors import PathError
from src.models.paths import PathKind
from src.services.model_core import back_transform, canonicalize, standardize
from src.services.shrink_paths import (
    build_efficient_path,
    build_qm_path,
    build_yonx_path,
    coef_at_delta,
    efficient_delta,
    mcal,
    path_coefficients,
    qm_delta,
    solve_k_for_m,
)
from tests.conftest import random_table

PORTLAND_KNOT = [0.9986, 0.0743, 0.9266, 0.1528]


@pytest.mark.parametrize(
    "delta, expected",
    [
        ([1.0, 1.0, 1.0, 1.0], 0.0),
        ([0.9986, 0.0743, 0.9266, 0.1528], 1.8477),
        ([0.0, 0.0, 0.0, 0.0], 4.0),
    ],
)
def test_mcal(delta, expected):
    assert mcal(delta) == pytest.approx(expected, abs=1e-4)


def test_mcal_rejects_out_of_range():
    with pytest.raises(PathError):
        mcal([1.2, 0.5])


def test_efficient_knot(portland_path):
    assert_allclose(portland_path.delta_star, PORTLAND_KNOT, atol=5e-4)
    assert portland_path.m_star == pytest.approx(1.848, abs=0.005)
    assert portland_path.lattice[portland_path.knot_index] == portland_path.m_star
    assert_allclose(portland_path.deltas[portland_path.knot_index], portland_path.delta_star, atol=1e-15)
    assert not portland_path.degenerate


def test_efficient_endpoints_and_m_identity(portland_path):
    assert_allclose(portland_path.deltas[0], 1.0)
    assert_allclose(portland_path.deltas[-1], 0.0)
    m = 4.0 - portland_path.deltas.sum(axis=1)
    assert_allclose(m, portland_path.lattice, rtol=0, atol=1e-9)


def test_efficient_lattice_includes_off_lattice_knot(portland_cf):
    for steps in (1, 8, 20):
        path = build_efficient_path(portland_cf, steps)
        assert path.size == 4 * steps + 2
        assert path.steps == steps


def test_efficient_deltas_nonincreasing(portland_path):
    assert np.all(np.diff(portland_path.deltas, axis=0) <= 1e-15)


def test_efficient_second_piece_midpoint(portland_path):
    m = (portland_path.m_star + 4.0) / 2
    assert_allclose(efficient_delta(portland_path.delta_star, m), portland_path.delta_star / 2, rtol=1e-12)


def test_efficient_delta_ordering(portland_path):
    interior = portland_path.deltas[1:-1]
    d1, d2, d3, d4 = interior.T
    assert np.all(d2 <= d4)
    assert np.all(d4 <= d3)
    assert np.all(d4 <= d1)


def test_coefficients_proportional_beyond_knot(portland_cf, portland_path):
    coef = path_coefficients(portland_cf, portland_path)
    knot = coef[portland_path.knot_index]
    for m, beta in zip(portland_path.lattice, coef):
        if m >= portland_path.m_star:
            assert_allclose(beta, knot * (4.0 - m) / (4.0 - portland_path.m_star), rtol=1e-12, atol=1e-15)


def test_p4caf_sign_correction(portland_cf, portland_path):
    coef = path_coefficients(portland_cf, portland_path)[:, 2]
    assert coef[0] > 0
    after = portland_path.lattice > 0.75
    assert np.all(coef[after & (portland_path.lattice < 4.0)] < 0)


def test_qm_delta_at_zero_k(portland_cf):
    for q in (-5.0, 0.0, 2.5):
        assert_allclose(qm_delta(portland_cf, q, 0.0), 1.0)


def test_qm_delta_uniform_shape(portland_cf):
    assert_allclose(qm_delta(portland_cf, 1.0, 0.25), np.full(4, 0.8))


def test_qm_delta_ordinary_ridge(portland_cf):
    lam = portland_cf.lam
    assert_allclose(qm_delta(portland_cf, 0.0, 3.0), lam / (lam + 3.0), rtol=1e-14)


def test_qm_delta_decreases_in_k(portland_cf):
    previous = qm_delta(portland_cf, -2.0, 1e-3)
    for k in (1e-2, 1e-1, 1.0, 10.0, 100.0):
        current = qm_delta(portland_cf, -2.0, k)
        assert np.all(current < previous)
        previous = current


def test_qm_delta_rejects_negative_k(portland_cf):
    with pytest.raises(PathError):
        qm_delta(portland_cf, 0.0, -1.0)


def test_solve_k_endpoints(portland_cf):
    assert solve_k_for_m(portland_cf, -5.0, 0.0) == 0.0
    k = solve_k_for_m(portland_cf, -5.0, 4.0)
    assert math.isinf(k)
    assert_allclose(qm_delta(portland_cf, -5.0, k), 0.0)


def test_solve_k_round_trip(p2_cf):
    for m in np.arange(17) / 8:
        k = solve_k_for_m(p2_cf, 0.0, m)
        assert mcal(qm_delta(p2_cf, 0.0, k)) == pytest.approx(m, abs=1e-10)


def test_solve_k_rejects_out_of_range(portland_cf):
    with pytest.raises(PathError):
        solve_k_for_m(portland_cf, 0.0, 4.5)


def test_qm_path_lattice_and_monotonicity(portland_cf):
    for q in (-5.0, 0.0, 3.0):
        path = build_qm_path(portland_cf, q, 8)
        assert path.kind is PathKind.QM
        assert path.size == 33
        assert_allclose(path.lattice[1] - path.lattice[0], 0.125)
        assert_allclose(4.0 - path.deltas.sum(axis=1), path.lattice, atol=1e-9)
        assert np.all(np.diff(path.deltas, axis=0) <= 1e-12)


def test_qm_path_most_likely_shape(qm5_path):
    assert qm5_path.q == -5.0
    assert qm5_path.m_star == pytest.approx(2.1, abs=0.05)
    assert qm5_path.lr_values[qm5_path.knot_index] == pytest.approx(26.4, abs=0.3)


def test_qm_path_ordinary_ridge_is_hoerl_kennard(portland_cf):
    path = build_qm_path(portland_cf, 0.0, 4)
    lam = portland_cf.lam
    for k, delta in zip(path.k_values[1:-1], path.deltas[1:-1]):
        assert_allclose(delta, lam / (lam + k), rtol=1e-12)


def test_coef_at_delta_endpoints(portland_cf):
    assert_allclose(coef_at_delta(portland_cf, np.ones(4)), portland_cf.beta_ols, atol=1e-14)
    assert_allclose(coef_at_delta(portland_cf, np.zeros(4)), 0.0)


def test_yonx_path(yonx_model, yonx_path):
    assert yonx_path.kind is PathKind.YONX
    assert yonx_path.m_star == pytest.approx(0.161, abs=0.001)
    assert_allclose(yonx_path.deltas[:, 0], 1.0 - yonx_path.lattice, atol=1e-15)

    display = yonx_path.display
    assert display.slopes[0] == pytest.approx(-1.256, abs=0.01)
    assert_allclose(display.m, [0.0, yonx_path.m_star, 2 * yonx_path.m_star])
    fitted_at_mean = display.intercepts + display.slopes * display.x_mean
    assert_allclose(fitted_at_mean, yonx_model.y_mean, rtol=0, atol=1e-10)


def test_yonx_slopes_flatten(yonx_path):
    ols, min_mse, double = np.abs(yonx_path.display.slopes)
    assert ols > min_mse > double


def test_yonx_display_matches_back_transform(yonx_model, yonx_cf, yonx_path):
    delta = 1.0 - yonx_path.m_star
    beta, _ = back_transform(yonx_model, coef_at_delta(yonx_cf, [delta]))
    assert yonx_path.display.slopes[1] == pytest.approx(beta[0], rel=1e-12)


def test_yonx_requires_single_predictor(portland_model):
    with pytest.raises(PathError, match="exactly one predictor"):
        build_yonx_path(portland_model)


def test_exact_fit_path_is_single_piece(exact_cf):
    path = build_efficient_path(exact_cf, 8)
    assert path.degenerate
    assert path.m_star == 0.0
    assert_allclose(path.deltas[:, 0], 1.0 - path.lattice)


def test_m_identity_on_random_models(rng):
    for _ in range(20):
        p = int(rng.integers(1, 6))
        names = [f"x{j + 1}" for j in range(p)]
        cf = canonicalize(standardize(random_table(rng, int(rng.integers(p + 6, 40)), p), "y", names))
        for path in (build_efficient_path(cf, 8), build_qm_path(cf, float(rng.uniform(-3, 3)), 4)):
            assert_allclose(p - path.deltas.sum(axis=1), path.lattice, rtol=0, atol=1e-9)
            assert_allclose(path.deltas[0], 1.0)
            assert_allclose(path.deltas[-1], 0.0)
