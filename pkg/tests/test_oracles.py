import warnings

import numpy as np
import pytest

from screened_lgf.core import LatticeConfig
from screened_lgf.fft_batch import batch_row, batch_table
from screened_lgf.oracles import (
    OracleDivergenceWarning,
    apply_stencil,
    bessel_tail_bound,
    oracle_2d_grid,
    oracle_2d_quadrature,
    oracle_bessel,
    oracle_truncated_solve,
    residual_check,
    unfold_quadrant,
)
from screened_lgf.quad1d import plan_quadrature, trapezoid_eval
from screened_lgf.series import series_eval


def test_2d_quadrature_vs_series():
    cfg = LatticeConfig(1.0, 100.0)
    assert abs(oracle_2d_quadrature(cfg, (0, 0), 64) - series_eval(cfg, (0, 0), 20)) < 1e-13


def test_2d_quadrature_even():
    cfg = LatticeConfig.from_c(0.5, 0.7)
    assert oracle_2d_quadrature(cfg, (3, 2)) == oracle_2d_quadrature(cfg, (-3, 2))
    grid = oracle_2d_grid(cfg, [-2, 2], [1], 256)
    assert grid[0, 0] == pytest.approx(grid[1, 0], abs=1e-17)


def test_truncated_solve_matches_row():
    cfg = LatticeConfig(1.0, 1.0)
    row = batch_row(cfg, 0, 10, 1e-14).values
    for R in (40, 120):
        u = oracle_truncated_solve(cfg, R)
        assert np.abs(u[R : R + 11, R] - row).max() < 1e-10
    u = oracle_truncated_solve(cfg, 20)
    assert np.allclose(u, u[::-1], atol=1e-15)
    assert np.allclose(u, u[:, ::-1], atol=1e-15)


def test_truncated_difference_mode():
    cfg = LatticeConfig(1.0, 0.0)
    vals = [oracle_truncated_solve(cfg, R, difference=True)[R + 1, R] for R in (32, 64)]
    assert vals[-1] == pytest.approx(-0.25, abs=1e-12)


def test_truncated_solve_cap():
    with pytest.raises(ValueError):
        oracle_truncated_solve(LatticeConfig(1.0, 1.0), 200)


def test_bessel_matches_trapezoid():
    cfg = LatticeConfig.from_c(0.5, 0.3)
    n_pts = 2 * plan_quadrature(cfg, 1e-14, n_max=2).n_pts
    assert abs(oracle_bessel(cfg, (2, 1), 200.0) - trapezoid_eval(cfg, (2, 1), n_pts)) < 1e-9


def test_bessel_matches_series():
    cfg = LatticeConfig(1.0, 9.0)
    assert abs(oracle_bessel(cfg, (0, 0), 10.0) - series_eval(cfg, (0, 0), 60)) < 1e-10


def test_bessel_tail_flag():
    cfg = LatticeConfig.from_c(0.5, 0.01)
    assert bessel_tail_bound(cfg, 1e3) == pytest.approx(np.exp(-0.1) / 1e-4)
    with pytest.warns(OracleDivergenceWarning):
        oracle_bessel(cfg, (0, 0), 1e3, tol=1e-10)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        oracle_bessel(LatticeConfig(1.0, 4.0), (0, 0), 10.0, tol=1e-10)


def test_residual_of_constant():
    c2 = 0.3
    u = np.full((7, 9), 2.0)
    assert np.allclose(apply_stencil(u, 0.5, c2), c2 * 2.0)


def test_unfold_quadrant():
    q = np.arange(6.0).reshape(2, 3)
    full = unfold_quadrant(q)
    assert full.shape == (3, 5)
    assert np.array_equal(full, full[::-1])
    assert np.array_equal(full, full[:, ::-1])
    assert np.array_equal(full[1:, 2:], q)


def test_residual_check_tight_table():
    cfg = LatticeConfig.from_c(0.5, 0.4)
    report = residual_check(batch_table(cfg, 20, 25, 1e-13), cfg)
    assert report.max_interior_residual < 100 * 1e-13
    assert report.origin_residual_minus_one < 100 * 1e-13
    assert report.boundary_skipped == 21 + 25


def test_residual_check_needs_room():
    with pytest.raises(ValueError):
        residual_check(np.ones((2, 5)), LatticeConfig(1.0, 1.0))
