import math

import numpy as np
import pytest
from sklearn.base import clone

from screened_lgf.core import LatticeConfig
from screened_lgf.periodic3d import (
    Periodic3DConfig,
    PeriodicPoissonSolver,
    convergence_study,
    exact_solution,
    exact_source,
    kappa_mode,
    lgf3d_periodic,
    lgf3d_table,
    solve_poisson3d,
    stencil3d,
)
from screened_lgf.quad1d import plan_quadrature, trapezoid_eval

CFG = Periodic3DConfig(1.0, 0.5, 0.7, 8)


def test_config_checks():
    with pytest.raises(ValueError):
        Periodic3DConfig(1.0, 1.0, 1.0, 7)
    with pytest.raises(ValueError):
        Periodic3DConfig(0.0, 1.0, 1.0, 8)
    assert CFG.swapped is False
    assert CFG.alpha1 == pytest.approx(0.25)
    assert Periodic3DConfig(0.5, 1.0, 0.7, 8).swapped


def test_kappa_modes():
    assert kappa_mode(0, CFG) == 0.0
    assert kappa_mode(4, CFG) == pytest.approx(2 * math.sqrt(CFG.alpha3))
    for k in range(1, 8):
        assert kappa_mode(k, CFG) == pytest.approx(kappa_mode(8 - k, CFG), rel=1e-14)
    with pytest.raises(ValueError):
        kappa_mode(8, CFG)


def test_table_symmetry_and_pointwise():
    G = lgf3d_table(CFG, 6, 6, 1e-12)
    for n3 in range(1, 8):
        assert np.allclose(G[:, :, n3], G[:, :, 8 - n3], atol=1e-14)
    assert lgf3d_periodic((2, 3, 1), CFG, 1e-12) == pytest.approx(G[2, 3, 1], abs=1e-12)
    assert lgf3d_periodic((-2, 3, -7), CFG, 1e-12) == pytest.approx(G[2, 3, 1], abs=1e-12)


@pytest.mark.parametrize("cfg3d", [CFG, Periodic3DConfig(0.5, 1.0, 0.3, 6)])
def test_stencil_residual(cfg3d):
    G = lgf3d_table(cfg3d, 10, 10, 1e-12)
    full = np.concatenate([G[:0:-1], G], 0)
    full = np.concatenate([full[:, :0:-1], full], 1)
    alphas = [1 / cfg3d.dx1**2, 1 / cfg3d.dx2**2, 1 / cfg3d.dx3**2]
    res = stencil3d(full, alphas) * cfg3d.scale
    delta = np.zeros_like(res)
    delta[9, 9, 0] = 1.0
    assert np.abs(res - delta).max() < 100 * 1e-12


def test_two_modes_small_alpha3():
    # n_p = 2: G = (B_diff + B_kappa) / 2 at n3 = 0 with kappa^2 = 4 alpha3
    cfg3d = Periodic3DConfig(1.0, 1.0, 30.0, 2)
    from screened_lgf.quad1d import unscreened_diff

    cfg = LatticeConfig(1.0, 4 * cfg3d.alpha3)
    b = trapezoid_eval(cfg, (1, 2), plan_quadrature(cfg, 1e-13, n_max=1).n_pts)
    expected = 0.5 * (unscreened_diff(1.0, (1, 2), 2**16) + b)
    assert lgf3d_periodic((1, 2, 0), cfg3d, 1e-12) == pytest.approx(expected, abs=1e-9)


def test_solver_matches_direct_convolution():
    rng = np.random.default_rng(0)
    shape = (9, 7, 4)
    src = np.zeros(shape)
    src[3:6, 2:5] = rng.normal(size=(3, 3, 4))
    cfg3d = Periodic3DConfig(0.8, 1.0, 1.3, 4)
    u = solve_poisson3d(src, cfg3d, 1e-12)
    G = lgf3d_table(cfg3d, shape[0] - 1, shape[1] - 1, 1e-12)
    direct = np.zeros(shape)
    for i, j, k in zip(*np.nonzero(src)):
        for a in range(shape[0]):
            for b in range(shape[1]):
                direct[a, b] += src[i, j, k] * G[abs(a - i), abs(b - j), (np.arange(4) - k) % 4]
    assert np.abs(u - cfg3d.scale * direct).max() < 1e-10


def test_solver_linear_and_shift_equivariant():
    cfg3d = Periodic3DConfig(1.0, 1.0, 1.0, 6)
    src = np.zeros((11, 11, 6))
    src[5, 5, 1] = 1.0
    src[4, 6, 2] = -0.5
    solver = PeriodicPoissonSolver(1.0, 1.0, 1.0, 1e-12).fit(src)
    assert np.array_equal(solver.transform(np.zeros_like(src)), np.zeros_like(src))
    u = solver.transform(src)
    shifted = solver.transform(np.roll(src, 1, axis=2))
    assert np.allclose(shifted, np.roll(u, 1, axis=2), atol=1e-13)


def test_solver_rejects_wide_source():
    src = np.ones((5, 5, 4))
    solver = PeriodicPoissonSolver().fit(src)
    with pytest.raises(ValueError):
        solver.transform(src)
    with pytest.raises(ValueError):
        solver.transform(np.zeros((5, 6, 4)))


def test_solver_params():
    est = PeriodicPoissonSolver(dx1=0.5, eps=1e-9)
    assert est.get_params()["dx1"] == 0.5
    assert clone(est).get_params() == est.get_params()


def test_manufactured_source():
    x, y, z = 0.1, -0.3, 0.7
    h = 1e-4
    lap = sum(
        (exact_solution(*(np.add((x, y, z), h * e))) - 2 * exact_solution(x, y, z)
         + exact_solution(*(np.subtract((x, y, z), h * e)))) / h**2
        for e in np.eye(3)
    )
    assert exact_source(x, y, z) == pytest.approx(-lap, rel=1e-5)


@pytest.mark.slow
def test_convergence_second_order():
    _, slope = convergence_study(2.0, levels=(8, 16, 32))
    assert 1.8 <= slope <= 2.2
