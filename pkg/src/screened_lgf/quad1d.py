"""Small-screening evaluation through the one-dimensional integral

    B_c(n, m) = 1/(2 pi) int_{-pi}^{pi} cos(n theta) / (K**m (K - 1/K)) dtheta,

    phi = lam + c2 - 2 alpha1 cos(theta),   K = (phi + sqrt(phi**2 - 4)) / 2,

approximated by the periodic trapezoid rule, with a priori node counts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    LatticeConfig,
    as_tolerance,
    canonicalize,
    require_screened,
)

DEFAULT_DELTA = 0.01
N_OPT_GRID = 4096


def _shifted_phi(theta, alpha1: float, c2: float):
    """phi - 2 = c2 + 4 alpha1 sin^2(theta/2), free of cancellation near theta = 0."""
    s = np.sin(0.5 * np.asarray(theta, dtype=float))
    return c2 + 4.0 * alpha1 * s * s


def _k_parts(theta, alpha1: float, c2: float):
    """Return (log K, K - 1/K) evaluated stably."""
    d = _shifted_phi(theta, alpha1, c2)
    root = np.sqrt(d * (d + 4.0))  # sqrt(phi^2 - 4) = K - 1/K
    log_k = np.log1p(0.5 * (d + root))
    return log_k, root


def integrand(theta, cfg: LatticeConfig, m: int):
    """f(theta) = 1 / (K**m (K - 1/K)); even, positive and finite for c2 > 0."""
    require_screened(cfg)
    if m < 0:
        raise ValueError("m must be >= 0")
    log_k, root = _k_parts(theta, cfg.alpha1, cfg.c2)
    return np.exp(-m * log_k) / root


def nodes(n_pts: int) -> np.ndarray:
    """theta_k = 2 pi k / N - pi for k = 1..N."""
    if n_pts < 1:
        raise ValueError("n_pts must be >= 1")
    return 2.0 * np.pi * np.arange(1, n_pts + 1) / n_pts - np.pi


def _cos_table(ns, n_pts: int) -> np.ndarray:
    """cos(n theta_k) for the trapezoid nodes, ``out[i, k]``.

    n theta_k = 2 pi (n k mod N) / N - n pi, so reducing the integer phase
    first keeps the argument below 2 pi and the cosine accurate for large n.
    """
    ns = np.asarray(ns, dtype=np.int64)
    k = np.arange(1, n_pts + 1, dtype=np.int64)
    phase = np.outer(ns, k) % n_pts
    sign = np.where(ns % 2, -1.0, 1.0)[:, None]
    return sign * np.cos(2.0 * np.pi * phase / n_pts)


def trapezoid_eval(cfg: LatticeConfig, p, n_pts: int) -> float:
    n, m = canonicalize(p)
    theta = nodes(n_pts)
    return float(np.dot(_cos_table([n], n_pts)[0], integrand(theta, cfg, m)) / n_pts)


def trapezoid_grid(cfg: LatticeConfig, ns, ms, n_pts: int) -> np.ndarray:
    """Trapezoid values for every pair, returned as ``out[i, j] = B(ns[i], ms[j])``."""
    require_screened(cfg)
    ns = np.abs(np.asarray(ns, dtype=int))
    ms = np.abs(np.asarray(ms, dtype=int))
    theta = nodes(n_pts)
    log_k, root = _k_parts(theta, cfg.alpha1, cfg.c2)
    F = np.exp(-np.outer(ms, log_k)) / root
    return _cos_table(ns, n_pts) @ F.T / n_pts


def gamma_eta(eta: float) -> float:
    """Strip half-width log(1 + eta/2 + sqrt((1 + eta/2)^2 - 1))."""
    x = 0.5 * eta
    return math.log1p(x + math.sqrt(x * (2.0 + x)))


def m_eta(cfg: LatticeConfig, eta: float) -> float:
    return 0.5 / math.sqrt(cfg.c2 / cfg.alpha1 - eta)


def _check_eta(cfg: LatticeConfig, eta: float) -> None:
    if not 0.0 < eta < cfg.c2 / cfg.alpha1:
        raise ValueError(f"eta must lie in (0, c2/alpha1) = (0, {cfg.c2 / cfg.alpha1:g})")


def quad_error_bound(cfg: LatticeConfig, n: int, n_pts: int, eta: float) -> float:
    """A priori bound on |trapezoid_eval - B_c| for first index ``n``."""
    require_screened(cfg)
    _check_eta(cfg, eta)
    if n_pts <= n:
        raise ValueError("bound needs n_pts > n")
    g = gamma_eta(eta)
    if g * (n_pts - n) > 700.0:
        return 0.0  # below the smallest double
    return 2.0 * m_eta(cfg, eta) / (math.exp(g * (n_pts - n)) - math.exp(-g * n))


def delta_eta(cfg: LatticeConfig, delta: float = DEFAULT_DELTA) -> float:
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    return (1.0 - delta) ** 2 * cfg.c2 / cfg.alpha1


def n_quad_points(cfg: LatticeConfig, tol, n_max: int = 0, delta: float = DEFAULT_DELTA) -> int:
    """Closed-form node count N_ap with eta = (1 - delta)^2 c2 / alpha1."""
    require_screened(cfg)
    eps = as_tolerance(tol).eps
    g = gamma_eta(delta_eta(cfg, delta))
    arg = 1.0 / (eps * cfg.reduced_c * math.sqrt(2.0 * delta - delta * delta))
    assert arg > 1.0, "log argument must exceed one"
    return math.ceil(math.log(arg) / g + n_max)


@dataclass(frozen=True)
class QuadPlan:
    n_pts: int
    eta: float
    gamma_eta: float
    m_eta: float
    delta: float
    n_max: int
    bound: float


def plan_quadrature(
    cfg: LatticeConfig, tol, n_max: int = 0, delta: float = DEFAULT_DELTA
) -> QuadPlan:
    """N_ap, bumped until the exact a priori bound (not its approximation) meets eps."""
    eps = as_tolerance(tol).eps
    n_pts = max(n_quad_points(cfg, tol, n_max, delta), n_max + 1)
    eta = delta_eta(cfg, delta)
    while (bound := quad_error_bound(cfg, n_max, n_pts, eta)) > eps:
        n_pts += 1
    return QuadPlan(n_pts, eta, gamma_eta(eta), m_eta(cfg, eta), delta, n_max, bound)


def n_opt_scan(cfg: LatticeConfig, tol, grid_size: int = N_OPT_GRID) -> int:
    """Node count minimized over eta by a deterministic geometric scan.

    For each eta the smallest N with 2 M_eta exp(-gamma_eta N) <= eps is taken.
    The delta = 0.01 point is included so the result never exceeds N_ap.
    """
    require_screened(cfg)
    eps = as_tolerance(tol).eps
    top = cfg.c2 / cfg.alpha1

    def counts(etas):
        half = 0.5 * etas
        gam = np.log1p(half + np.sqrt(half * (2.0 + half)))
        return np.log(1.0 / (np.sqrt(top - etas) * eps)) / gam

    etas = np.geomspace(np.finfo(float).eps, top * (1.0 - 1e-9), grid_size)
    raw = counts(etas)
    # the optimum sits close to the top, where the geometric grid is coarse:
    # rescan linearly between the neighbours of the best coarse point
    i = int(np.argmin(raw))
    lo, hi = etas[max(i - 1, 0)], etas[min(i + 1, grid_size - 1)]
    fine = np.linspace(lo, hi, grid_size)
    best = min(raw.min(), counts(fine).min(), counts(np.array([delta_eta(cfg)]))[0])
    return int(max(math.ceil(best), 1))


def unscreened_diff(alpha1: float, p, n_pts: int) -> float:
    """B_0(n, m) - B_0(0, 0) for the unscreened lattice, by the trapezoid rule.

    The integrand (cos(n theta) K**-m - 1) / (K - 1/K) has a removable
    singularity at theta = 0 with limit -m/2 and a |theta| kink there, so
    convergence is algebraic (second order), not exponential.
    """
    if not 0.0 < alpha1 <= 1.0:
        raise ValueError("alpha1 must lie in (0, 1]")
    if n_pts < 16:
        raise ValueError("n_pts must be >= 16")
    n, m = canonicalize(p)
    if n == 0 and m == 0:
        return 0.0
    return float(unscreened_diff_grid(alpha1, [n], [m], n_pts)[0, 0])


def unscreened_diff_grid(alpha1: float, ns, ms, n_pts: int) -> np.ndarray:
    """Difference LGF on a grid, ``out[i, j]`` at (ns[i], ms[j])."""
    ns = np.abs(np.asarray(ns, dtype=int))
    ms = np.abs(np.asarray(ms, dtype=int))
    theta = nodes(n_pts)
    h = 2.0 * np.pi / n_pts
    far = np.abs(theta) >= 0.5 * h
    th = theta[far]
    log_k, root = _k_parts(th, alpha1, 0.0)
    # cos(n t) K^-m - 1 = -2 sin^2(n t / 2) K^-m + expm1(-m log K)
    decay = np.exp(-np.outer(ms, log_k))  # (m, j)
    sin2 = np.sin(0.5 * np.outer(ns, th)) ** 2  # (n, j)
    out = -2.0 * (sin2 / root) @ decay.T
    out += (np.expm1(-np.outer(ms, log_k)) / root).sum(axis=1)[None, :]
    if not far.all():
        out += -0.5 * ms[None, :] * np.count_nonzero(~far)
    return out / n_pts
