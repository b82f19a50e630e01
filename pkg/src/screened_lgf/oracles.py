"""Independent reference evaluators used to cross-check the fast paths."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve
from scipy.special import ive, roots_legendre

from .core import LatticeConfig, canonicalize, require_screened

MAX_UNKNOWNS = 257 * 257


class OracleDivergenceWarning(UserWarning):
    """The Bessel oracle's truncated tail exceeds the requested tolerance."""


def oracle_2d_grid(cfg: LatticeConfig, ns, ms, n_grid: int) -> np.ndarray:
    """Tensor trapezoid of the 2D Fourier integral, ``out[i, j]`` at (ns[i], ms[j]).

    The integrand is periodic and analytic for c2 > 0, so the rule converges
    exponentially in ``n_grid``. Separable cosines make this two matrix products.
    """
    require_screened(cfg)
    xi = 2.0 * np.pi * np.arange(n_grid) / n_grid - np.pi
    s = np.sin(0.5 * xi) ** 2
    # sigma = 4 alpha1 sin^2(x1/2) + 4 sin^2(x2/2)
    denom = cfg.c2 + 4.0 * cfg.alpha1 * s[:, None] + 4.0 * s[None, :]
    C1 = np.cos(np.outer(np.abs(np.asarray(ns)), xi))
    C2 = np.cos(np.outer(np.abs(np.asarray(ms)), xi))
    return C1 @ (1.0 / denom) @ C2.T / n_grid**2


def oracle_2d_quadrature(cfg: LatticeConfig, p, n_grid: int = 512) -> float:
    n, m = p
    return float(oracle_2d_grid(cfg, [n], [m], n_grid)[0, 0])


def stencil_matrix(alpha1: float, c2: float, radius: int) -> sp.csc_matrix:
    """L_c on the box [-R, R]^2 with zero values outside, unknowns u[n, m] raveled."""
    size = 2 * radius + 1
    T = sp.diags([-np.ones(size - 1), 2.0 * np.ones(size), -np.ones(size - 1)], [-1, 0, 1])
    eye = sp.identity(size)
    return (c2 * sp.identity(size * size) + alpha1 * sp.kron(T, eye) + sp.kron(eye, T)).tocsc()


def oracle_truncated_solve(
    cfg: LatticeConfig,
    radius: int,
    difference: bool = False,
    max_unknowns: int = MAX_UNKNOWNS,
) -> np.ndarray:
    """Solve L_c u = delta on [-R, R]^2 with zero Dirichlet truncation.

    Returns ``u[n + R, m + R]``. With ``difference=True`` (allowed for c2 = 0)
    the result is u - u(0, 0). The system is sparse, solved by direct LU.
    """
    if not difference:
        require_screened(cfg)
    if radius < 1:
        raise ValueError("radius must be >= 1")
    size = 2 * radius + 1
    if size * size > max_unknowns:
        raise ValueError(f"{size * size} unknowns exceed the cap of {max_unknowns}")
    A = stencil_matrix(cfg.alpha1, cfg.c2, radius)
    rhs = np.zeros(size * size)
    rhs[radius * size + radius] = 1.0
    u = spsolve(A, rhs).reshape(size, size)
    if difference:
        u = u - u[radius, radius]
    return u


def bessel_tail_bound(cfg: LatticeConfig, t_max: float) -> float:
    """Upper bound on the integral beyond t_max (scaled Bessel factors are <= 1)."""
    return math.exp(-cfg.c2 * t_max) / cfg.c2


def _geometric_panels(t_max: float, n_panels: int, first: float = 1.0) -> np.ndarray:
    if t_max <= first:
        return np.linspace(0.0, t_max, n_panels + 1)
    return np.concatenate([[0.0], np.geomspace(first, t_max, n_panels)])


def oracle_bessel(
    cfg: LatticeConfig,
    p,
    t_max: float,
    n_nodes: int = 1024,
    tol: float | None = None,
    order: int = 16,
) -> float:
    """B_c from its modified-Bessel integral, truncated at ``t_max``.

    Integrand e^{-c2 t} ive(n, 2 alpha1 t) ive(m, 2 t), on geometrically graded
    Gauss-Legendre panels (about ``n_nodes`` nodes in total). When ``tol`` is
    given and the tail bound exceeds it, an :class:`OracleDivergenceWarning`
    is issued and the truncated value is returned anyway.
    """
    require_screened(cfg)
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    n, m = canonicalize(p)
    if tol is not None and bessel_tail_bound(cfg, t_max) > tol:
        warnings.warn(
            f"Bessel tail bound {bessel_tail_bound(cfg, t_max):.3g} exceeds tolerance {tol:.3g}",
            OracleDivergenceWarning,
            stacklevel=2,
        )
    x, w = roots_legendre(order)
    edges = _geometric_panels(t_max, max(n_nodes // order, 1))
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    t = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wt = (half[:, None] * w[None, :]).ravel()
    f = np.exp(-cfg.c2 * t) * ive(n, 2.0 * cfg.alpha1 * t) * ive(m, 2.0 * t)
    return float(np.dot(wt, f))


@dataclass(frozen=True)
class ResidualReport:
    max_interior_residual: float
    origin_residual_minus_one: float
    boundary_skipped: int


def unfold_quadrant(values: np.ndarray) -> np.ndarray:
    """Mirror a ``[m, n]`` quadrant table onto [-M, M] x [-L, L] (same layout)."""
    values = np.asarray(values, dtype=float)
    full = np.concatenate([values[:0:-1], values], axis=0)
    return np.concatenate([full[:, :0:-1], full], axis=1)


def apply_stencil(u: np.ndarray, alpha1: float, c2: float) -> np.ndarray:
    """L_c on the interior of an array laid out ``u[m, n]``."""
    c = u[1:-1, 1:-1]
    return (
        c2 * c
        + alpha1 * (2.0 * c - u[1:-1, :-2] - u[1:-1, 2:])
        + (2.0 * c - u[:-2, 1:-1] - u[2:, 1:-1])
    )


def residual_check(table, cfg: LatticeConfig) -> ResidualReport:
    """Apply the stencil to a canonical-quadrant table and compare with delta."""
    values = np.asarray(getattr(table, "values", table), dtype=float)
    if values.shape[0] < 3 or values.shape[1] < 3:
        raise ValueError("need at least a 3x3 table")
    M, L = values.shape[0] - 1, values.shape[1] - 1
    full = unfold_quadrant(values)
    res = apply_stencil(full, cfg.alpha1, cfg.c2)
    # interior of the unfolded array restricted back to the quadrant
    quad = res[M - 1 :, L - 1 :]
    origin = quad[0, 0]
    off = quad.copy()
    off[0, 0] = 0.0
    return ResidualReport(
        max_interior_residual=float(np.abs(off).max()),
        origin_residual_minus_one=float(abs(origin - 1.0)),
        boundary_skipped=int(values.size - quad.size),
    )
