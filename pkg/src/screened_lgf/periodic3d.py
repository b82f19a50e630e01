"""LGF of the 3D discrete Poisson equation, periodic in the third direction.

Fourier transforming along the periodic axis turns each mode k into a 2D
screened problem with c = kappa(k) = 2 sqrt(alpha3) |sin(pi k / N_p)|, so

    G(n1, n2, n3) = 1/N_p sum_k cos(2 pi k n3 / N_p) B_{kappa(k)}(n1, n2).

The k = 0 mode is unscreened; it is replaced by the difference LGF
B_0 - B_0(0, 0), which fixes G only up to an additive constant.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .core import LatticeConfig, as_tolerance
from .fft_batch import batch_table
from .quad1d import plan_quadrature, trapezoid_eval, unscreened_diff, unscreened_diff_grid

ZERO_MODE_PTS = 2**16


@dataclass(frozen=True)
class Periodic3DConfig:
    """Grid spacings and period count.

    The in-plane axis with the finer spacing is given unit weight, so the
    other one carries alpha1 <= 1. ``swapped`` records that physical axis 2
    became the lattice's first (alpha1-weighted) index.
    """

    dx1: float
    dx2: float
    dx3: float
    n_p: int

    def __post_init__(self):
        if min(self.dx1, self.dx2, self.dx3) <= 0:
            raise ValueError("grid spacings must be positive")
        if self.n_p < 2 or self.n_p % 2:
            raise ValueError("n_p must be an even integer >= 2")

    @property
    def swapped(self) -> bool:
        return self.dx1 < self.dx2

    @property
    def ref(self) -> float:
        return min(self.dx1, self.dx2)

    @property
    def alpha1(self) -> float:
        return (self.ref / max(self.dx1, self.dx2)) ** 2

    @property
    def alpha3(self) -> float:
        return (self.ref / self.dx3) ** 2

    @property
    def physical_alphas(self) -> tuple[float, float, float]:
        return (self.ref / self.dx1) ** 2, (self.ref / self.dx2) ** 2, self.alpha3

    @property
    def scale(self) -> float:
        """Multiplier taking G * f to the solution of the physical equation."""
        return self.ref**2

    def to_lattice(self, n1: int, n2: int) -> tuple[int, int]:
        return (abs(n2), abs(n1)) if self.swapped else (abs(n1), abs(n2))

    def mode_config(self, k: int) -> LatticeConfig:
        return LatticeConfig(self.alpha1, kappa_mode(k, self) ** 2)


def kappa_mode(k: int, cfg3d: Periodic3DConfig) -> float:
    if not 0 <= k < cfg3d.n_p:
        raise ValueError(f"mode index must lie in [0, {cfg3d.n_p})")
    # sqrt(2 a3 - 2 a3 cos(2 pi k / N)) without cancellation at small k
    return 2.0 * math.sqrt(cfg3d.alpha3) * abs(math.sin(math.pi * k / cfg3d.n_p))


def _mode_weights(n3: int, n_p: int) -> np.ndarray:
    """Real weights for modes k = 0..N/2 after pairing k with N - k."""
    k = np.arange(n_p // 2 + 1)
    w = 2.0 * np.cos(2.0 * np.pi * k * n3 / n_p)
    w[0] = 1.0
    w[-1] = math.cos(math.pi * n3)
    return w / n_p


def lgf3d_periodic(p3, cfg3d: Periodic3DConfig, tol, zero_mode_pts: int = ZERO_MODE_PTS) -> float:
    """Pointwise mode sum, each screened mode at tolerance eps / N_p."""
    n1, n2, n3 = (int(v) for v in p3)
    n, m = cfg3d.to_lattice(n1, n2)
    eps = as_tolerance(tol).eps / cfg3d.n_p
    modes = [unscreened_diff(cfg3d.alpha1, (n, m), zero_mode_pts)]
    for k in range(1, cfg3d.n_p // 2 + 1):
        cfg = cfg3d.mode_config(k)
        plan = plan_quadrature(cfg, eps, n_max=n)
        modes.append(trapezoid_eval(cfg, (n, m), plan.n_pts))
    return float(np.dot(_mode_weights(n3 % cfg3d.n_p, cfg3d.n_p), modes))


def mode_tables(
    cfg3d: Periodic3DConfig, n1_max: int, n2_max: int, tol, zero_mode_pts: int = ZERO_MODE_PTS
) -> np.ndarray:
    """B_{kappa(k)} on [0, n1_max] x [0, n2_max] for k = 0..N_p/2, physical layout."""
    eps = as_tolerance(tol).eps / cfg3d.n_p
    L, M = (n2_max, n1_max) if cfg3d.swapped else (n1_max, n2_max)
    out = np.empty((cfg3d.n_p // 2 + 1, L + 1, M + 1))
    out[0] = unscreened_diff_grid(cfg3d.alpha1, np.arange(L + 1), np.arange(M + 1), zero_mode_pts)
    for k in range(1, cfg3d.n_p // 2 + 1):
        out[k] = batch_table(cfg3d.mode_config(k), M, L, eps).values.T
    # lattice [n, m] -> physical [n1, n2]
    return out.transpose(0, 2, 1) if cfg3d.swapped else out


def lgf3d_table(
    cfg3d: Periodic3DConfig, n1_max: int, n2_max: int, tol, zero_mode_pts: int = ZERO_MODE_PTS
) -> np.ndarray:
    """G[n1, n2, n3] for n1 <= n1_max, n2 <= n2_max and 0 <= n3 < N_p."""
    modes = mode_tables(cfg3d, n1_max, n2_max, tol, zero_mode_pts)
    W = np.stack([_mode_weights(n3, cfg3d.n_p) for n3 in range(cfg3d.n_p)], axis=1)
    return np.tensordot(modes, W, axes=([0], [0]))


def stencil3d(G: np.ndarray, alphas) -> np.ndarray:
    """Sum_i alpha_i (2G - G(+e_i) - G(-e_i)) on the in-plane interior, periodic in axis 2."""
    a1, a2, a3 = alphas
    c = G[1:-1, 1:-1]
    return (
        a1 * (2 * c - G[:-2, 1:-1] - G[2:, 1:-1])
        + a2 * (2 * c - G[1:-1, :-2] - G[1:-1, 2:])
        + a3 * (2 * c - np.roll(c, 1, axis=2) - np.roll(c, -1, axis=2))
    )


def _symmetric_kernel(quadrant: np.ndarray) -> np.ndarray:
    """Mirror a [0, N1) x [0, N2) quadrant onto offsets (-N1, N1) x (-N2, N2)."""
    full = np.concatenate([quadrant[:0:-1], quadrant], axis=0)
    return np.concatenate([full[:, :0:-1], full], axis=1)


def _check_source(source: np.ndarray, max_edge: float = 1e-3) -> None:
    if source.ndim != 3:
        raise ValueError("source must be a 3D grid (N1, N2, N_p)")
    peak = np.abs(source).max()
    if peak == 0:
        return
    edge = max(
        np.abs(source[[0, -1]]).max(),
        np.abs(source[:, [0, -1]]).max(),
    )
    if edge > max_edge * peak:
        raise ValueError(
            f"source at the truncation boundary is {edge / peak:.2e} of its peak; enlarge the box"
        )


class PeriodicPoissonSolver(TransformerMixin, BaseEstimator):
    """Solve sum_i (2u - u(+e_i) - u(-e_i)) / dx_i^2 = f, periodic along the last axis.

    ``fit`` tabulates the mode kernels for the grid shape of ``X``;
    ``transform`` convolves each source with them. The zero-mode constant is
    left as computed unless ``reference`` is passed to :meth:`transform`.
    """

    def __init__(self, dx1=1.0, dx2=1.0, dx3=1.0, eps=1e-10, zero_mode_pts=ZERO_MODE_PTS):
        self.dx1 = dx1
        self.dx2 = dx2
        self.dx3 = dx3
        self.eps = eps
        self.zero_mode_pts = zero_mode_pts

    def fit(self, X, y=None):
        X = np.asarray(X, dtype=float)
        if X.ndim != 3:
            raise ValueError("X must be a 3D grid (N1, N2, N_p)")
        self.config_ = Periodic3DConfig(self.dx1, self.dx2, self.dx3, X.shape[2])
        n1, n2 = X.shape[0] - 1, X.shape[1] - 1
        quads = mode_tables(self.config_, n1, n2, self.eps, self.zero_mode_pts)
        self.kernels_ = np.stack([_symmetric_kernel(q) for q in quads])
        self.grid_shape_ = X.shape
        return self

    def transform(self, X, reference=None):
        check_is_fitted(self, "kernels_")
        X = np.asarray(X, dtype=float)
        if X.shape != self.grid_shape_:
            raise ValueError(f"source shape {X.shape} differs from fitted {self.grid_shape_}")
        _check_source(X)
        spec = np.fft.rfft(X, axis=2)
        out = np.empty_like(spec)
        for k in range(spec.shape[2]):
            f = spec[:, :, k]
            out[:, :, k] = fftconvolve(f.real, self.kernels_[k], mode="same") + 1j * fftconvolve(
                f.imag, self.kernels_[k], mode="same"
            )
        u = self.config_.scale * np.fft.irfft(out, n=X.shape[2], axis=2)
        if reference is not None:
            u += np.mean(reference) - u.mean()
        return u


def solve_poisson3d(source, cfg3d: Periodic3DConfig, tol=1e-10, reference=None,
                    zero_mode_pts: int = ZERO_MODE_PTS) -> np.ndarray:
    source = np.asarray(source, dtype=float)
    if source.shape[2] != cfg3d.n_p:
        raise ValueError("source's last axis must have N_p entries")
    solver = PeriodicPoissonSolver(cfg3d.dx1, cfg3d.dx2, cfg3d.dx3, tol, zero_mode_pts)
    return solver.fit(source).transform(source, reference=reference)


# manufactured problem on [-1, 1] x [-4, 4] x [0, 2 pi)
X_LIM, Y_LIM = 1.0, 4.0


def exact_solution(x, y, z):
    return np.exp(-64 * x**2 - 4 * y**2) / (2 - np.cos(z))


def exact_source(x, y, z):
    """-Laplacian of :func:`exact_solution`."""
    g = np.exp(-64 * x**2 - 4 * y**2)
    q = 2 - np.cos(z)
    h = 1 / q
    h_zz = -np.cos(z) / q**2 + 2 * np.sin(z) ** 2 / q**3
    g_xx_yy = (16384 * x**2 - 128 + 64 * y**2 - 8) * g
    return -(g_xx_yy * h + g * h_zz)


def problem_grid(n_p: int, ratio: float):
    """Nodes for dx3 = 2 pi dx2 (so dx2 = 1 / n_p) and dx1 = dx2 / ratio."""
    dx2 = 1.0 / n_p
    dx1 = dx2 / ratio
    n1 = round(2 * X_LIM / dx1)
    n2 = round(2 * Y_LIM / dx2)
    x = -X_LIM + dx1 * np.arange(n1 + 1)
    y = -Y_LIM + dx2 * np.arange(n2 + 1)
    z = 2 * np.pi * np.arange(n_p) / n_p
    return Periodic3DConfig(dx1, dx2, 2 * np.pi * dx2, n_p), np.meshgrid(x, y, z, indexing="ij")


@dataclass(frozen=True)
class ConvergenceLevel:
    n_p: int
    dx2: float
    max_error: float


def convergence_study(ratio: float, levels=(8, 16, 32, 64), tol=1e-10,
                      zero_mode_pts: int = ZERO_MODE_PTS):
    """Max-norm error against the manufactured solution and its fitted log-log slope."""
    rows = []
    for n_p in levels:
        cfg3d, (X, Y, Z) = problem_grid(n_p, ratio)
        exact = exact_solution(X, Y, Z)
        u = solve_poisson3d(exact_source(X, Y, Z), cfg3d, tol, reference=exact,
                            zero_mode_pts=zero_mode_pts)
        rows.append(ConvergenceLevel(n_p, cfg3d.dx2, float(np.abs(u - exact).max())))
    slope = float(np.polyfit(np.log([r.dx2 for r in rows]), np.log([r.max_error for r in rows]), 1)[0])
    return rows, slope
