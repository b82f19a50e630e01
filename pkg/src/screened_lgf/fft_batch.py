"""Whole-row evaluation of B_c(0..L, m) with one inverse real FFT.

Sampling f(theta) = K**-m / (K - 1/K) at theta = pi k / N_pts, k < N_pts, and
inverting with output length 2 N_pts reproduces the trapezoid rule on the
2 N_pts full-circle nodes, except for the theta = pi sample which the half
spectrum drops; adding (-1)**n f(pi) / (2 N_pts) restores it.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import (
    LatticeConfig,
    Method,
    MethodChoice,
    Tolerance,
    as_tolerance,
    require_screened,
)
from .quad1d import DEFAULT_DELTA, delta_eta, gamma_eta, integrand, quad_error_bound

MAX_SAMPLES = 2**30


class RowTooLongError(MemoryError):
    """The transform would exceed the sample cap; split the request."""


@dataclass(frozen=True)
class RowPlan:
    n_pts: int  # half-period sample count; the rule uses 2 * n_pts nodes
    eta: float
    bound: float


def plan_row(cfg: LatticeConfig, L: int, tol, delta: float = DEFAULT_DELTA) -> RowPlan:
    require_screened(cfg)
    eps = as_tolerance(tol).eps
    if L < 0:
        raise ValueError("L must be >= 0")
    eta = delta_eta(cfg, delta)
    arg = 1.0 / (eps * cfg.reduced_c * math.sqrt(2.0 * delta - delta * delta))
    n_pts = max(math.ceil(0.5 * (math.log(arg) / gamma_eta(eta) + L)), L + 1)
    while (bound := quad_error_bound(cfg, L, 2 * n_pts, eta)) > eps:
        n_pts += 1
    return RowPlan(n_pts, eta, bound)


def fft_row(cfg: LatticeConfig, m: int, n_pts: int, nyquist: bool = True) -> np.ndarray:
    """Trapezoid values on 2 * n_pts nodes for n = 0..2 n_pts - 1."""
    theta = np.pi * np.arange(n_pts) / n_pts
    v = integrand(theta, cfg, m)
    out = np.fft.irfft(v, 2 * n_pts)
    if nyquist:
        sign = np.ones(2 * n_pts)
        sign[1::2] = -1.0
        out += sign * (integrand(np.pi, cfg, m) / (2 * n_pts))
    return out


@dataclass(frozen=True)
class LgfRow:
    m: int
    values: np.ndarray
    cfg: LatticeConfig
    tol: Tolerance
    n_pts_used: int
    method: MethodChoice

    @property
    def L(self) -> int:
        return len(self.values) - 1


def batch_row(
    cfg: LatticeConfig,
    m: int,
    L: int,
    tol,
    delta: float = DEFAULT_DELTA,
    max_samples: int = MAX_SAMPLES,
) -> LgfRow:
    """B_c(n, m) for n = 0..L, each within ``tol`` of the exact value."""
    tol = as_tolerance(tol)
    if m < 0:
        raise ValueError("m must be >= 0")
    plan = plan_row(cfg, L, tol, delta)
    if 2 * plan.n_pts > max_samples:
        raise RowTooLongError(
            f"row needs {2 * plan.n_pts} samples, above the cap of {max_samples}"
        )
    values = fft_row(cfg, m, plan.n_pts)[: L + 1]
    values.setflags(write=False)
    choice = MethodChoice(Method.FFT_BATCH, plan.bound, 2 * plan.n_pts, tol.eps)
    return LgfRow(int(m), values, cfg, tol, plan.n_pts, choice)


@dataclass(frozen=True)
class LgfTable:
    """Canonical-quadrant table, ``values[m, n]`` for m <= m_max, n <= L."""

    values: np.ndarray
    cfg: LatticeConfig
    tol: Tolerance
    method: MethodChoice
    n_pts_used: int
    meta: dict = field(default_factory=dict)

    @property
    def m_max(self) -> int:
        return self.values.shape[0] - 1

    @property
    def L(self) -> int:
        return self.values.shape[1] - 1

    def __getitem__(self, p) -> float:
        n, m = p
        return float(self.values[abs(m), abs(n)])


def batch_table(
    cfg: LatticeConfig,
    m_max: int,
    L: int,
    tol,
    delta: float = DEFAULT_DELTA,
    threads: int | None = None,
) -> LgfTable:
    """Rows m = 0..m_max, each an independent :func:`batch_row`."""
    tol = as_tolerance(tol)
    ms = range(int(m_max) + 1)
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda m: batch_row(cfg, m, L, tol, delta), ms))
    else:
        rows = [batch_row(cfg, m, L, tol, delta) for m in ms]
    values = np.vstack([r.values for r in rows])
    values.setflags(write=False)
    # every row shares the plan, it depends on L and not on m
    return LgfTable(values, cfg, tol, rows[0].method, rows[0].n_pts_used)
