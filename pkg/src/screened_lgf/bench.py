"""Timing comparison of the evaluation paths over a rectangle of lattice points."""
from __future__ import annotations

import math
import statistics
import time
import warnings
from dataclasses import dataclass

import numpy as np

from .core import SERIES_CAP, LatticeConfig, as_tolerance, require_screened
from .fft_batch import batch_table
from .oracles import OracleDivergenceWarning, bessel_tail_bound, oracle_bessel
from .quad1d import DEFAULT_DELTA, n_quad_points, plan_quadrature, trapezoid_eval, trapezoid_grid
from .series import series_table, terms_needed

T_MAX_CAP = 1e4
METHODS = ("series", "trapezoid", "fft_batch", "bessel")


@dataclass(frozen=True)
class BenchRecord:
    method: str
    seconds: float  # median over the timed repeats, nan when skipped
    speedup: float  # Bessel time / this time
    max_abs_error: float
    flagged: bool
    note: str = ""


def bessel_t_max(cfg: LatticeConfig, eps: float, cap: float = T_MAX_CAP) -> float:
    """Cut-off making the tail bound equal to eps, limited to ``cap``."""
    return min(math.log(1.0 / (eps * cfg.c2)) / cfg.c2, cap)


def _timed(fn, repeats: int):
    fn()  # warmup, discarded
    times, out = [], None
    for _ in range(max(repeats, 1)):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times), out


def reference_table(cfg: LatticeConfig, L: int, M: int, eps: float, delta: float = DEFAULT_DELTA):
    """Trapezoid table on twice the a priori node count, laid out ``[m, n]``."""
    n_pts = 2 * n_quad_points(cfg, eps, n_max=L, delta=delta)
    return trapezoid_grid(cfg, np.arange(L + 1), np.arange(M + 1), n_pts).T


def run_bench(
    cfg: LatticeConfig,
    L: int,
    M: int,
    tol,
    repeats: int = 5,
    methods=METHODS,
    delta: float = DEFAULT_DELTA,
    series_cap: int = SERIES_CAP,
    t_max_cap: float = T_MAX_CAP,
    bessel_nodes: int = 1024,
) -> list[BenchRecord]:
    require_screened(cfg)
    eps = as_tolerance(tol).eps
    ref = reference_table(cfg, L, M, eps, delta)
    ns, ms = np.arange(L + 1), np.arange(M + 1)

    def per_point(fn):
        return lambda: np.array([[fn((n, m)) for n in ns] for m in ms])

    runs = {}
    notes = {}
    if "series" in methods:
        n_terms = terms_needed(cfg, eps)
        if n_terms <= series_cap:
            runs["series"] = lambda: series_table(cfg, L, M, n_terms)
        else:
            notes["series"] = f"needs {n_terms} terms, above cap {series_cap}"
    if "trapezoid" in methods:
        n_pts = plan_quadrature(cfg, eps, n_max=L, delta=delta).n_pts
        runs["trapezoid"] = per_point(lambda p: trapezoid_eval(cfg, p, n_pts))
    if "fft_batch" in methods:
        runs["fft_batch"] = lambda: batch_table(cfg, M, L, eps, delta).values
    t_max = bessel_t_max(cfg, eps, t_max_cap)
    # t_max is chosen so the tail equals eps; allow for rounding in that solve
    bessel_flag = bessel_tail_bound(cfg, t_max) > eps * (1.0 + 1e-9)
    if "bessel" in methods:
        runs["bessel"] = per_point(lambda p: oracle_bessel(cfg, p, t_max, bessel_nodes))
        if bessel_flag:
            notes["bessel"] = f"tail bound {bessel_tail_bound(cfg, t_max):.3g} at t_max {t_max:g}"
            warnings.warn(notes["bessel"], OracleDivergenceWarning, stacklevel=2)

    measured = {}
    for name in methods:
        if name in runs:
            seconds, vals = _timed(runs[name], repeats)
            err = float(np.abs(vals - ref).max())
            flagged = not np.all(np.isfinite(vals)) or err > eps
            if name == "bessel":
                flagged = flagged or bessel_flag
            measured[name] = (seconds, err, flagged)
    base = measured.get("bessel", (math.nan,))[0]
    records = []
    for name in methods:
        if name in measured:
            seconds, err, flagged = measured[name]
            records.append(BenchRecord(name, seconds, base / seconds, err, flagged, notes.get(name, "")))
        else:
            records.append(BenchRecord(name, math.nan, math.nan, math.nan, False, notes.get(name, "skipped")))
    return records
