"""Shared domain types, symmetry reduction and backend dispatch.

Every evaluator in the package works with a :class:`LatticeConfig` describing
the stencil

    c^2 u(n, m) + alpha1 (2u - u(n-1, m) - u(n+1, m)) + (2u - u(n, m-1) - u(n, m+1))

with the second direction's weight normalized to one and ``0 < alpha1 <= 1``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

EPS_FLOOR = 1e-15
SERIES_CAP = 64


class ToleranceError(ValueError):
    """Requested accuracy is below what double precision can deliver."""


class NotScreenedError(ValueError):
    """A screened-only evaluator was handed c2 <= 0."""


@dataclass(frozen=True)
class LatticeConfig:
    alpha1: float
    c2: float

    def __post_init__(self):
        alpha1, c2 = float(self.alpha1), float(self.c2)
        if not (math.isfinite(alpha1) and 0.0 < alpha1 <= 1.0):
            raise ValueError(f"alpha1 must lie in (0, 1], got {self.alpha1!r}")
        if not (math.isfinite(c2) and c2 >= 0.0):
            raise ValueError(f"c2 must be finite and >= 0, got {self.c2!r}")
        object.__setattr__(self, "alpha1", alpha1)
        object.__setattr__(self, "c2", c2)

    @classmethod
    def from_c(cls, alpha1: float, c: float) -> "LatticeConfig":
        return cls(alpha1, float(c) ** 2)

    @property
    def lam(self) -> float:
        return 2.0 + 2.0 * self.alpha1

    @property
    def c(self) -> float:
        return math.sqrt(self.c2)

    @property
    def screened(self) -> bool:
        return self.c2 > 0.0

    @property
    def reduced_c(self) -> float:
        """c / sqrt(alpha1), the parameter the quadrature counts depend on."""
        return math.sqrt(self.c2 / self.alpha1)


def require_screened(cfg: LatticeConfig) -> LatticeConfig:
    if not cfg.screened:
        raise NotScreenedError("this evaluator needs c2 > 0")
    return cfg


class LatticePoint(NamedTuple):
    n: int
    m: int

    def canonical(self) -> "LatticePoint":
        return LatticePoint(abs(self.n), abs(self.m))


def canonicalize(p) -> LatticePoint:
    """Map ``(n, m)`` to ``(|n|, |m|)``; the LGF is even in both indices."""
    n, m = p
    if int(n) != n or int(m) != m:
        raise ValueError(f"lattice coordinates must be integers, got {p!r}")
    return LatticePoint(abs(int(n)), abs(int(m)))


@dataclass(frozen=True)
class Tolerance:
    eps: float

    def __post_init__(self):
        eps = float(self.eps)
        if not math.isfinite(eps) or eps <= 0.0:
            raise ValueError(f"tolerance must be positive, got {self.eps!r}")
        if eps < EPS_FLOOR:
            raise ToleranceError(
                f"tolerance {eps:g} is below the attainable floor {EPS_FLOOR:g}"
            )
        object.__setattr__(self, "eps", eps)


def as_tolerance(tol) -> Tolerance:
    return tol if isinstance(tol, Tolerance) else Tolerance(tol)


class Method(str, enum.Enum):
    SERIES = "series"
    QUAD1D = "quad1d"
    FFT_BATCH = "fft_batch"


# which a priori bound certifies each backend
BOUND_SOURCE = {
    Method.SERIES: "series-truncation",
    Method.QUAD1D: "trapezoid-a-priori",
    Method.FFT_BATCH: "trapezoid-a-priori",
}


@dataclass(frozen=True)
class MethodChoice:
    tag: Method
    certificate: float
    size: int  # series terms or quadrature nodes over the full period
    eps: float

    def __post_init__(self):
        if self.certificate > self.eps:
            raise ValueError(
                f"certificate {self.certificate:g} does not meet eps {self.eps:g}"
            )

    @property
    def bound_source(self) -> str:
        return BOUND_SOURCE[self.tag]


def select_method(
    cfg: LatticeConfig,
    tol,
    row_length: int | None = None,
    n_max: int = 0,
    series_cap: int = SERIES_CAP,
    delta: float = 0.01,
) -> MethodChoice:
    """Pick the cheapest backend whose a priori bound meets ``tol``.

    The series is used whenever its truncation bound is reached within
    ``series_cap`` terms. Otherwise single points go to the direct trapezoid
    and rows (``row_length`` given) to the FFT batch. ``n_max`` is the largest
    first index requested; the quadrature node count grows linearly with it.
    """
    from .quad1d import plan_quadrature
    from .series import terms_needed, truncation_bound

    require_screened(cfg)
    tol = as_tolerance(tol)
    n_terms = terms_needed(cfg, tol)
    if n_terms <= series_cap:
        return MethodChoice(Method.SERIES, truncation_bound(cfg, n_terms), n_terms, tol.eps)
    if row_length is None:
        plan = plan_quadrature(cfg, tol, n_max, delta)
        return MethodChoice(Method.QUAD1D, plan.bound, plan.n_pts, tol.eps)

    from .fft_batch import plan_row

    last = max(int(row_length) - 1, int(n_max))
    plan = plan_row(cfg, last, tol, delta)
    return MethodChoice(Method.FFT_BATCH, plan.bound, plan.n_pts, tol.eps)
