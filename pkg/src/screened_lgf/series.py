"""Large-screening evaluation by the geometric expansion in lam / (lam + c2).

The N-term partial sum is

    G_N(n, m) = 1/(lam + c2) * sum_{k < N} (lam / (lam + c2))**k * g_k(n, m)

where ``g_k`` is the (n, m) Fourier coefficient of ((2 a cos x + 2 cos y) / lam)**k,
a finite sum of multinomial coefficients evaluated through log-gamma.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .core import LatticeConfig, as_tolerance, canonicalize, require_screened


@dataclass(frozen=True)
class SeriesPlan:
    n_terms: int
    bound: float

    @classmethod
    def for_terms(cls, cfg: LatticeConfig, n_terms: int) -> "SeriesPlan":
        if n_terms < 1:
            raise ValueError("a series plan needs at least one term")
        return cls(int(n_terms), truncation_bound(cfg, n_terms))

    @classmethod
    def for_tolerance(cls, cfg: LatticeConfig, tol) -> "SeriesPlan":
        return cls.for_terms(cfg, max(terms_needed(cfg, tol), 1))


def _ratio(cfg: LatticeConfig) -> float:
    return cfg.lam / (cfg.lam + cfg.c2)


def truncation_bound(cfg: LatticeConfig, N: int) -> float:
    """Uniform bound on |B_c - G_N| over the whole lattice."""
    require_screened(cfg)
    if N < 0:
        raise ValueError("N must be >= 0")
    return _ratio(cfg) ** N / cfg.c2


def decay_bound(cfg: LatticeConfig, p) -> float:
    """Bound on |B_c(n, m)|; G_{n+m} vanishes identically so eps_{n+m} = B_c."""
    n, m = canonicalize(p)
    return truncation_bound(cfg, n + m)


def terms_needed(cfg: LatticeConfig, tol) -> int:
    """Smallest N with ``truncation_bound(cfg, N) <= eps``."""
    require_screened(cfg)
    eps = as_tolerance(tol).eps
    if 1.0 / cfg.c2 <= eps:
        return 0
    N = math.ceil(math.log(1.0 / (eps * cfg.c2)) / math.log1p(cfg.c2 / cfg.lam))
    N = max(N, 0)
    # the closed-form ceiling can land one off when the log ratio rounds
    while N > 0 and truncation_bound(cfg, N - 1) <= eps:
        N -= 1
    while truncation_bound(cfg, N) > eps:
        N += 1
    return N


def _log_multinomial(k, parts):
    out = gammaln(k + 1.0)
    for part in parts:
        out = out - gammaln(np.asarray(part, dtype=float) + 1.0)
    return out


def g_k(k: int, p, cfg: LatticeConfig) -> float:
    """Fourier coefficient of (rho / lam)**k at lattice point ``p``.

    Nonzero only when ``k >= n + m`` with ``k - n - m`` even. Each summand is
    exponentiated from its log-gamma form, so nothing overflows for large k.
    """
    n, m = canonicalize(p)
    k = int(k)
    if k < 0:
        raise ValueError("k must be >= 0")
    free = k - n - m
    if free < 0 or free % 2:
        return 0.0
    ell = np.arange(free // 2 + 1, dtype=float)
    log_terms = _log_multinomial(
        float(k),
        (ell, n + ell, (k - n - 2 * ell - m) / 2, (k - n - 2 * ell + m) / 2),
    )
    log_terms += (n + 2 * ell) * math.log(cfg.alpha1) - k * math.log(cfg.lam)
    terms = np.exp(log_terms)
    value = math.fsum(terms)
    assert 0.0 <= value <= 1.0 + 1e-12, value
    return value


def series_eval(cfg: LatticeConfig, p, plan: SeriesPlan | int) -> float:
    """N-term partial sum G_N at one point, skipping the known zero terms."""
    require_screened(cfg)
    n_terms = plan.n_terms if isinstance(plan, SeriesPlan) else int(plan)
    if n_terms < 1:
        raise ValueError("need at least one term")
    n, m = canonicalize(p)
    r = _ratio(cfg)
    total = 0.0
    for k in range(n + m, n_terms, 2):
        total += r**k * g_k(k, (n, m), cfg)
    return total / (cfg.lam + cfg.c2)


def _walk_marginals(h_max: int, idx: np.ndarray) -> np.ndarray:
    """P[h, j] = C(h, (h - idx_j)/2) / 2**h, the 1D simple-walk distribution."""
    h = np.arange(h_max + 1, dtype=float)[:, None]
    j = idx[None, :].astype(float)
    valid = (h >= j) & (((h - j) % 2) == 0)
    up = np.where(valid, (h + j) / 2, 0.0)
    down = np.where(valid, (h - j) / 2, 0.0)
    logp = gammaln(h + 1) - gammaln(up + 1) - gammaln(down + 1) - h * math.log(2.0)
    return np.where(valid, np.exp(np.where(valid, logp, -np.inf)), 0.0)


def series_table(cfg: LatticeConfig, n_max: int, m_max: int, n_terms: int) -> np.ndarray:
    """G_N on the grid [0, n_max] x [0, m_max], returned as ``out[m, n]``.

    Groups the multinomial sum by the number of horizontal steps h, so that
    g_k(n, m) = sum_h Binom(k, h; q) P(h, n) P(k - h, m) with q = 2 alpha1 / lam,
    which turns each k into one small matrix product over the whole grid.
    """
    require_screened(cfg)
    if n_terms < 1:
        raise ValueError("need at least one term")
    ns = np.arange(n_max + 1)
    ms = np.arange(m_max + 1)
    top = n_terms - 1
    P_n = _walk_marginals(top, ns)
    P_m = _walk_marginals(top, ms)
    q = 2.0 * cfg.alpha1 / cfg.lam
    log_q, log_1q = math.log(q), math.log1p(-q)
    lg = gammaln(np.arange(top + 2, dtype=float))
    log_r = math.log(_ratio(cfg))
    acc = np.zeros((m_max + 1, n_max + 1))
    for k in range(top + 1):
        h = np.arange(k + 1)
        logw = lg[k + 1] - lg[h + 1] - lg[k - h + 1] + h * log_q + (k - h) * log_1q
        w = np.exp(logw + k * log_r)
        # g_k weighted by r**k, accumulated as (P_m[k-h]^T) (w * P_n[h])
        acc += P_m[k - h].T @ (w[:, None] * P_n[h])
    return acc / (cfg.lam + cfg.c2)


def asymptotic_far_field(c: float, p, alpha1: float = 1.0) -> float:
    """Leading-order far-field form of B_c on the square lattice.

    Diagnostic only: valid for alpha1 = 1 with O(1/r) relative error, so it is
    never used to certify a value.
    """
    if alpha1 != 1.0:
        raise ValueError("the far-field form is only available for alpha1 = 1")
    if c <= 0:
        raise ValueError("c must be positive")
    n, m = canonicalize(p)
    r = math.hypot(n, m)
    if r == 0:
        raise ValueError("the far-field form is undefined at the origin")
    mu, nu = m / r, n / r
    a = 2.0 + c * c / 2.0
    x = (a * a - 4.0) / (1.0 + math.sqrt(1.0 - (1.0 - 4.0 / a**2) * (mu**2 - nu**2) ** 2))
    shape = mu**2 * math.sqrt(1 + nu**2 * x) + nu**2 * math.sqrt(1 + mu**2 * x)
    expo = mu * math.acosh(math.sqrt(1 + mu**2 * x)) + nu * math.acosh(math.sqrt(1 + nu**2 * x))
    return 0.5 / math.sqrt(2 * math.pi * r) * x**-0.25 / math.sqrt(shape) * math.exp(-r * expo)
