"""Return probabilities of a 2D nearest-neighbour walk with killing.

From (n, m) the walker steps left/right with probability p1 each, up/down
with p2 each, and is killed with pk = 1 - 2 p1 - 2 p2. The probability of
ever reaching the origin is

    rho(n, m) = C / p2 * B_kappa(n, m),   kappa^2 = pk / p2,   alpha1 = p1 / p2,

with C = 1 / (1 + (2 p1 / p2) B_kappa(1, 0) + 2 B_kappa(0, 1)) fixing rho(0, 0) = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .core import LatticeConfig, as_tolerance
from .estimators import check_points, evaluate_points


@dataclass(frozen=True)
class WalkParams:
    p1: float
    p2: float

    def __post_init__(self):
        if self.p1 <= 0 or self.p2 <= 0:
            raise ValueError("step probabilities must be positive")
        if self.pk <= 0:
            raise ValueError(f"killing probability 1 - 2 p1 - 2 p2 = {self.pk:g} must be positive")

    @classmethod
    def scaled_family(cls, pk: float) -> "WalkParams":
        """p1 = 0.2 (1 - pk), p2 = 0.3 (1 - pk)."""
        return cls(0.2 * (1 - pk), 0.3 * (1 - pk))

    @property
    def pk(self) -> float:
        return 1.0 - 2.0 * self.p1 - 2.0 * self.p2

    @property
    def swapped(self) -> bool:
        """True when axes are exchanged so the lattice anisotropy stays <= 1."""
        return self.p1 > self.p2

    def lattice(self) -> tuple[float, float]:
        """(horizontal, vertical) step probabilities in the normalized frame."""
        return (self.p2, self.p1) if self.swapped else (self.p1, self.p2)

    def lattice_config(self) -> LatticeConfig:
        q1, q2 = self.lattice()
        return LatticeConfig(q1 / q2, kappa_rw(self) ** 2)


def kappa_rw(w: WalkParams) -> float:
    _, q2 = w.lattice()
    return math.sqrt(w.pk / q2)


def _normalizer(w: WalkParams, eps: float) -> float:
    cfg = w.lattice_config()
    q1, q2 = w.lattice()
    b = evaluate_points(cfg, np.array([[1, 0], [0, 1]]), eps)
    return 1.0 / (1.0 + 2.0 * q1 / q2 * b[0] + 2.0 * b[1])


def return_probability(w: WalkParams, points, tol=1e-12) -> dict:
    """rho at each requested point, keyed by the caller's (n, m) tuples."""
    eps = as_tolerance(tol).eps
    keys = [tuple(int(v) for v in p) for p in points]
    if not keys:
        return {}
    pts = np.abs(np.array(keys, dtype=int).reshape(-1, 2))
    if w.swapped:
        pts = pts[:, ::-1]
    _, q2 = w.lattice()
    C = _normalizer(w, eps / 10)
    vals = C / q2 * evaluate_points(w.lattice_config(), pts, eps)
    out = {}
    for key, v in zip(keys, vals):
        out[key] = 1.0 if key == (0, 0) else float(v)
    return out


class ReturnProbability(BaseEstimator):
    """Estimator-style wrapper: ``predict`` maps (n, m) rows to rho."""

    def __init__(self, p1=0.2, p2=0.3, eps=1e-12):
        self.p1 = p1
        self.p2 = p2
        self.eps = eps

    def fit(self, X=None, y=None):
        self.params_ = WalkParams(self.p1, self.p2)
        self.kappa_ = kappa_rw(self.params_)
        self.normalizer_ = _normalizer(self.params_, as_tolerance(self.eps).eps / 10)
        return self

    def predict(self, X):
        check_is_fitted(self, "params_")
        X = check_points(X)
        rho = return_probability(self.params_, X, self.eps)
        return np.array([rho[tuple(p)] for p in X.tolist()])


def mc_simulate(
    w: WalkParams,
    start,
    trials: int,
    seed: int,
    block_size: int = 2**18,
) -> tuple[float, float]:
    """Monte Carlo estimate of rho(start) and its binomial standard error.

    Walks are simulated in blocks, each with its own stream spawned from
    ``seed``; a walk still alive after 100 / pk steps counts as killed.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n0, m0 = (int(v) for v in start)
    if n0 == 0 and m0 == 0:
        return 1.0, 0.0
    cum = np.cumsum([w.p1, w.p1, w.p2, w.p2])
    step_n = np.array([1, -1, 0, 0, 0])
    step_m = np.array([0, 0, 1, -1, 0])
    max_steps = math.ceil(100 / w.pk)
    n_blocks = -(-trials // block_size)
    streams = np.random.SeedSequence(seed).spawn(n_blocks)
    hits = 0
    for b, ss in enumerate(streams):
        rng = np.random.default_rng(ss)
        size = min(block_size, trials - b * block_size)
        n = np.full(size, n0)
        m = np.full(size, m0)
        for _ in range(max_steps):
            if n.size == 0:
                break
            move = np.searchsorted(cum, rng.random(n.size), side="right")
            alive = move < 4
            n = n[alive] + step_n[move[alive]]
            m = m[alive] + step_m[move[alive]]
            home = (n == 0) & (m == 0)
            hits += int(home.sum())
            n, m = n[~home], m[~home]
    p = hits / trials
    return p, math.sqrt(p * (1 - p) / trials)
