"""Brute-force reference computations used to validate the fast paths.

Nothing here is used by the scans themselves; these are O(N^2) or
fine-quadrature routines meant for test corpora and the ``verify`` command.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import mpmath
import numpy as np

from .measure import AtomicMeasure

__all__ = [
    "OracleReport",
    "compare",
    "naive_correlation_sum",
    "quad_box_integral",
    "highprec_partial_sums",
    "euler_maclaurin_partial_sum",
    "power_tail",
]


@dataclass
class OracleReport:
    name: str
    fast_value: float
    oracle_value: float
    abs_dev: float
    rel_dev: float
    tolerance: float
    passed: bool
    trail: list = field(default_factory=list)
    converged: bool = True

    def to_dict(self) -> dict:
        return asdict(self)


def compare(name: str, fast: float, oracle: float, tol: float, trail=None,
            converged: bool = True) -> OracleReport:
    """Report with ``passed`` iff the relative deviation is within ``tol``."""
    abs_dev = abs(fast - oracle)
    rel_dev = abs_dev / abs(oracle) if oracle != 0 else abs_dev
    return OracleReport(name, float(fast), float(oracle), float(abs_dev), float(rel_dev),
                        tol, bool(converged and rel_dev <= tol), list(trail or []), converged)


def naive_correlation_sum(mu: AtomicMeasure, q: float, eps: float) -> float:
    """All-pairs correlation integral: each ball mass by a full scan."""
    pos = mu.positions.tolist()
    w = mu.weights.tolist()
    masses = []
    for x in pos:
        masses.append(math.fsum(wi for p, wi in zip(pos, w) if abs(p - x) < eps))
    terms = np.asarray(masses) ** (q - 1.0) * mu.weights
    return math.fsum(terms.tolist())


def _grid_masses(mu: AtomicMeasure, x: np.ndarray, eps: float, chunk: int = 1 << 14):
    out = np.empty(x.size)
    for s in range(0, x.size, chunk):
        xs = x[s:s + chunk]
        inside = np.abs(mu.positions[None, :] - xs[:, None]) < eps
        out[s:s + chunk] = inside @ mu.weights
    return out


def quad_box_integral(mu: AtomicMeasure, q: float, eps: float, grid_points: int = 1024,
                      rtol: float = 1e-7, max_points: int = 1 << 24):
    """Midpoint rule for ``eps**-1 * int mu(B(x, eps))**q dx``.

    The grid over ``[min - eps, max + eps]`` is doubled until two successive
    values agree to ``rtol``.  Returns ``(value, converged, trail)``.
    """
    if grid_points < 1000:
        raise ValueError("grid_points must be at least 1000")
    a = mu.positions[0] - eps
    b = mu.positions[-1] + eps
    trail = []
    m = grid_points
    prev = None
    while m <= max_points:
        h = (b - a) / m
        x = a + h * (np.arange(m) + 0.5)
        val = h * float(np.sum(_grid_masses(mu, x, eps) ** q)) / eps
        trail.append((m, val))
        if prev is not None and abs(val - prev) <= rtol * abs(val):
            return val, True, trail
        prev = val
        m *= 2
    return prev, False, trail


def highprec_partial_sums(exponent: float, n_list) -> np.ndarray:
    """``sum_{n<=N} n**-exponent`` for each ``N``, by exactly rounded summation."""
    if not exponent > 0:
        raise ValueError("exponent must be positive")
    terms = np.arange(1, max(int(N) for N in n_list) + 1, dtype=np.float64) ** -exponent
    return np.array([math.fsum(terms[:int(N)].tolist()) for N in n_list])


def euler_maclaurin_partial_sum(exponent: float, N: int) -> float:
    """Closed-form asymptotic value of ``sum_{n<=N} n**-r`` (zeta plus correction terms)."""
    r = mpmath.mpf(exponent)
    N = mpmath.mpf(N)
    if r == 1:
        head = mpmath.log(N) + mpmath.euler
    else:
        head = mpmath.zeta(r) + N ** (1 - r) / (1 - r)
    corr = (N**-r / 2 - r * N ** (-r - 1) / 12
            + r * (r + 1) * (r + 2) * N ** (-r - 3) / 720)
    return float(head + corr)


def power_tail(exponent: float, N: int) -> float:
    """``sum_{n>N} n**-r`` for ``r > 1`` from the zeta function."""
    if not exponent > 1:
        return math.inf
    return float(mpmath.zeta(exponent, N + 1))
