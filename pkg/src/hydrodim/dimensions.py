"""Generalized fractal dimensions of atomic measures.

Two integral forms are evaluated exactly for a finite measure:

* the correlation integral ``I(q, eps) = sum_n w_n * mu(B(x_n, eps))**(q-1)``;
* the box integral ``L(q, eps) = eps**-1 * int mu(B(x, eps))**q dx``.

Per-scale estimates are ``d_I = ln I / ((q-1) ln eps)`` and
``d_L = ln(L/2) / ((q-1) ln eps)``.  The factor 1/2 is the length of the unit
ball, so that ``L/2 == I`` whenever the balls are disjoint; it does not move
any limit or regression slope.
"""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .measure import AtomicMeasure, _ball_bounds, _first_true
from .spectra import subsequence_epsilon
from .states import BoundState, spectral_measure

__all__ = [
    "DimensionScan",
    "correlation_sum",
    "box_integral",
    "resolution_floor",
    "default_eps_grid",
    "scan",
    "subsequence_scan",
    "upper_envelope_check",
    "fit_line",
]


def _check_args(mu: AtomicMeasure, q: float, eps: float) -> None:
    if not q > 0 or q == 1:
        raise ValueError(f"q must be positive and different from 1, got {q!r}")
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps!r}")
    if len(mu) == 0 or not mu.total_mass > 0:
        raise ValueError("measure is zero")


def atom_ball_masses(mu: AtomicMeasure, eps: float) -> np.ndarray:
    """``mu(B(x_n, eps))`` for every atom ``x_n``."""
    lo, hi = _ball_bounds(mu.positions, mu.positions, eps)
    return mu.range_mass(lo, hi)


def correlation_sum(mu: AtomicMeasure, q: float, eps: float) -> float:
    _check_args(mu, q, eps)
    masses = atom_ball_masses(mu, eps)
    terms = masses ** (q - 1.0) * mu.weights
    return math.fsum(terms.tolist())


def _sweep_segments(mu: AtomicMeasure, eps: float):
    """Lengths and masses of the pieces where ``x -> mu(B(x, eps))`` is constant.

    Breakpoints ``x_a - eps`` and ``x_b + eps`` are never formed explicitly;
    they are ordered by comparing ``x_a - x_b`` with ``2 eps``, so scales far
    below the floating point spacing of the positions are handled correctly.
    """
    pos = mu.positions
    n = pos.size
    two_eps = 2.0 * eps
    # rights_before[a]: right ends at or before the left end of atom a
    guess = np.searchsorted(pos, pos - two_eps, side="left")
    rights_before = _first_true(pos, pos, guess, lambda d: d > -two_eps)
    lefts_before = np.searchsorted(rights_before, np.arange(n), side="right")

    m = 2 * n
    atom = np.empty(m, dtype=np.intp)
    sign = np.empty(m, dtype=np.float64)
    is_left = np.empty(m, dtype=bool)
    left_at = np.arange(n) + rights_before
    right_at = np.arange(n) + lefts_before
    atom[left_at] = np.arange(n)
    atom[right_at] = np.arange(n)
    sign[left_at] = -1.0
    sign[right_at] = 1.0
    is_left[left_at] = True
    is_left[right_at] = False

    n_left = np.cumsum(is_left)
    n_right = np.arange(1, m + 1) - n_left
    length = (pos[atom[1:]] - pos[atom[:-1]]) + (sign[1:] - sign[:-1]) * eps
    lo, hi = n_right[:-1], n_left[:-1]
    live = hi > lo
    return length[live], mu.range_mass(lo[live], hi[live])


def box_integral(mu: AtomicMeasure, q: float, eps: float) -> float:
    _check_args(mu, q, eps)
    length, mass = _sweep_segments(mu, eps)
    return math.fsum((length * mass**q).tolist()) / eps


def resolution_floor(mu: AtomicMeasure) -> float:
    """Half the smallest gap: below it every atom sits alone in its ball."""
    if len(mu) < 2:
        return 0.0
    return 0.5 * float(np.min(np.diff(mu.positions)))


def default_eps_grid(mu: AtomicMeasure, ratio: float = 2 ** -0.5) -> np.ndarray:
    """Geometric grid from the largest gap down to the resolution floor."""
    if len(mu) < 2:
        return np.array([1e-1 * ratio**k for k in range(8)])
    top = float(np.max(np.diff(mu.positions)))
    floor = resolution_floor(mu)
    k = int(math.floor(math.log(floor / top) / math.log(ratio)))
    return top * ratio ** np.arange(k + 1)


def fit_line(x, y) -> tuple[float, float]:
    """Least-squares slope and intercept; NaN when fewer than two points."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size < 2:
        return math.nan, math.nan
    slope, icpt = np.polyfit(x, y, 1)
    return float(slope), float(icpt)


@dataclass
class DimensionScan:
    q: float
    eps: np.ndarray
    I: np.ndarray
    L: np.ndarray
    degenerate: np.ndarray
    window: tuple[float, float]
    mass: float = 1.0
    checks: dict = field(default_factory=dict)

    @property
    def d_I(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(self.I) / ((self.q - 1.0) * np.log(self.eps))

    @property
    def d_L(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(self.L / 2.0) / ((self.q - 1.0) * np.log(self.eps))

    def normalized_d(self, which: str = "L") -> np.ndarray:
        """Per-scale estimate for the measure rescaled to unit mass.

        Rescaling by ``c`` adds ``q ln c`` to ``ln I`` and ``ln L``; the limit
        is unchanged, the finite-scale value is not.
        """
        vals = self.I if which == "I" else self.L / 2.0
        with np.errstate(divide="ignore", invalid="ignore"):
            return ((np.log(vals) - self.q * math.log(self.mass))
                    / ((self.q - 1.0) * np.log(self.eps)))

    @property
    def in_window(self) -> np.ndarray:
        lo, hi = self.window
        return ~self.degenerate & (self.eps >= lo) & (self.eps <= hi)

    def regression_slope(self, which: str = "I", mask=None) -> float:
        mask = self.in_window if mask is None else mask
        vals = self.I if which == "I" else self.L
        return fit_line(np.log(self.eps[mask]), np.log(vals[mask]))[0]

    def regression_D(self, which: str = "I", mask=None) -> float:
        return self.regression_slope(which, mask) / (self.q - 1.0)

    @property
    def extrapolated_D(self) -> float:
        """Intercept of ``d_I = D + c / (-ln eps)`` fitted over the window."""
        m = self.in_window
        return fit_line(-1.0 / np.log(self.eps[m]), self.d_I[m])[1]

    def summary(self) -> dict:
        m = self.in_window
        d = self.d_I[m]
        return {
            "q": self.q,
            "window": [float(self.window[0]), float(self.window[1])],
            "d_min": float(d.min()) if d.size else math.nan,
            "d_max": float(d.max()) if d.size else math.nan,
            "regression_slope_I": self.regression_slope("I"),
            "regression_slope_L": self.regression_slope("L"),
            "regression_D_I": self.regression_D("I"),
            "regression_D_L": self.regression_D("L"),
            "extrapolated_D": self.extrapolated_D,
            "checks": self.checks,
        }

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["epsilon", "I", "L", "d_I", "d_L", "degenerate"])
            for row in zip(self.eps.tolist(), self.I.tolist(), self.L.tolist(),
                           self.d_I.tolist(), self.d_L.tolist(), self.degenerate.tolist()):
                out.writerow([f"{v:.17g}" for v in row[:5]] + [int(row[5])])

    def write_summary(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(_jsonable(self.summary()), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def _sample(mu: AtomicMeasure, q: float, eps: float) -> tuple[float, float]:
    return correlation_sum(mu, q, eps), box_integral(mu, q, eps)


def _evaluate(mu, q, eps, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            pairs = list(pool.map(lambda e: _sample(mu, q, e), eps))
    else:
        pairs = [_sample(mu, q, e) for e in eps]
    I = np.array([p[0] for p in pairs])
    L = np.array([p[1] for p in pairs])
    return I, L


def scan(mu: AtomicMeasure, q: float, eps_grid=None, window=None,
         threads: int = 1) -> DimensionScan:
    """Evaluate both integral forms on a decreasing grid of scales.

    Samples below the resolution floor are computed but flagged degenerate
    and left out of every summary.
    """
    if q == 1 or not q > 0:
        raise ValueError(f"q must be positive and different from 1, got {q!r}")
    eps = default_eps_grid(mu) if eps_grid is None else np.asarray(eps_grid, dtype=np.float64)
    if eps.size > 1 and not np.all(np.diff(eps) < 0):
        raise ValueError("eps grid must be strictly decreasing")
    floor = resolution_floor(mu)
    I, L = _evaluate(mu, q, eps, threads)
    degenerate = eps < floor
    if window is None:
        window = (0.0, math.inf)
    checks = {"resolution_floor": floor, "n_degenerate": int(degenerate.sum())}
    return DimensionScan(q, eps, I, L, degenerate, tuple(window), mu.total_mass, checks)


def subsequence_scan(state: BoundState, family, q: float, n_list,
                     threads: int = 1) -> DimensionScan:
    """Evaluate at the half-gap scales ``eps_N`` where levels ``1..N`` are isolated.

    Records, per sample, whether ``I(q, eps_N) >= sum_{n<=N} p_n**q`` (q < 1),
    the lower bound that drives the upper dimension.
    """
    n_list = np.asarray(sorted(set(int(n) for n in n_list)))
    if n_list.size == 0 or n_list[0] < 1:
        raise ValueError("n_list must contain positive levels")
    if n_list[-1] + 1 > state.n_max:
        raise ValueError(f"n_list reaches {n_list[-1]} but the state is truncated "
                         f"at {state.n_max}; need max(n_list) + 1 <= n_max")
    mu = spectral_measure(state, family)
    eps = np.asarray(subsequence_epsilon(family, n_list), dtype=np.float64)
    I, L = _evaluate(mu, q, eps, threads)
    floor = resolution_floor(mu)
    degenerate = eps < floor
    bounds = np.array([state.power_sum(q, int(N)) for N in n_list])
    checks = {"n_list": n_list.tolist(), "resolution_floor": floor,
              "isolated_lower_bound": bounds.tolist()}
    if q < 1:
        checks["lower_bound_holds"] = bool(np.all(I >= bounds))
    return DimensionScan(q, eps, I, L, degenerate, (0.0, math.inf), mu.total_mass, checks)


def upper_envelope_check(result: DimensionScan, ceiling: float = 1.0 / 3.0,
                         slack: float = 0.05) -> dict:
    """Compare every windowed ``d_L`` with ``ceiling + slack``; never raises.

    The per-scale values are taken for the unit-mass measure, the setting in
    which the ceiling is derived; ``max_d_L_raw`` reports the scan's own
    values for reference.
    """
    m = result.in_window
    d = result.normalized_d("L")[m]
    worst = float(d.max()) if d.size else 0.0
    raw = result.d_L[m]
    return {"ceiling": ceiling, "slack": slack, "max_d_L": worst,
            "max_d_L_raw": float(raw.max()) if raw.size else 0.0,
            "margin": ceiling - worst, "passed": bool(worst <= ceiling + slack),
            "n_samples": int(d.size)}
