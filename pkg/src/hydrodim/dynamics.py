"""Time-averaged occupation of an orthonormal basis under pure-point dynamics.

For a state with real level amplitudes ``a_n`` and a basis with coefficients
``c[k, n] = <k|n>``, the time average over ``[0, t]`` has the closed form

    W_k(t) = sum_{n,m} c[k,n] c[k,m] a_n a_m Re K(lambda_n - lambda_m, t),

with ``K(D, t) = (1 - exp(-i D t)) / (i D t)``; no time quadrature is needed.
"""
from __future__ import annotations

import csv
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import dct

from .dimensions import _jsonable, fit_line

__all__ = [
    "Basis",
    "MomentTrace",
    "time_avg_kernel",
    "averaged_probabilities",
    "moment",
    "moment_trace",
    "saturation_time",
    "default_time_grid",
    "transport_exponents",
    "gsb_check",
]


@dataclass(frozen=True, eq=False)
class Basis:
    coeffs: np.ndarray
    kind: str = "custom"
    seed: int | None = None

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.float64)
        if c.ndim != 2 or c.shape[0] > c.shape[1]:
            raise ValueError(f"basis must be K x N with K <= N, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def K(self) -> int:
        return self.coeffs.shape[0]

    @property
    def N(self) -> int:
        return self.coeffs.shape[1]

    def gram_deviation(self) -> float:
        g = self.coeffs @ self.coeffs.T
        return float(np.max(np.abs(g - np.eye(self.K))))

    @classmethod
    def eigen(cls, n: int, k: int | None = None) -> "Basis":
        return cls(np.eye(n)[: k or n], kind="eigen")

    @classmethod
    def scrambled(cls, n: int, k: int | None = None) -> "Basis":
        """Rows of the orthonormal DCT-II matrix: every vector spreads over all levels."""
        c = dct(np.eye(n), type=2, norm="ortho", axis=0)
        return cls(c[: k or n], kind="scrambled")

    @classmethod
    def random_orthogonal(cls, n: int, k: int | None = None, seed: int = 0) -> "Basis":
        rng = np.random.default_rng(seed)
        q, r = np.linalg.qr(rng.standard_normal((n, n)))
        q = q * np.sign(np.diag(r))
        return cls(q.T[: k or n], kind="random_orthogonal", seed=seed)


def time_avg_kernel(delta, t: float):
    """``(1/t) int_0^t exp(-i delta s) ds``; equals 1 at ``delta = 0``."""
    if not t > 0:
        raise ValueError("t must be positive")
    x = np.asarray(delta, dtype=np.float64) * t
    with np.errstate(divide="ignore", invalid="ignore"):
        k = np.where(x == 0, 1.0 + 0j, (1.0 - np.exp(-1j * x)) / (1j * np.where(x == 0, 1.0, x)))
    return k if k.ndim else complex(k)


def _prepare(amplitudes, levels: np.ndarray, basis: Basis):
    a = np.asarray(amplitudes, dtype=np.float64)
    if a.ndim != 1 or a.size != basis.N:
        raise ValueError(f"{a.size} amplitudes for a basis over {basis.N} levels")
    if np.any(a < 0):
        raise ValueError("amplitudes must be nonnegative")
    return a, basis.coeffs * a, np.subtract.outer(levels, levels)


def _column(B: np.ndarray, delta: np.ndarray, t: float) -> np.ndarray:
    # Re K is sin(x)/x for either sign of the exponent
    G = np.sinc(delta * (t / np.pi))
    return np.einsum("kn,kn->k", B @ G, B)


def averaged_probabilities(amplitudes, family, basis: Basis, t: float) -> np.ndarray:
    if not t > 0:
        raise ValueError("t must be positive")
    levels = np.asarray(family.eigenvalues(basis.N), dtype=np.float64)
    _, B, delta = _prepare(amplitudes, levels, basis)
    return _column(B, delta, t)


def moment(W, p: float) -> float:
    """``(sum_k k**p W_k)**(1/p)`` with ``k = 1..K``."""
    W = np.asarray(W, dtype=np.float64)
    if not p > 0:
        raise ValueError("p must be positive")
    if np.any(W < -1e-10):
        raise ValueError("W must be nonnegative")
    total = math.fsum((np.arange(1, W.size + 1, dtype=np.float64) ** p * W).tolist())
    if not total > 0:
        raise ValueError("all-zero occupation has no moment")
    return total ** (1.0 / p)


def saturation_time(levels, amplitudes=None, envelope: float = 1e-2) -> float:
    """Time after which every off-diagonal kernel is below ``envelope``.

    Uses the bound ``|K| <= 2 / (gap * t)`` with the smallest gap between
    occupied levels.
    """
    lv = np.asarray(levels, dtype=np.float64)
    if amplitudes is not None:
        lv = lv[np.asarray(amplitudes) != 0]
    if lv.size < 2:
        return math.inf
    g = float(np.min(np.diff(np.sort(lv))))
    return 2.0 / (g * envelope)


def default_time_grid(t_end: float, decades: float = 4.0, per_decade: int = 32) -> np.ndarray:
    if not math.isfinite(t_end):
        t_end = 1e4
    count = int(round(decades * per_decade)) + 1
    grid = np.logspace(math.log10(t_end) - decades, math.log10(t_end), count)
    grid[-1] = t_end  # logspace may overshoot by an ulp
    return grid


@dataclass
class MomentTrace:
    p: float
    times: np.ndarray
    W: np.ndarray
    r_p: np.ndarray
    saturation_time: float
    captured_mass: float
    info: dict = field(default_factory=dict)

    def to_csv(self, path, include_w: bool = False) -> None:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            head = ["t", "r_p"]
            if include_w:
                head += [f"W_{k}" for k in range(1, self.W.shape[0] + 1)]
            out.writerow(head)
            for i, t in enumerate(self.times.tolist()):
                row = [f"{t:.17g}", f"{self.r_p[i]:.17g}"]
                if include_w:
                    row += [f"{w:.17g}" for w in self.W[:, i].tolist()]
                out.writerow(row)


def moment_trace(amplitudes, family, basis: Basis, p: float = 1.0, times=None,
                 threads: int = 1) -> MomentTrace:
    levels = np.asarray(family.eigenvalues(basis.N), dtype=np.float64)
    a, B, delta = _prepare(amplitudes, levels, basis)
    t_sat = saturation_time(levels, a)
    times = default_time_grid(t_sat) if times is None else np.asarray(times, dtype=np.float64)
    if np.any(times <= 0) or np.any(np.diff(times) <= 0):
        raise ValueError("times must be positive and increasing")
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            cols = list(pool.map(lambda t: _column(B, delta, t), times))
    else:
        cols = [_column(B, delta, t) for t in times]
    W = np.column_stack(cols)
    r = np.array([moment(W[:, i], p) for i in range(W.shape[1])])
    return MomentTrace(p, times, W, r, t_sat, math.fsum((a * a).tolist()),
                       {"basis": basis.kind, "K": basis.K, "N": basis.N})


def transport_exponents(trace: MomentTrace, window=None) -> dict:
    """Growth exponents of ``r_p`` over a time window.

    ``beta_minus``/``beta_plus`` are the smallest/largest two-point secant
    slopes of ``ln r_p`` against ``ln t``; ``regression_beta`` is the global
    least-squares slope.
    """
    lo, hi = window if window is not None else (trace.times[0], trace.times[-1])
    m = (trace.times >= lo) & (trace.times <= hi)
    lt = np.log(trace.times[m])
    lr = np.log(trace.r_p[m])
    if lt.size < 2:
        raise ValueError("window holds fewer than two times")
    secants = np.diff(lr) / np.diff(lt)
    beyond = bool(hi > trace.saturation_time)
    if beyond:
        warnings.warn("exponent window extends past the saturation time", stacklevel=2)
    return {"beta_minus_est": float(secants.min()), "beta_plus_est": float(secants.max()),
            "regression_beta": fit_line(lt, lr)[0], "window": [float(lo), float(hi)],
            "beyond_saturation": beyond}


def gsb_check(beta_plus: float, dimension: float, slack: float = 0.1) -> dict:
    """Margin of the transport bound ``beta_plus >= D(1/(1+p))``."""
    margin = beta_plus - dimension
    return {"beta_plus_est": beta_plus, "dimension": dimension, "margin": margin,
            "slack": slack, "passed": bool(margin >= -slack)}


def write_summary(path, trace: MomentTrace, exps: dict, gsb: dict | None = None) -> None:
    summary = {"p": trace.p, "saturation_time": trace.saturation_time, **exps,
               "gsb_margin": None if gsb is None else gsb["margin"]}
    with open(path, "w") as fh:
        json.dump(_jsonable(summary), fh, indent=2, sort_keys=True)
        fh.write("\n")
