"""Bound states as per-level probability weights.

Only the aggregated weight of each energy level enters the spectral measure,
so a state is the vector ``p[n-1] = sum_{l,m} |a_{n,l,m}|**2``; phases are
dropped.  Every constructor truncates at an explicit ``n_max`` and records
the neglected tail mass in ``provenance``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .measure import AtomicMeasure

__all__ = [
    "BoundState",
    "power_state",
    "hybrid_state",
    "sigma_state",
    "eigen_state",
    "random_state",
    "spectral_measure",
    "power_tail_bound",
]


def power_tail_bound(s: float, n: int) -> float:
    """Upper bound on ``sum_{m > n} m**-s`` (``s > 1``) by the integral from ``n``."""
    if s <= 1:
        return math.inf
    return n ** (1.0 - s) / (s - 1.0)


@dataclass(frozen=True, eq=False)
class BoundState:
    weights: np.ndarray
    normalized: bool = False
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64).ravel()
        if w.size == 0 or not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ValueError("weights must be a nonempty sequence of finite values >= 0")
        nz = np.flatnonzero(w)
        w = w[: nz[-1] + 1] if nz.size else w[:1]
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if self.normalized and abs(self.mass - 1.0) > 1e-12:
            raise ValueError(f"state flagged normalized but has mass {self.mass!r}")

    @property
    def n_max(self) -> int:
        return self.weights.size

    @property
    def mass(self) -> float:
        return math.fsum(self.weights.tolist())

    @property
    def amplitudes(self) -> np.ndarray:
        return np.sqrt(self.weights)

    def power_sum(self, q: float, upto: int | None = None) -> float:
        """``sum_{n <= upto} p_n**q`` over nonzero weights."""
        w = self.weights[:upto]
        w = w[w > 0]
        return math.fsum((w**q).tolist())

    def normalize(self) -> "BoundState":
        m = self.mass
        if m <= 0:
            raise ValueError("cannot normalize a zero state")
        prov = dict(self.provenance, normalizer=m)
        return BoundState(self.weights / m, normalized=True, provenance=prov)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["n", "weight"])
            for n, w in enumerate(self.weights.tolist(), start=1):
                out.writerow([n, f"{w:.17g}"])

    @classmethod
    def from_csv(cls, path) -> "BoundState":
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        n = np.array([int(r["n"]) for r in rows])
        w = np.zeros(n.max() if n.size else 1)
        w[n - 1] = [float(r["weight"]) for r in rows]
        return cls(w, provenance={"recipe": "csv", "path": str(path)})


def _finish(w: np.ndarray, normalized: bool, prov: dict) -> BoundState:
    state = BoundState(w, provenance=prov)
    return state.normalize() if normalized else state


def power_state(j: int, n_max: int, normalized: bool = False) -> BoundState:
    """Weights ``n**-(1 + 1/j)``: a state whose measure has upper dimension near 1/3."""
    if int(j) != j or j < 1:
        raise ValueError(f"j must be a positive integer, got {j!r}")
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    s = 1.0 + 1.0 / j
    n = np.arange(1, n_max + 1, dtype=np.float64)
    prov = {"recipe": "power", "j": int(j), "n_max": int(n_max), "exponent": s,
            "tail_mass_bound": power_tail_bound(s, n_max)}
    return _finish(n**-s, normalized, prov)


def hybrid_state(prefix: BoundState | None, k: int, s: float = 2.0,
                 q_check: float = 0.5, n_max: int = 10**5) -> BoundState:
    """Keep ``prefix`` below level ``k`` and continue with the tail ``b_n = n**-s``.

    ``provenance['S']`` is ``sum p_n**q_check`` over the truncated state, the
    bound that keeps the correlation integral finite as the scale shrinks.
    """
    if not 0 < q_check < 1:
        raise ValueError("q_check must lie in (0, 1)")
    if not 2 * s * q_check > 1:
        raise ValueError(f"tail b_n = n^-{s} is not 2q-summable at q={q_check}: "
                         f"2*s*q = {2 * s * q_check:g} <= 1")
    if not 1 <= k <= n_max:
        raise ValueError(f"need 1 <= k <= n_max, got k={k}, n_max={n_max}")
    w = np.zeros(n_max)
    if prefix is not None and k > 1:
        head = prefix.weights[: k - 1]
        w[: head.size] = head
    n = np.arange(k, n_max + 1, dtype=np.float64)
    w[k - 1:] = n ** (-2.0 * s)
    state = BoundState(w)
    prov = {"recipe": "hybrid", "k": int(k), "s": float(s), "q_check": float(q_check),
            "n_max": int(n_max), "S": state.power_sum(q_check),
            "S_tail_bound": power_tail_bound(2 * s * q_check, n_max),
            "tail_mass_bound": power_tail_bound(2 * s, n_max)}
    if prefix is not None:
        prov["prefix"] = prefix.provenance
    return BoundState(w, provenance=prov)


def sigma_state(base: BoundState, j: int, sigma: float, n_max: int) -> BoundState:
    """Cut ``base`` after level ``M1`` and append the power tail from ``M2``.

    ``M1`` is the first cut whose discarded base mass is below ``sigma**2``;
    ``M2 > M1`` is the first level whose truncated power tail is below
    ``sigma**2``.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    s = 1.0 + 1.0 / j
    target = sigma * sigma
    bw = base.weights
    # base_tail[m] = sum_{n > m} base_n
    base_tail = np.concatenate([np.cumsum(bw[::-1])[::-1], [0.0]])
    ok1 = np.flatnonzero(base_tail < target)
    n = np.arange(1, n_max + 1, dtype=np.float64)
    pw = n**-s
    # power_tail[m - 1] = sum_{m <= n <= n_max} n^-s
    power_tail = np.cumsum(pw[::-1])[::-1]
    achievable = math.sqrt(max(float(power_tail[-1]),
                               float(base_tail[min(n_max - 1, bw.size)])))
    if ok1.size == 0 or ok1[0] >= n_max:
        raise ValueError(f"sigma={sigma:g} infeasible within n_max={n_max}; "
                         f"need sigma > {achievable:.6g}")
    m1 = int(ok1[0])
    ok2 = np.flatnonzero(power_tail[m1:] < target)
    if ok2.size == 0:
        raise ValueError(f"sigma={sigma:g} infeasible within n_max={n_max}; "
                         f"need sigma > {achievable:.6g}")
    m2 = m1 + 1 + int(ok2[0])
    w = np.zeros(n_max)
    w[:m1] = bw[:m1]
    w[m2 - 1:] = pw[m2 - 1:]
    discarded = float(base_tail[m1]) + float(power_tail[m2 - 1])
    prov = {"recipe": "sigma", "j": int(j), "sigma": float(sigma), "n_max": int(n_max),
            "M1": m1, "M2": m2, "base_tail": float(base_tail[m1]),
            "power_tail": float(power_tail[m2 - 1]), "distance_sq_bound": discarded,
            "tail_mass_bound": power_tail_bound(s, n_max), "base": base.provenance}
    return BoundState(w, provenance=prov)


def eigen_state(level: int, n_max: int | None = None) -> BoundState:
    """All weight on a single level."""
    if level < 1:
        raise ValueError("levels start at 1")
    w = np.zeros(max(level, n_max or level))
    w[level - 1] = 1.0
    return BoundState(w, normalized=True, provenance={"recipe": "eigen", "level": int(level)})


def random_state(rng: np.random.Generator, n_max: int, decay: tuple[float, float] = (1.05, 3.0),
                 normalized: bool = True) -> BoundState:
    """Power-law envelope with a random exponent times i.i.d. uniform(0.2, 1) factors."""
    e = float(rng.uniform(*decay))
    n = np.arange(1, n_max + 1, dtype=np.float64)
    w = rng.uniform(0.2, 1.0, n_max) * n**-e
    prov = {"recipe": "random", "exponent": e, "n_max": int(n_max),
            "tail_mass_bound": power_tail_bound(e, n_max)}
    return _finish(w, normalized, prov)


def spectral_measure(state: BoundState, family) -> AtomicMeasure:
    """Atoms at ``family.eigenvalue(n)`` carrying ``p_n``."""
    w = state.weights
    if not np.any(w > 0):
        raise ValueError("state has zero weight; its spectral measure is zero")
    n = np.flatnonzero(w > 0) + 1
    return AtomicMeasure(family.eigenvalue(n), w[n - 1])
