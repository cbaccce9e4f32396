"""Finite pure-point measures on the real line.

Ball masses are exact: weights are converted once to integers on a common
binary scale, prefix sums are kept as Python integers, and every range sum is
rounded to float64 only at the end.  A range sum therefore equals
``math.fsum`` of the same weights, bit for bit, whichever way it was found.
"""
from __future__ import annotations

import csv
import math
from functools import cached_property
from itertools import accumulate
from pathlib import Path

import numpy as np

__all__ = [
    "AtomicMeasure",
    "ball_mass",
    "normalize",
    "min_gap",
    "read_measure_csv",
    "write_measure_csv",
]


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class AtomicMeasure:
    """Weighted Dirac atoms stored by strictly increasing position.

    Duplicate positions are merged by summing their weights; zero weights
    are dropped.  Instances are immutable.
    """

    __slots__ = ("positions", "weights", "total_mass", "__dict__")

    def __init__(self, positions, weights):
        pos = np.asarray(positions, dtype=np.float64).ravel()
        w = np.asarray(weights, dtype=np.float64).ravel()
        if pos.shape != w.shape:
            raise ValueError(f"{pos.size} positions but {w.size} weights")
        if not (np.all(np.isfinite(pos)) and np.all(np.isfinite(w))):
            raise ValueError("positions and weights must be finite")
        if np.any(w < 0):
            raise ValueError("weights must be nonnegative")
        keep = w > 0
        pos, w = pos[keep], w[keep]

        order = np.argsort(pos, kind="stable")
        pos, w = pos[order], w[order]
        if pos.size > 1 and np.any(pos[1:] == pos[:-1]):
            pos, inverse = np.unique(pos, return_inverse=True)
            groups = [[] for _ in range(pos.size)]
            for i, wi in zip(inverse.tolist(), w.tolist()):
                groups[i].append(wi)
            w = np.array([math.fsum(g) for g in groups])

        self.positions = _readonly(pos)
        self.weights = _readonly(w)
        self.total_mass = math.fsum(w.tolist())

    def __len__(self) -> int:
        return self.positions.size

    def __repr__(self) -> str:
        if len(self) == 0:
            return "AtomicMeasure(<empty>)"
        return (f"AtomicMeasure(n_atoms={len(self)}, total_mass={self.total_mass!r}, "
                f"support=[{self.positions[0]!r}, {self.positions[-1]!r}])")

    def __eq__(self, other) -> bool:
        if not isinstance(other, AtomicMeasure):
            return NotImplemented
        return (np.array_equal(self.positions, other.positions)
                and np.array_equal(self.weights, other.weights))

    __hash__ = None

    @property
    def support(self) -> tuple[float, float]:
        if len(self) == 0:
            raise ValueError("empty measure has no support")
        return float(self.positions[0]), float(self.positions[-1])

    def scaled(self, c: float) -> "AtomicMeasure":
        if not c > 0:
            raise ValueError("scale factor must be positive")
        return AtomicMeasure(self.positions, self.weights * c)

    # exact range sums -------------------------------------------------

    @cached_property
    def _exact_prefix(self) -> tuple[np.ndarray, int]:
        """Integer prefix sums of the weights and their binary exponent.

        ``prefix[i] * 2**exp`` is exactly the sum of the first ``i`` weights.
        """
        if len(self) == 0:
            return np.zeros(1, dtype=object), 0
        mant, expo = np.frexp(self.weights)
        ints = (mant * 2.0**53).astype(np.int64)  # exact: mant in [0.5, 1)
        expo = expo.astype(np.int64) - 53
        base = int(expo.min())
        shifts = (expo - base).tolist()
        scaled = [m << s for m, s in zip(ints.tolist(), shifts)]
        prefix = np.empty(len(scaled) + 1, dtype=object)
        prefix[0] = 0
        prefix[1:] = list(accumulate(scaled))
        return prefix, base

    def range_mass(self, lo, hi) -> np.ndarray:
        """Correctly rounded weight sums over index ranges ``[lo, hi)``."""
        lo = np.asarray(lo, dtype=np.intp)
        hi = np.asarray(hi, dtype=np.intp)
        shape = np.broadcast_shapes(lo.shape, hi.shape)
        lo, hi = np.broadcast_to(lo, shape).ravel(), np.broadcast_to(hi, shape).ravel()
        out = np.zeros(lo.size)
        width = hi - lo
        single = width == 1
        out[single] = self.weights[lo[single]]
        many = np.flatnonzero(width > 1)
        if many.size:
            prefix, base = self._exact_prefix
            diff = prefix[hi[many]] - prefix[lo[many]]
            # object -> float64 goes through int.__float__, which rounds correctly
            out[many] = np.ldexp(diff.astype(np.float64), base)
        return out.reshape(shape)


def _first_true(positions: np.ndarray, x: np.ndarray, guess: np.ndarray, pred):
    """Smallest index where the monotone predicate ``pred(position - x)`` holds."""
    n = positions.size
    idx = np.array(guess, dtype=np.intp)

    def holds(i):
        ok = (i >= 0) & (i < n)
        return ok & pred(positions[np.clip(i, 0, n - 1)] - x)

    while True:
        step = (idx > 0) & holds(idx - 1)
        if not step.any():
            break
        idx -= step
    while True:
        step = (idx < n) & ~holds(idx)
        if not step.any():
            break
        idx += step
    return idx


def _ball_bounds(positions: np.ndarray, x, eps: float):
    """Index ranges ``[lo, hi)`` of atoms with ``abs(position - x) < eps``.

    The predicate is evaluated in floating point exactly as a linear scan
    would evaluate it; ``searchsorted`` only provides a starting guess.
    Rounding of ``position - x`` is monotone in ``position``, so the set is
    contiguous.
    """
    x = np.asarray(x, dtype=np.float64)
    lo = np.searchsorted(positions, x - eps, side="left")
    hi = np.searchsorted(positions, x + eps, side="left")
    lo = _first_true(positions, x, lo, lambda d: d > -eps)
    hi = _first_true(positions, x, hi, lambda d: d >= eps)
    return lo, hi


def ball_mass(mu: AtomicMeasure, x, eps: float):
    """Mass of the open ball ``(x - eps, x + eps)``; ``x`` may be an array."""
    if not eps > 0:
        raise ValueError(f"ball radius must be positive, got {eps!r}")
    if len(mu) == 0:
        return np.zeros(np.shape(x)) if np.ndim(x) else 0.0
    lo, hi = _ball_bounds(mu.positions, x, eps)
    m = mu.range_mass(lo, hi)
    return m if np.ndim(x) else float(m)


def normalize(mu: AtomicMeasure) -> AtomicMeasure:
    if not mu.total_mass > 0:
        raise ValueError("cannot normalize the zero measure")
    return AtomicMeasure(mu.positions, mu.weights / mu.total_mass)


def min_gap(mu: AtomicMeasure) -> float:
    if len(mu) < 2:
        raise ValueError("min_gap needs at least two atoms")
    return float(np.min(np.diff(mu.positions)))


def write_measure_csv(mu: AtomicMeasure, path) -> None:
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["position", "weight"])
        for p, w in zip(mu.positions.tolist(), mu.weights.tolist()):
            out.writerow([f"{p:.17g}", f"{w:.17g}"])


def read_measure_csv(path) -> AtomicMeasure:
    with open(Path(path), newline="") as fh:
        rows = list(csv.DictReader(fh))
    if rows and set(rows[0]) != {"position", "weight"}:
        raise ValueError(f"{path}: expected header 'position,weight'")
    return AtomicMeasure([float(r["position"]) for r in rows],
                         [float(r["weight"]) for r in rows])
