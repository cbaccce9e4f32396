"""Eigenvalue families with vanishing, monotone gaps.

A family is indexed by the level ``n >= 1`` in the order in which its gaps
shrink; ``alpha`` is the decay exponent of ``eigenvalue(n) - accumulation``,
so gaps fall off like ``n**-(1 + alpha)`` (``alpha = 2`` for Hydrogen).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DegenerateScaleWarning",
    "Hydrogen",
    "PowerLaw",
    "Custom",
    "family_from_dict",
    "gap_lower_constant",
    "n_epsilon",
    "subsequence_epsilon",
]

DEFAULT_LAMBDA = 0.25
DEFAULT_HORIZON = 10**6


class DegenerateScaleWarning(UserWarning):
    """A scale so coarse that fewer than two levels are isolated."""


def _levels(n) -> np.ndarray:
    n = np.asarray(n)
    if np.any(n < 1):
        raise ValueError("levels are numbered from n = 1")
    return n.astype(np.float64)


class _Family:
    alpha: float
    accumulation: float

    @property
    def gap_exponent(self) -> float:
        return 1.0 + self.alpha

    @property
    def dimension_ceiling(self) -> float:
        """Upper generalized dimension shared by generic states, ``1/(1+alpha)``."""
        return 1.0 / (1.0 + self.alpha)

    def eigenvalues(self, n_max: int) -> np.ndarray:
        return self.eigenvalue(np.arange(1, n_max + 1))

    def gaps(self, n_max: int) -> np.ndarray:
        return self.gap(np.arange(1, n_max + 1))


@dataclass(frozen=True)
class Hydrogen(_Family):
    """Bound-state energies ``-lam / n**2`` (degeneracy ``n**2`` not materialized)."""

    lam: float = DEFAULT_LAMBDA
    horizon: int = DEFAULT_HORIZON
    alpha: float = field(default=2.0, init=False)
    accumulation: float = field(default=0.0, init=False)

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"Lambda must be positive, got {self.lam!r}")
        g = self.gaps(self.horizon)
        if not np.all(np.diff(g) < 0):
            raise ValueError("Hydrogen gaps failed the monotonicity check")

    @classmethod
    def from_kappa(cls, kappa: float, **kw) -> "Hydrogen":
        return cls(lam=kappa**2 / 4.0, **kw)

    def eigenvalue(self, n):
        return -self.lam / _levels(n) ** 2

    def gap(self, n):
        n = _levels(n)
        return self.lam * (2.0 * n + 1.0) / (n * n * (n + 1.0) ** 2)


@dataclass(frozen=True)
class PowerLaw(_Family):
    """Eigenvalues ``sigma0 + L / n**alpha``."""

    alpha: float = 1.0
    L: float = 1.0
    sigma0: float = 0.0
    horizon: int = DEFAULT_HORIZON

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha!r}")
        if self.L == 0:
            raise ValueError("L must be nonzero")

    @property
    def accumulation(self) -> float:
        return self.sigma0

    def eigenvalue(self, n):
        return self.sigma0 + self.L * _levels(n) ** -self.alpha

    def gap(self, n):
        n = _levels(n)
        # |L| n^-a (1 - (1 + 1/n)^-a) without cancellation
        return abs(self.L) * n**-self.alpha * -np.expm1(-self.alpha * np.log1p(1.0 / n))


@dataclass(frozen=True)
class Custom(_Family):
    """Caller-supplied eigenvalues, listed so that gaps shrink monotonically."""

    values: tuple
    fit_tolerance: float = 0.01
    alpha: float = field(init=False)
    accumulation: float = field(init=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size < 3:
            raise ValueError("a custom family needs at least three eigenvalues")
        d = np.diff(v)
        if not (np.all(d > 0) or np.all(d < 0)):
            raise ValueError("custom eigenvalues must be strictly monotone")
        g = np.abs(d)
        if not np.all(np.diff(g) < 0):
            raise ValueError("custom gaps must decrease strictly toward the accumulation end")
        n = np.arange(1, g.size + 1, dtype=np.float64)
        slope, icpt = np.polyfit(np.log(n), np.log(g), 1)
        resid = np.log(g) - (slope * np.log(n) + icpt)
        rms = float(np.sqrt(np.mean(resid**2)))
        if rms > self.fit_tolerance:
            warnings.warn(f"gap power-law fit residual {rms:.3g} exceeds "
                          f"{self.fit_tolerance:.3g}; alpha is a rough estimate",
                          stacklevel=3)
        object.__setattr__(self, "values", tuple(v.tolist()))
        object.__setattr__(self, "alpha", float(-slope - 1.0))
        object.__setattr__(self, "accumulation", float(v[-1]))

    @property
    def horizon(self) -> int:
        return len(self.values)

    def eigenvalue(self, n):
        idx = np.asarray(n)
        if np.any(idx < 1) or np.any(idx > self.horizon):
            raise ValueError(f"custom family has levels 1..{self.horizon}")
        out = np.asarray(self.values)[idx - 1]
        return out if out.ndim else float(out)

    def gap(self, n):
        idx = np.asarray(n)
        if np.any(idx < 1) or np.any(idx >= self.horizon):
            raise ValueError(f"custom family has gaps 1..{self.horizon - 1}")
        v = np.asarray(self.values)
        out = np.abs(v[idx] - v[idx - 1])
        return out if out.ndim else float(out)

    @classmethod
    def from_file(cls, path, **kw) -> "Custom":
        vals = np.loadtxt(path, delimiter=",", ndmin=1, comments="#")
        return cls(tuple(np.ravel(vals).tolist()), **kw)


def gap_lower_constant(family, horizon: int) -> float:
    """Constant ``C`` with ``gap(n) > C / n**(1+alpha)`` for every ``n <= horizon``."""
    if horizon < 2:
        raise ValueError("horizon must be at least 2")
    n = np.arange(1, horizon + 1, dtype=np.float64)
    scaled = n**family.gap_exponent * family.gap(n)
    return 0.999 * float(np.min(scaled))


def n_epsilon(family, eps: float, C: float) -> int:
    """``floor((C/eps)**(1/(1+alpha)))``, the last level whose gap exceeds ``eps``."""
    if not (eps > 0 and C > 0):
        raise ValueError("eps and C must be positive")
    ratio = C / eps
    e = family.gap_exponent
    n = math.floor(ratio ** (1.0 / e))
    while (n + 1) ** e <= ratio:
        n += 1
    while n > 0 and n**e > ratio:
        n -= 1
    if n <= 1:
        warnings.warn(f"eps={eps:g} is not below C={C:g}: N_eps={n} is degenerate",
                      DegenerateScaleWarning, stacklevel=2)
    return n


def subsequence_epsilon(family, N):
    """Half of the ``N``-th gap: the scale at which levels ``1..N`` are isolated."""
    return 0.5 * family.gap(N)


def family_from_dict(spec: dict):
    """Build a family from config keys ``family, lambda, kappa, alpha, L, sigma0, custom_path``."""
    kind = spec.get("family", "hydrogen").lower()
    if kind == "hydrogen":
        if "kappa" in spec:
            return Hydrogen.from_kappa(float(spec["kappa"]))
        return Hydrogen(lam=float(spec.get("lambda", DEFAULT_LAMBDA)))
    if kind == "powerlaw":
        return PowerLaw(alpha=float(spec.get("alpha", 1.0)), L=float(spec.get("L", 1.0)),
                        sigma0=float(spec.get("sigma0", 0.0)))
    if kind == "custom":
        if "custom_path" not in spec:
            raise ValueError("custom family needs custom_path")
        return Custom.from_file(spec["custom_path"])
    raise ValueError(f"unknown family {kind!r}")
