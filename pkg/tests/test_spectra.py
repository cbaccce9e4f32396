import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hydrodim.spectra import (Custom, DegenerateScaleWarning, Hydrogen, PowerLaw,
                              family_from_dict, gap_lower_constant, n_epsilon,
                              subsequence_epsilon)


def test_hydrogen_values():
    h = Hydrogen()
    assert h.eigenvalue(1) == -0.25
    assert h.eigenvalue(2) == -0.0625
    assert h.gap(1) == pytest.approx(0.1875, rel=1e-15)
    assert Hydrogen.from_kappa(1.0).lam == 0.25


def test_powerlaw_values():
    p = PowerLaw(alpha=1.0, L=1.0)
    assert p.eigenvalue(4) == 0.25
    assert p.gap(4) == pytest.approx(0.05, rel=1e-14)
    assert subsequence_epsilon(p, 4) == pytest.approx(0.025, rel=1e-14)


def test_gap_matches_difference_of_eigenvalues():
    for fam in (Hydrogen(), PowerLaw(alpha=1.0), PowerLaw(alpha=0.5, L=-2.0, sigma0=3.0)):
        n = np.arange(1, 200)
        ref = np.abs(fam.eigenvalue(n + 1) - fam.eigenvalue(n))
        assert np.allclose(fam.gap(n), ref, rtol=1e-12, atol=0)


@pytest.mark.parametrize("n,tol", [(10**3, 5e-3), (10**5, 5e-5)])
def test_hydrogen_gap_law(n, tol):
    scaled = n**3 * Hydrogen().gap(n)
    assert abs(scaled - 0.5) / 0.5 <= tol
    # the derived bound: relative deviation below 3/n
    assert abs(scaled - 0.5) / 0.5 <= 3.0 / n


def test_powerlaw_scaled_gap_limit():
    n = 10.0**5
    assert PowerLaw(alpha=1.0).gap(n) * n**2 == pytest.approx(1.0, rel=2e-5)
    assert PowerLaw(alpha=0.5, L=3.0).gap(n) * n**1.5 == pytest.approx(1.5, rel=2e-5)


def test_gap_lower_constant():
    assert gap_lower_constant(Hydrogen(), 10**6) == pytest.approx(0.999 * 0.1875, rel=1e-12)
    assert gap_lower_constant(PowerLaw(alpha=1.0), 10**5) == pytest.approx(0.999 * 0.5, rel=1e-12)


def test_gap_lower_constant_is_a_bound():
    h = Hydrogen()
    C = gap_lower_constant(h, 10**5)
    n = np.arange(1, 10**5 + 1, dtype=float)
    assert np.all(h.gap(n) > C / n**3)


def test_n_epsilon_example():
    h = Hydrogen()
    N = n_epsilon(h, 1e-6, 0.1873)
    assert N == 57
    assert h.gap(57) > 1e-6
    assert n_epsilon(PowerLaw(alpha=1.0), 1e-6, 0.4995) == math.floor(math.sqrt(0.4995e6))


def test_n_epsilon_degenerate_scale_warns():
    with pytest.warns(DegenerateScaleWarning):
        assert n_epsilon(Hydrogen(), 0.5, 0.1873) in (0, 1)


@given(st.floats(1e-15, 1e-2))
def test_n_epsilon_gaps_exceed_eps(eps):
    h = Hydrogen()
    C = 0.999 * 0.1875
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateScaleWarning)
        N = n_epsilon(h, eps, C)
    if N >= 1:
        assert h.gap(N) > eps


def test_subsequence_epsilon_isolates_levels():
    from hydrodim.measure import AtomicMeasure, ball_mass
    h = Hydrogen()
    assert subsequence_epsilon(h, 1) == pytest.approx(0.09375, rel=1e-15)
    w = np.linspace(1.0, 0.1, 150)
    mu = AtomicMeasure(h.eigenvalues(150), w)
    eps = subsequence_epsilon(h, 100)
    got = ball_mass(mu, h.eigenvalues(100), eps)
    assert np.array_equal(got, w[:100][::-1][::-1])


def test_custom_family(tmp_path):
    # gaps exactly n**-3, so the fitted decay exponent is 2
    vals = [0.0] + np.cumsum(np.arange(1, 100, dtype=float) ** -3.0).tolist()
    c = Custom(tuple(vals))
    assert c.alpha == pytest.approx(2.0, abs=0.05)
    assert c.eigenvalue(3) == vals[2]
    path = tmp_path / "levels.csv"
    path.write_text("\n".join(repr(v) for v in vals))
    assert Custom.from_file(path).values == c.values
    with pytest.raises(ValueError):
        c.eigenvalue(101)


def test_custom_family_warns_on_poor_fit():
    with pytest.warns(UserWarning, match="rough estimate"):
        Custom(tuple(-1.0 / n**2 for n in range(1, 50)))


def test_custom_rejects_equal_spacing():
    with pytest.raises(ValueError):
        Custom(tuple(float(k) for k in range(10)))
    with pytest.raises(ValueError):
        Custom((0.0, 1.0, 0.5, 2.0))


def test_family_from_dict():
    assert family_from_dict({"family": "hydrogen", "lambda": 0.5}).lam == 0.5
    assert family_from_dict({"family": "hydrogen", "kappa": 1.0}).lam == 0.25
    p = family_from_dict({"family": "powerlaw", "alpha": 2.0, "L": -1.0, "sigma0": 1.0})
    assert (p.alpha, p.L, p.sigma0) == (2.0, -1.0, 1.0)
    with pytest.raises(ValueError):
        family_from_dict({"family": "nope"})
    with pytest.raises(ValueError):
        family_from_dict({"family": "custom"})


def test_parameter_validation():
    with pytest.raises(ValueError):
        Hydrogen(lam=-1.0)
    with pytest.raises(ValueError):
        PowerLaw(alpha=0.0)
    with pytest.raises(ValueError):
        Hydrogen().eigenvalue(0)
