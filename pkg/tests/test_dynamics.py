import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hydrodim.dynamics import (Basis, averaged_probabilities, default_time_grid, gsb_check,
                               moment, moment_trace, saturation_time, time_avg_kernel,
                               transport_exponents)
from hydrodim.spectra import Hydrogen, PowerLaw
from hydrodim.states import eigen_state, power_state


def _amps(state, n):
    a = np.zeros(n)
    s = state.normalize()
    a[: s.n_max] = s.amplitudes[:n]
    return a


def test_kernel_values():
    assert time_avg_kernel(0.0, 3.0) == 1.0
    assert abs(time_avg_kernel(math.pi, 2.0)) < 1e-15
    with pytest.raises(ValueError):
        time_avg_kernel(1.0, 0.0)


def test_kernel_modulus_bound(rng):
    d = rng.uniform(-50, 50, 1000)
    t = rng.uniform(0.1, 1e3, 1000)
    k = np.array([time_avg_kernel(a, b) for a, b in zip(d, t)])
    assert np.all(np.abs(k) <= 2 / (np.abs(d) * t) + 1e-15)


def test_kernel_matches_quadrature():
    from scipy.integrate import quad
    d, t = 0.7, 5.0
    re = quad(lambda s: math.cos(d * s), 0, t)[0] / t
    im = quad(lambda s: -math.sin(d * s), 0, t)[0] / t
    assert time_avg_kernel(d, t) == pytest.approx(complex(re, im), rel=1e-12)


@pytest.mark.parametrize("make", [lambda n: Basis.scrambled(n),
                                  lambda n: Basis.random_orthogonal(n, seed=3),
                                  lambda n: Basis.eigen(n)])
def test_bases_orthonormal(make):
    assert make(64).gram_deviation() <= 1e-12


def test_basis_shape_validation():
    with pytest.raises(ValueError):
        Basis(np.eye(3, 4).T)


def test_eigenstate_flat_in_any_basis():
    n = 32
    h = Hydrogen()
    a = _amps(eigen_state(7, n), n)
    for basis in (Basis.scrambled(n), Basis.random_orthogonal(n, seed=1)):
        tr = moment_trace(a, h, basis, p=1.0, times=default_time_grid(1e6))
        expected = basis.coeffs[:, 6] ** 2
        assert np.max(np.abs(tr.W - expected[:, None])) <= 1e-12
        ex = transport_exponents(tr)
        assert abs(ex["beta_minus_est"]) <= 1e-10 and abs(ex["beta_plus_est"]) <= 1e-10


def test_eigenbasis_flat_for_any_state():
    n = 64
    a = _amps(power_state(10, n), n)
    tr = moment_trace(a, Hydrogen(), Basis.eigen(n), times=default_time_grid(1e8))
    assert np.max(np.abs(tr.W - (a**2)[:, None])) <= 1e-12
    ex = transport_exponents(tr)
    assert abs(ex["beta_minus_est"]) <= 1e-10 and abs(ex["beta_plus_est"]) <= 1e-10


@given(st.integers(0, 10**6))
def test_mass_conservation(seed):
    r = np.random.default_rng(seed)
    n = int(r.integers(4, 48))
    a = r.uniform(0, 1, n)
    a /= np.linalg.norm(a)
    basis = Basis.random_orthogonal(n, seed=seed)
    for t in 10 ** r.uniform(-2, 8, 5):
        W = averaged_probabilities(a, PowerLaw(alpha=1.0), basis, float(t))
        assert abs(W.sum() - 1.0) <= 1e-10
        assert np.all(W >= -1e-12)


def test_phase_convention_independence():
    # the opposite sign in the propagator conjugates K; the double sum is
    # symmetric under n <-> m, so the occupations are unchanged
    n = 40
    r = np.random.default_rng(5)
    a = r.uniform(0, 1, n)
    B = Basis.random_orthogonal(n, seed=5).coeffs * a
    lv = Hydrogen().eigenvalues(n)
    delta = np.subtract.outer(lv, lv)
    t = 123.0
    w_minus = np.einsum("kn,nm,km->k", B, time_avg_kernel(delta, t), B)
    w_plus = np.einsum("kn,nm,km->k", B, time_avg_kernel(-delta, t), B)
    assert np.array_equal(w_minus.real, w_plus.real)
    assert np.max(np.abs(w_minus.imag)) <= 1e-15
    fast = averaged_probabilities(a, Hydrogen(), Basis.random_orthogonal(n, seed=5), t)
    assert np.allclose(fast, w_minus.real, rtol=0, atol=1e-14)


def test_moment_examples():
    assert moment([1.0, 0.0, 0.0], 3.0) == 1.0
    assert moment([0.5, 0.0, 0.5], 2.0) == pytest.approx(math.sqrt(5), rel=1e-15)
    K = 20
    W = np.full(K, 1.0 / K)
    vals = [moment(W, p) for p in (0.5, 1, 2, 4)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        moment(np.zeros(3), 1.0)


def test_saturation_time():
    h = Hydrogen()
    lv = h.eigenvalues(10)
    assert saturation_time(lv) == pytest.approx(200 / h.gap(9), rel=1e-12)
    assert saturation_time(lv, np.eye(10)[3]) == math.inf


def test_transport_warns_past_saturation():
    n = 16
    a = _amps(power_state(10, n), n)
    tr = moment_trace(a, Hydrogen(), Basis.scrambled(n))
    with pytest.warns(UserWarning):
        ex = transport_exponents(tr, (tr.times[0], 10 * tr.saturation_time))
    assert ex["beyond_saturation"]


def test_gsb_check():
    assert gsb_check(0.0, 0.0)["passed"]
    rep = gsb_check(0.1, 0.3, slack=0.1)
    assert rep["margin"] == pytest.approx(-0.2) and not rep["passed"]


def test_trace_threads_identical():
    n = 64
    a = _amps(power_state(10, n), n)
    B = Basis.scrambled(n)
    t1 = moment_trace(a, Hydrogen(), B, threads=1)
    t4 = moment_trace(a, Hydrogen(), B, threads=4)
    assert np.array_equal(t1.W, t4.W) and np.array_equal(t1.r_p, t4.r_p)


def test_prepare_validation():
    with pytest.raises(ValueError):
        averaged_probabilities(np.ones(3), Hydrogen(), Basis.eigen(4), 1.0)
    with pytest.raises(ValueError):
        averaged_probabilities(-np.ones(4), Hydrogen(), Basis.eigen(4), 1.0)
