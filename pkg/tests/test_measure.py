import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hydrodim.measure import (AtomicMeasure, ball_mass, min_gap, normalize,
                              read_measure_csv, write_measure_csv)
from conftest import random_measure


def test_ball_mass_examples():
    assert ball_mass(AtomicMeasure([0.0], [1.0]), 0.0, 0.1) == 1.0
    two = AtomicMeasure([0.0, 1.0], [0.5, 0.5])
    assert ball_mass(two, 0.5, 0.6) == 1.0
    # open ball: atoms exactly on the boundary are excluded
    assert ball_mass(two, 0.5, 0.5) == 0.0


def test_ball_mass_rejects_nonpositive_radius():
    with pytest.raises(ValueError):
        ball_mass(AtomicMeasure([0.0], [1.0]), 0.0, 0.0)


def test_normalize_examples():
    assert normalize(AtomicMeasure([0.0], [2.0])) == AtomicMeasure([0.0], [1.0])
    mu = normalize(AtomicMeasure([0.0, 1.0], [1.0, 3.0]))
    assert mu.weights.tolist() == [0.25, 0.75]
    assert normalize(mu) == mu


def test_min_gap_examples():
    assert min_gap(AtomicMeasure([0.0, 1.0, 3.0], [1.0, 1.0, 1.0])) == 1.0
    lam = [-0.25 / n**2 for n in (1, 2, 3)]
    assert min_gap(AtomicMeasure(lam, [1, 1, 1])) == pytest.approx(0.25 / 4 - 0.25 / 9, rel=1e-15)
    merged = AtomicMeasure([0.0, 0.0, 2.0, 5.0], [1.0, 1.0, 1.0, 1.0])
    assert len(merged) == 3 and merged.weights[0] == 2.0
    assert min_gap(merged) == 2.0


def test_validation():
    with pytest.raises(ValueError):
        AtomicMeasure([0.0, 1.0], [1.0, -1.0])
    with pytest.raises(ValueError):
        AtomicMeasure([np.nan], [1.0])
    with pytest.raises(ValueError):
        AtomicMeasure([0.0, 1.0], [1.0])
    mu = AtomicMeasure([2.0, 1.0, 3.0], [1.0, 0.0, 1.0])
    assert mu.positions.tolist() == [2.0, 3.0]
    with pytest.raises(ValueError):
        mu.weights[0] = 5.0


def test_ball_mass_matches_direct_scan(rng):
    # the fast path must reproduce an exactly rounded scan bit for bit
    for _ in range(100):
        mu = random_measure(rng)
        x = rng.uniform(-1.2, 1.2, 20)
        eps = float(10 ** rng.uniform(-4, 0.3))
        fast = ball_mass(mu, x, eps)
        for xi, f in zip(x, fast):
            ref = math.fsum(w for p, w in zip(mu.positions, mu.weights) if abs(p - xi) < eps)
            assert f == ref


def test_ball_mass_at_atoms_on_exact_boundary():
    mu = AtomicMeasure([0.0, 0.25, 0.5, 0.75], [1.0, 2.0, 3.0, 4.0])
    got = ball_mass(mu, mu.positions, 0.25)
    assert got.tolist() == [1.0, 2.0, 3.0, 4.0]


@given(st.lists(st.tuples(st.floats(-1e3, 1e3), st.floats(1e-6, 1e3)), min_size=1, max_size=40),
       st.floats(1e-9, 1e4))
def test_total_mass_bound_and_full_ball(atoms, eps):
    mu = AtomicMeasure([a for a, _ in atoms], [w for _, w in atoms])
    m = ball_mass(mu, mu.positions, eps)
    assert np.all(m <= mu.total_mass * (1 + 1e-15))
    assert np.all(m >= mu.weights)
    lo, hi = mu.support
    assert ball_mass(mu, 0.5 * (lo + hi), (hi - lo) + 1.0) == pytest.approx(mu.total_mass, rel=1e-15)


def test_csv_round_trip(tmp_path, rng):
    mu = random_measure(rng, 50)
    path = tmp_path / "mu.csv"
    write_measure_csv(mu, path)
    assert read_measure_csv(path) == mu


def test_scaled():
    mu = AtomicMeasure([0.0, 1.0], [1.0, 3.0])
    assert mu.scaled(2.0).weights.tolist() == [2.0, 6.0]
    with pytest.raises(ValueError):
        mu.scaled(0.0)
