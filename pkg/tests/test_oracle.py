import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from geoent.analytic import pmax_gamma0, pmax_gamma_half
from geoent.oracle import (
    ProductTriple, alternating_batch, alternating_maximize, bloch_vector, correlations_from_vector,
    grid_maximize_symmetric, overlap, pair_value, polish_pair, qubit_from_bloch, random_qubits,
)
from geoent.qstate import from_params, from_uv, named_state, state_vector
from geoent.stationarity import reduced_correlations
from conftest import INV_SQRT3, W_PMAX, random_states

ZERO = np.array([1, 0], dtype=complex)
ONE = np.array([0, 1], dtype=complex)
W = from_params(0, INV_SQRT3, 0)
angle = st.floats(0.01, math.pi / 2 - 0.01)


def test_trivial_overlaps():
    s = from_params(0.3, 0.4, 0.5, 1.1)
    assert overlap(ProductTriple(ZERO, ZERO, ZERO), s) == pytest.approx(s.g**2, abs=1e-15)
    assert overlap(ProductTriple(ONE, ONE, ONE), s) == pytest.approx(s.h**2, abs=1e-15)
    assert overlap(ProductTriple(ONE, ONE, ZERO), W) == pytest.approx(1 / 3, abs=1e-15)


def test_triple_validates_norm():
    with pytest.raises(ValueError):
        ProductTriple(np.array([1, 1]), ZERO, ZERO)


def test_w_state():
    res = alternating_maximize(W)
    assert res.p_max == pytest.approx(W_PMAX, abs=1e-10)
    assert res.geometric_measure == pytest.approx(5 / 9, abs=1e-10)
    assert grid_maximize_symmetric(W).p_max == pytest.approx(W_PMAX, abs=1e-12)


@pytest.mark.parametrize("alpha", [0.2, 1 / math.sqrt(2), 0.9])
def test_ghz(alpha):
    psi = named_state("GHZ", alpha=alpha)
    want = max(alpha**2, 1 - alpha**2)
    assert alternating_maximize(psi).p_max == pytest.approx(want, abs=1e-10)


@pytest.mark.parametrize("gamma", [0.0, 0.4, math.pi / 2])
def test_h0_point(gamma):
    s = from_params(0.5, 0.5, 0, gamma)
    assert alternating_maximize(s).p_max == pytest.approx(0.5, abs=1e-10)


def test_grid_oracle_example():
    assert grid_maximize_symmetric(from_params(0, 0.5, 0.5)).p_max == pytest.approx(0.8, abs=1e-12)
    with pytest.raises(ValueError):
        grid_maximize_symmetric(W, resolution=32)


def test_monotone_updates():
    psi = state_vector(from_params(0.3, 0.45, 0.4, 0.9))[None]
    values = [alternating_batch(psi, restarts=1, seed=3, max_sweeps=k)[0][0] for k in range(1, 30)]
    assert np.all(np.diff(values) >= -1e-15)


def test_argument_checks():
    with pytest.raises(ValueError):
        alternating_batch(state_vector(W)[None], restarts=0)
    with pytest.raises(ValueError):
        alternating_batch(state_vector(W)[None], tol=0.0)


def test_deterministic_under_seed():
    s = from_params(0.2, 0.5, 0.3, 0.7)
    a, b = alternating_maximize(s, seed=9), alternating_maximize(s, seed=9)
    assert a.p_max == b.p_max
    assert np.array_equal(a.triple.q1, b.triple.q1)


def test_dead_contraction_restarts():
    # |111> is orthogonal to any start with a |0> factor; the oracle must recover
    psi = np.zeros(8, dtype=complex)
    psi[7] = 1
    assert alternating_maximize(psi, restarts=3).p_max == pytest.approx(1.0, abs=1e-12)


def test_oracles_agree_with_closed_forms(rng):
    for gamma, pmax in ((0.0, pmax_gamma0), (math.pi / 2, pmax_gamma_half)):
        states = random_states(rng, 200, gamma)
        oracle, _, _ = alternating_batch(np.array([state_vector(s) for s in states]))
        analytic = np.array([pmax(s).p_max for s in states])
        assert np.abs(oracle - analytic).max() < 1e-7
        grid = np.array([grid_maximize_symmetric(s).p_max for s in states])
        assert np.abs(grid - oracle).max() < 1e-9


def test_grid_matches_alternating_any_phase(rng):
    states = [s.with_gamma(rng.uniform(-1.5, 1.5)) for s in random_states(rng, 500)]
    oracle, _, _ = alternating_batch(np.array([state_vector(s) for s in states]))
    grid = np.array([grid_maximize_symmetric(s).p_max for s in states])
    assert np.abs(grid - oracle).max() < 1e-9


@given(angle, angle, st.floats(-math.pi / 2, math.pi / 2), st.floats(0, 2 * math.pi))
def test_phase_invariance(u, v, gamma, alpha):
    s = from_uv((u, v), gamma)
    rng = np.random.default_rng(0)
    q = [x / np.linalg.norm(x) for x in random_qubits(rng, (3,))]
    base = overlap(ProductTriple(*q), s)
    phase = np.exp(1j * alpha)
    assert overlap(ProductTriple(q[0] * phase, q[1], q[2]), s) == pytest.approx(base, abs=1e-14)
    assert overlap(ProductTriple(*q), state_vector(s) * phase) == pytest.approx(base, abs=1e-14)


def test_bloch_round_trip(rng):
    for v in rng.normal(size=(50, 3)):
        v /= np.linalg.norm(v)
        assert np.allclose(bloch_vector(qubit_from_bloch(v)), v, atol=1e-14)


def test_two_body_reduction_matches_symmetric(rng):
    for s in random_states(rng, 20, 0.6):
        r1, r2, G = correlations_from_vector(state_vector(s))
        c = reduced_correlations(s)
        assert np.allclose(r1, c.r, atol=1e-14) and np.allclose(r2, c.r, atol=1e-14)
        assert np.allclose(G, c.G, atol=1e-14)


def test_pair_polish_reaches_oracle():
    psi = named_state("PartialSym", g=0.4, t=0.35, t3=0.2, h=0.5)
    res = alternating_maximize(psi)
    r1, r2, G = correlations_from_vector(psi)
    s = res.triple.bloch_vectors()
    a, b, _, _, resid = polish_pair(r1, r2, G, s[0], s[1])
    assert resid < 1e-12
    assert pair_value(r1, r2, G, a, b) == pytest.approx(res.p_max, abs=1e-9)
