import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from geoent.analytic import eigenvalues_gamma0, eigenvalues_gamma_half, pmax_gamma0
from geoent.general_gamma import (
    InsufficientCoverageError, dispatch_route, pmax_general, quartic_coefficients, root_clusters,
    stationary_points_numeric, stationary_points_quarter, trust_region_seed,
)
from geoent.oracle import alternating_batch
from geoent.qstate import from_params, from_uv, state_vector
from geoent.stationarity import reduced_correlations, residual_norm
from conftest import INV_SQRT3, W_PMAX, random_states

QUARTER = math.pi / 4
angle = st.floats(0.02, math.pi / 2 - 0.02)


def test_coefficients_at_h0_are_a_square(rng):
    for g, t in rng.uniform(0, 1, size=(50, 2)):
        s = from_params(g, t, 0)
        g, t = s.g, s.t
        expect = np.polymul(np.polymul([1, -2 * g * t - 2 * t * t], [1, -2 * g * t - 2 * t * t]),
                            np.polymul([1, 2 * g * t - 2 * t * t], [1, 2 * g * t - 2 * t * t]))
        assert np.abs(np.array(quartic_coefficients(s).coeffs) - expect).max() < 1e-12


def test_double_roots_at_g_equal_t():
    s = from_params(1, 1, 0)
    t = s.t
    roots = np.sort(quartic_coefficients(s).roots().real)
    assert roots == pytest.approx([0, 0, 4 * t * t, 4 * t * t], abs=1e-7)


def test_accepted_roots_are_roots(rng):
    for s in random_states(rng, 100, QUARTER):
        poly = quartic_coefficients(s)
        for c in root_clusters(poly):
            for lam in c.singles:
                assert abs(poly(lam)) < 1e-9 * poly.scale


def test_principal_point_present(rng):
    for s in random_states(rng, 50, QUARTER):
        rep = stationary_points_quarter(s)
        p = next(p for p in rep.points if p.branch == "P")
        assert p.mu_sq == pytest.approx(s.g**2, abs=1e-15)
        assert p.lam == pytest.approx(2 * (s.g**2 - s.t**2), abs=1e-15)


def test_lambda_zero_at_g0():
    rep = stationary_points_quarter(from_params(0, 0.5, 0.5, QUARTER))
    zero = next(p for p in rep.points if p.branch == "Zero")
    assert zero.mu_sq == pytest.approx(0.125, abs=1e-15)


def test_roots_near_h0(rng):
    for g, t in rng.uniform(0.1, 1, size=(20, 2)):
        s = from_params(g, t, 1e-6, QUARTER)
        g, t = s.g, s.t
        roots = np.sort(quartic_coefficients(s).roots().real)
        expect = np.sort([2 * t * (g + t)] * 2 + [-2 * t * (g - t)] * 2)
        assert np.abs(roots - expect).max() < 1e-4


def test_w_state_quartic_certified():
    rep = stationary_points_quarter(from_params(0, INV_SQRT3, 0, QUARTER))
    assert rep.method == "quartic"
    assert rep.p_max == pytest.approx(W_PMAX, abs=1e-12)


def test_quarter_points_are_stationary(rng):
    for s in random_states(rng, 100, QUARTER):
        rep = stationary_points_quarter(s)
        for p in rep.points:
            assert p.residual < 1e-8
            assert residual_norm(s, p.direction, p.lam) < 1e-8


def test_numeric_matches_gamma0_table(rng):
    for s in random_states(rng, 30, 0.0):
        pts = stationary_points_numeric(s).points
        for e in eigenvalues_gamma0(s):
            if e.available:
                assert min(abs(p.mu_sq - e.mu_sq) + abs(p.lam - e.lam) for p in pts) < 1e-8


def test_numeric_matches_gamma_half_table(rng):
    for s in random_states(rng, 30, math.pi / 2):
        pts = stationary_points_numeric(s).points
        for e in eigenvalues_gamma_half(s):
            if e.available:
                assert min(abs(p.mu_sq - e.mu_sq) + abs(p.lam - e.lam) for p in pts) < 1e-8


def test_numeric_matches_quartic(rng):
    for s in random_states(rng, 50, QUARTER):
        a = stationary_points_quarter(s).p_max
        b = stationary_points_numeric(s).p_max
        assert abs(a - b) < 1e-8


def test_quarter_winners(rng):
    # only the principal point and the top quartic root ever win at pi/4
    for s in random_states(rng, 200, QUARTER):
        assert stationary_points_quarter(s).branch in {"P", "Q4"}


def test_quarter_against_oracle(rng):
    states = random_states(rng, 40, QUARTER)
    quartic = np.array([stationary_points_quarter(s).p_max for s in states])
    oracle, _, _ = alternating_batch(np.array([state_vector(s) for s in states]))
    assert np.abs(quartic - oracle).max() < 1e-6


def test_n_starts_minimum():
    with pytest.raises(ValueError):
        stationary_points_numeric(from_params(0.3, 0.4, 0.5, 1.0), n_starts=7)


def test_insufficient_coverage_is_runtime_error():
    assert issubclass(InsufficientCoverageError, RuntimeError)


def test_dispatch():
    assert dispatch_route(0.0) == "gamma0"
    assert dispatch_route(-math.pi / 2) == "gamma_half"
    assert dispatch_route(QUARTER) == "quarter"
    assert dispatch_route(-QUARTER) == "quarter"
    assert dispatch_route(1.0) == "numeric"


def test_dispatch_identity_at_gamma0(rng):
    for s in random_states(rng, 100, 0.0):
        assert pmax_general(s) == pmax_gamma0(s)


@given(angle, angle, st.floats(0.05, math.pi / 2 - 0.05))
def test_conjugate_phase_symmetry(u, v, gamma):
    s = from_uv((u, v), gamma)
    a = stationary_points_numeric(s).p_max
    b = stationary_points_numeric(s.with_gamma(-gamma)).p_max
    assert abs(a - b) < 1e-10


@given(angle, angle, st.floats(-math.pi / 2, math.pi / 2))
def test_pmax_at_least_pole_values(u, v, gamma):
    s = from_uv((u, v), gamma)
    assert pmax_general(s).p_max >= max(s.g**2, s.h**2) - 1e-12


def test_trust_region_seed_is_global_multiplier(rng):
    # the seed lands on the largest multiplier, which carries the global maximum
    for s in random_states(rng, 30, 1.1):
        rep = stationary_points_numeric(s)
        c = reduced_correlations(s)
        theta, phi, lam = trust_region_seed(c.r[None], c.G[None])
        best = max(rep.positive(), key=lambda p: p.mu_sq)
        assert lam[0] == pytest.approx(best.lam, abs=1e-6)


def test_tiny_h_falls_back_with_warning():
    s = from_params(0.3, 0.45, 1e-9, QUARTER)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        rep = stationary_points_quarter(s)
    assert rep.p_max == pytest.approx(stationary_points_numeric(s).p_max, abs=1e-8)
