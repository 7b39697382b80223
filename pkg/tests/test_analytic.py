import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from geoent.analytic import (
    criteria, eigenvalues_gamma0, eigenvalues_gamma_half, mu_plus_minus_gap, pmax_gamma0,
    pmax_gamma_half,
)
from geoent.qstate import from_params, from_uv, psi_w_uv
from geoent.stationarity import residual_norm
from conftest import INV_SQRT3, W_PMAX, random_states

W = from_params(0, INV_SQRT3, 0)
PSI_W = from_params(2 / 3, 1 / 3, math.sqrt(2) / 3, math.pi / 2)
angle = st.floats(1e-3, math.pi / 2 - 1e-3)


def entry(entries, label):
    return next(e for e in entries if e.branch == label)


def h0_law(g, t):
    return g * g if g >= 2 * t else 4 * t**3 / (3 * t - g)


def test_w_criteria():
    assert criteria(W).D1 == pytest.approx(2 * math.sqrt(3) / 9, abs=1e-15)


def test_triple_point_criteria():
    c = criteria(from_uv(psi_w_uv()))
    assert abs(c.C2) < 1e-15 and abs(c.C3) < 1e-15


def test_t0_criteria():
    s = from_params(0.6, 0, 0.8)
    assert criteria(s).D1 == pytest.approx(0.6 * (0.64 - 0.36), abs=1e-15)


def test_w_plus_branch():
    plus = entry(eigenvalues_gamma0(W), "Plus")
    assert plus.available and plus.mu_sq == pytest.approx(W_PMAX, abs=1e-15)
    res = pmax_gamma0(W)
    assert res.branch == "Plus" and res.p_max == pytest.approx(W_PMAX, abs=1e-15)


def test_h0_limit_gamma0(rng):
    for g, t in rng.uniform(0.05, 1, size=(50, 2)):
        if g > 2 * t:
            continue
        s = from_params(g, t, 0)
        g, t = s.g, s.t
        e = eigenvalues_gamma0(s)
        assert entry(e, "Plus").mu_sq == pytest.approx(4 * t**3 / (3 * t - g), abs=1e-12)
        assert entry(e, "One").mu_sq == pytest.approx(t * t, abs=1e-12)
        assert entry(e, "Two").mu_sq == pytest.approx(4 * t**3 / (3 * t + g), abs=1e-12)


def test_plus_minus_merge_on_availability_edge():
    t, h = 0.3, 0.2
    g = 2 * t + h * h / (4 * t)
    e = eigenvalues_gamma0(from_params(g, t, h))
    assert entry(e, "Plus").mu_sq == pytest.approx(entry(e, "Minus").mu_sq, abs=1e-12)


@pytest.mark.parametrize("g,t,h,expected", [
    (0.5, 0.5, 0.0, 0.5),
    (0.0, INV_SQRT3, 0.0, W_PMAX),
    (0.0, 0.5, 0.5, 0.8),
    (1.0, 0.0, 0.0, 1.0),
])
def test_pmax_gamma0_values(g, t, h, expected):
    assert pmax_gamma0(from_params(g, t, h)).p_max == pytest.approx(expected, abs=1e-14)


def test_psi_w_plus_branch():
    e = eigenvalues_gamma_half(PSI_W)
    assert entry(e, "Plus").mu_sq == pytest.approx(W_PMAX, abs=1e-15)
    res = pmax_gamma_half(PSI_W)
    assert res.p_max == pytest.approx(W_PMAX, abs=1e-15)
    assert res.boundary


def test_h0_limit_gamma_half(rng):
    for g, t in rng.uniform(0.05, 1, size=(50, 2)):
        s = from_params(g, t, 0, math.pi / 2)
        g, t = s.g, s.t
        e = eigenvalues_gamma_half(s)
        assert entry(e, "Plus").mu_sq == pytest.approx(4 * t**3 / (3 * t + g), abs=1e-12)
        assert entry(e, "Minus").mu_sq == pytest.approx(4 * t**3 / (3 * t + g), abs=1e-12)
        two = entry(e, "Two")
        assert two.available == (g <= 2 * t)
        if two.available:
            assert two.mu_sq == pytest.approx(4 * t**3 / (3 * t - g), abs=1e-12)


def test_phase_removable_at_g0():
    s = from_params(0, 0.5, 0.5, math.pi / 2)
    assert entry(eigenvalues_gamma_half(s), "Plus").mu_sq == pytest.approx(0.8, abs=1e-15)
    assert pmax_gamma_half(s).p_max == pytest.approx(0.8, abs=1e-15)


def test_h0_law_both_phases(rng):
    for g, t in rng.uniform(0.0, 1, size=(100, 2)):
        s = from_params(g, t, 0)
        want = h0_law(s.g, s.t)
        assert abs(pmax_gamma0(s).p_max - want) < 1e-12
        assert abs(pmax_gamma_half(s.with_gamma(math.pi / 2)).p_max - want) < 1e-12


def test_ghz_family(rng):
    for g, h in rng.uniform(0, 1, size=(100, 2)):
        s = from_params(g, 0, h)
        want = max(s.g**2, s.h**2)
        assert abs(pmax_gamma0(s).p_max - want) < 1e-12
        assert abs(pmax_gamma_half(s.with_gamma(math.pi / 2)).p_max - want) < 1e-12


@given(angle, angle)
def test_plus_dominates_minus(u, v):
    s = from_uv((u, v))
    e = eigenvalues_gamma0(s)
    plus, minus = entry(e, "Plus"), entry(e, "Minus")
    if plus.available and minus.available:
        assert plus.mu_sq >= minus.mu_sq - 1e-14
        gap = mu_plus_minus_gap(s)
        assert gap >= 0
        assert gap == pytest.approx(plus.mu_sq - minus.mu_sq, abs=1e-10)


@given(angle, angle)
def test_available_branches_are_stationary(u, v):
    for gamma, table in ((0.0, eigenvalues_gamma0), (math.pi / 2, eigenvalues_gamma_half)):
        s = from_uv((u, v), gamma)
        for e in table(s):
            if e.available:
                assert residual_norm(s, e.direction, e.lam) < 1e-10
                assert -1e-15 <= e.mu_sq <= 1 + 1e-15


@given(angle, angle)
def test_pmax_is_best_positive_branch(u, v):
    for gamma, table, pmax in ((0.0, eigenvalues_gamma0, pmax_gamma0),
                               (math.pi / 2, eigenvalues_gamma_half, pmax_gamma_half)):
        s = from_uv((u, v), gamma)
        best = max(e.mu_sq for e in table(s) if e.available and e.lam > 0)
        res = pmax(s)
        assert abs(res.p_max - best) < 1e-12
        assert res.p_max >= max(s.g**2, s.h**2) - 1e-15


def test_ordering_of_mu_p_and_plus(rng):
    # mu_P^2 >= mu_+^2 exactly when D1 <= 0, checked numerically
    for s in random_states(rng, 2000):
        e = eigenvalues_gamma0(s)
        plus = entry(e, "Plus")
        if not plus.available:
            continue
        d1 = criteria(s).D1
        if abs(d1) > 1e-9:
            assert (s.g**2 >= plus.mu_sq) == (d1 < 0)


def test_availability_implication(rng):
    g, t, h = rng.uniform(0, 1, size=(3, 100_000))
    strong = (g - 2 * t) * (3 * g * h * h - 4 * g * g * t + 2 * h * h * t) >= 0
    weak = (g - 2 * t) * (h * h - g * t) >= 0
    assert np.all(weak[strong])


@given(st.floats(0.01, 1), st.floats(0.01, 1))
def test_threshold_orderings(g, t):
    if g < t:
        return
    c = criteria(from_params(g, t, 0.3))
    if g >= 2 * t:
        assert c.h_plus <= c.h_2 + 1e-12 and c.h_2 <= c.h_3 + 1e-12
    else:
        assert c.h_plus <= c.h_3 + 1e-12 and c.h_3 <= c.h_2 + 1e-12


def _root(f, lo, hi):
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if (f(lo) > 0) == (f(mid) > 0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_continuity_on_d1_zero(rng):
    for t in rng.uniform(0.05, 0.5, size=40):
        g_max = math.sqrt(max(1 - 3 * t * t, 0))
        # D1 at h^2 = 1 - g^2 - 3t^2, as a function of g
        f = lambda g: g * (1 - g * g - 3 * t * t) - (g + t) ** 2 * (g - 2 * t)
        if f(2 * t) * f(g_max) > 0 or 2 * t >= g_max:
            continue
        g = _root(f, 2 * t, g_max)
        s = from_params(g, t, math.sqrt(max(1 - g * g - 3 * t * t, 0)))
        e = eigenvalues_gamma0(s)
        assert abs(s.g**2 - entry(e, "Plus").mu_sq) < 1e-9


def test_continuity_on_c2_zero(rng):
    for g in rng.uniform(0.05, 0.9, size=40):
        t_max = math.sqrt((1 - g * g) / 3)
        f = lambda t: (3 * g + 2 * t) * (1 - g * g - 3 * t * t) - 4 * g * g * t
        if f(0.0) * f(t_max) > 0:
            continue
        t = _root(f, 0.0, t_max)
        s = from_params(g, t, math.sqrt(max(1 - g * g - 3 * t * t, 0)), math.pi / 2)
        e = eigenvalues_gamma_half(s)
        two = entry(e, "Two")
        if two.available:
            assert abs(entry(e, "Plus").mu_sq - two.mu_sq) < 1e-9


def test_selected_branches_at_half():
    # each domain of the gamma = pi/2 map, one representative
    assert pmax_gamma_half(from_params(0.9, 0.1, 0.1, math.pi / 2)).branch == "P"
    assert pmax_gamma_half(from_params(0.1, 0.5, 0.1, math.pi / 2)).branch == "Two"
    assert pmax_gamma_half(from_params(0.2, 0.3, 0.9, math.pi / 2)).branch == "Plus"
