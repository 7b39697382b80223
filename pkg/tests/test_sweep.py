import math

import numpy as np
import pytest

from geoent.analytic import eigenvalues_gamma0, eigenvalues_gamma_half
from geoent.qstate import from_uv, psi_w_uv, uv_to_amplitudes
from geoent.sweep import (
    CSV_HEADER, boundary_intersections, boundary_trace, cell_centers, count_domains, criteria_arrays,
    domain_map, domain_map_from_records, max_workers, partial_domain_map, read_csv, records_to_csv, run_sweep, write_csv,
)

HALF = math.pi / 2


def entry(entries, label):
    return next(e for e in entries if e.branch == label)


@pytest.fixture(scope="module")
def sweep0():
    return run_sweep(0.0, 40)


@pytest.fixture(scope="module")
def sweep_half():
    return run_sweep(HALF, 40)


def test_cell_centers():
    c = cell_centers(4)
    assert c == pytest.approx([(k + 0.5) * math.pi / 8 for k in range(4)])
    with pytest.raises(ValueError):
        cell_centers(1)


def test_record_order_and_count(sweep0):
    assert len(sweep0) == 1600
    c = cell_centers(40)
    assert [(r.u, r.v) for r in sweep0[:3]] == [(c[0], c[0]), (c[0], c[1]), (c[0], c[2])]
    assert sweep0[40].u == c[1]


def test_corner_values():
    recs = run_sweep(0.0, 200)
    n = 200
    at = lambda i, j: recs[i * n + j]
    assert at(n - 1, 0).p_max == pytest.approx(1.0, abs=1e-3)      # |000>
    assert at(0, n // 2).p_max == pytest.approx(1.0, abs=1e-3)     # h near 1
    assert at(n - 1, n - 1).p_max == pytest.approx(4 / 9, abs=1e-2)  # W corner


def test_pmax_floor(sweep0, sweep_half):
    for recs in (sweep0, sweep_half):
        for r in recs:
            assert r.p_max >= max(r.g**2, r.h**2) - 1e-12
            assert r.geometric_measure == 1.0 - r.p_max


def test_lipschitz_bound(sweep0, sweep_half):
    n = 40
    for recs in (sweep0, sweep_half):
        p = np.array([r.p_max for r in recs]).reshape(n, n)
        jump = max(np.abs(np.diff(p, axis=0)).max(), np.abs(np.diff(p, axis=1)).max())
        assert jump < 5 / n


def test_domain_counts_cheap():
    assert domain_map(0.0, 100).domain_count == 2
    dm = domain_map(HALF, 100)
    assert dm.domain_count == 3
    assert dm.components == {"P": 1, "Plus": 1, "Two": 1}
    assert 0 <= dm.boundary_fraction < 0.05


def test_count_domains_four_neighbour():
    # diagonal contact does not merge components
    labels = np.array([["a", "b"], ["b", "a"]], dtype=object)
    assert count_domains(labels) == (4, {"a": 2, "b": 2})


def test_map_from_records_checks_size(sweep0):
    with pytest.raises(ValueError):
        domain_map_from_records(sweep0, 41)


def test_triple_point_of_traces():
    target = psi_w_uv()
    pts = boundary_intersections(HALF, "C2", "C3")
    assert len(pts) == 1
    assert abs(pts[0][0] - target.u) < 1e-6 and abs(pts[0][1] - target.v) < 1e-6


def test_c2_column_through_triple_point():
    # C2 crosses zero twice along this column; the upper crossing is the triple point
    u = psi_w_uv().u
    f = lambda v: criteria_arrays(*uv_to_amplitudes(u, v))[1]
    lo, hi = 0.68, 0.74
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if np.sign(f(mid)) == np.sign(f(lo)) else (lo, mid)
    assert abs(0.5 * (lo + hi) - psi_w_uv().v) < 1e-6


def test_d1_trace_values():
    for u, v in boundary_trace(0.0, "D1", 200):
        e = eigenvalues_gamma0(from_uv((u, v)))
        assert abs(e[0].mu_sq - entry(e, "Plus").mu_sq) < 1e-8


def test_c3_trace_restricted():
    for u, v in boundary_trace(HALF, "C3", 100):
        g, t, _ = uv_to_amplitudes(u, v)
        assert g >= t
        e = eigenvalues_gamma_half(from_uv((u, v), HALF))
        assert abs(e[0].mu_sq - entry(e, "Plus").mu_sq) < 1e-8


def test_d1_on_t0_edge():
    # at v = 0, D1 = g(h^2 - g^2) vanishes where g = h, i.e. u = pi/4
    g, t, h = uv_to_amplitudes(math.pi / 4, 0.0)
    assert abs(g - h) < 1e-15
    assert abs(criteria_arrays(g, t, h)[0]) < 1e-15


def test_trace_argument_checks():
    with pytest.raises(ValueError):
        boundary_trace(0.0, "C2", 10)
    with pytest.raises(ValueError):
        boundary_trace(0.0, "X", 10)
    with pytest.raises(ValueError):
        boundary_trace(0.0, "D1", 0)


def test_csv_format(sweep0, tmp_path):
    text = records_to_csv(sweep0)
    lines = text.split("\n")
    assert lines[0] == ",".join(CSV_HEADER)
    assert lines[-1] == "" and len(lines) == 1602
    assert "\r" not in text
    first = lines[1].split(",")
    assert len(first) == len(CSV_HEADER) and first[-1] in {"0", "1"}
    path = tmp_path / "s.csv"
    write_csv(sweep0, path)
    back = read_csv(path)
    assert back == sweep0


def test_deterministic_across_workers():
    a = records_to_csv(run_sweep(1.0, 12, workers=1))
    b = records_to_csv(run_sweep(1.0, 12, workers=4))
    assert a == b


def test_max_workers(monkeypatch):
    monkeypatch.setenv("GEOENT_THREADS", "3")
    assert max_workers() == 3
    monkeypatch.setenv("GEOENT_THREADS", "zero")
    with pytest.raises(ValueError):
        max_workers()
    monkeypatch.setenv("GEOENT_THREADS", "0")
    with pytest.raises(ValueError):
        max_workers()


def test_partial_map_small():
    pm = partial_domain_map(0.8, grid_n=20, restarts=10)
    assert set(pm.components) <= {"P", "planar", "twisted", "asymmetric"}
    assert pm.worst_polish < 1e-9
    assert np.all(pm.p_max <= 1 + 1e-12)


@pytest.mark.slow
@pytest.mark.parametrize("gamma", [0.0, math.pi / 4, math.pi / 3, HALF, 11 * math.pi / 24])
def test_domain_count_grid_stability(gamma):
    assert domain_map(gamma, 150).domain_count == domain_map(gamma, 300).domain_count
