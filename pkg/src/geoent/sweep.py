"""Sweeps over the (u, v) square, domain maps and boundary traces.

Cells are sampled at their centres, u = (i + 1/2) pi / (2n) and likewise
for v, so no sample sits on the h = 0 or t = 0 edges where branches
degenerate.
"""
from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import ndimage, optimize

from .analytic import PmaxResult, pmax_gamma0, pmax_gamma_half
from .general_gamma import (
    BOUNDARY_GAP, dispatch_route, numeric_reports, report_to_pmax, stationary_points_quarter,
)
from .oracle import alternating_batch, bloch_vector, correlations_from_vector, polish_pair
from .qstate import SymmetricState, fmt17, reduce_gamma, uv_to_amplitudes

CSV_HEADER = ["u", "v", "g", "t", "h", "gamma", "p_max", "G", "branch", "D1", "C2", "C3", "boundary"]
TRACE_TOL = 1e-10
SWEEP_STARTS = 8  # Newton starts per state on the numeric route (plus one trust-region seed)


@dataclass(frozen=True)
class SweepRecord:
    u: float
    v: float
    g: float
    t: float
    h: float
    gamma: float
    p_max: float
    geometric_measure: float
    branch: str
    d1: float
    c2: float
    c3: float
    boundary_flag: bool


@dataclass
class DomainMap:
    grid_n: int
    gamma: float
    labels: np.ndarray        # (grid_n, grid_n) branch labels, [i, j] = (u_i, v_j)
    domain_count: int
    p_max: np.ndarray
    boundary: np.ndarray      # cells whose two best branches differ by < 1e-6
    components: dict[str, int]

    @property
    def boundary_fraction(self) -> float:
        return float(self.boundary.mean())


def max_workers() -> int:
    """Worker cap from GEOENT_THREADS (defaults to the CPU count)."""
    raw = os.environ.get("GEOENT_THREADS")
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"GEOENT_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"GEOENT_THREADS must be a positive integer, got {raw!r}")
    return n


def cell_centers(grid_n: int) -> np.ndarray:
    if grid_n < 2:
        raise ValueError("grid_n must be >= 2")
    return (np.arange(grid_n) + 0.5) * math.pi / (2 * grid_n)


def criteria_arrays(g, t, h):
    """D1, C2, C3 evaluated elementwise."""
    h2 = h * h
    d1 = g * h2 - (g + t) ** 2 * (g - 2 * t)
    c2 = (3 * g + 2 * t) * h2 - 4 * g * g * t
    c3 = g * h2 - (g - t) ** 2 * (g + 2 * t)
    return d1, c2, c3


def evaluate_states(states: list[SymmetricState], gamma: float) -> list[PmaxResult]:
    """pmax_general over many states that share one phase."""
    route = dispatch_route(gamma)
    if route == "gamma0":
        return [pmax_gamma0(s) for s in states]
    if route == "gamma_half":
        return [pmax_gamma_half(s) for s in states]
    if route == "quarter":
        return [report_to_pmax(s, stationary_points_quarter(s)) for s in states]
    reps = numeric_reports(states, n_starts=SWEEP_STARTS)
    return [report_to_pmax(s, r) for s, r in zip(states, reps)]


def _row_states(u: float, vs: np.ndarray, gamma: float) -> list[SymmetricState]:
    g, t, h = uv_to_amplitudes(np.full_like(vs, u), vs)
    return [SymmetricState(float(a), float(b), float(c), gamma) for a, b, c in zip(g, t, h)]


def _is_boundary(res: PmaxResult) -> bool:
    if res.boundary:
        return True
    return res.runner_up is not None and res.p_max - res.runner_up < BOUNDARY_GAP


def run_sweep(gamma: float, grid_n: int, workers: int | None = None) -> list[SweepRecord]:
    """P_max at every cell centre, sorted by (i, j) with i indexing u."""
    gamma = reduce_gamma(gamma)
    centers = cell_centers(grid_n)
    workers = max_workers() if workers is None else workers

    def row(i: int) -> list[SweepRecord]:
        u = float(centers[i])
        states = _row_states(u, centers, gamma)
        results = evaluate_states(states, gamma)
        out = []
        for v, s, res in zip(centers, states, results):
            d1, c2, c3 = criteria_arrays(s.g, s.t, s.h)
            out.append(SweepRecord(u, float(v), s.g, s.t, s.h, gamma, res.p_max, 1.0 - res.p_max,
                                   res.branch, d1, c2, c3, _is_boundary(res)))
        return out

    if workers <= 1:
        rows = [row(i) for i in range(grid_n)]
    else:
        # rows are independent; map() keeps them in order
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, range(grid_n)))
    return [rec for r in rows for rec in r]


def count_domains(labels: np.ndarray) -> tuple[int, dict[str, int]]:
    """Connected components per label under 4-neighbour adjacency."""
    comps = {}
    for lab in sorted(set(labels.ravel().tolist())):
        _, k = ndimage.label(labels == lab)
        comps[lab] = int(k)
    return sum(comps.values()), comps


def domain_map_from_records(records: list[SweepRecord], grid_n: int) -> DomainMap:
    if len(records) != grid_n * grid_n:
        raise ValueError("record count does not match grid_n")
    labels = np.array([r.branch for r in records], dtype=object).reshape(grid_n, grid_n)
    p_max = np.array([r.p_max for r in records]).reshape(grid_n, grid_n)
    boundary = np.array([r.boundary_flag for r in records]).reshape(grid_n, grid_n)
    count, comps = count_domains(labels)
    gamma = records[0].gamma if records else 0.0
    return DomainMap(grid_n, gamma, labels, count, p_max, boundary, comps)


def domain_map(gamma: float, grid_n: int, workers: int | None = None) -> DomainMap:
    return domain_map_from_records(run_sweep(gamma, grid_n, workers), grid_n)


# ------------------------------------------------------------------- boundaries

_TRACE_GAMMA = {"D1": 0.0, "C2": math.pi / 2, "C3": math.pi / 2}


def boundary_trace(gamma: float, criterion: str, samples: int, scan: int = 2048) -> list[tuple[float, float]]:
    """Zeros of a criterion polynomial, bisected in v along ``samples`` columns of u.

    D1 belongs to gamma = 0, C2 and C3 to gamma = pi/2. The C3 trace keeps
    only points with g >= t, where it separates the P and plus branches.
    """
    key = criterion.upper()
    if key not in _TRACE_GAMMA:
        raise ValueError(f"unknown criterion {criterion!r}")
    if abs(abs(reduce_gamma(gamma)) - _TRACE_GAMMA[key]) > 1e-12:
        raise ValueError(f"criterion {key} is not meaningful at gamma = {gamma!r}")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    idx = {"D1": 0, "C2": 1, "C3": 2}[key]

    def f(u, v):
        return criteria_arrays(*uv_to_amplitudes(u, v))[idx]

    us = cell_centers(samples) if samples >= 2 else np.array([math.pi / 4])
    vs = np.linspace(0.0, math.pi / 2, scan + 1)
    U, V = np.meshgrid(us, vs, indexing="ij")
    F = f(U, V)
    ci, cj = np.nonzero(np.sign(F[:, :-1]) * np.sign(F[:, 1:]) < 0)
    lo, hi = vs[cj].copy(), vs[cj + 1].copy()
    u_b = us[ci]
    f_lo = f(u_b, lo)
    # go past TRACE_TOL down to float resolution; quantities evaluated on the
    # trace can be far more sensitive to v than the criterion itself
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        fm = f(u_b, mid)
        left = np.sign(fm) == np.sign(f_lo)
        lo = np.where(left, mid, lo)
        f_lo = np.where(left, fm, f_lo)
        hi = np.where(left, hi, mid)
    v_b = 0.5 * (lo + hi)
    pts = []
    for u, v in zip(u_b, v_b):
        if key == "C3":
            g, t, _ = uv_to_amplitudes(u, v)
            if g < t:
                continue
        pts.append((float(u), float(v)))
    return pts


def boundary_intersections(gamma: float, first: str, second: str, samples: int = 400,
                           tol: float = 1e-13) -> list[tuple[float, float]]:
    """Points where two criterion curves cross, e.g. the C2/C3 triple point.

    Column traces locate each curve only coarsely where it runs steeply in v,
    so the closest pairs of trace points seed a 2-D root solve of both
    criteria. Results are sorted by (u, v) and deduplicated.
    """
    keys = [c.upper() for c in (first, second)]
    a = np.array(boundary_trace(gamma, keys[0], samples))
    b = np.array(boundary_trace(gamma, keys[1], samples))
    if len(a) == 0 or len(b) == 0:
        return []
    idx = [{"D1": 0, "C2": 1, "C3": 2}[k] for k in keys]

    def f(x):
        vals = criteria_arrays(*uv_to_amplitudes(x[0], x[1]))
        return [vals[idx[0]], vals[idx[1]]]

    dist = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    near = np.nonzero(dist <= 4 * math.pi / samples + dist.min())
    found: list[tuple[float, float]] = []
    for i, j in zip(*near):
        sol = optimize.root(f, 0.5 * (a[i] + b[j]), tol=tol)
        u, v = (float(x) for x in sol.x)
        if not sol.success or not (0 <= u <= math.pi / 2 and 0 <= v <= math.pi / 2):
            continue
        if max(abs(x) for x in f(sol.x)) > 1e-12:
            continue
        if all(abs(u - p) + abs(v - q) > 1e-9 for p, q in found):
            found.append((u, v))
    return sorted(found)


# -------------------------------------------------------- partially symmetric

PARTIAL_LABELS = ("P", "planar", "twisted", "asymmetric")


def partial_states(grid_n: int, ratio: float, gamma: float = 0.0) -> np.ndarray:
    """g|000> + t(|011> + |101>) + ratio*t|110> + e^{i gamma} h|111> on the (u, v) grid."""
    c = cell_centers(grid_n)
    U, V = np.meshgrid(c, c, indexing="ij")
    g, t, h = (x.ravel() for x in uv_to_amplitudes(U, V))
    psi = np.zeros((g.size, 8), dtype=complex)
    psi[:, 0b000] = g
    psi[:, 0b011] = t
    psi[:, 0b101] = t
    psi[:, 0b110] = ratio * t
    psi[:, 0b111] = np.exp(1j * gamma) * h
    return psi / np.linalg.norm(psi, axis=1)[:, None]


def classify_pair(s1: np.ndarray, s2: np.ndarray, tol: float = 1e-7) -> str:
    """Kind of maximizing direction pair for the two exchange-symmetric qubits."""
    if s1[2] > 1 - tol and s2[2] > 1 - tol:
        return "P"
    if np.abs(s1 - s2).max() > 1e-5:
        return "asymmetric"
    if abs(s1[1]) < tol:
        return "planar"
    return "twisted"


@dataclass
class PartialDomainMap:
    grid_n: int
    ratio: float
    labels: np.ndarray
    p_max: np.ndarray
    domain_count: int
    components: dict[str, int]
    worst_polish: float   # largest |oracle value - polished stationary value|


def partial_domain_map(ratio: float, grid_n: int = 100, restarts: int = 20,
                       seed: int = 42) -> PartialDomainMap:
    """Classify the winning stationary point of the partially symmetric family.

    Qubits A and B carry the same amplitude t, qubit C the amplitude ratio*t.
    The alternating oracle picks the maximizer, which is then polished by
    Newton on the two-direction stationarity system of rho_AB.
    """
    psi = partial_states(grid_n, ratio)
    p, factors, _ = alternating_batch(psi, restarts, 1e-13, seed)
    labels, values, worst = [], [], 0.0
    for k in range(psi.shape[0]):
        r1, r2, G = correlations_from_vector(psi[k])
        a, b, _, _, _ = polish_pair(r1, r2, G, bloch_vector(factors[k, 0]), bloch_vector(factors[k, 1]))
        val = 0.25 * (1 + r1 @ a + r2 @ b + a @ G @ b)
        worst = max(worst, abs(val - p[k]))
        labels.append(classify_pair(a, b))
        values.append(max(val, p[k]))
    lab = np.array(labels, dtype=object).reshape(grid_n, grid_n)
    count, comps = count_domains(lab)
    return PartialDomainMap(grid_n, ratio, lab, np.array(values).reshape(grid_n, grid_n),
                            count, comps, worst)


# -------------------------------------------------------------------------- CSV

def _flag(b: bool) -> str:
    return "1" if b else "0"


def records_to_csv(records: list[SweepRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow([fmt17(r.u), fmt17(r.v), fmt17(r.g), fmt17(r.t), fmt17(r.h), fmt17(r.gamma),
                    fmt17(r.p_max), fmt17(r.geometric_measure), r.branch,
                    fmt17(r.d1), fmt17(r.c2), fmt17(r.c3), _flag(r.boundary_flag)])
    return buf.getvalue()


def write_csv(records: list[SweepRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(records_to_csv(records))


def read_csv(path) -> list[SweepRecord]:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    return [SweepRecord(float(r["u"]), float(r["v"]), float(r["g"]), float(r["t"]), float(r["h"]),
                        float(r["gamma"]), float(r["p_max"]), float(r["G"]), r["branch"],
                        float(r["D1"]), float(r["C2"]), float(r["C3"]), r["boundary"] == "1")
            for r in rows]
