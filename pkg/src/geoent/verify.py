"""Self-verification suite shared by ``geoent verify`` and the test-suite.

Each check draws its own random stream from ``(seed, check index)`` so
running a subset with ``--only`` gives the same numbers as a full run.
"""
from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .analytic import (
    eigenvalues_gamma0, eigenvalues_gamma_half, pmax_gamma0, pmax_gamma_half,
)
from .general_gamma import (
    pmax_general, stationary_points_numeric, stationary_points_quarter,
)
from .oracle import alternating_batch, alternating_maximize, grid_maximize_symmetric
from .qstate import SymmetricState, from_params, from_uv, state_vector
from .stationarity import (
    MINUS, ONE, P, PLUS, TWO, reconstruction_error, nearest_product_lambda_zero,
    residual_norm,
)
from .sweep import boundary_trace, domain_map, partial_domain_map

W_PMAX = 4.0 / 9.0


@dataclass
class VerifyConfig:
    samples: int | None = None   # overrides every per-check sample count when set
    seed: int = 42
    grid: int = 200
    partial_grid: int = 100
    partial_ratios: tuple[float, ...] = (0.5, 0.8, 1.5)
    restarts: int = 50

    def n(self, default: int) -> int:
        return default if self.samples is None else self.samples


@dataclass
class CheckResult:
    name: str
    passed: bool
    tolerance: float
    worst: float
    seconds: float = 0.0
    budget: float | None = None
    detail: str = ""
    within_budget: bool = field(init=False, default=True)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        budget = f"/{self.budget:g}s" if self.budget is not None else ""
        text = (f"{status} {self.name:<20} tol={self.tolerance:.1e} worst={self.worst:.3e} "
                f"time={self.seconds:.2f}s{budget}")
        return text + (f"  {self.detail}" if self.detail else "")


def _rng(cfg: VerifyConfig, key: int) -> np.random.Generator:
    return np.random.default_rng([cfg.seed, key])


def random_states(rng: np.random.Generator, n: int, gamma: float) -> list[SymmetricState]:
    """States uniform in the (u, v) chart."""
    u = rng.uniform(0.0, math.pi / 2, n)
    v = rng.uniform(0.0, math.pi / 2, n)
    return [from_uv((a, b), gamma) for a, b in zip(u, v)]


def _max(values) -> float:
    values = list(values)
    return float(max(values)) if values else 0.0


# ----------------------------------------------------------------------- checks

def check_w_state(cfg: VerifyConfig) -> CheckResult:
    w = from_params(0.0, 1 / math.sqrt(3), 0.0)
    values = {
        "gamma0": pmax_gamma0(w).p_max,
        "gamma_half": pmax_gamma_half(w.with_gamma(math.pi / 2)).p_max,
    }
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        rep = stationary_points_quarter(w.with_gamma(math.pi / 4))
    values["quartic"] = rep.p_max
    for gam in (math.pi / 3, 0.3, -1.1):
        values[f"numeric({gam:.3g})"] = stationary_points_numeric(w.with_gamma(gam)).p_max
    values["alternating"] = alternating_maximize(state_vector(w), cfg.restarts, seed=cfg.seed).p_max
    values["grid"] = grid_maximize_symmetric(w).p_max
    dev = {k: abs(v - W_PMAX) for k, v in values.items()}
    worst = max(dev.values())
    ok = worst <= 1e-12 and rep.method == "quartic"
    detail = "" if rep.method == "quartic" else "quartic pipeline fell back to the numeric solver"
    return CheckResult("w-state", ok, 1e-12, worst, detail=detail)


def check_ghz(cfg: VerifyConfig) -> CheckResult:
    rng = _rng(cfg, 2)
    alpha = rng.uniform(0.0, math.pi / 2, cfg.n(100))
    worst = 0.0
    for a in alpha:
        g, h = math.cos(a), math.sin(a)
        for gam in (0.0, math.pi / 2):
            s = from_params(g, 0.0, h, gam)
            worst = max(worst, abs(pmax_general(s).p_max - max(g * g, h * h)))
    return CheckResult("ghz", worst <= 1e-12, 1e-12, worst)


def h0_law(g: float, t: float) -> float:
    return g * g if g >= 2 * t else 4 * t ** 3 / (3 * t - g)


def check_h0_law(cfg: VerifyConfig) -> CheckResult:
    rng = _rng(cfg, 3)
    beta = rng.uniform(0.0, math.pi / 2, cfg.n(100))
    worst = 0.0
    for b in beta:
        g, t = math.cos(b), math.sin(b) / math.sqrt(3)
        p0 = pmax_gamma0(from_params(g, t, 0.0, 0.0)).p_max
        p1 = pmax_gamma_half(from_params(g, t, 0.0, math.pi / 2)).p_max
        expect = h0_law(g, t)
        worst = max(worst, abs(p0 - expect), abs(p1 - expect), abs(p0 - p1))
    return CheckResult("h0-law", worst <= 1e-12, 1e-12, worst)


def check_oracle_equivalence(cfg: VerifyConfig) -> CheckResult:
    rng = _rng(cfg, 4)
    worst = 0.0
    for gam, fn in ((0.0, pmax_gamma0), (math.pi / 2, pmax_gamma_half)):
        states = random_states(rng, cfg.n(1000), gam)
        analytic = np.array([fn(s).p_max for s in states])
        psis = np.array([state_vector(s) for s in states])
        oracle, _, _ = alternating_batch(psis, cfg.restarts, 1e-12, cfg.seed)
        worst = max(worst, float(np.abs(analytic - oracle).max()))
    return CheckResult("oracle-equivalence", worst <= 1e-7, 1e-7, worst)


def check_quartic(cfg: VerifyConfig) -> CheckResult:
    rng = _rng(cfg, 5)
    states = random_states(rng, cfg.n(200), math.pi / 4)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        reps = [stationary_points_quarter(s) for s in states]
    quartic = np.array([r.p_max for r in reps])
    numeric = np.array([stationary_points_numeric(s).p_max for s in states])
    oracle, _, _ = alternating_batch(np.array([state_vector(s) for s in states]),
                                     cfg.restarts, 1e-12, cfg.seed)
    d_or = float(np.abs(quartic - oracle).max()) if len(states) else 0.0
    d_nu = float(np.abs(quartic - numeric).max()) if len(states) else 0.0
    fallbacks = sum(r.method != "quartic" for r in reps)
    ok = d_or <= 1e-6 and d_nu <= 1e-8
    detail = f"oracle {d_or:.2e} (tol 1e-6), numeric {d_nu:.2e} (tol 1e-8), fallbacks {fallbacks}"
    return CheckResult("quartic", ok, 1e-8, d_nu, detail=detail)


DOMAIN_EXPECTATIONS = (
    (0.0, 2), (math.pi / 4, 2), (math.pi / 3, 2), (11 * math.pi / 24, 2), (math.pi / 2, 3),
)


def check_domains(cfg: VerifyConfig) -> CheckResult:
    found, bad = [], 0
    for gam, expect in DOMAIN_EXPECTATIONS:
        count = domain_map(gam, cfg.grid).domain_count
        found.append(f"{gam / math.pi:.4g}pi:{count}")
        bad += count != expect
    return CheckResult("domains", bad == 0, 0.0, float(bad), detail=" ".join(found))


def trace_points(gamma: float, criterion: str, n: int) -> list[tuple[float, float]]:
    """``n`` evenly spread points of a boundary trace (more columns if needed)."""
    cols = max(n, 2)
    pts = boundary_trace(gamma, criterion, cols)
    while len(pts) < n and cols < 64 * max(n, 2):
        cols *= 2
        pts = boundary_trace(gamma, criterion, cols)
    if len(pts) <= n:
        return pts
    idx = np.linspace(0, len(pts) - 1, n).round().astype(int)
    return [pts[i] for i in idx]


def _mu(entries, label):
    for e in entries:
        if e.branch == label:
            return e.mu_sq
    raise KeyError(label)


# criterion -> (gamma, eigenvalue table, competing pair)
BOUNDARY_PAIRS = {
    "D1": (0.0, eigenvalues_gamma0, (P, PLUS)),
    "C2": (math.pi / 2, eigenvalues_gamma_half, (PLUS, TWO)),
    "C3": (math.pi / 2, eigenvalues_gamma_half, (P, PLUS)),
}


def check_boundary(cfg: VerifyConfig) -> CheckResult:
    worst, counts = 0.0, []
    for crit, (gam, table, (a, b)) in BOUNDARY_PAIRS.items():
        pts = trace_points(gam, crit, cfg.n(200))
        counts.append(f"{crit}:{len(pts)}")
        for uv in pts:
            entries = table(from_uv(uv, gam))
            worst = max(worst, abs(_mu(entries, a) - _mu(entries, b)))
    return CheckResult("boundary", worst <= 1e-8, 1e-8, worst, detail=" ".join(counts))


def check_residuals(cfg: VerifyConfig) -> CheckResult:
    rng = _rng(cfg, 8)
    worst, checked = 0.0, 0
    for gam, table in ((0.0, eigenvalues_gamma0), (math.pi / 2, eigenvalues_gamma_half)):
        for s in random_states(rng, cfg.n(10_000), gam):
            for e in table(s):
                if e.available:
                    worst = max(worst, residual_norm(s, e.direction, e.lam))
                    checked += 1
    return CheckResult("residuals", worst < 1e-10, 1e-10, worst, detail=f"{checked} branch points")


def check_nearest_product(cfg: VerifyConfig) -> CheckResult:
    rng = _rng(cfg, 9)
    n = cfg.n(1000)
    gammas = rng.uniform(-math.pi / 2, math.pi / 2, n)
    recon = 0.0
    for s in (from_uv(uv, gam) for uv, gam in zip(rng.uniform(0, math.pi / 2, (n, 2)), gammas)):
        recon = max(recon, reconstruction_error(s))
    ortho = 0.0
    for gam, crit in ((0.0, "D1"), (math.pi / 2, "C3")):
        for uv in trace_points(gam, crit, cfg.n(200)):
            pair = nearest_product_lambda_zero(from_uv(uv, gam))
            ortho = max(ortho, abs(np.vdot(pair.q, pair.q_prime)))
    ok = recon <= 1e-10 and ortho <= 1e-8
    return CheckResult("nearest-product", ok, 1e-10, recon,
                       detail=f"reconstruction {recon:.2e} (tol 1e-10), <q|q'> {ortho:.2e} (tol 1e-8)")


# gamma = 0 label -> gamma = pi/2 label(s) it must match when h -> 0
H0_PAIRS = ((P, (P,)), (ONE, (ONE,)), (TWO, (PLUS, MINUS)), (PLUS, (TWO,)), (MINUS, (TWO,)))


def check_h0_limit(cfg: VerifyConfig, h: float = 1e-8) -> CheckResult:
    rng = _rng(cfg, 10)
    worst, pairs = 0.0, 0
    for b in rng.uniform(0.0, math.pi / 2, cfg.n(100)):
        rho = math.sqrt(1 - h * h)
        g, t = rho * math.cos(b), rho * math.sin(b) / math.sqrt(3)
        e0 = {e.branch: e for e in eigenvalues_gamma0(from_params(g, t, h, 0.0))}
        e1 = {e.branch: e for e in eigenvalues_gamma_half(from_params(g, t, h, math.pi / 2))}
        for a, partners in H0_PAIRS:
            if not e0[a].available:
                continue
            for p in partners:
                if not e1[p].available:
                    continue
                worst = max(worst, abs(e0[a].mu_sq - e1[p].mu_sq))
                pairs += 1
    return CheckResult("h0-limit", worst <= 1e-6, 1e-6, worst, detail=f"{pairs} pairs")


def check_partial(cfg: VerifyConfig) -> CheckResult:
    found, bad, worst = [], 0, 0.0
    for ratio in cfg.partial_ratios:
        pm = partial_domain_map(ratio, cfg.partial_grid, seed=cfg.seed)
        found.append(f"t3/t={ratio:g}:{pm.domain_count}")
        bad += pm.domain_count != 2
        worst = max(worst, pm.worst_polish)
    return CheckResult("partial", bad == 0, 0.0, float(bad),
                       detail=" ".join(found) + f" polish {worst:.1e}")


# name -> (check, runtime budget in seconds or None)
CHECKS: dict[str, tuple[Callable[[VerifyConfig], CheckResult], float | None]] = {
    "w-state": (check_w_state, 1.0),
    "ghz": (check_ghz, 1.0),
    "h0-law": (check_h0_law, 1.0),
    "oracle-equivalence": (check_oracle_equivalence, 120.0),
    "quartic": (check_quartic, 60.0),
    "domains": (check_domains, 300.0),
    "boundary": (check_boundary, None),
    "residuals": (check_residuals, None),
    "nearest-product": (check_nearest_product, None),
    "h0-limit": (check_h0_limit, None),
    "partial": (check_partial, 600.0),
}


def run_check(name: str, cfg: VerifyConfig) -> CheckResult:
    try:
        fn, budget = CHECKS[name]
    except KeyError:
        raise ValueError(f"unknown check {name!r}; choose from {', '.join(CHECKS)}") from None
    start = time.perf_counter()
    res = fn(cfg)
    res.seconds = time.perf_counter() - start
    res.budget = budget
    if budget is not None and res.seconds >= budget:
        res.within_budget = False
        res.passed = False
        res.detail = (res.detail + " " if res.detail else "") + "over time budget"
    return res


def run_checks(names: list[str] | None, cfg: VerifyConfig) -> list[CheckResult]:
    return [run_check(n, cfg) for n in (names or list(CHECKS))]
