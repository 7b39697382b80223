"""Closed-form eigenvalue tables and piecewise maximal overlap for gamma = 0 and pi/2."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .qstate import SymmetricState
from .stationarity import (
    MINUS, ONE, P, PLUS, TWO,
    SphericalDirection, make_point,
)

DEAD_BAND = 1e-14
SINGULAR_TOL = 1e-12


def sign(x: float, band: float = DEAD_BAND) -> int:
    """Sign with a dead band treated as zero."""
    if x > band:
        return 1
    if x < -band:
        return -1
    return 0


@dataclass(frozen=True)
class CriteriaValues:
    D1: float
    C1: float
    C2: float
    C3: float
    Cplus: float
    # squared-height thresholds for the gamma = pi/2 region analysis
    h_plus: float | None = None
    h_2: float | None = None
    h_3: float | None = None


@dataclass(frozen=True)
class BranchEigenvalue:
    branch: str
    mu_sq: float
    lam: float
    available: bool
    direction: SphericalDirection | None = None


@dataclass(frozen=True)
class PmaxResult:
    p_max: float
    branch: str
    criteria: CriteriaValues
    boundary: bool = False
    runner_up: float | None = None
    certified: bool = field(default=True, compare=False)

    @property
    def geometric_measure(self) -> float:
        return 1.0 - self.p_max


def criteria(s: SymmetricState) -> CriteriaValues:
    g, t, h = s.g, s.t, s.h
    h2 = h * h
    D1 = g * h2 - (g + t) ** 2 * (g - 2 * t)
    C1 = (3 * g - 2 * t) * h2 + 4 * g * g * t
    C2 = (3 * g + 2 * t) * h2 - 4 * g * g * t
    C3 = g * h2 - (g - t) ** 2 * (g + 2 * t)
    Cplus = h2 * (2 * g + t) - t * (g - t) ** 2
    den_2 = 3 * g + 2 * t
    den_p = 2 * g + t
    return CriteriaValues(
        D1, C1, C2, C3, Cplus,
        h_plus=t * (g - t) ** 2 / den_p if den_p > 0 else None,
        h_2=4 * g * g * t / den_2 if den_2 > 0 else None,
        h_3=(g - t) ** 2 * (g + 2 * t) / g if g > 0 else None,
    )


def _pm_roots(h: float, t: float, shift: float):
    """h -/+ sqrt(h^2 + 4t(2t + shift)); returns None for a negative discriminant."""
    disc = h * h + 4 * t * (2 * t + shift)
    if disc < 0:
        if disc > -DEAD_BAND:
            disc = 0.0
        else:
            return None
    root = math.sqrt(disc)
    plus = h + root
    if plus == 0.0:
        return 0.0, 0.0
    # product of the roots is -4t(2t + shift); avoids cancellation in h - root
    return plus, -4.0 * t * (2 * t + shift) / plus


def _pm_value(h: float, t: float, x: float) -> float:
    return (h * x + 4 * t * t) ** 2 / (x * x + 4 * t * t)


def eigenvalues_gamma0(s: SymmetricState) -> list[BranchEigenvalue]:
    """The five stationary eigenvalues of the gamma = 0 problem.

    The phase of ``s`` is ignored. Entries that are not available carry
    ``available=False`` and their formula value when finite.
    """
    g, t, h = s.g, s.t, s.h
    out = [BranchEigenvalue(P, g * g, 2 * (g * g - t * t), True, SphericalDirection(0.0, 0.0))]

    den1 = h * h + (g + t) ** 2
    vec1 = np.array([-2 * h * (g + t), 0.0, h * h - (g + t) ** 2]) / den1
    mu1 = (g * g * h * h + t * t * (g + t) ** 2) / den1
    out.append(BranchEigenvalue(ONE, mu1, 0.0, True, SphericalDirection.from_vector(vec1)))

    roots = _pm_roots(h, t, -g)
    for label, idx in ((PLUS, 0), (MINUS, 1)):
        if roots is None:
            out.append(BranchEigenvalue(label, math.nan, math.nan, False))
            continue
        x = roots[idx]
        den = x * x + 4 * t * t
        if den <= 0.0:
            # t = 0: the minus root collapses to 0/0, the plus root needs h > 0
            out.append(BranchEigenvalue(label, math.nan, math.nan, False))
            continue
        vec = np.array([4 * t * x, 0.0, -(x * x - 4 * t * t)]) / den
        lam = h * x + 2 * t * (g + t)
        out.append(BranchEigenvalue(label, _pm_value(h, t, x), lam, True,
                                    SphericalDirection.from_vector(vec)))

    C1 = (3 * g - 2 * t) * h * h + 4 * g * g * t
    D = g * g + h * h + 3 * g * t
    lam2 = 2 * t * (t - g)
    if sign(C1) >= 0 and g > 0 and D > SINGULAR_TOL:
        vec = np.array([-h * (g + 2 * t), math.sqrt(max((g + 2 * t) * C1, 0.0)),
                        -(g * g - h * h + g * t)]) / D
        mu2 = g * (g * h * h + 4 * t ** 3) / D
        out.append(BranchEigenvalue(TWO, mu2, lam2, True, SphericalDirection.from_vector(vec)))
    else:
        mu2 = g * (g * h * h + 4 * t ** 3) / D if D > SINGULAR_TOL else math.nan
        out.append(BranchEigenvalue(TWO, mu2, lam2, False))
    return out


def eigenvalues_gamma_half(s: SymmetricState) -> list[BranchEigenvalue]:
    """The five stationary eigenvalues of the gamma = pi/2 problem (phase of ``s`` ignored)."""
    g, t, h = s.g, s.t, s.h
    out = [BranchEigenvalue(P, g * g, 2 * (g * g - t * t), True, SphericalDirection(0.0, 0.0))]

    den1 = h * h + (g - t) ** 2
    if den1 > 0:
        vec1 = np.array([0.0, 2 * h * (g - t), h * h - (g - t) ** 2]) / den1
        mu1 = (g * g * h * h + t * t * (g - t) ** 2) / den1
        out.append(BranchEigenvalue(ONE, mu1, 0.0, True, SphericalDirection.from_vector(vec1)))
    else:
        out.append(BranchEigenvalue(ONE, math.nan, 0.0, False))

    roots = _pm_roots(h, t, g)
    for label, idx in ((PLUS, 0), (MINUS, 1)):
        x = roots[idx]
        den = x * x + 4 * t * t
        if den <= 0.0:
            out.append(BranchEigenvalue(label, math.nan, math.nan, False))
            continue
        vec = np.array([0.0, 4 * t * x, -(x * x - 4 * t * t)]) / den
        lam = h * x - 2 * t * (g - t)
        out.append(BranchEigenvalue(label, _pm_value(h, t, x), lam, True,
                                    SphericalDirection.from_vector(vec)))

    C2 = (3 * g + 2 * t) * h * h - 4 * g * g * t
    E = g * g + h * h - 3 * g * t
    lam2 = 2 * t * (g + t)
    avail = sign((g - 2 * t) * C2) >= 0 and g > 0 and abs(E) > SINGULAR_TOL
    if avail:
        vec = np.array([math.sqrt(max((g - 2 * t) * C2, 0.0)), h * (g - 2 * t),
                        -(g * g - h * h - g * t)]) / E
        mu2 = g * (g * h * h - 4 * t ** 3) / E
        out.append(BranchEigenvalue(TWO, mu2, lam2, True, SphericalDirection.from_vector(vec)))
    else:
        mu2 = g * (g * h * h - 4 * t ** 3) / E if abs(E) > SINGULAR_TOL else math.nan
        out.append(BranchEigenvalue(TWO, mu2, lam2, False))
    return out


def _lookup(entries: list[BranchEigenvalue], label: str) -> BranchEigenvalue:
    for e in entries:
        if e.branch == label:
            return e
    raise KeyError(label)


def _select(entries, winner: str, competitors: list[str], crit, on_boundary: bool) -> PmaxResult:
    win = _lookup(entries, winner)
    others = [
        _lookup(entries, c).mu_sq for c in competitors
        if c != winner and _lookup(entries, c).available and _lookup(entries, c).lam > 0
    ]
    runner = max(others) if others else None
    return PmaxResult(float(win.mu_sq), winner, crit, boundary=on_boundary, runner_up=runner)


def pmax_gamma0(s: SymmetricState) -> PmaxResult:
    """Maximal overlap at gamma = 0: g^2 when D1 <= 0, otherwise the plus branch."""
    crit = criteria(s)
    entries = eigenvalues_gamma0(s)
    d1 = sign(crit.D1)
    winner = P if d1 <= 0 else PLUS
    return _select(entries, winner, [P, PLUS], crit, on_boundary=d1 == 0)


def pmax_gamma_half(s: SymmetricState) -> PmaxResult:
    """Maximal overlap at gamma = pi/2 from the signs of C2 and C3."""
    crit = criteria(s)
    entries = eigenvalues_gamma_half(s)
    c2, c3 = sign(crit.C2), sign(crit.C3)
    if s.g >= 2 * s.t:
        winner = PLUS if (c2 >= 0 and c3 >= 0) else P
        on_boundary = (c2 == 0 and c3 >= 0) or (c3 == 0 and c2 >= 0)
        if on_boundary:
            winner = P
    else:
        winner = PLUS if c2 >= 0 else TWO
        on_boundary = c2 == 0
    if winner == TWO and not _lookup(entries, TWO).available:
        # only reachable at the removable singularity, where both branches meet
        winner = PLUS
    return _select(entries, winner, [P, PLUS, TWO], crit, on_boundary)


def mu_plus_minus_gap(s: SymmetricState) -> float:
    """Closed form of mu_+^2 - mu_-^2 inside the availability region (non-negative)."""
    g, t, h = s.g, s.t, s.h
    roots = _pm_roots(h, t, -g)
    if roots is None or t == 0:
        return math.nan
    rp, rm = roots
    slack = max(2 * t + h * h / (4 * t) - g, 0.0)
    return 128 * h * t ** 3.5 / ((rp * rp + 4 * t * t) * (rm * rm + 4 * t * t)) * slack ** 1.5


def branch_points(s: SymmetricState, entries: list[BranchEigenvalue], gamma: float):
    """Available entries as StationaryPoints evaluated for the given phase."""
    state = SymmetricState(s.g, s.t, s.h, gamma)
    return [make_point(state, e.direction.vector, e.lam, e.branch)
            for e in entries if e.available]
