"""Stationary points and maximal overlap for an arbitrary phase.

Two routes are provided:

* ``stationary_points_quarter`` -- the gamma = pi/4 pipeline. The multiplier
  solves a quartic, the azimuth follows from ``tan(phi)`` and the polar
  angle from ``z = tan(theta/2)``.
* ``stationary_points_numeric`` -- multi-start damped Newton on the three
  stationarity equations in ``(theta, phi, lambda)``; works for any phase.

``pmax_general`` dispatches between these and the closed forms.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .analytic import PmaxResult, criteria, pmax_gamma0, pmax_gamma_half
from .qstate import SymmetricState
from .stationarity import (
    P, StationaryPoint, SphericalDirection,
    lambda_zero_branch, make_point, principal_point, quartic_label, reduced_correlations,
)

ACCEPT_TOL = 1e-8
DEDUP_TOL = 1e-7
IMAG_TOL = 1e-9
POSITIVE_LAMBDA = 1e-12
CERT_TOL = 1e-9
DISPATCH_TOL = 1e-12
BOUNDARY_GAP = 1e-6

_GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


class InsufficientCoverageError(RuntimeError):
    pass


@dataclass(frozen=True)
class QuarticPoly:
    """Monic quartic c4 l^4 + c3 l^3 + c2 l^2 + c1 l + c0."""

    coeffs: tuple[float, float, float, float, float]

    def __call__(self, lam):
        c4, c3, c2, c1, c0 = self.coeffs
        return (((c4 * lam + c3) * lam + c2) * lam + c1) * lam + c0

    def derivative(self, lam):
        c4, c3, c2, c1, _ = self.coeffs
        return ((4 * c4 * lam + 3 * c3) * lam + 2 * c2) * lam + c1

    @property
    def scale(self) -> float:
        return max(abs(c) for c in self.coeffs)

    def companion(self) -> np.ndarray:
        c4, c3, c2, c1, c0 = self.coeffs
        m = np.zeros((4, 4))
        m[0, :] = [-c3 / c4, -c2 / c4, -c1 / c4, -c0 / c4]
        m[1, 0] = m[2, 1] = m[3, 2] = 1.0
        return m

    def roots(self) -> np.ndarray:
        """All four roots from the companion-matrix eigenvalues, sorted by real part."""
        r = np.linalg.eigvals(self.companion())
        return r[np.argsort(r.real, kind="stable")]


@dataclass
class GammaSolveReport:
    points: list[StationaryPoint]
    rejected: list[tuple[complex, str]] = field(default_factory=list)
    p_max: float = math.nan
    branch: str = ""
    runner_up: float | None = None
    certified: bool = True
    method: str = ""

    def positive(self) -> list[StationaryPoint]:
        return [p for p in self.points if p.lam > POSITIVE_LAMBDA]


def quartic_coefficients(s: SymmetricState) -> QuarticPoly:
    g, t, h = s.g, s.t, s.h
    g2, t2, h2 = g * g, t * t, h * h
    t4 = t2 * t2
    return QuarticPoly((
        1.0,
        -2.0 * (h2 + 4 * t2),
        -4.0 * t2 * (2 * g2 - h2 - 6 * t2),
        8.0 * (t4 * (h2 - 4 * t2) + g2 * (3 * h2 * t2 + 4 * t4)),
        16.0 * t4 * (g2 * g2 - 5 * g2 * h2 - 2 * g2 * t2 - h2 * t2 + t4),
    ))


def _polish_root(poly: QuarticPoly, lam: float, steps: int = 30) -> float:
    best, fbest = lam, abs(poly(lam))
    x = lam
    for _ in range(steps):
        d = poly.derivative(x)
        if d == 0.0:
            break
        x = x - poly(x) / d
        fx = abs(poly(x))
        if fx < fbest:
            best, fbest = x, fx
    return best


def _derivative_root(coeffs: np.ndarray, order: int, x0: float) -> float:
    """Newton on the order-th derivative; a root of multiplicity m is simple there."""
    p = np.poly1d(coeffs).deriv(order)
    dp = p.deriv()
    x = x0
    for _ in range(20):
        d = dp(x)
        if d == 0.0:
            break
        step = p(x) / d
        x -= step
        if abs(step) < 1e-16 * (1 + abs(x)):
            break
    return float(x)


@dataclass
class RootCluster:
    """Eigenvalues of the companion matrix that sit close together.

    A multiple root comes back from the eigensolver smeared into a small
    cluster (error ~ eps**(1/m)); ``merged`` is its refined location. Close
    but distinct simple roots also cluster, so both readings are kept and
    the stationarity residual decides.
    """

    singles: list[float]
    complex_members: list[complex]
    merged: float | None = None


def root_clusters(poly: QuarticPoly) -> list[RootCluster]:
    out, near = [], []
    for root in poly.roots():
        if abs(root.imag) > 1e-3 * (1 + abs(root.real)):
            # far off the axis: a genuine complex pair
            out.append(RootCluster([], [complex(root)]))
        else:
            near.append(complex(root))
    near.sort(key=lambda z: z.real)
    groups: list[list[complex]] = []
    for z in near:
        if groups and abs(z - groups[-1][-1]) < 1e-3 * (1 + abs(z)):
            groups[-1].append(z)
        else:
            groups.append([z])
    for grp in groups:
        singles, cplx = [], []
        for z in grp:
            if abs(z.imag) <= IMAG_TOL * (1 + abs(z.real)):
                singles.append(_polish_root(poly, float(z.real)))
            else:
                cplx.append(z)
        merged = None
        if len(grp) > 1:
            mean = float(np.mean([z.real for z in grp]))
            merged = _derivative_root(np.array(poly.coeffs), len(grp) - 1, mean)
        out.append(RootCluster(singles, cplx, merged))
    return out


def direction_from_multiplier(r: np.ndarray, G: np.ndarray, lam: float):
    """Unit vectors s with (lam I - G) s = r, using the null space when singular."""
    A = lam * np.eye(3) - G
    w, V = np.linalg.eigh(A)
    scale = max(1.0, float(np.abs(w).max()))
    small = np.abs(w) < 1e-9 * scale
    coef = V.T @ r
    base = V[:, ~small] @ (coef[~small] / w[~small])
    rest = 1.0 - float(base @ base)
    if not small.any():
        return [base / np.linalg.norm(base)] if abs(rest) < 1e-6 else []
    if rest < -1e-12 or np.abs(coef[small]).max() > 1e-9:
        return []
    null = V[:, small][:, 0]
    k = math.sqrt(max(rest, 0.0))
    return [base + k * null, base - k * null] if k > 0 else [base]


def _z_squared_ratio(lam: float, g: float, t: float, h: float) -> float:
    """z^2 from the z-component equation; used only as a sign check."""
    u = lam - 2 * t * t
    num = (u * u - 4 * g * g * t * t) * (lam - 2 * g * g + 2 * t * t)
    den = (lam - 2 * h * h) * u * u - 8 * h * h * t * t * u - 4 * g * g * t * t * (lam - 2 * h * h)
    return num / den if den != 0 else math.nan


def _quarter_direction(s: SymmetricState, lam: float):
    """(direction, multiplier, reason) for one real quartic root; direction None on failure."""
    corr = reduced_correlations(s)
    vec, lam2, reason = _closed_form_direction(s, corr, lam)
    if vec is not None:
        return vec, lam2, ""
    # the closed form divides by h t; retry with the generic solve before giving up
    for cand in direction_from_multiplier(corr.r, corr.G, lam):
        cand, lam2 = _polish_direction(corr, cand, lam)
        if float(np.abs(corr.r + corr.G @ cand - lam2 * cand).max()) <= ACCEPT_TOL:
            return cand, lam2, ""
    return None, lam, reason


def _closed_form_direction(s: SymmetricState, corr, lam: float):
    g, t, h = s.g, s.t, s.h
    a = lam - 2 * t * t - 2 * g * t
    b = lam - 2 * t * t + 2 * g * t
    n = math.hypot(a, b)
    if h * t < 1e-12 or n < 1e-12:
        return None, lam, "no direction"
    z_sq = (a * b) ** 2 / (2 * h * h * t * t * n * n)
    zs2 = _z_squared_ratio(lam, g, t, h)
    if math.isfinite(zs2) and zs2 < -1e-8 * (1 + abs(z_sq)):
        return None, lam, "negative z^2"
    best, best_res = None, math.inf
    phi0 = math.atan2(a, b)
    for zsign in (1.0, -1.0):
        z = zsign * math.sqrt(z_sq)
        theta = 2 * math.atan(z)
        for phi in (phi0, phi0 + math.pi):
            st, ct = math.sin(theta), math.cos(theta)
            cp, sp = math.cos(phi), math.sin(phi)
            if max(abs(st), abs(ct), abs(cp), abs(sp)) > 1 + 1e-12:
                continue
            vec = np.array([st * cp, st * sp, ct])
            res = float(np.abs(corr.r + corr.G @ vec - lam * vec).max())
            if res < best_res:
                best, best_res = vec, res
    if best is None:
        return None, lam, "trig range"
    if best_res > 1e-12:
        best, lam = _polish_direction(corr, best, lam)
    return best, lam, ""


def _polish_direction(corr, vec, lam: float):
    """A few Newton steps on the direction at fixed multiplier.

    The closed-form z divides by h^2 t^2, so near h = 0 a root error of
    1e-8 can cost the direction all its digits.
    """
    d = SphericalDirection.from_vector(vec)
    th, ph, lam2, res = newton_batch(corr.r[None, :], corr.G[None], np.array([d.theta]),
                                     np.array([d.phi]), np.array([lam]), max_iter=30)
    if abs(lam2[0] - lam) > 1e-6 * (1 + abs(lam)):
        return vec, lam
    out, _, _ = _sphere(th, ph)
    return out[0], float(lam2[0])


def _direction_residual(s: SymmetricState, vec, lam: float) -> float:
    corr = reduced_correlations(s)
    return float(np.abs(corr.r + corr.G @ vec - lam * vec).max())


def _finish_report(s, points, rejected, method) -> GammaSolveReport:
    corr = reduced_correlations(s)
    pos = [p for p in points if p.lam > POSITIVE_LAMBDA]
    rep = GammaSolveReport(points, rejected, method=method)
    if not pos:
        rep.certified = False
        return rep
    best_mu = max(p.mu_sq for p in pos)
    # ties (boundary) resolve to the principal branch, then to the larger multiplier
    tied = [p for p in pos if p.mu_sq >= best_mu - 1e-14]
    tied.sort(key=lambda p: (p.branch != P, -p.lam))
    win = tied[0]
    rep.p_max, rep.branch = win.mu_sq, win.branch
    others = [p.mu_sq for p in pos if p.branch != win.branch]
    rep.runner_up = max(others) if others else None
    lam_top = float(np.linalg.eigvalsh(corr.G)[-1])
    rep.certified = max(p.lam for p in tied) >= lam_top - CERT_TOL
    return rep


def _label_by_rank(lams: list[float]) -> list[str]:
    """Index distinct multipliers from the top: the largest is 4, then 3, ..."""
    order = sorted(range(len(lams)), key=lambda i: -lams[i])
    labels = [""] * len(lams)
    rank, anchor = -1, math.inf
    for i in order:
        if anchor - lams[i] > DEDUP_TOL:
            rank += 1
            anchor = lams[i]
        labels[i] = quartic_label(4 - rank) if rank < 4 else "Qx"
    return labels


def stationary_points_quarter(s: SymmetricState) -> GammaSolveReport:
    """Stationary points at gamma = pi/4 from the quartic in the multiplier."""
    if abs(abs(s.gamma) - math.pi / 4) > DISPATCH_TOL:
        s = SymmetricState(s.g, s.t, s.h, math.pi / 4)
    points = [principal_point(s)]
    try:
        points.append(lambda_zero_branch(s))
    except ValueError:
        pass
    poly = quartic_coefficients(s)
    rejected: list[tuple[complex, str]] = []
    found: list[tuple[float, np.ndarray]] = []
    for cl in root_clusters(poly):
        ok = False
        for root in cl.singles:
            vec, lam, reason = _quarter_direction(s, root)
            if vec is None:
                rejected.append((complex(root), reason))
                continue
            found.append((lam, vec))
        if cl.merged is not None:
            vec, lam, _ = _quarter_direction(s, cl.merged)
            if vec is not None and _direction_residual(s, vec, lam) <= ACCEPT_TOL:
                found.append((lam, vec))
                ok = True
        if not ok:
            rejected.extend((z, "complex root") for z in cl.complex_members)
    labels = _label_by_rank([lam for lam, _ in found])
    seen: list[StationaryPoint] = []
    for (lam, vec), label in zip(found, labels):
        pt = make_point(s, vec, lam, label)
        if pt.residual > ACCEPT_TOL:
            rejected.append((complex(lam), "residual"))
            continue
        if any(_same_point(pt, q) for q in points + seen):
            continue
        seen.append(pt)
    rep = _finish_report(s, points + seen, rejected, "quartic")
    if not rep.certified or not rep.positive():
        warnings.warn("quartic pipeline did not certify the maximum; using the numeric solver",
                      RuntimeWarning, stacklevel=2)
        return stationary_points_numeric(s)
    return rep


def _same_point(a: StationaryPoint, b: StationaryPoint) -> bool:
    return abs(a.lam - b.lam) < DEDUP_TOL and float(np.abs(a.vector - b.vector).max()) < DEDUP_TOL


def fibonacci_directions(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic low-discrepancy (theta, phi) starts, poles excluded."""
    i = np.arange(n, dtype=float)
    z = 1.0 - (2.0 * i + 1.0) / n
    theta = np.arccos(z)
    phi = np.mod(i * _GOLDEN_ANGLE, 2 * math.pi)
    return theta, phi


def _sphere(theta, phi):
    st, ct = np.sin(theta), np.cos(theta)
    sp, cp = np.sin(phi), np.cos(phi)
    s = np.stack([st * cp, st * sp, ct], axis=-1)
    s_t = np.stack([ct * cp, ct * sp, -st], axis=-1)
    s_p = np.stack([-st * sp, st * cp, np.zeros_like(st)], axis=-1)
    return s, s_t, s_p


def newton_batch(r, G, theta, phi, lam, max_iter: int = 80, tol: float = 1e-14):
    """Damped (Levenberg-Marquardt) Newton on r + G s - lam s = 0 for many starts.

    ``r`` has shape (N, 3), ``G`` (N, 3, 3) and the starts shape (N,).
    Returns the final (theta, phi, lam) and the max-norm residual.
    """
    x = np.stack([theta, phi, lam], axis=-1).astype(float)
    eye = np.eye(3)

    R = _residuals(r, G, x)
    cost = np.einsum("ni,ni->n", R, R)
    mu = np.full(len(x), 1e-8)
    active = np.sqrt(cost) > tol
    for _ in range(max_iter):
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        xa = x[idx]
        s, s_t, s_p = _sphere(xa[:, 0], xa[:, 1])
        A = G[idx] - xa[:, 2, None, None] * eye
        J = np.stack([np.einsum("nij,nj->ni", A, s_t),
                      np.einsum("nij,nj->ni", A, s_p), -s], axis=-1)
        JT = np.swapaxes(J, 1, 2)
        H = JT @ J
        grad = np.einsum("nij,nj->ni", JT, R[idx])
        damp = mu[idx, None, None] * (1.0 + np.trace(H, axis1=1, axis2=2)[:, None, None]) * eye
        step = -np.linalg.solve(H + damp, grad[..., None])[..., 0]
        xt = xa + step
        Rt = _residuals(r[idx], G[idx], xt)
        ct = np.einsum("ni,ni->n", Rt, Rt)
        ok = ct < cost[idx]
        acc = idx[ok]
        x[acc], R[acc], cost[acc] = xt[ok], Rt[ok], ct[ok]
        mu[acc] = np.maximum(mu[acc] * 0.1, 1e-15)
        rej = idx[~ok]
        mu[rej] *= 10.0
        active = (np.sqrt(cost) > tol) & (mu < 1e8)
    res = np.abs(R).max(axis=1)
    return x[:, 0], x[:, 1], x[:, 2], res


def _residuals(r, G, x):
    s, _, _ = _sphere(x[:, 0], x[:, 1])
    return np.einsum("nij,nj->ni", G, s) + r - x[:, 2:3] * s


def _lambda_seeds(g, t):
    return [2 * t * (g + t), -2 * t * (g - t), 2 * (g * g - t * t), 0.0]


def trust_region_seed(r, G):
    """Global maximizer of 2 r.s + s^T G s on the unit sphere, batched.

    Solves the secular equation |(lam - G)^-1 r| = 1 for lam above the top
    eigenvalue of G (the multiplier of the global maximum). In the hard case
    (r orthogonal to the top eigenvector) the returned point is only a seed.
    Shapes: r (N, 3), G (N, 3, 3); returns (theta, phi, lam) of shape (N,).
    """
    d, Q = np.linalg.eigh(G)
    b = np.einsum("nji,nj->ni", Q, r)
    top = d[:, -1]
    lam = top + np.linalg.norm(b, axis=1) + 1e-12
    for _ in range(60):
        gap = np.maximum(lam[:, None] - d, 1e-300)
        x = b / gap
        nx = np.linalg.norm(x, axis=1)
        f = 1.0 / np.maximum(nx, 1e-300) - 1.0
        df = np.einsum("ni,ni->n", b * b, gap ** -3) / np.maximum(nx, 1e-300) ** 3
        step = np.where(df > 0, f / np.maximum(df, 1e-300), 0.0)
        new = np.maximum(lam - step, top + 1e-15 * (1 + np.abs(top)))
        if np.all(np.abs(new - lam) <= 1e-15 * (1 + np.abs(lam))):
            lam = new
            break
        lam = new
    x = b / np.maximum(lam[:, None] - d, 1e-300)
    nx = np.linalg.norm(x, axis=1)
    short = nx < 1 - 1e-9
    # hard case: fill the missing length along the top eigenvector
    x[short, -1] += np.sqrt(np.maximum(1 - nx[short] ** 2, 0.0))
    vec = np.einsum("nij,nj->ni", Q, x)
    vec /= np.linalg.norm(vec, axis=1)[:, None]
    theta = np.arccos(np.clip(vec[:, 2], -1.0, 1.0))
    phi = np.mod(np.arctan2(vec[:, 1], vec[:, 0]), 2 * math.pi)
    return theta, phi, lam


def _polymul_batch(a, b):
    """Row-wise product of coefficient arrays (highest degree first)."""
    out = np.zeros((a.shape[0], a.shape[1] + b.shape[1] - 1))
    for j in range(b.shape[1]):
        out[:, j:j + a.shape[1]] += a * b[:, j:j + 1]
    return out


def secular_seeds(r, G):
    """Six (theta, phi, lam) starts per state from the roots of the secular sextic.

    In the eigenbasis of G a stationary point has s_i = b_i / (lam - d_i),
    and |s| = 1 clears to a degree-six polynomial in lam. Every generic
    stationary point sits on one of its real roots; complex roots still
    give usable starts through their real part. Batched like
    ``trust_region_seed``; returns arrays of shape (N, 6).
    """
    d, Q = np.linalg.eigh(G)
    b = np.einsum("nji,nj->ni", Q, r)
    n = len(d)
    sq = [_polymul_batch(np.stack([np.ones(n), -d[:, i]], 1),
                         np.stack([np.ones(n), -d[:, i]], 1)) for i in range(3)]
    poly = _polymul_batch(_polymul_batch(sq[0], sq[1]), sq[2])
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        poly[:, 2:] -= b[:, i:i + 1] ** 2 * _polymul_batch(sq[j], sq[k])
    comp = np.zeros((n, 6, 6))
    comp[:, 0, :] = -poly[:, 1:]
    comp[:, np.arange(1, 6), np.arange(5)] = 1.0
    lam = np.sort(np.linalg.eigvals(comp).real, axis=1)
    gap = lam[:, :, None] - d[:, None, :]
    gap = np.where(np.abs(gap) < 1e-12, 1e-12, gap)
    vec = np.einsum("nkj,nij->nki", b[:, None, :] / gap, Q)
    vec /= np.linalg.norm(vec, axis=2)[..., None]
    theta = np.arccos(np.clip(vec[..., 2], -1.0, 1.0))
    phi = np.mod(np.arctan2(vec[..., 1], vec[..., 0]), 2 * math.pi)
    return theta, phi, lam


def _starts_batch(rs, Gs, gs, ts, n_starts):
    """Newton starts for many states at once; every array has shape (N, m)."""
    th, ph = fibonacci_directions(n_starts)
    s, _, _ = _sphere(th, ph)
    rayleigh = rs @ s.T + np.einsum("ki,nij,kj->nk", s, Gs, s)
    n = len(gs)
    seeds = [rayleigh] + [np.repeat(np.broadcast_to(np.asarray(v, dtype=float), (n,))[:, None],
                                    n_starts, 1) for v in _lambda_seeds(gs, ts)]
    k = len(seeds)
    tr_th, tr_ph, tr_lam = trust_region_seed(rs, Gs)
    sc_th, sc_ph, sc_lam = secular_seeds(rs, Gs)
    theta = np.concatenate([np.tile(th, (n, k)), tr_th[:, None], sc_th], axis=1)
    phi = np.concatenate([np.tile(ph, (n, k)), tr_ph[:, None], sc_ph], axis=1)
    lam = np.concatenate(seeds + [tr_lam[:, None], sc_lam], axis=1)
    return theta, phi, lam


def _starts(corr, g, t, n_starts):
    th, ph, lam = _starts_batch(corr.r[None], corr.G[None], np.array([g]), np.array([t]), n_starts)
    return th[0], ph[0], lam[0]


def _normalize_angles(theta, phi):
    theta = np.mod(theta, 2 * math.pi)
    flip = theta > math.pi
    theta = np.where(flip, 2 * math.pi - theta, theta)
    phi = np.where(flip, phi + math.pi, phi)
    return theta, np.mod(phi, 2 * math.pi)


def _collect_numeric(s: SymmetricState, theta, phi, lam, res) -> GammaSolveReport:
    points = [principal_point(s)]
    try:
        points.append(lambda_zero_branch(s))
    except ValueError:
        pass
    theta, phi = _normalize_angles(theta, phi)
    ok = res < ACCEPT_TOL
    theta, phi, lam = theta[ok], phi[ok], lam[ok]
    vecs, _, _ = _sphere(theta, phi)
    keys = np.round(np.column_stack([lam, vecs]) / DEDUP_TOL)
    _, first = np.unique(keys, axis=0, return_index=True)
    first = first[np.lexsort((theta[first], lam[first]))]
    extra: list[StationaryPoint] = []
    for i in first:
        pt = make_point(s, vecs[i], float(lam[i]), "")
        if pt.residual > ACCEPT_TOL:
            continue
        if any(_same_point(pt, q) for q in points + extra):
            continue
        extra.append(pt)
    labels = _label_by_rank([p.lam for p in extra])
    extra = [StationaryPoint(p.direction, p.lam, p.mu_sq, lab, p.residual)
             for p, lab in zip(extra, labels)]
    return _finish_report(s, points + extra, [], "numeric")


def stationary_points_numeric(s: SymmetricState, n_starts: int = 64) -> GammaSolveReport:
    """Multi-start damped Newton on the stationarity system for any phase."""
    if n_starts < 8:
        raise ValueError("n_starts must be at least 8")
    corr = reduced_correlations(s)
    th0, ph0, lam0 = _starts(corr, s.g, s.t, n_starts)
    n = len(lam0)
    th, ph, lam, res = newton_batch(np.tile(corr.r, (n, 1)), np.tile(corr.G, (n, 1, 1)),
                                    th0, ph0, lam0)
    rep = _collect_numeric(s, th, ph, lam, res)
    if len(rep.points) < 2:
        raise InsufficientCoverageError("insufficient coverage, increase n_starts")
    return rep


def numeric_reports(states: list[SymmetricState], n_starts: int = 32,
                    chunk: int = 256) -> list[GammaSolveReport]:
    """Batched ``stationary_points_numeric`` over many states (same math, one Newton call per chunk)."""
    out: list[GammaSolveReport] = []
    for lo in range(0, len(states), chunk):
        block = states[lo:lo + chunk]
        corrs = [reduced_correlations(st) for st in block]
        rs = np.array([c.r for c in corrs])
        Gs = np.array([c.G for c in corrs])
        th0, ph0, lam0 = _starts_batch(rs, Gs, np.array([st.g for st in block]),
                                       np.array([st.t for st in block]), n_starts)
        m = lam0.shape[1]
        th, ph, lam, res = newton_batch(np.repeat(rs, m, 0), np.repeat(Gs, m, 0),
                                        th0.ravel(), ph0.ravel(), lam0.ravel())
        for k, st in enumerate(block):
            sl = slice(k * m, (k + 1) * m)
            rep = _collect_numeric(st, th[sl], ph[sl], lam[sl], res[sl])
            if not rep.certified:
                rep = stationary_points_numeric(st, n_starts=4 * n_starts)
            out.append(rep)
    return out


def report_to_pmax(s: SymmetricState, rep: GammaSolveReport) -> PmaxResult:
    boundary = rep.runner_up is not None and rep.p_max - rep.runner_up < BOUNDARY_GAP
    return PmaxResult(float(rep.p_max), rep.branch, criteria(s), boundary=boundary,
                      runner_up=rep.runner_up, certified=rep.certified)


def dispatch_route(gamma: float) -> str:
    a = abs(gamma)
    if a < DISPATCH_TOL:
        return "gamma0"
    if abs(a - math.pi / 2) < DISPATCH_TOL:
        return "gamma_half"
    if abs(a - math.pi / 4) < DISPATCH_TOL:
        return "quarter"
    return "numeric"


def pmax_general(s: SymmetricState, n_starts: int = 64) -> PmaxResult:
    route = dispatch_route(s.gamma)
    if route == "gamma0":
        return pmax_gamma0(s)
    if route == "gamma_half":
        return pmax_gamma_half(s)
    if route == "quarter":
        return report_to_pmax(s, stationary_points_quarter(s))
    return report_to_pmax(s, stationary_points_numeric(s, n_starts))
