"""Reduced correlations and the Lagrange stationarity system on the Bloch sphere.

For a qubit-exchange symmetric state the candidate overlaps are

    mu^2(s) = (1 + 2 r.s + s^T G s) / 4

and stationary directions satisfy ``r + G s = lambda s`` with ``|s| = 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .qstate import SymmetricState, state_vector

RESIDUAL_TOL = 1e-10

# Branch labels shared by all pipelines.
P = "P"
ZERO = "Zero"
ONE = "One"
PLUS = "Plus"
MINUS = "Minus"
TWO = "Two"


def quartic_label(index: int) -> str:
    return f"Q{index}"


@dataclass(frozen=True)
class ReducedCorrelations:
    r: np.ndarray
    G: np.ndarray


@dataclass(frozen=True)
class SphericalDirection:
    theta: float
    phi: float = 0.0

    @property
    def vector(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])

    @classmethod
    def from_vector(cls, s) -> "SphericalDirection":
        s = np.asarray(s, dtype=float)
        s = s / np.linalg.norm(s)
        # atan2 keeps full precision near the poles, unlike acos(s_z)
        theta = math.atan2(math.hypot(s[0], s[1]), s[2])
        if math.hypot(s[0], s[1]) == 0.0:
            return cls(theta, 0.0)
        phi = math.atan2(s[1], s[0]) % (2 * math.pi)
        return cls(theta, phi)


@dataclass(frozen=True)
class StationaryPoint:
    direction: SphericalDirection
    lam: float
    mu_sq: float
    branch: str
    residual: float = field(default=0.0, compare=False)

    @property
    def vector(self) -> np.ndarray:
        return self.direction.vector


@dataclass(frozen=True)
class ProductStatePair:
    """Nearest product state ``|q>|q>|q'>`` of the lambda = 0 branch."""

    q: np.ndarray
    q_prime: np.ndarray


def reduced_correlations(s: SymmetricState) -> ReducedCorrelations:
    g, t, h = s.g, s.t, s.h
    c, sn = math.cos(s.gamma), math.sin(s.gamma)
    r = np.array([2 * h * t * c, 2 * h * t * sn, g * g - h * h - t * t])
    G = np.array([
        [2 * t * (g + t), 0.0, -2 * h * t * c],
        [0.0, -2 * t * (g - t), -2 * h * t * sn],
        [-2 * h * t * c, -2 * h * t * sn, g * g + h * h - t * t],
    ])
    return ReducedCorrelations(r, G)


def quadratic_value(corr: ReducedCorrelations, s) -> np.ndarray:
    """Evaluate (1 + 2 r.s + s^T G s)/4 for one or many unit vectors (last axis = 3)."""
    s = np.asarray(s, dtype=float)
    return 0.25 * (1.0 + 2.0 * (s @ corr.r) + np.einsum("...i,ij,...j->...", s, corr.G, s))


def eigenvalue_from_direction(s: SymmetricState, d: SphericalDirection) -> float:
    return float(quadratic_value(reduced_correlations(s), d.vector))


def stationarity_residual(s: SymmetricState, theta: float, phi: float, lam: float) -> np.ndarray:
    """Left minus right hand side of the three stationarity equations."""
    g, t, h = s.g, s.t, s.h
    cg, sg = math.cos(s.gamma), math.sin(s.gamma)
    st, ct = math.sin(theta), math.cos(theta)
    cp, sp = math.cos(phi), math.sin(phi)
    ex = 2 * h * t * cg + 2 * t * (g + t) * st * cp - 2 * h * t * cg * ct - lam * st * cp
    ey = 2 * h * t * sg - 2 * t * (g - t) * st * sp - 2 * h * t * sg * ct - lam * st * sp
    ez = ((g * g - t * t) * (1 + ct) - h * h * (1 - ct)
          - 2 * h * t * cg * st * cp - 2 * h * t * sg * st * sp - lam * ct)
    return np.array([ex, ey, ez])


def residual_norm(s: SymmetricState, d: SphericalDirection, lam: float) -> float:
    return float(np.abs(stationarity_residual(s, d.theta, d.phi, lam)).max())


def make_point(s: SymmetricState, vec, lam: float, branch: str) -> StationaryPoint:
    """Wrap a Cartesian direction as a StationaryPoint with its overlap and residual."""
    d = SphericalDirection.from_vector(vec)
    mu = float(quadratic_value(reduced_correlations(s), d.vector))
    return StationaryPoint(d, float(lam), mu, branch, residual_norm(s, d, lam))


def principal_point(s: SymmetricState) -> StationaryPoint:
    """theta = 0: overlap g^2 with multiplier 2(g^2 - t^2), present for every gamma."""
    return make_point(s, (0.0, 0.0, 1.0), 2.0 * (s.g * s.g - s.t * s.t), P)


def _lambda_zero_geometry(s: SymmetricState):
    g, t, h, gam = s.g, s.t, s.h, s.gamma
    ell_sq = max(g * g + t * t - 2 * g * t * math.cos(2 * gam), 0.0)
    diff = g * g - t * t
    den = h * h * ell_sq + diff * diff
    if den <= 1e-300 or (g == t and h * ell_sq == 0.0):
        raise ValueError("λ=0 branch undefined")
    return ell_sq, diff, den


def lambda_zero_branch(s: SymmetricState) -> StationaryPoint:
    """Stationary point with vanishing multiplier, available for every phase."""
    g, t, h, gam = s.g, s.t, s.h, s.gamma
    ell_sq, diff, den = _lambda_zero_geometry(s)
    vec = np.array([
        -2 * h * (g - t) ** 2 * (g + t) * math.cos(gam),
        2 * h * (g - t) * (g + t) ** 2 * math.sin(gam),
        h * h * ell_sq - diff * diff,
    ]) / den
    pt = make_point(s, vec, 0.0, ZERO)
    mu0 = (g * g * h * h * ell_sq + t * t * diff * diff) / den
    return StationaryPoint(pt.direction, 0.0, mu0, ZERO, pt.residual)


def lambda_zero_mu_sq(g, t, h, gamma):
    """Closed-form lambda = 0 overlap; vectorized over numpy arrays."""
    g, t, h, gamma = (np.asarray(x, dtype=float) for x in (g, t, h, gamma))
    ell_sq = g * g + t * t - 2 * g * t * np.cos(2 * gamma)
    diff = g * g - t * t
    return (g * g * h * h * ell_sq + t * t * diff * diff) / (h * h * ell_sq + diff * diff)


def nearest_product_lambda_zero(s: SymmetricState) -> ProductStatePair:
    g, t, h, gam = s.g, s.t, s.h, s.gamma
    ell_sq, diff, den = _lambda_zero_geometry(s)
    ell = math.sqrt(ell_sq)
    if ell > 0:
        eta = math.atan2((g + t) * math.sin(gam), (g - t) * math.cos(gam))
    else:
        eta = 0.0
    q = np.array([h * ell, -diff * np.exp(-1j * eta)]) / math.sqrt(den)
    q_prime = np.array([
        g * h * h * ell_sq + t * diff * diff * np.exp(2j * eta),
        np.exp(1j * eta) * h * diff * (diff * np.exp(1j * (gam + eta)) - 2 * ell * t),
    ])
    norm = np.linalg.norm(q_prime)
    if norm == 0.0:
        raise ValueError("λ=0 branch undefined")
    return ProductStatePair(q, q_prime / norm)


def contract_pair(psi: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Apply <q|<q| to qubits A and B of an 8-amplitude state."""
    tensor = np.asarray(psi).reshape(2, 2, 2)
    qc = np.conj(q)
    return np.einsum("a,b,abc->c", qc, qc, tensor)


def reconstruction_error(s: SymmetricState) -> float:
    """Max-norm of (<q|<q|)psi - mu0 q' for the lambda = 0 product state."""
    pair = nearest_product_lambda_zero(s)
    mu0 = math.sqrt(lambda_zero_branch(s).mu_sq)
    v = contract_pair(state_vector(s), pair.q)
    return float(np.abs(v - mu0 * pair.q_prime).max())
