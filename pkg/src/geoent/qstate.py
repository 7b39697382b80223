"""Symmetric three-qubit states and their parameterizations.

The family handled here is

    |psi> = g|000> + t(|011> + |101> + |110>) + exp(i*gamma) h |111>

with real non-negative ``g, t, h`` and ``g**2 + 3 t**2 + h**2 = 1``.
State vectors are plain complex numpy arrays of length 8 indexed by the
binary label ``abc`` (qubit A is the most significant bit).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

NORM_TOL = 1e-12
RESCALE_TOL = 1e-9

_HALF_PI = 0.5 * math.pi


class DegenerateStateError(ValueError):
    """Raised when a parameter set cannot be normalized."""


def reduce_gamma(gamma: float) -> float:
    """Map a phase onto [-pi/2, pi/2] using the period pi of the family.

    Shifting gamma by pi flips the sign of the |111> amplitude, which is
    undone by the local unitary Z x Z x Z.
    """
    gamma = float(gamma)
    if not math.isfinite(gamma):
        raise ValueError(f"gamma must be finite, got {gamma!r}")
    if abs(gamma) <= _HALF_PI + 1e-15:
        return max(-_HALF_PI, min(_HALF_PI, gamma))
    reduced = math.remainder(gamma, math.pi)
    # remainder() returns values in [-pi/2, pi/2]; keep +pi/2 rather than -pi/2
    if math.isclose(reduced, -_HALF_PI, abs_tol=1e-15) and gamma > 0:
        reduced = _HALF_PI
    return reduced


@dataclass(frozen=True)
class SymmetricState:
    g: float
    t: float
    h: float
    gamma: float = 0.0

    def __post_init__(self):
        for name in ("g", "t", "h"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be a finite non-negative number, got {value!r}")
        if abs(self.gamma) > _HALF_PI + 1e-15:
            raise ValueError(f"gamma must lie in [-pi/2, pi/2], got {self.gamma!r}")
        if abs(self.norm_sq - 1.0) > RESCALE_TOL:
            raise ValueError("amplitudes are not normalized; use from_params to rescale")

    @property
    def norm_sq(self) -> float:
        return self.g * self.g + 3.0 * self.t * self.t + self.h * self.h

    @property
    def amplitudes(self) -> tuple[float, float, float]:
        return self.g, self.t, self.h

    def with_gamma(self, gamma: float) -> "SymmetricState":
        return SymmetricState(self.g, self.t, self.h, reduce_gamma(gamma))

    def to_json(self) -> str:
        return state_to_json(self)


@dataclass(frozen=True)
class UVPoint:
    u: float
    v: float

    def __post_init__(self):
        for name in ("u", "v"):
            value = getattr(self, name)
            if not (-1e-15 <= value <= _HALF_PI + 1e-15):
                raise ValueError(f"{name} must lie in [0, pi/2], got {value!r}")


def from_params(g: float, t: float, h: float, gamma: float = 0.0) -> SymmetricState:
    """Build a state, rescaling the amplitudes if they are not normalized.

    Deviations of ``g**2 + 3t**2 + h**2`` from one below 1e-9 are kept
    as given; larger ones are divided out. An all-zero input raises
    :class:`DegenerateStateError`.
    """
    g, t, h = float(g), float(t), float(h)
    if min(g, t, h) < 0:
        raise ValueError("amplitudes g, t, h must be non-negative")
    gamma = reduce_gamma(gamma)
    n2 = g * g + 3.0 * t * t + h * h
    if n2 == 0.0 or not math.isfinite(n2):
        raise DegenerateStateError("degenerate state")
    if abs(n2 - 1.0) > RESCALE_TOL:
        scale = 1.0 / math.sqrt(n2)
        g, t, h = g * scale, t * scale, h * scale
    return SymmetricState(g, t, h, gamma)


def from_uv(p: UVPoint | tuple[float, float], gamma: float = 0.0) -> SymmetricState:
    if not isinstance(p, UVPoint):
        p = UVPoint(*p)
    su = math.sin(p.u)
    g = su * math.cos(p.v)
    t = su * math.sin(p.v) / math.sqrt(3.0)
    h = math.cos(p.u)
    # clip tiny negative values from cos(pi/2)
    return SymmetricState(max(g, 0.0), max(t, 0.0), max(h, 0.0), reduce_gamma(gamma))


def to_uv(s: SymmetricState) -> UVPoint:
    # same angle as arccos(h), but well conditioned near h = 1
    u = math.atan2(math.hypot(s.g, math.sqrt(3.0) * s.t), s.h)
    v = math.atan2(math.sqrt(3.0) * s.t, s.g)
    return UVPoint(u, v)


def uv_to_amplitudes(u, v):
    """Vectorized chart: arrays of (u, v) to arrays of (g, t, h)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    su = np.sin(u)
    g = np.maximum(su * np.cos(v), 0.0)
    t = np.maximum(su * np.sin(v) / np.sqrt(3.0), 0.0)
    h = np.maximum(np.cos(u), 0.0)
    return g, t, h


def state_vector(s: SymmetricState) -> np.ndarray:
    psi = np.zeros(8, dtype=complex)
    psi[0b000] = s.g
    psi[0b011] = s.t
    psi[0b101] = s.t
    psi[0b110] = s.t
    psi[0b111] = np.exp(1j * s.gamma) * s.h
    return psi


def general_state(amplitudes) -> np.ndarray:
    """Validate and return an arbitrary normalized 8-amplitude state."""
    psi = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if psi.shape != (8,):
        raise ValueError(f"expected 8 amplitudes, got shape {psi.shape}")
    n2 = float(np.vdot(psi, psi).real)
    if n2 == 0.0:
        raise DegenerateStateError("degenerate state")
    if abs(n2 - 1.0) > NORM_TOL:
        raise ValueError(f"state is not normalized (norm^2 = {n2!r})")
    return psi


def _normalized(psi: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(psi)
    if n == 0.0:
        raise DegenerateStateError("degenerate state")
    return psi / n


def named_state(name: str, **params) -> np.ndarray:
    """Reference states as 8-amplitude vectors.

    Supported names: ``"GHZ"`` (``alpha``, optional ``beta``), ``"W"``,
    ``"PsiW"`` and ``"PartialSym"`` (``g, t, t3, h, gamma``).
    """
    key = name.lower()
    psi = np.zeros(8, dtype=complex)
    if key == "ghz":
        alpha = complex(params.get("alpha", 1 / math.sqrt(2)))
        if "beta" in params:
            beta = complex(params["beta"])
        else:
            beta = math.sqrt(max(0.0, 1.0 - abs(alpha) ** 2))
        psi[0b000], psi[0b111] = alpha, beta
    elif key == "w":
        psi[[0b011, 0b101, 0b110]] = 1.0
    elif key == "psiw":
        psi[0b000] = 2.0 / 3.0
        psi[[0b011, 0b101, 0b110]] = 1.0 / 3.0
        psi[0b111] = 1j * math.sqrt(2.0) / 3.0
    elif key in ("partialsym", "partial"):
        g = float(params["g"])
        t = float(params["t"])
        t3 = float(params["t3"])
        h = float(params["h"])
        gamma = float(params.get("gamma", 0.0))
        psi[0b000] = g
        psi[0b011] = t
        psi[0b101] = t
        psi[0b110] = t3
        psi[0b111] = np.exp(1j * gamma) * h
    else:
        raise ValueError(f"unknown reference state {name!r}")
    return _normalized(psi)


def psi_w_uv() -> UVPoint:
    """Chart coordinates of the triple point shared by three gamma = pi/2 domains."""
    return UVPoint(math.acos(math.sqrt(2.0) / 3.0), math.atan(math.sqrt(3.0) / 2.0))


def fmt17(x: float) -> str:
    return format(float(x), ".17g")


def state_to_json(s: SymmetricState) -> str:
    fields = ", ".join(f'"{k}": {fmt17(getattr(s, k))}' for k in ("g", "t", "h", "gamma"))
    return "{" + fields + "}"


def state_from_json(text: str | dict) -> SymmetricState:
    data = json.loads(text) if isinstance(text, str) else text
    return from_params(data["g"], data["t"], data["h"], data.get("gamma", 0.0))
