"""Brute-force maximal overlap for arbitrary three-qubit states.

Two independent routes are provided. ``alternating_maximize`` works on the
raw 8-amplitude tensor and needs no symmetry at all; each step replaces one
factor by the normalized contraction of the state with the other two, which
is the exact single-factor maximizer, so the overlap never decreases.
``grid_maximize_symmetric`` scans the Bloch sphere for the exchange-symmetric
family and refines the best cells.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .qstate import SymmetricState, general_state, state_vector
from .stationarity import reduced_correlations, quadratic_value

_PAULI = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)

MAX_SWEEPS = 5000


@dataclass(frozen=True)
class ProductTriple:
    q1: np.ndarray
    q2: np.ndarray
    q3: np.ndarray

    def __post_init__(self):
        for name in ("q1", "q2", "q3"):
            q = np.asarray(getattr(self, name), dtype=complex)
            if q.shape != (2,) or abs(np.vdot(q, q).real - 1.0) > 1e-12:
                raise ValueError(f"{name} must be a normalized single-qubit state")
            object.__setattr__(self, name, q)

    def bloch_vectors(self) -> np.ndarray:
        return np.array([bloch_vector(q) for q in (self.q1, self.q2, self.q3)])


@dataclass(frozen=True)
class OracleResult:
    p_max: float
    triple: ProductTriple
    iterations: int
    restarts_used: int

    @property
    def geometric_measure(self) -> float:
        return 1.0 - self.p_max


def bloch_vector(q) -> np.ndarray:
    q = np.asarray(q, dtype=complex)
    return np.real(np.einsum("a,iab,b->i", q.conj(), _PAULI, q))


def qubit_from_bloch(s) -> np.ndarray:
    """Unit spinor with Bloch vector ``s`` (phase fixed by a real first amplitude)."""
    x, y, z = np.asarray(s, dtype=float) / np.linalg.norm(s)
    theta = math.acos(min(1.0, max(-1.0, z)))
    phi = math.atan2(y, x) if math.hypot(x, y) > 0 else 0.0
    return np.array([math.cos(theta / 2), np.exp(1j * phi) * math.sin(theta / 2)])


def _as_psi(psi) -> np.ndarray:
    if isinstance(psi, SymmetricState):
        return state_vector(psi)
    return general_state(psi)


def overlap(triple: ProductTriple, psi) -> float:
    """|<q1 q2 q3|psi>|^2."""
    tensor = _as_psi(psi).reshape(2, 2, 2)
    amp = np.einsum("a,b,c,abc->", triple.q1.conj(), triple.q2.conj(), triple.q3.conj(), tensor)
    return float(abs(amp) ** 2)


def random_qubits(rng: np.random.Generator, shape) -> np.ndarray:
    """Spinors uniform on the Bloch sphere (area measure)."""
    cos_t = rng.uniform(-1.0, 1.0, size=shape)
    phi = rng.uniform(0.0, 2 * math.pi, size=shape)
    half = np.arccos(cos_t) / 2
    return np.stack([np.cos(half) + 0j, np.exp(1j * phi) * np.sin(half)], axis=-1)


_CONTRACT = ("nrb,nrc,nabc->nra", "nra,nrc,nabc->nrb", "nra,nrb,nabc->nrc")


def alternating_batch(psis, restarts: int = 50, tol: float = 1e-12, seed: int = 42,
                      max_sweeps: int = MAX_SWEEPS):
    """Alternating maximization for N states at once.

    Returns ``(p_max, factors, sweeps)`` where ``factors`` has shape (N, 3, 2)
    and ``sweeps`` counts full update cycles of the winning restart.
    """
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be positive")
    psis = np.asarray(psis, dtype=complex).reshape(-1, 8)
    n = psis.shape[0]
    tensors = psis.reshape(n, 2, 2, 2)
    rng = np.random.default_rng(seed)
    q = [random_qubits(rng, (n, restarts)) for _ in range(3)]
    value = np.zeros((n, restarts))
    sweeps = np.zeros((n, restarts), dtype=int)
    active = np.ones((n, restarts), dtype=bool)
    for _ in range(max_sweeps):
        if not active.any():
            break
        idx = np.nonzero(active.any(axis=1))[0]
        sub = tensors[idx]
        new_val = None
        for k in range(3):
            others = [q[j][idx].conj() for j in range(3) if j != k]
            v = np.einsum(_CONTRACT[k], others[0], others[1], sub)
            norm = np.linalg.norm(v, axis=-1)
            dead = norm < 1e-150
            if dead.any():
                # the other two factors annihilate psi; start this factor afresh
                v[dead] = random_qubits(rng, int(dead.sum()))
                norm[dead] = 1.0
            upd = active[idx]
            qk = q[k][idx]
            qk[upd] = v[upd] / norm[upd][:, None]
            q[k][idx] = qk
            new_val = np.where(dead, 0.0, norm * norm)
        gain = new_val - value[idx]
        act = active[idx]
        value[idx] = np.where(act, new_val, value[idx])
        sweeps[idx] += act
        active[idx] = act & (np.abs(gain) >= tol)
    best = np.argmax(value, axis=1)
    rows = np.arange(n)
    factors = np.stack([q[k][rows, best] for k in range(3)], axis=1)
    tensors_c = np.einsum("na,nb,nc,nabc->n", factors[:, 0].conj(), factors[:, 1].conj(),
                          factors[:, 2].conj(), tensors)
    return np.abs(tensors_c) ** 2, factors, sweeps[rows, best]


def alternating_maximize(psi, restarts: int = 50, tol: float = 1e-12, seed: int = 42) -> OracleResult:
    """Best overlap over ``restarts`` random product starts."""
    vec = _as_psi(psi)
    p, factors, sweeps = alternating_batch(vec[None, :], restarts, tol, seed)
    f = factors[0]
    triple = ProductTriple(*(q / np.linalg.norm(q) for q in f))
    return OracleResult(overlap(triple, vec), triple, int(sweeps[0]), restarts)


# ---------------------------------------------------------------- symmetric grid

@lru_cache(maxsize=4)
def _sphere_grid(resolution: int) -> np.ndarray:
    theta = (np.arange(resolution) + 0.5) * math.pi / resolution
    phi = np.arange(resolution) * 2 * math.pi / resolution
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    vec = np.stack([np.sin(tt) * np.cos(pp), np.sin(tt) * np.sin(pp), np.cos(tt)], axis=-1)
    vec = vec.reshape(-1, 3)
    vec.flags.writeable = False
    return vec


def _ascend(r, G, s0, steps: int = 200, tol: float = 1e-12):
    """Projected Newton ascent of r.s + s^T G s / 2 on the unit sphere from s0."""
    s = s0 / np.linalg.norm(s0)
    f = lambda x: 2 * r @ x + x @ G @ x
    val = f(s)
    for _ in range(steps):
        grad = 2 * r + 2 * G @ s
        lam = 0.5 * grad @ s
        # tangent-space Newton step on r + G s = lam s
        basis = np.linalg.svd(np.eye(3) - np.outer(s, s))[0][:, :2]
        hess = basis.T @ (G - lam * np.eye(3)) @ basis
        g_t = basis.T @ (r + G @ s - lam * s)
        w, vecs = np.linalg.eigh(hess)
        # keep the step an ascent step: flip positive curvature
        shift = np.maximum(-w, 1e-3 * (1 + np.abs(w).max()))
        step = -(vecs @ ((vecs.T @ g_t) / -shift))
        trial = s + basis @ step
        trial /= np.linalg.norm(trial)
        tv = f(trial)
        if tv < val:
            # fall back to a plain projected gradient step
            trial = s + 0.1 * (grad - (grad @ s) * s)
            trial /= np.linalg.norm(trial)
            tv = f(trial)
            if tv < val:
                break
        gain = tv - val
        s, val = trial, tv
        if gain < tol:
            break
    return s


def grid_maximize_symmetric(s: SymmetricState, resolution: int = 512, refine: int = 8) -> OracleResult:
    """Maximize (1 + 2 r.s + s^T G s)/4 on a Bloch-sphere grid and refine."""
    if resolution < 64:
        raise ValueError("resolution must be >= 64")
    corr = reduced_correlations(s)
    flat = _sphere_grid(resolution)
    values = 2 * (flat @ corr.r) + np.einsum("ij,ij->i", flat @ corr.G, flat)
    order = np.argpartition(values, -refine)[-refine:]
    # the north pole is not a cell centre but is always a candidate
    candidates = [flat[i] for i in order] + [np.array([0.0, 0.0, 1.0])]
    best_s, best_v = None, -math.inf
    for c in candidates:
        sv = _ascend(corr.r, corr.G, c)
        val = float(quadratic_value(corr, sv))
        if val > best_v:
            best_s, best_v = sv, val
    psi = state_vector(s)
    q = qubit_from_bloch(best_s)
    v = np.einsum("a,b,abc->c", q.conj(), q.conj(), psi.reshape(2, 2, 2))
    q3 = v / np.linalg.norm(v)
    triple = ProductTriple(q, q, q3)
    return OracleResult(overlap(triple, psi), triple, 0, 1)


# ------------------------------------------------------------ two-body reductions

def correlations_from_vector(psi):
    """Bloch data of rho_AB = Tr_C |psi><psi|.

    Returns ``(r1, r2, G)`` with r1_i = Tr(rho sigma_i x 1),
    r2_i = Tr(rho 1 x sigma_i) and G_ij = Tr(rho sigma_i x sigma_j), so that
    max_q3 |<q1 q2 q3|psi>|^2 = (1 + r1.s1 + r2.s2 + s1^T G s2)/4.
    """
    t = _as_psi(psi).reshape(2, 2, 2)
    rho = np.einsum("abc,dec->abde", t, t.conj())
    r1 = np.real(np.einsum("ida,abdb->i", _PAULI, rho))
    r2 = np.real(np.einsum("ieb,abae->i", _PAULI, rho))
    G = np.real(np.einsum("ida,jeb,abde->ij", _PAULI, _PAULI, rho))
    return r1, r2, G


def pair_value(r1, r2, G, s1, s2) -> float:
    return 0.25 * (1 + r1 @ s1 + r2 @ s2 + s1 @ G @ s2)


def polish_pair(r1, r2, G, s1, s2, max_iter: int = 50, tol: float = 1e-14):
    """Newton on the two-direction stationarity system.

    Unknowns (s1, s2, l1, l2) with r1 + G s2 = l1 s1, r2 + G^T s1 = l2 s2
    and unit norms. Returns ``(s1, s2, l1, l2, residual)``; the input is
    returned unchanged when Newton does not improve the residual.
    """
    s1 = np.asarray(s1, float) / np.linalg.norm(s1)
    s2 = np.asarray(s2, float) / np.linalg.norm(s2)
    x = np.concatenate([s1, s2, [s1 @ (r1 + G @ s2), s2 @ (r2 + G.T @ s1)]])

    def resid(x):
        a, b, l1, l2 = x[:3], x[3:6], x[6], x[7]
        return np.concatenate([r1 + G @ b - l1 * a, r2 + G.T @ a - l2 * b,
                               [0.5 * (a @ a - 1), 0.5 * (b @ b - 1)]])

    best = x.copy()
    best_res = np.abs(resid(x)).max()
    for _ in range(max_iter):
        F = resid(x)
        if np.abs(F).max() < tol:
            break
        a, b, l1, l2 = x[:3], x[3:6], x[6], x[7]
        J = np.zeros((8, 8))
        J[:3, :3] = -l1 * np.eye(3)
        J[:3, 3:6] = G
        J[:3, 6] = -a
        J[3:6, :3] = G.T
        J[3:6, 3:6] = -l2 * np.eye(3)
        J[3:6, 7] = -b
        J[6, :3] = a
        J[7, 3:6] = b
        step = np.linalg.lstsq(J, -F, rcond=None)[0]
        x = x + step
        res = np.abs(resid(x)).max()
        if res < best_res:
            best, best_res = x.copy(), res
    a, b = best[:3] / np.linalg.norm(best[:3]), best[3:6] / np.linalg.norm(best[3:6])
    return a, b, float(best[6]), float(best[7]), float(best_res)
