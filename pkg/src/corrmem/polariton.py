"""Dark-state polaritons: mixing angles, closed-form DSP vectors and dark subspaces.

A dark mode ``d = sum_i v_i b_i`` commutes with the quadratic interaction iff
``h @ v = 0``, and ``[d, d^dagger] = 1`` iff ``|v| = 1``.  Every statement about
polariton operators is therefore checked at the level of mode vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from corrmem.schedule import limit_weights, omega_array
from corrmem.system import ModeBasis, ModeHamiltonian, SystemConfig, check_config


class DegenerateAngleError(ValueError):
    """Some control vanishes; the mixing angles are undefined (use dark_subspace)."""


class DegeneracyError(ValueError):
    """The dark subspace changes dimension along the path."""


class TopologyError(ValueError):
    pass


@dataclass(frozen=True)
class MixingAngles:
    theta: float
    phi: tuple[float, ...] = ()

    @property
    def m(self) -> int:
        return len(self.phi) + 1


@dataclass(frozen=True)
class DspVector:
    v: np.ndarray
    basis: ModeBasis

    def residual(self, h: ModeHamiltonian | np.ndarray) -> float:
        h = h.h if isinstance(h, ModeHamiltonian) else h
        return float(np.linalg.norm(h @ self.v))


def _line_ratios(config: SystemConfig, t: float) -> np.ndarray:
    if config.topology() != "line":
        raise TopologyError("closed-form angles need the straight-line topology")
    check_config(config)
    omegas = config.omegas(t)
    if np.any(omegas <= 0):
        zero = [e for e, w in zip(config.ensemble_ids, omegas) if w <= 0]
        raise DegenerateAngleError(f"control off for {zero} at t={t}; use dark_subspace instead")
    return config.coupling_matrix()[0] / omegas


def angles_from_ratios(x: np.ndarray) -> MixingAngles:
    """Mixing angles for spin weights ``x_s = g_s sqrt(N_s) / Omega_s``."""
    theta = math.atan2(float(np.linalg.norm(x)), 1.0)
    phi = tuple(math.atan2(float(x[k]), float(np.linalg.norm(x[:k]))) for k in range(1, len(x)))
    return MixingAngles(theta, phi)


def mixing_angles(config: SystemConfig, t: float) -> MixingAngles:
    """theta and phi_1..phi_{m-1} of the straight-line array at time ``t``.

    tan(theta) is the ratio of sqrt(sum_s g_s^2 N_s prod_{r != s} Omega_r^2) to
    prod_s Omega_s, i.e. the norm of the weights g_s sqrt(N_s)/Omega_s.
    tan(phi_{k-1}) = g_k sqrt(N_k) prod_{j<k} Omega_j / sqrt(sum_{s<k} g_s^2 N_s
    prod_{r != s} Omega_r^2) (with the product taken over r <= k), which is the
    k-th weight over the norm of the first k-1 weights.
    """
    return angles_from_ratios(_line_ratios(config, t))


def literal_last_phi(config: SystemConfig, t: float) -> float:
    """phi_{m-1} from the printed form whose numerator has g_m^2 sqrt(N_m).

    Kept only to show that this variant does not give a null vector.
    """
    x = _line_ratios(config, t)
    last = config.ensemble_ids[-1]
    scale = next(e.g for e in config.edges if e.ensemble == last)  # extra power of g_m
    return math.atan2(float(x[-1]) * scale, float(np.linalg.norm(x[:-1])))


def spin_weights(angles: MixingAngles) -> np.ndarray:
    """Unit vector of spin-wave weights (before the -sin(theta) factor)."""
    m = angles.m
    w = np.empty(m)
    for k in range(1, m + 1):
        tail = math.prod(math.cos(p) for p in angles.phi[k - 1 :])
        w[k - 1] = tail if k == 1 else math.sin(angles.phi[k - 2]) * tail
    return w


def dsp_vector_line(angles: MixingAngles, basis: ModeBasis | None = None) -> DspVector:
    """DSP coefficients: cos(theta) on the photon, -sin(theta) * spin_weights on C_s."""
    m = angles.m
    if basis is None:
        basis = ModeBasis(("a",), tuple(f"E{k + 1}" for k in range(m)))
    if len(basis.photons) != 1 or len(basis.ensembles) != m:
        raise TopologyError("basis does not match a straight-line array with m ensembles")
    v = np.zeros(len(basis))
    v[0] = math.cos(angles.theta)
    v[basis.spin_slice] = -math.sin(angles.theta) * spin_weights(angles)
    return DspVector(v.astype(complex), basis)


def cross_angles(config: SystemConfig, t: float) -> tuple[MixingAngles, MixingAngles]:
    """(theta_1, phi_1) for photon a1 over E1/E2 and (theta_2, phi_2) for a2 over E1/E3."""
    if config.topology() != "cross":
        raise TopologyError("cross-line DSPs need the cross-line topology")
    check_config(config)
    omegas = config.omegas(t)
    if np.any(omegas <= 0):
        raise DegenerateAngleError(f"some control is off at t={t}; use dark_subspace instead")
    G = config.coupling_matrix()
    x1 = np.array([G[0, 0] / omegas[0], G[0, 1] / omegas[1]])
    x2 = np.array([G[1, 0] / omegas[0], G[1, 2] / omegas[2]])
    return angles_from_ratios(x1), angles_from_ratios(x2)


def dsp_vectors_cross(config: SystemConfig, t: float) -> tuple[DspVector, DspVector]:
    """The two (generally non-orthogonal) DSP vectors d1 and d2 of the cross-line array."""
    a1, a2 = cross_angles(config, t)
    basis = ModeBasis.of(config)
    out = []
    for photon, other, (ang) in ((0, 1, a1), (1, 2, a2)):
        v = np.zeros(len(basis), dtype=complex)
        v[photon] = math.cos(ang.theta)
        v[basis.spin(0)] = -math.sin(ang.theta) * math.cos(ang.phi[0])
        v[basis.spin(other)] = -math.sin(ang.theta) * math.sin(ang.phi[0])
        out.append(DspVector(v, basis))
    return out[0], out[1]


def cross_overlap(config: SystemConfig, t: float) -> float:
    """Closed-form <d1, d2> = sin(theta_1) sin(theta_2) cos(phi_1) cos(phi_2)."""
    a1, a2 = cross_angles(config, t)
    return math.sin(a1.theta) * math.sin(a2.theta) * math.cos(a1.phi[0]) * math.cos(a2.phi[0])


def _canonical_phase(v: np.ndarray) -> np.ndarray:
    k = int(np.argmax(np.abs(v) > 1e-12 * np.abs(v).max()))
    return v * (abs(v[k]) / v[k])


def dark_subspace(h: ModeHamiltonian | np.ndarray, tol: float = 1e-10, basis: ModeBasis | None = None) -> np.ndarray:
    """Orthonormal columns spanning the null space of ``h`` (relative threshold ``tol``).

    Columns are ordered by descending photon weight; the photon-free remainder
    is ordered by basis index.  Each column's first significant entry is made
    real and positive.
    """
    if isinstance(h, ModeHamiltonian):
        basis = h.basis
        h = h.h
    n = h.shape[0]
    nphot = len(basis.photons) if basis is not None else 0
    evals, evecs = np.linalg.eigh(h)
    scale = np.abs(evals).max() if n else 0.0
    null = evecs[:, np.abs(evals) <= tol * scale] if scale > 0 else np.eye(n, dtype=complex)
    k = null.shape[1]
    if k == 0:
        return null

    cols = []
    if nphot:
        u, s, vh = np.linalg.svd(null[:nphot, :])
        r = int(np.sum(s > 1e-12))
        rotated = null @ vh.conj().T
        cols = [rotated[:, j] for j in range(r)]
        rest = rotated[:, r:]
    else:
        rest = null
    # photon-free part: Gram-Schmidt of projected unit vectors, in basis order
    if rest.shape[1]:
        proj = rest @ rest.conj().T
        picked = []
        for i in range(n):
            w = proj[:, i].copy()
            for p in picked:
                w -= p * (p.conj() @ w)
            if np.linalg.norm(w) > 1e-8:
                picked.append(w / np.linalg.norm(w))
            if len(picked) == rest.shape[1]:
                break
        cols.extend(picked)
    return np.column_stack([_canonical_phase(c) for c in cols])


def dark_frames(config: SystemConfig, times) -> np.ndarray:
    """Orthonormal dark-subspace bases at each of ``times``, shape (len(times), n, P).

    For positive controls the dark vectors are ``(s u, 0, -(s / Omega) * G^T u)``
    with ``s = max Omega``.  When every control is off and the schedules are
    ratio-locked, ``s / Omega`` is replaced by the locked ratios, which gives
    the limit of the subspace instead of the enlarged instantaneous null space.
    The basis is the symmetric (Loewdin) orthonormalisation of those vectors,
    one per photon mode.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    G = config.coupling_matrix()
    P, m = G.shape
    omegas = np.column_stack([omega_array(config.controls[e], times) for e in config.ensemble_ids])
    on = np.all(omegas > 0, axis=1)
    off = np.all(omegas == 0, axis=1)
    if not np.all(on | off):
        t = times[~(on | off)][0]
        raise DegeneracyError(f"some controls are off at t={t}; dark subspace changes dimension")
    s = omegas.max(axis=1)
    inv = np.ones_like(omegas)
    inv[on] = s[on, None] / omegas[on]
    if off.any():
        weights = limit_weights([config.controls[e] for e in config.ensemble_ids])
        if weights is None:
            raise DegeneracyError(f"all controls off at t={times[off][0]} without a ratio lock")
        inv[off] = 1.0 / weights
    B = np.zeros((len(times), P + 2 * m, P), dtype=complex)
    B[:, :P, :] = s[:, None, None] * np.eye(P)
    B[:, P + m :, :] = -(inv[:, :, None] * G.T[None])
    u, sv, vh = np.linalg.svd(B, full_matrices=False)
    if np.any(sv.min(axis=1) <= 1e-12 * sv.max(axis=1)):
        raise DegeneracyError("dark subspace loses rank along the path")
    return u @ vh


def dark_frame(config: SystemConfig, t: float) -> np.ndarray:
    """Orthonormal dark-subspace basis at a single time (see :func:`dark_frames`)."""
    return dark_frames(config, [t])[0]
