"""Mode-space time evolution under the time-dependent quadratic Hamiltonian.

Coherent amplitudes evolve as ``alpha(T) = M alpha(0)`` with
``M = prod_k exp(-i h(t_k + dt/2) dt)`` (later factors on the left).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from corrmem.polariton import DegeneracyError, dark_frame, dark_frames
from corrmem.schedule import omega_array
from corrmem.system import SystemConfig, check_config

DEFAULT_STEPS = 2000
CHUNK = 20000


@dataclass(frozen=True)
class ModeUnitary:
    M: np.ndarray
    T: float
    steps: int

    def unitarity_error(self) -> float:
        n = self.M.shape[0]
        return float(np.abs(self.M.conj().T @ self.M - np.eye(n)).max())

    def __matmul__(self, other):
        return self.M @ other


def _config_for(config: SystemConfig, T: float) -> SystemConfig:
    check_config(config)
    if not T > 0:
        raise ValueError(f"duration must be positive, got {T}")
    return config if config.duration == T else config.retimed(T)


def _step_exponentials(config: SystemConfig, times: np.ndarray, dt: float) -> np.ndarray:
    G = config.coupling_matrix()
    P, m = G.shape
    omegas = np.column_stack([omega_array(config.controls[e], times) for e in config.ensemble_ids])
    hs = np.zeros((len(times), P + 2 * m, P + 2 * m))
    hs[:, :P, P : P + m] = G
    hs[:, np.arange(P, P + m), np.arange(P + m, P + 2 * m)] = omegas
    hs += hs.transpose(0, 2, 1)
    evals, evecs = np.linalg.eigh(hs)
    phases = np.exp(-1j * evals * dt)
    return (evecs * phases[:, None, :]) @ evecs.conj().transpose(0, 2, 1)


def step_unitaries(config: SystemConfig, T: float, steps: int) -> Iterator[np.ndarray]:
    """Yield stacks of single-step propagators in time order (chunked)."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    cfg = _config_for(config, T)
    dt = T / steps
    for start in range(0, steps, CHUNK):
        k = np.arange(start, min(start + CHUNK, steps))
        yield _step_exponentials(cfg, (k + 0.5) * dt, dt)


def _ordered_product(us: np.ndarray) -> np.ndarray:
    """us[n-1] @ ... @ us[0] by pairwise reduction."""
    while len(us) > 1:
        odd = us[-1:] if len(us) % 2 else None
        paired = us[1 : len(us) - (len(us) % 2) : 2] @ us[0 : len(us) - (len(us) % 2) : 2]
        us = paired if odd is None else np.concatenate([paired, odd])
    return us[0]


def propagate(config: SystemConfig, T: float, steps: int = DEFAULT_STEPS) -> ModeUnitary:
    """Midpoint exponential product over ``steps`` equal intervals of ``[0, T]``."""
    n = len(config.photons) + 2 * len(config.ensembles)
    M = np.eye(n, dtype=complex)
    for chunk in step_unitaries(config, T, steps):
        M = _ordered_product(chunk) @ M
    return ModeUnitary(M, T, steps)


def propagate_trace(config: SystemConfig, T: float, steps: int, alpha0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Amplitude vectors at t = 0 and after every step: shapes (steps+1,), (steps+1, n)."""
    alpha = np.asarray(alpha0, dtype=complex)
    out = [alpha]
    for chunk in step_unitaries(config, T, steps):
        for u in chunk:
            alpha = u @ alpha
            out.append(alpha)
    return np.linspace(0.0, T, steps + 1), np.array(out)


def transport_dark_path(config: SystemConfig, times: np.ndarray, v0: np.ndarray, keep: bool = True) -> np.ndarray:
    """Carry ``v0`` through the dark subspaces along ``times`` (discrete parallel transport).

    Each step projects onto the next dark subspace and renormalises, which keeps
    the vector phase-aligned with its predecessor.  With ``keep`` the whole path
    (one row per time) is returned, otherwise only the final vector.
    """
    v = np.asarray(v0, dtype=complex)
    times = np.asarray(times, dtype=float)
    path = []
    for start in range(0, len(times), CHUNK):
        frames = dark_frames(config, times[start : start + CHUNK])
        for t, W in zip(times[start:], frames):
            v = W @ (W.conj().T @ v)
            nv = np.linalg.norm(v)
            if nv < 1e-6:
                raise DegeneracyError(f"tracked dark vector lost at t={t}")
            v = v / nv
            if keep:
                path.append(v)
    return np.array(path) if keep else v


def transport_dark(config: SystemConfig, times: np.ndarray, v0: np.ndarray) -> np.ndarray:
    return transport_dark_path(config, times, v0, keep=False)


def initial_dark_vector(config: SystemConfig, photon: int = 0) -> np.ndarray:
    """Dark vector at t=0 with the largest weight on photon mode ``photon``."""
    W = dark_frame(config, 0.0)
    v = W @ W[photon].conj()
    return v / np.linalg.norm(v)


def dark_following_infidelity(
    config: SystemConfig,
    T: float,
    steps: int = DEFAULT_STEPS,
    initial: np.ndarray | None = None,
    unitary: ModeUnitary | None = None,
) -> float:
    """1 - |<v(T), M v(0)>|^2 for the continuously tracked dark vector v(t)."""
    cfg = _config_for(config, T)
    v0 = initial_dark_vector(cfg) if initial is None else np.asarray(initial, dtype=complex)
    times = np.linspace(0.0, T, steps + 1)
    vT = transport_dark(cfg, times, v0)
    M = unitary if unitary is not None else propagate(cfg, T, steps)
    amp = np.vdot(vT, M.M @ v0)
    return float(max(0.0, 1.0 - abs(amp) ** 2))
