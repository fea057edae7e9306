"""Brute-force truncated Fock-space oracle.

Builds the interaction operator, dark states and coherent/cat states directly
in a multi-mode number basis (per-mode cutoff ``n_max``), independently of the
mode-level machinery it is used to check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from corrmem.schedule import omega
from corrmem.system import SystemConfig, check_config

MAX_DIM = 200_000


class TruncationError(ValueError):
    """The requested object does not fit below the Fock cutoff."""


@dataclass(frozen=True)
class FockSpace:
    modes: int
    n_max: int

    def __post_init__(self):
        if self.dim > MAX_DIM:
            raise TruncationError(f"Fock dimension {self.dim} exceeds the guard {MAX_DIM}")

    @property
    def dim(self) -> int:
        return (self.n_max + 1) ** self.modes

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n_max + 1,) * self.modes

    @cached_property
    def occupations(self) -> np.ndarray:
        """(dim, modes) table of occupation numbers, first mode most significant."""
        return np.array(np.unravel_index(np.arange(self.dim), self.shape)).T

    def index(self, occ) -> int:
        return int(np.ravel_multi_index(tuple(occ), self.shape))

    def basis_state(self, occ) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index(occ)] = 1.0
        return v

    def vacuum(self) -> np.ndarray:
        return self.basis_state([0] * self.modes)

    def annihilator(self, mode: int) -> sp.csr_matrix:
        a = sp.diags(np.sqrt(np.arange(1, self.n_max + 1)), 1, format="csr")
        ops = [sp.identity(self.n_max + 1, format="csr")] * self.modes
        ops[mode] = a
        out = ops[0]
        for op in ops[1:]:
            out = sp.kron(out, op, format="csr")
        return out.astype(complex)

    def creator(self, mode: int) -> sp.csr_matrix:
        return self.annihilator(mode).conj().T.tocsr()

    def below(self, margin: int) -> np.ndarray:
        """Indices of basis states with every occupation <= n_max - margin."""
        return np.flatnonzero(np.all(self.occupations <= self.n_max - margin, axis=1))


def _mode_index(config: SystemConfig):
    P = len(config.photons)
    m = len(config.ensembles)
    photon = {p: k for k, p in enumerate(config.photons)}
    optical = {e.id: P + k for k, e in enumerate(config.ensembles)}
    spin = {e.id: P + m + k for k, e in enumerate(config.ensembles)}
    return photon, optical, spin


def interaction_parts(config: SystemConfig, space: FockSpace):
    """Static probe part and per-ensemble control parts of the interaction.

    ``V(t) = V_probe + sum_s Omega_s(t) K_s``, every piece Hermitian.
    """
    check_config(config)
    photon, optical, spin = _mode_index(config)
    if space.modes != len(photon) + 2 * len(optical):
        raise TruncationError("Fock space mode count does not match the configuration")
    atoms = {e.id: e.N for e in config.ensembles}
    probe = sp.csr_matrix((space.dim, space.dim), dtype=complex)
    for edge in config.edges:
        coupling = edge.g * math.sqrt(atoms[edge.ensemble])
        probe = probe + coupling * (space.creator(optical[edge.ensemble]) @ space.annihilator(photon[edge.photon]))
    controls = []
    for ens in config.ensembles:
        K = space.creator(optical[ens.id]) @ space.annihilator(spin[ens.id])
        controls.append((K + K.conj().T).tocsr())
    return (probe + probe.conj().T).tocsr(), controls


def build_V(config: SystemConfig, t: float, space: FockSpace) -> sp.csr_matrix:
    """sum_edges g sqrt(N) a_p A_s^dag + sum_s Omega_s(t) A_s^dag C_s + h.c."""
    probe, controls = interaction_parts(config, space)
    V = probe
    for ens, K in zip(config.ensembles, controls):
        V = V + omega(config.controls[ens.id], t) * K
    return V.tocsr()


def creation_combination(space: FockSpace, v: np.ndarray) -> sp.csr_matrix:
    """d^dagger for the mode d = sum_i v_i b_i."""
    out = sp.csr_matrix((space.dim, space.dim), dtype=complex)
    for k, c in enumerate(np.asarray(v)):
        if c != 0:
            out = out + np.conj(c) * space.creator(k)
    return out.tocsr()


def commutator_below_cutoff(V: sp.spmatrix, op: sp.spmatrix, space: FockSpace, margin: int = 2) -> float:
    """Largest column norm of [V, op] over states far enough from the cutoff."""
    comm = (V @ op - op @ V).tocsc()
    cols = comm[:, space.below(margin)]
    if cols.nnz == 0:
        return 0.0
    return float(np.sqrt(np.asarray(cols.multiply(cols.conj()).sum(axis=0)).real.max()))


def dark_state(space: FockSpace, v, n: int) -> np.ndarray:
    """(d^dag)^n |0> / sqrt(n!) for the dark mode with coefficients ``v``."""
    v = np.asarray(getattr(v, "v", v))
    if n > space.n_max and np.count_nonzero(np.abs(v) > 0):
        raise TruncationError(f"n={n} exceeds the per-mode cutoff {space.n_max}")
    dag = creation_combination(space, v)
    psi = space.vacuum()
    for _ in range(n):
        psi = dag @ psi
    return psi / math.sqrt(math.factorial(n))


def dn_closed_form(space: FockSpace, theta: float, phi: float, n: int) -> np.ndarray:
    """Multinomial expansion of |D_n> for two ensembles, modes ordered (a, A1, A2, C1, C2).

    Coefficient of |k>_photon |l>_C1 |j>_C2 with k + l + j = n is
    sqrt(n!/(k! l! j!)) cos^k(theta) (-sin theta)^(n-k) sin^j(phi) cos^l(phi).
    """
    if space.modes != 5:
        raise TruncationError("closed form is for the two-ensemble line (5 modes)")
    if n > space.n_max:
        raise TruncationError(f"n={n} exceeds the per-mode cutoff {space.n_max}")
    psi = np.zeros(space.dim, dtype=complex)
    for k in range(n + 1):
        for j in range(n - k + 1):
            l = n - k - j
            coeff = math.sqrt(math.factorial(n) / (math.factorial(k) * math.factorial(l) * math.factorial(j)))
            coeff *= math.cos(theta) ** k * (-math.sin(theta)) ** (n - k) * math.sin(phi) ** j * math.cos(phi) ** l
            psi[space.index([k, 0, 0, l, j])] += coeff
    return psi


def check_Dn_expansion(space: FockSpace, angles, n: int) -> float:
    """Max coefficient difference between the operator power and the closed form."""
    from corrmem.polariton import dsp_vector_line

    theta, phi = angles.theta, angles.phi[0]
    lhs = dark_state(space, dsp_vector_line(angles).v, n)
    rhs = dn_closed_form(space, theta, phi, n)
    return float(np.abs(lhs - rhs).max())


def coherent_state(space: FockSpace, alphas) -> np.ndarray:
    alphas = np.asarray(alphas, dtype=complex)
    if alphas.shape != (space.modes,):
        raise TruncationError("one amplitude per mode expected")
    ns = np.arange(space.n_max + 1)
    logfact = np.array([math.lgamma(k + 1) for k in ns])
    psi = np.ones(1, dtype=complex)
    for a in alphas:
        local = np.exp(-0.5 * abs(a) ** 2 - 0.5 * logfact) * np.power(a, ns)
        psi = np.kron(psi, local)
    return psi


def cat_state(space: FockSpace, state) -> np.ndarray:
    """Normalised truncated-Fock image of a :class:`~corrmem.catstate.CatState`."""
    psi = sum(b.weight * coherent_state(space, b.alphas) for b in state.branches)
    return psi / np.linalg.norm(psi)


def schrodinger_evolve(config: SystemConfig, T: float, steps: int, space: FockSpace, initial: np.ndarray) -> np.ndarray:
    """Midpoint exponential stepping of the full state on the truncated space."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    cfg = config if config.duration == T else config.retimed(T)
    dt = T / steps
    probe, controls = interaction_parts(cfg, space)
    psi = np.asarray(initial, dtype=complex)
    for k in range(steps):
        t = (k + 0.5) * dt
        V = probe
        for ens, K in zip(cfg.ensembles, controls):
            V = V + omega(cfg.controls[ens.id], t) * K
        if V.nnz and abs(V).max() > 0:
            psi = expm_multiply(-1j * dt * V, psi)
    return psi


def fock_partial_trace_entropy(psi: np.ndarray, keep, space: FockSpace) -> float:
    """Entanglement entropy (natural log) of the modes ``keep`` in a pure state."""
    keep = sorted(set(keep))
    rest = [k for k in range(space.modes) if k not in keep]
    tensor = np.asarray(psi).reshape(space.shape).transpose(keep + rest)
    mat = tensor.reshape((space.n_max + 1) ** len(keep), -1)
    s = np.linalg.svd(mat, compute_uv=False) ** 2
    s = s / s.sum()
    s = s[s > 1e-300]
    return float(-np.sum(s * np.log(s)))


def overlap_fidelity(psi: np.ndarray, phi: np.ndarray) -> float:
    return float(abs(np.vdot(psi, phi)) ** 2 / (np.vdot(psi, psi).real * np.vdot(phi, phi).real))
