"""Physical configuration of an ensemble array and its quadratic mode Hamiltonian.

The interaction is treated in the low-excitation (bosonized) regime, where the
collective raising operator of ensemble ``s`` acts as ``A_s^dagger C_s``.  The
Hamiltonian is then a Hermitian matrix ``h`` over the mode basis
``(photons..., A_1..A_m, C_1..C_m)`` with ``V = sum_ij h_ij b_i^dagger b_j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

import numpy as np

from corrmem.schedule import ControlSchedule, omega


class ConfigError(ValueError):
    """Raised when a configuration violates one of its invariants."""


@dataclass(frozen=True)
class EnsembleSpec:
    id: str
    N: float = 1.0
    g: float = 1.0


@dataclass(frozen=True)
class CouplingEdge:
    photon: str
    ensemble: str
    g: float


@dataclass(frozen=True)
class SystemConfig:
    ensembles: tuple[EnsembleSpec, ...]
    photons: tuple[str, ...]
    edges: tuple[CouplingEdge, ...]
    controls: Mapping[str, ControlSchedule] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "ensembles", tuple(self.ensembles))
        object.__setattr__(self, "photons", tuple(self.photons))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "controls", dict(self.controls))

    @property
    def ensemble_ids(self) -> list[str]:
        return [e.id for e in self.ensembles]

    @property
    def duration(self) -> float:
        """Common duration of the control schedules."""
        durations = {s.T for s in self.controls.values()}
        if len(durations) != 1:
            raise ConfigError(f"control schedules disagree on duration: {sorted(durations)}")
        return durations.pop()

    def retimed(self, T: float) -> "SystemConfig":
        """Copy with every control schedule stretched to duration ``T``."""
        controls = {k: s.retimed(T) for k, s in self.controls.items()}
        return replace(self, controls=controls)

    def with_controls(self, controls: Mapping[str, ControlSchedule]) -> "SystemConfig":
        return replace(self, controls=dict(controls))

    def coupling_matrix(self) -> np.ndarray:
        """Photon x ensemble matrix of collective couplings g*sqrt(N)."""
        index = {e.id: k for k, e in enumerate(self.ensembles)}
        pindex = {p: k for k, p in enumerate(self.photons)}
        G = np.zeros((len(self.photons), len(self.ensembles)))
        for edge in self.edges:
            ens = self.ensembles[index[edge.ensemble]]
            G[pindex[edge.photon], index[edge.ensemble]] = edge.g * math.sqrt(ens.N)
        return G

    def omegas(self, t: float) -> np.ndarray:
        return np.array([omega(self.controls[e.id], t) for e in self.ensembles])

    def topology(self) -> str:
        """Classify the coupling graph: ``"line"``, ``"cross"`` or ``"general"``."""
        G = self.coupling_matrix() != 0
        if G.shape[0] == 1 and G.all():
            return "line"
        if G.shape == (2, 3) and (G == np.array([[1, 1, 0], [1, 0, 1]], bool)).all():
            return "cross"
        return "general"


@dataclass(frozen=True)
class ModeBasis:
    photons: tuple[str, ...]
    ensembles: tuple[str, ...]

    @classmethod
    def of(cls, config: SystemConfig) -> "ModeBasis":
        return cls(tuple(config.photons), tuple(config.ensemble_ids))

    @property
    def labels(self) -> list[str]:
        return (
            [f"photon:{p}" for p in self.photons]
            + [f"optical:{s}" for s in self.ensembles]
            + [f"spin:{s}" for s in self.ensembles]
        )

    def __len__(self) -> int:
        return len(self.photons) + 2 * len(self.ensembles)

    def photon(self, p) -> int:
        return self.photons.index(p) if isinstance(p, str) else int(p)

    def optical(self, s) -> int:
        k = self.ensembles.index(s) if isinstance(s, str) else int(s)
        return len(self.photons) + k

    def spin(self, s) -> int:
        k = self.ensembles.index(s) if isinstance(s, str) else int(s)
        return len(self.photons) + len(self.ensembles) + k

    @property
    def photon_slice(self) -> slice:
        return slice(0, len(self.photons))

    @property
    def optical_slice(self) -> slice:
        n = len(self.photons)
        return slice(n, n + len(self.ensembles))

    @property
    def spin_slice(self) -> slice:
        n = len(self.photons) + len(self.ensembles)
        return slice(n, n + len(self.ensembles))


@dataclass(frozen=True)
class ModeHamiltonian:
    h: np.ndarray
    t: float
    basis: ModeBasis

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.h, 2))


def validate_config(config: SystemConfig) -> list[str]:
    """Return a description of every broken invariant (empty when valid)."""
    problems = []
    seen = set()
    for ens in config.ensembles:
        if ens.id in seen:
            problems.append(f"duplicate ensemble id {ens.id!r}")
        seen.add(ens.id)
        if not (ens.N > 0 and math.isfinite(ens.N)):
            problems.append(f"ensemble {ens.id!r} has non-positive atom count N={ens.N}")
    if len(set(config.photons)) != len(config.photons):
        problems.append("duplicate photon mode ids")
    pairs = set()
    for edge in config.edges:
        key = (edge.photon, edge.ensemble)
        if key in pairs:
            problems.append(f"duplicate edge ({edge.photon},{edge.ensemble})")
        pairs.add(key)
        if edge.photon not in config.photons:
            problems.append(f"edge ({edge.photon},{edge.ensemble}) references unknown photon {edge.photon!r}")
        if edge.ensemble not in seen:
            problems.append(f"edge ({edge.photon},{edge.ensemble}) references unknown ensemble {edge.ensemble!r}")
        if not math.isfinite(edge.g):
            problems.append(f"edge ({edge.photon},{edge.ensemble}) has non-finite coupling g={edge.g}")
    for ens in config.ensembles:
        if ens.id not in config.controls:
            problems.append(f"ensemble {ens.id!r} has no control schedule")
    for key in config.controls:
        if key not in seen:
            problems.append(f"control schedule for unknown ensemble {key!r}")
    return problems


def check_config(config: SystemConfig) -> None:
    problems = validate_config(config)
    if problems:
        raise ConfigError(problems[0])


def hamiltonian_matrix(config: SystemConfig, omegas: Iterable[float]) -> np.ndarray:
    """Mode matrix for explicit control amplitudes (no validation)."""
    G = config.coupling_matrix()
    P, m = G.shape
    h = np.zeros((P + 2 * m, P + 2 * m))
    h[:P, P : P + m] = G
    h[P : P + m, P + m :] = np.diag(np.asarray(list(omegas), dtype=float))
    return h + h.T


def build_hamiltonian(config: SystemConfig, t: float) -> ModeHamiltonian:
    check_config(config)
    h = hamiltonian_matrix(config, config.omegas(t)).astype(complex)
    return ModeHamiltonian(h=h, t=t, basis=ModeBasis.of(config))


def straight_line(
    couplings: Iterable[float],
    controls: Iterable[ControlSchedule],
    atoms: Iterable[float] | None = None,
) -> SystemConfig:
    """One photon mode ``a`` coupled to ensembles ``E1..Em`` (g values given)."""
    couplings = list(couplings)
    atoms = [1.0] * len(couplings) if atoms is None else list(atoms)
    ensembles = [EnsembleSpec(f"E{k + 1}", N=n, g=g) for k, (g, n) in enumerate(zip(couplings, atoms))]
    edges = [CouplingEdge("a", e.id, e.g) for e in ensembles]
    return SystemConfig(ensembles, ("a",), edges, dict(zip((e.id for e in ensembles), controls)))


def cross_line(
    g1: float,
    g1p: float,
    g2: float,
    g2p: float,
    controls: Iterable[ControlSchedule],
    atoms: Iterable[float] = (1.0, 1.0, 1.0),
) -> SystemConfig:
    """Photon ``a1`` couples to E1 (g1) and E2 (g1p); ``a2`` to E1 (g2) and E3 (g2p)."""
    N1, N2, N3 = atoms
    ensembles = [EnsembleSpec("E1", N1, g1), EnsembleSpec("E2", N2, g1p), EnsembleSpec("E3", N3, g2p)]
    edges = [
        CouplingEdge("a1", "E1", g1),
        CouplingEdge("a1", "E2", g1p),
        CouplingEdge("a2", "E1", g2),
        CouplingEdge("a2", "E3", g2p),
    ]
    return SystemConfig(ensembles, ("a1", "a2"), edges, dict(zip(("E1", "E2", "E3"), controls)))
