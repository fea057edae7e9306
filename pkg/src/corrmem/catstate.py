"""Finite superpositions of multi-mode coherent states.

All linear algebra happens in the span of the (at most a handful of) coherent
branches, using their Gram matrix; no Fock truncation is involved.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

GRAM_TOL = 1e-12


class DegenerateStateError(ValueError):
    """Zero-norm state or rank-deficient local basis."""


class ShapeError(ValueError):
    pass


@dataclass(frozen=True)
class CoherentBranch:
    weight: complex
    alphas: np.ndarray

    def __post_init__(self):
        alphas = np.asarray(self.alphas, dtype=complex)
        if alphas.ndim != 1 or not np.all(np.isfinite(alphas)) or not np.isfinite(self.weight):
            raise ShapeError("branch needs a finite 1-d amplitude vector and weight")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "weight", complex(self.weight))


@dataclass(frozen=True)
class CatState:
    branches: tuple[CoherentBranch, ...]

    def __post_init__(self):
        branches = tuple(self.branches)
        if not branches:
            raise ShapeError("a cat state needs at least one branch")
        if len({b.alphas.shape for b in branches}) != 1:
            raise ShapeError("branches disagree on the number of modes")
        object.__setattr__(self, "branches", branches)

    @classmethod
    def from_arrays(cls, weights: Sequence[complex], alphas) -> "CatState":
        return cls(tuple(CoherentBranch(w, a) for w, a in zip(weights, np.asarray(alphas))))

    @classmethod
    def coherent(cls, alphas) -> "CatState":
        return cls((CoherentBranch(1.0, alphas),))

    @classmethod
    def cat(cls, alphas, betas, sign: int = 1) -> "CatState":
        """Unnormalised ``|alphas> + sign |betas>``."""
        return cls((CoherentBranch(1.0, alphas), CoherentBranch(sign, betas)))

    @property
    def weights(self) -> np.ndarray:
        return np.array([b.weight for b in self.branches])

    @property
    def amplitudes(self) -> np.ndarray:
        """Branch x mode matrix of coherent amplitudes."""
        return np.array([b.alphas for b in self.branches])

    @property
    def n_modes(self) -> int:
        return self.branches[0].alphas.shape[0]

    def gram(self, modes=None) -> np.ndarray:
        return gram(self.amplitudes if modes is None else self.amplitudes[:, list(modes)])

    def norm2(self) -> float:
        w = self.weights
        return float(np.real(w.conj() @ self.gram() @ w))

    def restricted(self, modes) -> "CatState":
        """Same weights, amplitudes of ``modes`` only (exact only if the rest is a common factor)."""
        return CatState.from_arrays(self.weights, self.amplitudes[:, list(modes)])


def coherent_overlap(alpha, beta) -> complex:
    """<beta|alpha> for multi-mode coherent states."""
    alpha = np.atleast_1d(np.asarray(alpha, dtype=complex))
    beta = np.atleast_1d(np.asarray(beta, dtype=complex))
    if alpha.shape != beta.shape:
        raise ShapeError("amplitude vectors differ in length")
    return complex(np.exp(-0.5 * np.vdot(alpha, alpha).real - 0.5 * np.vdot(beta, beta).real + np.vdot(beta, alpha)))


def gram(amplitudes: np.ndarray) -> np.ndarray:
    """G[i, j] = <a_i|a_j> for the rows of ``amplitudes`` (branch x mode)."""
    A = np.asarray(amplitudes, dtype=complex)
    sq = np.sum(np.abs(A) ** 2, axis=1)
    return np.exp(-0.5 * sq[:, None] - 0.5 * sq[None, :] + A.conj() @ A.T)


def apply_unitary(state: CatState, M) -> CatState:
    """Map every branch amplitude vector through the mode unitary ``M``."""
    M = getattr(M, "M", M)
    M = np.asarray(M)
    if M.shape != (state.n_modes, state.n_modes):
        raise ShapeError(f"mode unitary of shape {M.shape} does not act on {state.n_modes} modes")
    return CatState.from_arrays(state.weights, state.amplitudes @ M.T)


def _checked_norm2(state: CatState) -> float:
    n2 = state.norm2()
    scale = float(np.sum(np.abs(state.weights) ** 2))
    if n2 <= GRAM_TOL * scale:
        raise DegenerateStateError("state has zero norm")
    return n2


def inner(a: CatState, b: CatState) -> complex:
    """<a|b> for unnormalised states."""
    if a.n_modes != b.n_modes:
        raise ShapeError("states act on different numbers of modes")
    A, B = a.amplitudes, b.amplitudes
    sa = np.sum(np.abs(A) ** 2, axis=1)
    sb = np.sum(np.abs(B) ** 2, axis=1)
    G = np.exp(-0.5 * sa[:, None] - 0.5 * sb[None, :] + A.conj() @ B.T)
    return complex(a.weights.conj() @ G @ b.weights)


def fidelity(state: CatState, target: CatState) -> float:
    n_s = _checked_norm2(state)
    n_t = _checked_norm2(target)
    return float(min(1.0, abs(inner(target, state)) ** 2 / (n_s * n_t)))


def _whiten(S: np.ndarray, tol: float = GRAM_TOL) -> np.ndarray:
    """Coordinates of the branch vectors in an orthonormal basis of their span.

    Returns ``A`` (rank x k) with ``A^H A = S``.
    """
    evals, evecs = np.linalg.eigh((S + S.conj().T) / 2)
    keep = evals > tol * max(evals.max(), 1.0)
    return np.sqrt(evals[keep])[:, None] * evecs[:, keep].conj().T


@dataclass(frozen=True)
class ReducedDensity:
    coefficients: np.ndarray  # rho = sum_ij c_ij |a_i><a_j| over kept-mode branch states
    gram: np.ndarray
    matrix: np.ndarray  # the same operator in an orthonormal basis of the branch span
    eigenvalues: np.ndarray


def reduced_density(state: CatState, keep) -> ReducedDensity:
    keep = sorted(set(keep))
    if not keep:
        raise ShapeError("keep must name at least one mode")
    rest = [k for k in range(state.n_modes) if k not in keep]
    n2 = _checked_norm2(state)
    w = state.weights
    S_keep = state.gram(keep)
    S_rest = state.gram(rest) if rest else np.ones((len(w), len(w)))
    C = np.outer(w, w.conj()) * S_rest.T / n2
    A = _whiten(S_keep)
    rho = A @ C @ A.conj().T
    rho = (rho + rho.conj().T) / 2
    ev = np.linalg.eigvalsh(rho)
    if ev.min() < -1e-10:
        raise DegenerateStateError(f"reduced state has negative eigenvalue {ev.min():.3e}")
    ev = np.clip(ev, 0.0, None)
    return ReducedDensity(C, S_keep, rho, ev[::-1] / ev.sum())


def von_neumann_entropy(eigenvalues: np.ndarray) -> float:
    p = np.asarray(eigenvalues, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def entanglement_entropy(state: CatState, keep) -> float:
    """Entropy (natural log) of the reduced state on ``keep``."""
    return von_neumann_entropy(reduced_density(state, keep).eigenvalues)


@dataclass(frozen=True)
class GhzDecomposition:
    sign: int
    xi: complex
    zeta: complex
    alpha: complex
    beta: complex
    n_plus: float
    n_minus: float
    residual: float

    def local_state(self, s: int) -> CatState:
        """Normalised |+> (s=+1) or |-> (s=-1) as a single-mode cat."""
        n = self.n_plus if s > 0 else self.n_minus
        return CatState.from_arrays([1 / n, s / n], [[self.alpha], [self.beta]])


def ghz_decompose(state: CatState, modes=None, tol: float = 1e-8) -> GhzDecomposition:
    """Write ``|a,a,a> +- |b,b,b>`` as xi |s s s> + zeta |W_s> in the local basis ``|+-> ~ |a> +- |b>``.

    ``s`` is the sign of the input superposition.  The residual is the norm of
    the difference between the state and the two-term expansion.
    """
    modes = list(range(state.n_modes)) if modes is None else list(modes)
    if len(state.branches) != 2 or len(modes) != 3:
        raise ShapeError("GHZ decomposition needs a 2-branch state over 3 modes")
    amps = state.amplitudes[:, modes]
    w1, w2 = state.weights
    a, b = amps[0, 0], amps[1, 0]
    scale = max(1.0, np.abs(amps).max())
    if np.abs(amps[0] - a).max() > tol * scale or np.abs(amps[1] - b).max() > tol * scale:
        raise ShapeError("branch amplitudes are not equal across the three modes")
    ratio = w2 / w1
    if abs(ratio - 1) <= tol:
        sign = 1
    elif abs(ratio + 1) <= tol:
        sign = -1
    else:
        raise ShapeError("branch weights must be equal or opposite")
    ov = coherent_overlap(b, a).real
    n_plus = np.sqrt(max(0.0, 2 + 2 * ov))
    n_minus = np.sqrt(max(0.0, 2 - 2 * ov))
    if n_minus < 1e-7 or n_plus < 1e-7:
        raise DegenerateStateError("local basis |+>/|-> is degenerate (alpha == beta or alpha == -beta with zero overlap term)")

    # |a> = (n+ |+> + n- |->)/2, |b> = (n+ |+> - n- |->)/2
    norm = np.sqrt(_checked_norm2(state.restricted(modes)))
    n_lead = n_plus if sign > 0 else n_minus
    n_other = n_minus if sign > 0 else n_plus
    xi = w1 * 2 * n_lead**3 / 8 / norm
    zeta = w1 * 2 * n_lead * n_other**2 / 8 / norm

    # compare in an orthonormal basis of span{|a>, |b>} per mode
    A = _whiten(gram(np.array([[a], [b]])))
    if A.shape[0] < 2:
        raise DegenerateStateError("local basis |+>/|-> is degenerate")
    ka, kb = A[:, 0], A[:, 1]
    psi = (w1 * _kron3(ka, ka, ka) + w2 * _kron3(kb, kb, kb)) / norm
    lead = (ka + sign * kb) / n_lead
    other = (ka - sign * kb) / n_other
    w_state = _kron3(lead, other, other) + _kron3(other, lead, other) + _kron3(other, other, lead)
    expansion = xi * _kron3(lead, lead, lead) + zeta * w_state
    residual = float(np.linalg.norm(psi - expansion))
    return GhzDecomposition(sign, complex(xi), complex(zeta), complex(a), complex(b), float(n_plus), float(n_minus), residual)


def _kron3(x, y, z):
    return np.kron(np.kron(x, y), z)


def two_party_density(state: CatState, party_a, party_b) -> tuple[np.ndarray, tuple[int, int]]:
    """Density matrix of modes ``party_a`` + ``party_b`` in whitened local bases.

    Every other mode is traced out.  Shape is (dA*dB, dA*dB) with dA, dB the
    ranks of the local branch Gram matrices.
    """
    party_a, party_b = list(party_a), list(party_b)
    rest = [k for k in range(state.n_modes) if k not in party_a + party_b]
    n2 = _checked_norm2(state)
    w = state.weights
    S_rest = state.gram(rest) if rest else np.ones((len(w), len(w)))
    C = np.outer(w, w.conj()) * S_rest.T / n2
    A = _whiten(state.gram(party_a))
    B = _whiten(state.gram(party_b))
    # column i: coordinates of |a_i>|b_i> in the orthonormal product basis
    K = np.einsum("pi,qi->pqi", A, B).reshape(A.shape[0] * B.shape[0], -1)
    rho = K @ C @ K.conj().T
    return (rho + rho.conj().T) / 2, (A.shape[0], B.shape[0])


def log_negativity(rho: np.ndarray, dims: tuple[int, int]) -> float:
    """log2 of the trace norm of the partial transpose on the second party."""
    dA, dB = dims
    pt = rho.reshape(dA, dB, dA, dB).transpose(0, 3, 2, 1).reshape(dA * dB, dA * dB)
    ev = np.linalg.eigvalsh((pt + pt.conj().T) / 2)
    return float(max(0.0, np.log2(np.sum(np.abs(ev)))))


def reduced_two_party_negativity(state: CatState, traced: int, modes=None) -> float:
    """Logarithmic negativity between the two of ``modes`` left after tracing ``traced``."""
    modes = list(range(state.n_modes)) if modes is None else list(modes)
    if len(state.branches) != 2 or len(modes) != 3 or traced not in modes:
        raise ShapeError("need a 2-branch state, three modes and a traced mode among them")
    a, b = [k for k in modes if k != traced]
    rho, dims = two_party_density(state, [a], [b])
    return log_negativity(rho, dims)
