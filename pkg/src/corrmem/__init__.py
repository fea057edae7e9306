"""Correlated storage of light in several atomic ensembles via dark-state polaritons."""

from corrmem.catstate import CatState, entanglement_entropy, fidelity, ghz_decompose
from corrmem.polariton import dark_subspace, dsp_vector_line, dsp_vectors_cross, mixing_angles
from corrmem.propagator import dark_following_infidelity, propagate
from corrmem.schedule import constant, storage_ramp
from corrmem.system import SystemConfig, build_hamiltonian, cross_line, straight_line

__version__ = "0.1.0"
