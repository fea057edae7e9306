import math

import numpy as np
import pytest

from corrmem import fock
from corrmem.catstate import CatState
from corrmem.polariton import MixingAngles, dsp_vector_line, mixing_angles
from corrmem.propagator import propagate
from corrmem.schedule import constant
from corrmem.system import straight_line


def test_single_matrix_element():
    cfg = straight_line([0.7], [constant(1.3)], atoms=[2.0])
    space = fock.FockSpace(3, 1)
    V = fock.build_V(cfg, 0.0, space).toarray()
    assert space.dim == 8
    amp = V[space.index([0, 1, 0]), space.index([1, 0, 0])]
    assert amp == pytest.approx(0.7 * math.sqrt(2.0))
    assert np.abs(V - V.conj().T).max() == 0


def test_commutator_vanishes(line2):
    space = fock.FockSpace(5, 3)
    V = fock.build_V(line2, 0.0, space)
    d = dsp_vector_line(mixing_angles(line2, 0.0))
    assert fock.commutator_below_cutoff(V, fock.creation_combination(space, d.v), space) <= 1e-12


def test_dark_state_low_n():
    space = fock.FockSpace(5, 3)
    th, ph = 0.9, 0.35
    v = dsp_vector_line(MixingAngles(th, (ph,))).v
    np.testing.assert_array_equal(fock.dark_state(space, v, 0), space.vacuum())
    one = fock.dark_state(space, v, 1)
    assert one[space.index([1, 0, 0, 0, 0])] == pytest.approx(math.cos(th))
    assert one[space.index([0, 0, 0, 1, 0])] == pytest.approx(-math.sin(th) * math.cos(ph))
    assert one[space.index([0, 0, 0, 0, 1])] == pytest.approx(-math.sin(th) * math.sin(ph))
    two = fock.dark_state(space, v, 2)
    c = two[space.index([0, 0, 0, 1, 1])]
    assert c == pytest.approx(math.sqrt(2) * math.sin(th) ** 2 * math.sin(ph) * math.cos(ph))


def test_expansion_matches():
    space = fock.FockSpace(5, 4)
    assert fock.check_Dn_expansion(space, MixingAngles(0.5, (1.0,)), 1) <= 1e-15
    assert fock.check_Dn_expansion(space, MixingAngles(1.1, (0.4,)), 4) <= 1e-12


def test_expansion_single_term_when_stored_in_first():
    space = fock.FockSpace(5, 4)
    psi = fock.dn_closed_form(space, math.pi / 2, 0.0, 3)
    big = np.flatnonzero(np.abs(psi) > 1e-12)
    assert list(big) == [space.index([0, 0, 0, 3, 0])]
    assert abs(psi[big[0]]) == pytest.approx(1.0)


def test_truncation_guards():
    with pytest.raises(fock.TruncationError):
        fock.FockSpace(8, 8)
    with pytest.raises(fock.TruncationError):
        fock.dark_state(fock.FockSpace(5, 2), np.eye(5)[0], 3)


def test_zero_V_keeps_state():
    cfg = straight_line([0.0], [constant(0.0, 1.0)])
    space = fock.FockSpace(3, 3)
    psi = fock.coherent_state(space, [0.4, 0.1, 0.0])
    np.testing.assert_array_equal(fock.schrodinger_evolve(cfg, 1.0, 5, space, psi), psi)


def test_dark_state_is_stationary(line2):
    space = fock.FockSpace(5, 3)
    d = dsp_vector_line(mixing_angles(line2, 0.0))
    psi = fock.dark_state(space, d.v, 2)
    out = fock.schrodinger_evolve(line2, 2.0, 4, space, psi)
    assert np.linalg.norm(out - psi) <= 1e-8


def test_mode_evolution_matches_fock(ramp2):
    space = fock.FockSpace(5, 8)
    alpha = np.array([0.3, 0, 0, 0, 0], dtype=complex)
    psi = fock.schrodinger_evolve(ramp2, 10.0, 20, space, fock.coherent_state(space, alpha))
    mode = propagate(ramp2, 10.0, 20).M @ alpha
    assert 1 - fock.overlap_fidelity(psi, fock.coherent_state(space, mode)) <= 1e-6


def test_entropy_examples():
    space = fock.FockSpace(2, 1)
    assert fock.fock_partial_trace_entropy(space.basis_state([1, 0]), [0], space) == pytest.approx(0.0, abs=1e-15)
    bell = (space.basis_state([0, 1]) + space.basis_state([1, 0])) / math.sqrt(2)
    assert fock.fock_partial_trace_entropy(bell, [0], space) == pytest.approx(math.log(2), abs=1e-14)
    big = fock.FockSpace(2, 10)
    w = 0.8 / math.sqrt(2)
    psi = fock.cat_state(big, CatState.cat([w, w], [-w, -w], -1))
    assert fock.fock_partial_trace_entropy(psi, [0], big) == pytest.approx(math.log(2), abs=1e-6)
