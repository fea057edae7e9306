import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corrmem import fock
from corrmem.catstate import (
    CatState,
    DegenerateStateError,
    ShapeError,
    apply_unitary,
    coherent_overlap,
    entanglement_entropy,
    fidelity,
    ghz_decompose,
    reduced_density,
    reduced_two_party_negativity,
    two_party_density,
    log_negativity,
)
from corrmem.polariton import MixingAngles, spin_weights
from corrmem.propagator import propagate
from corrmem.schedule import storage_ramp
from corrmem.system import straight_line

GHZ_W = spin_weights(MixingAngles(0.0, (math.pi / 4, math.atan(math.sqrt(2) / 2))))


def epr(a0, sign, phi=math.pi / 4):
    w = a0 * np.array([math.cos(phi), math.sin(phi)])
    return CatState.cat(w, -w, sign)


def ghz(a0, sign):
    return CatState.cat(a0 * GHZ_W, -a0 * GHZ_W, sign)


amp = st.floats(-2, 2)


def test_overlap_basics():
    assert coherent_overlap([0.0], [0.0]) == 1
    for a in (0.3, 1.0, 1.7):
        assert coherent_overlap([a], [-a]) == pytest.approx(math.exp(-2 * a * a))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(amp, amp, amp, amp), min_size=2, max_size=2))
def test_overlap_against_fock(vals):
    (a, b, c, d), (e, f, g, h) = vals
    alpha = np.array([a + 1j * b, c + 1j * d])
    beta = np.array([e + 1j * f, g + 1j * h])
    ov = coherent_overlap(alpha, beta)
    back = coherent_overlap(beta, alpha)
    assert ov * back == pytest.approx(abs(ov) ** 2, abs=1e-14)
    assert 0 <= abs(ov) <= 1 + 1e-15
    space = fock.FockSpace(2, 40)
    brute = np.vdot(fock.coherent_state(space, beta), fock.coherent_state(space, alpha))
    assert ov == pytest.approx(brute, abs=1e-9)


def test_identity_leaves_state(line2):
    s = CatState.cat([1, 0.5, 0, 0, 0], [-1, 0.2j, 0, 0, 0], -1)
    out = apply_unitary(s, np.eye(5))
    np.testing.assert_array_equal(out.amplitudes, s.amplitudes)
    M = propagate(line2, 3.0, 30)
    assert apply_unitary(s, M).norm2() == pytest.approx(s.norm2(), abs=1e-10)


def test_dimension_mismatch():
    with pytest.raises(ShapeError):
        apply_unitary(CatState.coherent([1.0, 0.0]), np.eye(3))


def test_storage_magnitudes():
    T = 800.0
    cfg = straight_line([1.0, 1.0], [storage_ramp(2000.0, T), storage_ramp(2000.0, T)])
    out = apply_unitary(CatState.coherent([2.0, 0, 0, 0, 0]), propagate(cfg, T, 16000))
    spins = out.amplitudes[0, 3:]
    np.testing.assert_allclose(np.abs(spins), [math.sqrt(2)] * 2, rtol=1e-3)
    assert np.all(spins.real < 0)


def test_fidelity_values():
    s = epr(1.0, 1)
    assert fidelity(s, s) == pytest.approx(1.0)
    for a in (0.2, 0.7):
        assert fidelity(CatState.coherent([a]), CatState.coherent([-a])) == pytest.approx(math.exp(-4 * a * a))
    with pytest.raises(DegenerateStateError):
        fidelity(epr(0.0, -1), s)


def test_product_state_is_pure():
    s = CatState.coherent([0.3, -1.0, 2j])
    assert reduced_density(s, [1]).eigenvalues == pytest.approx([1.0])
    assert entanglement_entropy(s, [0, 2]) == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("a0", [0.1, 0.5, 1.0, 3.0])
def test_psi_minus_is_maximally_entangled(a0):
    ev = np.sort(reduced_density(epr(a0, -1), [0]).eigenvalues)
    np.testing.assert_allclose(ev[-2:], [0.5, 0.5], atol=1e-10)
    assert entanglement_entropy(epr(a0, -1), [0]) == pytest.approx(math.log(2), abs=1e-10)


def test_psi_plus_eigenvalues():
    t = math.exp(-1)
    expected = sorted([(1 + t) ** 2 / (2 * (1 + t * t)), (1 - t) ** 2 / (2 * (1 + t * t))])
    ev = np.sort(reduced_density(epr(1.0, 1), [0]).eigenvalues)[-2:]
    np.testing.assert_allclose(ev, expected, atol=1e-12)
    assert entanglement_entropy(epr(1e-3, 1), [0]) < 1e-5


@pytest.mark.parametrize("phi", [0.3, math.pi / 4, 1.2])
@pytest.mark.parametrize("sign", [1, -1])
def test_entropy_against_fock(phi, sign):
    s = epr(0.8, sign, phi)
    space = fock.FockSpace(2, 14)
    brute = fock.fock_partial_trace_entropy(fock.cat_state(space, s), [0], space)
    assert entanglement_entropy(s, [0]) == pytest.approx(brute, abs=1e-8)


def test_ghz_errors():
    with pytest.raises(DegenerateStateError):
        ghz_decompose(CatState.cat(GHZ_W, GHZ_W, 1))
    with pytest.raises(ShapeError):
        ghz_decompose(CatState.cat([1, 2, 3], [-1, -2, -3], 1))


@pytest.mark.parametrize("a0", [0.4, 1.0, 1.8, 4.0])
@pytest.mark.parametrize("sign", [1, -1])
def test_ghz_expansion(a0, sign):
    d = ghz_decompose(ghz(a0, sign))
    assert d.residual <= 1e-10
    assert abs(d.zeta) > 0
    assert abs(d.xi.imag) < 1e-15 and abs(d.zeta.imag) < 1e-15
    assert abs(d.xi) ** 2 + 3 * abs(d.zeta) ** 2 == pytest.approx(1.0, abs=1e-12)


def test_ghz_expansion_against_fock():
    a0, sign = 1.2, -1
    d = ghz_decompose(ghz(a0, sign))
    space = fock.FockSpace(3, 16)
    psi = fock.cat_state(space, ghz(a0, sign))
    local = [fock.cat_state(fock.FockSpace(1, 16), d.local_state(s)) for s in (sign, -sign)]
    lead, other = local

    def k3(x, y, z):
        return np.kron(np.kron(x, y), z)

    w = k3(lead, other, other) + k3(other, lead, other) + k3(other, other, lead)
    rebuilt = d.xi * k3(lead, lead, lead) + d.zeta * w
    assert np.linalg.norm(psi - rebuilt) < 1e-8


def test_negativity_ghz_minus_positive():
    assert all(reduced_two_party_negativity(ghz(1.5, -1), k) > 0 for k in range(3))


def test_negativity_vanishes_near_vacuum():
    assert reduced_two_party_negativity(ghz(1e-3, 1), 0) < 1e-5


def test_negativity_with_product_third_mode():
    w = 0.9 / math.sqrt(2)
    s = CatState.cat([w, w, 0.4], [-w, -w, 0.4], -1)
    rho, dims = two_party_density(epr(0.9, -1), [0], [1])
    assert reduced_two_party_negativity(s, 2) == pytest.approx(log_negativity(rho, dims), abs=1e-12)
    # pure two-qubit maximally entangled pair: log2(2) = 1
    assert log_negativity(rho, dims) == pytest.approx(1.0, abs=1e-10)
