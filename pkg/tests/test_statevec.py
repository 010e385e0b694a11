import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlnet import classical, netmodel, statevec
from qlnet.netmodel import K1Kind, k1_network
from qlnet.statevec import (
    DimensionCap,
    NotUnitary,
    Propagator,
    StateVector,
    apply_step,
    build_propagator,
    check_clifford_periodicity,
    recover_cycle_lengths,
    root_of_unity,
    spectrum,
)


@st.composite
def small_nets(draw, max_n=3):
    n = draw(st.integers(1, max_n))
    inputs = draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    kinds = draw(st.lists(st.sampled_from(list(K1Kind)), min_size=n, max_size=n))
    had = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    return k1_network(inputs, kinds, had)


@given(small_nets())
@settings(max_examples=30, deadline=None)
def test_propagator_columns_match_apply_step(net):
    u = build_propagator(net).matrix
    for label in range(u.shape[0]):
        col = apply_step(net, StateVector.basis(net.n, label)).amplitudes
        np.testing.assert_allclose(u[:, label], col, atol=1e-12)


def test_fig1_columns(fig1, fig1_hadamard):
    for net in (fig1, fig1_hadamard):
        u = build_propagator(net).matrix
        for label in range(16):
            col = apply_step(net, StateVector.basis(2, label)).amplitudes
            np.testing.assert_allclose(u[:, label], col, atol=1e-12)


@given(small_nets())
@settings(max_examples=30, deadline=None)
def test_unitarity(net):
    assert build_propagator(net).unitarity_error() < 1e-10


@given(small_nets())
@settings(max_examples=30, deadline=None)
def test_classical_propagator_is_step_permutation(net):
    net = net.with_hadamard(False)
    prop = build_propagator(net)
    assert prop.is_permutation()
    for label in range(prop.matrix.shape[0]):
        nxt = classical.step_classical(net, classical.SpinConfig(net.n, label)).bits
        assert prop.matrix[nxt, label] == 1.0


def test_hadamard_propagator_not_permutation(fig1_hadamard):
    assert not build_propagator(fig1_hadamard).is_permutation()


def test_dimension_cap():
    with pytest.raises(DimensionCap):
        build_propagator(netmodel.loop_network(8))
    build_propagator(netmodel.loop_network(2), max_nodes=2)


def test_not_unitary_rejected():
    with pytest.raises(NotUnitary):
        spectrum(Propagator(1, np.diag([1.0, 1.0, 1.0, 2.0])))


def test_identity_spectrum():
    # CONST_I everywhere: the step is the register swap, an involution
    net = k1_network([0], ["CONST_I"])
    rep = spectrum(build_propagator(net))
    assert sorted(rep.cycle_lengths) == [1, 1, 2]
    assert dict(rep.degeneracies)[0.0] == 3


@pytest.mark.parametrize(
    "phase, expected",
    [(0.0, (0, 1)), (math.pi, (1, 2)), (2 * math.pi / 3, (1, 3)), (2 * math.pi * 5 / 24, (5, 24))],
)
def test_root_of_unity(phase, expected):
    assert root_of_unity(phase) == expected


def test_irrational_phase():
    assert root_of_unity(1.0) is None
    assert root_of_unity(2 * math.pi / math.sqrt(2)) is None


def test_recover_cycle_lengths():
    roots = [(k, 6) for k in range(6)] + [(k, 3) for k in range(3)] + [(0, 1)]
    assert recover_cycle_lengths(roots) == [6, 3, 1]
    with pytest.raises(ValueError):
        recover_cycle_lengths([(1, 3), (0, 1)])


def test_fig1_spectrum_duality(fig1):
    rep = spectrum(build_propagator(fig1))
    assert sorted(rep.cycle_lengths, reverse=True) == [6, 4, 3, 3]
    assert rep.cycle_lengths == classical.cycle_lengths(fig1)


def test_fig1_clifford_period(fig1):
    # a permutation returns after lcm of its cycle lengths
    m = check_clifford_periodicity(fig1)
    assert m - 1 == math.lcm(*classical.cycle_lengths(fig1))


@given(small_nets(max_n=2))
@settings(max_examples=20, deadline=None)
def test_k1_networks_are_periodic(net):
    m = check_clifford_periodicity(net, max_power=2000)
    assert m is not None
    u = build_propagator(net).matrix
    power = np.linalg.matrix_power(u, m - 1)
    phase = power[np.unravel_index(np.argmax(np.abs(power)), power.shape)]
    np.testing.assert_allclose(power, phase * np.eye(len(u)), atol=1e-8)


def test_norm_preserved_long_run(fig1_hadamard):
    psi = StateVector.basis(2, 5)
    for _ in range(1000):
        psi = apply_step(fig1_hadamard, psi)
    assert abs(psi.norm - 1.0) < 1e-10


def test_state_after(fig1):
    states = statevec.state_after(fig1, StateVector.basis(2, 0), 6)
    assert len(states) == 6
    assert all(abs(s.norm - 1) < 1e-12 for s in states)


def test_min_gap_and_svg(fig1):
    rep = spectrum(build_propagator(fig1))
    assert rep.min_gap == 0.0 or rep.min_gap < 1e-9
    assert max(rep.multiplicity) >= 2
