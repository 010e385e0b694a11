import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import PAULI, apply_frame, equal_up_to_phase, pauli_matrix
from qlnet import classical, netmodel, statevec
from qlnet.netmodel import K1Kind, k1_network
from qlnet.pauliframe import (
    BatchFrames,
    PauliFrame,
    Solitary,
    UnsupportedGate,
    conjugate_cx,
    conjugate_h,
    conjugate_x,
    damage_series,
    detect_solitary,
    frame_period,
    frames_confined,
    step_frame,
)

H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
LABELS = "IXYZ"


def _as_pauli(mat):
    """(sign, label) for a signed single-qubit Pauli matrix."""
    for lab, p in PAULI.items():
        for s in (1, -1):
            if np.allclose(mat, s * p):
                return s, lab
    raise AssertionError("not a signed Pauli")


@pytest.mark.parametrize("lab", LABELS)
def test_hadamard_table(lab):
    frame = conjugate_h(PauliFrame((lab, "I")), 0)
    assert (frame.sign, frame.labels[0]) == _as_pauli(H @ PAULI[lab] @ H.conj().T)


@pytest.mark.parametrize("lab", LABELS)
def test_x_conjugation(lab):
    frame = conjugate_x(PauliFrame((lab, "I")), 0)
    assert (frame.sign, frame.labels[0]) == _as_pauli(PAULI["X"] @ PAULI[lab] @ PAULI["X"])


def _cx(control, target, active_on):
    dim = 4
    m = np.zeros((dim, dim))
    for b in range(dim):
        out = b ^ (1 << target) if (b >> control & 1) == active_on else b
        m[out, b] = 1
    return m


@pytest.mark.parametrize("active_on", [1, 0])
@pytest.mark.parametrize("c_lab, t_lab", list(itertools.product(LABELS, LABELS)))
def test_cx_table(c_lab, t_lab, active_on):
    # qubit 1 controls qubit 0
    frame = conjugate_cx(PauliFrame((t_lab, c_lab)), 1, 0, active_on)
    u = _cx(1, 0, active_on)
    expected = u @ pauli_matrix((t_lab, c_lab)) @ u.T
    np.testing.assert_allclose(pauli_matrix(frame.labels, frame.sign), expected, atol=1e-12)


def test_cx_needs_distinct_qubits():
    with pytest.raises(ValueError):
        conjugate_cx(PauliFrame.identity(1), 0, 0)


def test_frame_validation():
    with pytest.raises(ValueError):
        PauliFrame(("X",))
    with pytest.raises(ValueError):
        PauliFrame(("Q", "I"))
    with pytest.raises(ValueError):
        PauliFrame(("X", "I"), sign=2)


def test_unsupported_two_input(fig1):
    with pytest.raises(UnsupportedGate):
        step_frame(fig1, PauliFrame.single(2, 0))


@st.composite
def k1_nets(draw, min_n=1, max_n=4, hadamard=None):
    n = draw(st.integers(min_n, max_n))
    inputs = draw(st.lists(st.integers(0, n - 1), min_size=n, max_size=n))
    kinds = draw(st.lists(st.sampled_from(list(K1Kind)), min_size=n, max_size=n))
    if hadamard is None:
        had = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    else:
        had = [hadamard] * n
    return k1_network(inputs, kinds, had)


@st.composite
def frames_for(draw, n):
    labels = draw(st.lists(st.sampled_from(LABELS), min_size=2 * n, max_size=2 * n))
    return PauliFrame(tuple(labels), draw(st.sampled_from([1, -1])))


@given(k1_nets(max_n=3), st.data())
@settings(max_examples=40, deadline=None)
def test_frame_tracks_propagator(net, data):
    # U rho U^dagger for an arbitrary Pauli string, sign included
    frame = data.draw(frames_for(net.n))
    u = statevec.build_propagator(net).matrix
    expected = u @ pauli_matrix(frame.labels, frame.sign) @ u.conj().T
    got = step_frame(net, frame)
    np.testing.assert_allclose(pauli_matrix(got.labels, got.sign), expected, atol=1e-10)


@given(k1_nets(max_n=3), st.data())
@settings(max_examples=40, deadline=None)
def test_frame_tracks_perturbed_state(net, data):
    n = net.n
    label = data.draw(st.integers(0, (1 << (2 * n)) - 1))
    q = data.draw(st.integers(0, 2 * n - 1))
    frame = PauliFrame.single(n, q)
    psi = statevec.StateVector.basis(n, label)
    pert = statevec.StateVector(n, apply_frame(frame, psi.amplitudes))
    for _ in range(12):
        psi, pert = statevec.apply_step(net, psi), statevec.apply_step(net, pert)
        frame = step_frame(net, frame)
        assert equal_up_to_phase(pert.amplitudes, apply_frame(frame, psi.amplitudes))


def _product(a, b):
    """Label-wise product, sign dropped."""
    m = {("I", x): x for x in LABELS} | {(x, "I"): x for x in LABELS} | {(x, x): "I" for x in LABELS}
    m |= {("X", "Y"): "Z", ("Y", "X"): "Z", ("Y", "Z"): "X", ("Z", "Y"): "X", ("Z", "X"): "Y", ("X", "Z"): "Y"}
    return tuple(m[p] for p in zip(a, b))


@given(k1_nets(max_n=6), st.data())
@settings(max_examples=60, deadline=None)
def test_linearity(net, data):
    a = data.draw(frames_for(net.n))
    b = data.draw(frames_for(net.n))
    ab = PauliFrame(_product(a.labels, b.labels))
    for _ in range(5):
        a, b, ab = step_frame(net, a), step_frame(net, b), step_frame(net, ab)
        assert ab.labels == _product(a.labels, b.labels)


@given(k1_nets(max_n=10), st.data())
@settings(max_examples=60, deadline=None)
def test_confined_to_component(net, data):
    node = data.draw(st.integers(0, net.n - 1))
    comp = netmodel.decompose(net).component_of(node)
    series = damage_series(net, PauliFrame.single(net.n, node), 60)
    assert frames_confined(series, comp.nodes)


@given(k1_nets(max_n=8, hadamard=False), st.data())
@settings(max_examples=60, deadline=None)
def test_classical_restriction(net, data):
    node = data.draw(st.integers(0, net.n - 1))
    series = damage_series(net, PauliFrame.single(net.n, node), 40)
    cfg = classical.SpinConfig(net.n, data.draw(st.integers(0, (1 << (2 * net.n)) - 1)))
    masks = classical.classical_damage_series(net, cfg, node, 40)
    for frame, point in zip(series.steps, masks):
        assert set(frame.labels) <= {"I", "X"}
        assert sum(1 << i for i, lab in enumerate(frame.visible) if lab == "X") == point.mask


@given(k1_nets(max_n=8), st.data())
@settings(max_examples=60, deadline=None)
def test_copy_not_same_labels(net, data):
    swapped = [
        {"COPY": "NOT", "NOT": "COPY"}.get(k.value, k.value) for k in net.k1_kinds()
    ]
    other = k1_network([nd.inputs[0] for nd in net.nodes], swapped, [nd.hadamard for nd in net.nodes])
    node = data.draw(st.integers(0, net.n - 1))
    a = damage_series(net, PauliFrame.single(net.n, node), 30)
    b = damage_series(other, PauliFrame.single(net.n, node), 30)
    assert [f.labels for f in a.frames] == [f.labels for f in b.frames]


@given(k1_nets(max_n=2), st.data())
@settings(max_examples=20, deadline=None)
def test_frame_period_divides_clifford_period(net, data):
    m = statevec.check_clifford_periodicity(net, max_power=2000)
    node = data.draw(st.integers(0, 2 * net.n - 1))
    p = frame_period(net, PauliFrame.single(net.n, node), max_steps=m)
    assert p is not None and (m - 1) % p == 0


@given(st.integers(1, 8), st.integers(1, 12), st.booleans(), st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_batch_engine_matches_step_frame(n, batch, had, seed):
    rng = np.random.default_rng(seed)
    nets = [netmodel.random_k1_network(n, rng, hadamard_all=had) for _ in range(batch)]
    sites = rng.integers(0, 2 * n, size=batch)
    engine = BatchFrames.from_networks(nets)
    x, z, sign = engine.seed(sites)
    frames = [PauliFrame.single(n, int(s)) for s in sites]
    for _ in range(15):
        engine.step(x, z, sign)
        frames = [step_frame(net, f) for net, f in zip(nets, frames)]
        assert BatchFrames.to_frames(x, z, sign) == frames
        assert engine.hamming(x, z, n).tolist() == [f.hamming for f in frames]


def test_loop_soliton_frames():
    n = 12
    net = netmodel.loop_network(n, "COPY", hadamard=True)
    series = damage_series(net, PauliFrame.single(n, 5), 6)
    sup = [f.support() for f in series.steps]
    # node i reads i-1: X@i -> Z@(i-1), Z@(n+i) -> Z@i, X@(n+i-1) -> X@(i-1)
    assert sup[0] == {4: "Z", n + 5: "Z"}
    assert sup[1] == {5: "Z", n + 4: "X"}
    assert sup[2] == {4: "X"}
    assert sup[3:6] == [{3: "Z", n + 4: "Z"}, {4: "Z", n + 3: "X"}, {3: "X"}]
    assert max(series.hamming) == 1
    assert frame_period(net, PauliFrame.single(n, 5)) == 3 * n


def test_chain_soliton_frames():
    n = 12
    net = netmodel.chain_network(n, "COPY", hadamard=True)
    series = damage_series(net, PauliFrame.single(n, 0), 8)
    assert [f.support() for f in series.steps[:5]] == [
        {n: "Z"},
        {0: "Z"},
        {n: "X"},
        {0: "X", n + 1: "X"},
        {1: "X", n: "Z", n + 2: "X"},
    ]
    # after the transient: X@i, Z@(n+i-1), X@(n+i+1), one node per step
    for i in range(2, 5):
        assert series.steps[i + 3].support() == {i: "X", n + i - 1: "Z", n + i + 1: "X"}


def test_branch_generates_y(fig7_inset):
    n = 6
    net = fig7_inset.with_hadamard(True)
    series = damage_series(net, PauliFrame.single(n, 2), 7)
    expected = [
        {1: "Z", n + 2: "Z"},
        {2: "Z", n + 1: "X"},
        {1: "X"},
        {0: "Z", n + 1: "Z"},
        {1: "Z", n + 0: "X"},
        {0: "X", n + 0: "X"},
        {0: "Y", n + 0: "Y", n + 1: "X"},
    ]
    assert [f.support() for f in series.steps] == expected


@pytest.mark.parametrize(
    "net, node, expected",
    [
        (netmodel.loop_network(12, "COPY", hadamard=True), 0, Solitary.LOOP_SOLITON),
        (netmodel.chain_network(12, "COPY", hadamard=True), 0, Solitary.CHAIN_SOLITON),
        (netmodel.loop_network(12, "COPY"), 0, Solitary.COMPLEX),
        (k1_network([0, 1], ["CONST_I", "CONST_I"]), 0, Solitary.STATIC),
    ],
)
def test_detect_solitary(net, node, expected):
    series = damage_series(net, PauliFrame.single(net.n, node), 200)
    assert detect_solitary(series) is expected


def test_detect_solitary_branch(fig7_inset):
    series = damage_series(fig7_inset.with_hadamard(True), PauliFrame.single(6, 2), 200)
    assert detect_solitary(series) is Solitary.COMPLEX


def test_grid_codes():
    net = netmodel.loop_network(3, "COPY", hadamard=True)
    series = damage_series(net, PauliFrame.single(3, 0), 3)
    assert series.grid().tolist() == [[0, 0, 3], [3, 0, 0], [0, 0, 1]]
