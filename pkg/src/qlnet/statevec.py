"""Dense state-vector simulation of the 2n-qubit circuit and spectral analysis.

Basis label bit ``q`` is qubit ``q``: targets are bits ``0..n-1``, controls
bits ``n..2n-1``.  One step applies, in order, the Hadamards on flagged
targets, one controlled-X per FLIP row of each truth table, and the ``n``
register swaps.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .netmodel import Network

DEFAULT_MAX_NODES = 7
INV_SQRT2 = 1.0 / math.sqrt(2.0)
TWO_PI = 2.0 * math.pi


class DimensionCap(ValueError):
    pass


class NotUnitary(ValueError):
    pass


@dataclass(frozen=True)
class StateVector:
    n: int
    amplitudes: np.ndarray

    @classmethod
    def basis(cls, n: int, label: int) -> "StateVector":
        amps = np.zeros(1 << (2 * n), dtype=complex)
        amps[label] = 1.0
        return cls(n, amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass(frozen=True)
class Propagator:
    n: int
    matrix: np.ndarray

    def unitarity_error(self) -> float:
        u = self.matrix
        return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))

    def is_permutation(self, atol: float = 1e-12) -> bool:
        u = self.matrix
        near0 = np.abs(u) <= atol
        near1 = np.abs(u - 1.0) <= atol
        if not np.all(near0 | near1):
            return False
        return bool(np.all(near1.sum(axis=0) == 1) and np.all(near1.sum(axis=1) == 1))


# ------------------------------------------------------------------ gate list

def gate_sequence(net: Network) -> list[tuple]:
    """The step as a flat gate list: ``("H", q)``, ``("CX", controls, pattern, target)``, ``("SWAP", a, b)``."""
    n = net.n
    gates: list[tuple] = [("H", i) for i, node in enumerate(net.nodes) if node.hadamard]
    for i, node in enumerate(net.nodes):
        controls = tuple(n + j for j in node.inputs)
        for pattern in node.table.flip_rows():
            gates.append(("CX", controls, pattern, i))
    gates += [("SWAP", i, n + i) for i in range(n)]
    return gates


def _check_cap(net: Network, max_nodes: int) -> None:
    if net.n > max_nodes:
        raise DimensionCap(
            f"dense simulation of n={net.n} needs dimension 4**{net.n}; cap is n <= {max_nodes}"
        )


def _labels(num_qubits: int) -> np.ndarray:
    return np.arange(1 << num_qubits, dtype=np.int64)


def _cx_selector(labels: np.ndarray, controls: Sequence[int], pattern: int) -> np.ndarray:
    sel = np.ones(labels.shape, dtype=bool)
    for j, c in enumerate(controls):
        want = pattern >> j & 1
        sel &= (labels >> c & 1) == want
    return sel


def apply_gate(psi: np.ndarray, gate: tuple, num_qubits: int) -> np.ndarray:
    """Apply one gate to an amplitude vector (returns a new array)."""
    labels = _labels(num_qubits)
    kind = gate[0]
    if kind == "H":
        bit = 1 << gate[1]
        low = labels[(labels & bit) == 0]
        a, b = psi[low], psi[low | bit]
        out = psi.copy()
        out[low] = (a + b) * INV_SQRT2
        out[low | bit] = (a - b) * INV_SQRT2
        return out
    if kind == "CX":
        _, controls, pattern, target = gate
        src = labels.copy()
        sel = _cx_selector(labels, controls, pattern)
        src[sel] ^= 1 << target
        return psi[src]
    if kind == "SWAP":
        _, a, b = gate
        ba, bb = labels >> a & 1, labels >> b & 1
        src = labels ^ ((ba ^ bb) << a) ^ ((ba ^ bb) << b)
        return psi[src]
    if kind == "X":
        return psi[labels ^ (1 << gate[1])]
    raise ValueError(f"unknown gate {gate!r}")


def apply_step(net: Network, psi: StateVector) -> StateVector:
    """Matrix-free application of one full update step."""
    if psi.n != net.n:
        raise ValueError("state and network sizes differ")
    amps = psi.amplitudes
    for gate in gate_sequence(net):
        amps = apply_gate(amps, gate, 2 * net.n)
    return StateVector(net.n, amps)


def _gate_matrix(gate: tuple, num_qubits: int) -> np.ndarray:
    dim = 1 << num_qubits
    labels = _labels(num_qubits)
    if gate[0] == "H":
        h = np.array([[1.0, 1.0], [1.0, -1.0]]) * INV_SQRT2
        q = gate[1]
        # kron order: most significant qubit first
        return np.kron(np.kron(np.eye(1 << (num_qubits - q - 1)), h), np.eye(1 << q))
    mat = np.zeros((dim, dim))
    if gate[0] == "CX":
        _, controls, pattern, target = gate
        sel = _cx_selector(labels, controls, pattern)
        dest = np.where(sel, labels ^ (1 << target), labels)
    else:
        _, a, b = gate
        ba, bb = labels >> a & 1, labels >> b & 1
        dest = labels ^ ((ba ^ bb) << a) ^ ((ba ^ bb) << b)
    mat[dest, labels] = 1.0
    return mat


def build_propagator(net: Network, max_nodes: int = DEFAULT_MAX_NODES) -> Propagator:
    """Dense one-step unitary as the ordered product of per-gate matrices."""
    _check_cap(net, max_nodes)
    nq = 2 * net.n
    u = np.eye(1 << nq, dtype=complex)
    for gate in gate_sequence(net):
        u = _gate_matrix(gate, nq) @ u
    return Propagator(net.n, u)


# ------------------------------------------------------------------ spectrum

@dataclass(frozen=True)
class SpectrumReport:
    phases: np.ndarray
    eigenvalues: np.ndarray
    degeneracies: list[tuple[float, int]]
    multiplicity: list[int]
    roots_of_unity: list[tuple[int, int] | None]
    cycle_lengths: list[int] | None

    @property
    def min_gap(self) -> float:
        """Smallest circular distance between two eigenphases."""
        p = np.sort(self.phases)
        if len(p) < 2:
            return math.inf
        gaps = np.diff(np.concatenate((p, [p[0] + TWO_PI])))
        return float(gaps.min())


def root_of_unity(phase: float, tol: float = 1e-9, lmax: int = 4096) -> tuple[int, int] | None:
    """``(k, L)`` with ``phase == 2*pi*k/L`` within ``tol``, smallest such ``L <= lmax``."""
    x = phase / TWO_PI
    best = Fraction(x).limit_denominator(lmax)
    k, L = best.numerator, best.denominator
    if abs(phase - TWO_PI * k / L) > tol:
        return None
    return k % L, L


def _cluster(phases: np.ndarray, tol: float) -> list[list[int]]:
    # phases sorted in [0, 2pi); the last cluster may wrap onto the first
    clusters: list[list[int]] = []
    for idx, p in enumerate(phases):
        if clusters and p - phases[clusters[-1][-1]] <= tol:
            clusters[-1].append(idx)
        else:
            clusters.append([idx])
    if len(clusters) > 1 and phases[clusters[0][0]] + TWO_PI - phases[clusters[-1][-1]] <= tol:
        clusters[0] = clusters.pop() + clusters[0]
    return clusters


def recover_cycle_lengths(roots: Sequence[tuple[int, int]]) -> list[int]:
    """Greedy decomposition of root-of-unity multiset into complete L-th root sets.

    Repeatedly takes the largest denominator still present and removes one
    copy of every ``k/L`` for ``k = 0..L-1``.
    """
    bag = Counter(Fraction(k, L) for k, L in roots)
    lengths = []
    while bag:
        L = max(f.denominator for f in bag)
        for k in range(L):
            f = Fraction(k, L)
            if bag[f] <= 0:
                raise ValueError(f"phases do not contain a complete set of {L}-th roots")
            bag[f] -= 1
            if bag[f] == 0:
                del bag[f]
        lengths.append(L)
    return lengths


def spectrum(
    prop: Propagator,
    tol: float = 1e-9,
    lmax: int = 4096,
    unitary_tol: float = 1e-10,
) -> SpectrumReport:
    if prop.unitarity_error() > unitary_tol:
        raise NotUnitary(f"propagator deviates from unitarity by {prop.unitarity_error():.3g}")
    eig = np.linalg.eigvals(prop.matrix)
    phases = np.mod(np.angle(eig), TWO_PI)
    # values a hair below 2pi belong to phase 0
    phases[phases > TWO_PI - tol] = 0.0
    order = np.argsort(phases)
    phases, eig = phases[order], eig[order]
    roots = [root_of_unity(p, tol, lmax) for p in phases]
    cycles = None
    if prop.is_permutation() and all(r is not None for r in roots):
        cycles = recover_cycle_lengths(roots)  # type: ignore[arg-type]
    clusters = _cluster(phases, tol)
    multiplicity = [0] * len(phases)
    degeneracies = []
    for members in clusters:
        for idx in members:
            multiplicity[idx] = len(members)
        degeneracies.append((float(phases[members[0]]), len(members)))
    return SpectrumReport(phases, eig, degeneracies, multiplicity, roots, cycles)


# ------------------------------------------------------------------ periodicity

def _proportional(a: np.ndarray, b: np.ndarray, atol: float) -> bool:
    """True if ``a == c * b`` for a unit-modulus scalar ``c``."""
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[idx]) < atol:
        return False
    c = a[idx] / b[idx]
    if abs(abs(c) - 1.0) > atol:
        return False
    return bool(np.max(np.abs(a - c * b)) <= atol)


def check_clifford_periodicity(
    net: Network, max_power: int = 10_000, atol: float = 1e-8, max_nodes: int = DEFAULT_MAX_NODES
) -> int | None:
    """Smallest ``m <= max_power`` (m >= 2) with ``U**m == U`` up to a global phase."""
    u = build_propagator(net, max_nodes).matrix
    power = u.copy()
    for m in range(2, max_power + 1):
        power = power @ u
        if _proportional(power, u, atol):
            return m
    return None


def state_after(net: Network, psi: StateVector, steps: int) -> list[StateVector]:
    out = []
    for _ in range(steps):
        psi = apply_step(net, psi)
        out.append(psi)
    return out
