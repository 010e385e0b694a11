"""Pauli-frame propagation of the difference between two trajectories.

If ``psi' = rho psi`` with ``rho`` a signed Pauli string, then after a
Clifford step ``U`` the trajectories stay related by ``U rho U^dagger``.
For single-input networks the step is built from H, X, controlled-X and
swaps, so ``rho`` can be pushed through gate by gate.  The generalized
Hamming distance is the number of non-identity labels on the target
register once the step's swaps are done.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .netmodel import K1Kind, Network, NetworkError, effective_parent

PAULI_LABELS = "IXYZ"


class UnsupportedGate(NetworkError):
    """The frame engine only handles single-input truth tables."""


@dataclass(frozen=True)
class PauliFrame:
    labels: tuple[str, ...]
    sign: int = 1

    def __post_init__(self) -> None:
        labels = tuple(self.labels)
        if any(lab not in PAULI_LABELS for lab in labels):
            raise ValueError(f"labels must be drawn from {PAULI_LABELS!r}")
        if len(labels) % 2:
            raise ValueError("a frame covers 2n qubits")
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        object.__setattr__(self, "labels", labels)

    @classmethod
    def identity(cls, n: int) -> "PauliFrame":
        return cls(("I",) * (2 * n))

    @classmethod
    def single(cls, n: int, qubit: int, label: str = "X") -> "PauliFrame":
        labels = ["I"] * (2 * n)
        labels[qubit] = label
        return cls(tuple(labels))

    @classmethod
    def from_dict(cls, n: int, ops: dict[int, str], sign: int = 1) -> "PauliFrame":
        labels = ["I"] * (2 * n)
        for q, lab in ops.items():
            labels[q] = lab
        return cls(tuple(labels), sign)

    @property
    def n(self) -> int:
        return len(self.labels) // 2

    @property
    def visible(self) -> tuple[str, ...]:
        return self.labels[: self.n]

    @property
    def hamming(self) -> int:
        return sum(lab != "I" for lab in self.visible)

    def support(self) -> dict[int, str]:
        return {q: lab for q, lab in enumerate(self.labels) if lab != "I"}

    def __str__(self) -> str:
        return ("+" if self.sign > 0 else "-") + "".join(self.labels)

    def _replace(self, updates: dict[int, str], flip: bool = False) -> "PauliFrame":
        labels = list(self.labels)
        for q, lab in updates.items():
            labels[q] = lab
        return PauliFrame(tuple(labels), -self.sign if flip else self.sign)


# H sigma H^dagger
_H_RULE = {"I": ("I", 1), "X": ("Z", 1), "Y": ("Y", -1), "Z": ("X", 1)}

# CX (rho_c (x) rho_t) CX^dagger, entries (sign, control, target)
_CX_RULE: dict[tuple[str, str], tuple[int, str, str]] = {
    ("I", "I"): (1, "I", "I"), ("I", "X"): (1, "I", "X"), ("I", "Y"): (1, "Z", "Y"), ("I", "Z"): (1, "Z", "Z"),
    ("X", "I"): (1, "X", "X"), ("X", "X"): (1, "X", "I"), ("X", "Y"): (1, "Y", "Z"), ("X", "Z"): (-1, "Y", "Y"),
    ("Y", "I"): (1, "Y", "X"), ("Y", "X"): (1, "Y", "I"), ("Y", "Y"): (-1, "X", "Z"), ("Y", "Z"): (1, "X", "Y"),
    ("Z", "I"): (1, "Z", "I"), ("Z", "X"): (1, "Z", "X"), ("Z", "Y"): (1, "I", "Y"), ("Z", "Z"): (1, "I", "Z"),
}


def conjugate_h(frame: PauliFrame, qubit: int) -> PauliFrame:
    lab, s = _H_RULE[frame.labels[qubit]]
    return frame._replace({qubit: lab}, flip=s < 0)


def conjugate_x(frame: PauliFrame, qubit: int) -> PauliFrame:
    """X on ``qubit``: anticommutes with Y and Z there."""
    return frame._replace({}, flip=frame.labels[qubit] in "YZ")


def conjugate_cx(frame: PauliFrame, control: int, target: int, active_on: int = 1) -> PauliFrame:
    """Controlled-X fired by ``control == active_on``.

    The gate fired by 0 is X_c CX X_c, so it maps labels identically and
    differs only in sign.
    """
    if control == target:
        raise ValueError("control and target must differ")
    if active_on == 0:
        frame = conjugate_x(frame, control)
    s, c, t = _CX_RULE[frame.labels[control], frame.labels[target]]
    frame = frame._replace({control: c, target: t}, flip=s < 0)
    if active_on == 0:
        frame = conjugate_x(frame, control)
    return frame


def swap_registers(frame: PauliFrame) -> PauliFrame:
    n = frame.n
    return PauliFrame(frame.labels[n:] + frame.labels[:n], frame.sign)


def _k1_program(net: Network) -> list[tuple[int, int, K1Kind]]:
    if net.max_k > 1:
        raise UnsupportedGate("Pauli-frame propagation needs single-input nodes")
    prog = []
    for i, node in enumerate(net.nodes):
        kind = node.table.k1_kind()
        src = node.inputs[0] if node.inputs else -1
        prog.append((i, src, kind))
    return prog


def step_frame(net: Network, frame: PauliFrame) -> PauliFrame:
    """Push the frame through one update: Hadamards, logic gates, swaps."""
    n = net.n
    if frame.n != n:
        raise ValueError("frame and network sizes differ")
    for i, node in enumerate(net.nodes):
        if node.hadamard:
            frame = conjugate_h(frame, i)
    for i, src, kind in _k1_program(net):
        if kind is K1Kind.COPY:
            frame = conjugate_cx(frame, n + src, i, active_on=1)
        elif kind is K1Kind.NOT:
            frame = conjugate_cx(frame, n + src, i, active_on=0)
        elif kind is K1Kind.CONST_X:
            frame = conjugate_x(frame, i)
    return swap_registers(frame)


@dataclass(frozen=True)
class DistanceSeries:
    """Frames recorded after each step (``frames[0]`` is the seed, not a step)."""

    frames: tuple[PauliFrame, ...]
    parent: tuple[int | None, ...]

    @property
    def n(self) -> int:
        return self.frames[0].n

    @property
    def steps(self) -> list[PauliFrame]:
        return list(self.frames[1:])

    @property
    def hamming(self) -> list[int]:
        return [f.hamming for f in self.frames[1:]]

    @property
    def visible(self) -> list[tuple[str, ...]]:
        return [f.visible for f in self.frames[1:]]

    def grid(self) -> np.ndarray:
        """``(steps, n)`` codes with I=0, X=1, Y=2, Z=3."""
        return np.array(
            [[PAULI_LABELS.index(lab) for lab in row] for row in self.visible], dtype=np.uint8
        ).reshape(-1, self.n)


def damage_series(net: Network, initial: PauliFrame, steps: int) -> DistanceSeries:
    frames = [initial]
    frame = initial
    for _ in range(steps):
        frame = step_frame(net, frame)
        frames.append(frame)
    return DistanceSeries(tuple(frames), tuple(effective_parent(net)))


def frame_period(net: Network, initial: PauliFrame, max_steps: int = 10_000) -> int | None:
    """Smallest ``p`` with the frame (sign included) back at ``initial`` after ``p`` steps.

    Conjugation by a unitary is invertible, so the orbit has no transient.
    """
    frame = initial
    for p in range(1, max_steps + 1):
        frame = step_frame(net, frame)
        if frame == initial:
            return p
    return None


class Solitary(str, enum.Enum):
    LOOP_SOLITON = "LOOP_SOLITON"
    CHAIN_SOLITON = "CHAIN_SOLITON"
    COMPLEX = "COMPLEX"
    STATIC = "STATIC"


WINDOW = 6
MAX_TRANSIENT = 5


def _children(parent: Sequence[int | None]) -> list[list[int]]:
    kids: list[list[int]] = [[] for _ in parent]
    for i, p in enumerate(parent):
        if p is not None:
            kids[p].append(i)
    return kids


def _loop_move(a: dict[int, str], b: dict[int, str], parent) -> bool:
    """One step of the loop soliton, visible part: X@i -> Z@p(i) -> Z@i -> X@p(i)."""
    if len(a) != 1 or len(b) != 1:
        return False
    (qa, la), (qb, lb) = next(iter(a.items())), next(iter(b.items()))
    if la == "X" and lb == "Z":
        return parent[qa] == qb
    if la == "Z" and lb == "Z":
        return parent[qb] == qa
    if la == "Z" and lb == "X":
        # Z@i (second phase) -> X@p(i)
        return parent[qa] == qb
    return False


def _loop_window(frames: Sequence[PauliFrame], parent) -> bool:
    vis = [{q: lab for q, lab in f.support().items() if q < f.n} for f in frames]
    # the pattern is X, Z, Z, X, Z, Z, ... so check both the moves and the phase order
    labs = [next(iter(v.values())) if len(v) == 1 else None for v in vis]
    if None in labs:
        return False
    seq = "".join(labs)
    if seq not in ("XZZXZZ"[k:] + "XZZXZZ"[:k] for k in range(3)):
        return False
    return all(_loop_move(a, b, parent) for a, b in zip(vis, vis[1:]))


def _chain_frame(frame: PauliFrame, parent, kids) -> int | None:
    """Node ``i`` if the frame is X@i, Z@(n+p(i)), X@(n+c(i)); else None."""
    n = frame.n
    sup = frame.support()
    vis = [q for q in sup if q < n]
    if len(vis) != 1 or sup[vis[0]] != "X":
        return None
    i = vis[0]
    p = parent[i]
    if p is None or len(kids[i]) != 1:
        return None
    expect = {i: "X", n + p: "Z", n + kids[i][0]: "X"}
    return i if sup == expect else None


def _chain_window(frames: Sequence[PauliFrame], parent, kids) -> bool:
    nodes = [_chain_frame(f, parent, kids) for f in frames]
    if None in nodes:
        return False
    return all(kids[a] == [b] for a, b in zip(nodes, nodes[1:]))


def _static(series: DistanceSeries) -> bool:
    first = series.frames[0]
    n = first.n
    swapped = PauliFrame(first.labels[n:] + first.labels[:n], first.sign)
    return all(f == first or f == swapped for f in series.frames)


def detect_solitary(series: DistanceSeries) -> Solitary:
    """Classify a frame history by sliding a six-step template window over it.

    STATIC means the frame never moves: every step leaves it as it was or
    with its two registers exchanged, which is all the swaps do to it when
    no gate acts.  The first five steps may be transient.  Afterwards every uncovered
    stretch between template windows must be at most five steps long, which
    admits the short transitions where a chain soliton reflects off an end.
    Chain windows win when both kinds occur, since a chain soliton turns into
    the loop form at the chain's end.
    """
    if len(series.frames) < 2:
        raise ValueError("series has no steps")
    if _static(series):
        return Solitary.STATIC
    steps = series.steps
    if max(series.hamming) > 1:
        return Solitary.COMPLEX
    parent = series.parent
    kids = _children(parent)
    covered = [False] * len(steps)
    saw_chain = saw_loop = False
    for s in range(len(steps) - WINDOW + 1):
        win = steps[s : s + WINDOW]
        hit = False
        if _chain_window(win, parent, kids):
            saw_chain = hit = True
        elif _loop_window(win, parent):
            saw_loop = hit = True
        if hit:
            for k in range(s, s + WINDOW):
                covered[k] = True
    if not (saw_chain or saw_loop):
        return Solitary.COMPLEX
    gap = 0
    for c in covered[MAX_TRANSIENT:]:
        gap = 0 if c else gap + 1
        if gap > MAX_TRANSIENT:
            return Solitary.COMPLEX
    return Solitary.CHAIN_SOLITON if saw_chain else Solitary.LOOP_SOLITON


# ------------------------------------------------------------ batched engine

class BatchFrames:
    """Many independent K=1 networks of equal size pushed forward together.

    Frames are held symplectically: ``x`` and ``z`` bit arrays of shape
    ``(batch, 2n)`` plus a sign bit (Y = x and z both set).  Used for the
    ensemble runs, where the per-gate path above is too slow.
    """

    def __init__(self, inputs: np.ndarray, kinds: np.ndarray, hadamard: np.ndarray):
        self.inputs = np.asarray(inputs, dtype=np.int64)
        self.kinds = np.asarray(kinds, dtype=np.int64)
        self.hadamard = np.asarray(hadamard, dtype=bool)
        self.batch, self.n = self.inputs.shape
        self._rows = np.arange(self.batch)

    @classmethod
    def from_networks(cls, nets: Sequence[Network]) -> "BatchFrames":
        from .netmodel import K1_KINDS

        n = nets[0].n
        if any(net.n != n for net in nets):
            raise ValueError("batched networks must share n")
        inputs = np.array([[nd.inputs[0] for nd in net.nodes] for net in nets])
        kinds = np.array([[K1_KINDS.index(k) for k in net.k1_kinds()] for net in nets])
        had = np.array([[nd.hadamard for nd in net.nodes] for net in nets])
        return cls(inputs, kinds, had)

    def seed(self, qubits: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Single X on ``qubits[b]`` for each batch member."""
        x = np.zeros((self.batch, 2 * self.n), dtype=bool)
        z = np.zeros_like(x)
        x[self._rows, qubits] = True
        return x, z, np.zeros(self.batch, dtype=bool)

    def step(self, x: np.ndarray, z: np.ndarray, sign: np.ndarray) -> None:
        """Advance in place."""
        n, rows = self.n, self._rows
        # Hadamard on flagged targets: swap x/z, Y picks up a sign
        h = self.hadamard
        xt, zt = x[:, :n], z[:, :n]
        sign ^= np.logical_and.reduce((xt, zt, h)).sum(axis=1) % 2 == 1
        new_x = np.where(h, zt, xt)
        new_z = np.where(h, xt, zt)
        x[:, :n], z[:, :n] = new_x, new_z
        for i in range(n):
            kind = self.kinds[:, i]
            c = n + self.inputs[:, i]
            xc, zc = x[rows, c], z[rows, c]
            xti, zti = x[:, i], z[:, i]
            cx = (kind == 2) | (kind == 3)
            neg = kind == 3
            # NOT = X_c CX X_c; X_c flips the sign when z_c is set
            sign ^= neg & zc
            # Aaronson-Gottesman phase rule for CX
            sign ^= cx & xc & zti & ~(xti ^ zc)
            x[:, i] = xti ^ (cx & xc)
            zc_new = zc ^ (cx & zti)
            z[rows, c] = zc_new
            sign ^= neg & zc_new
            # CONST_X flips the sign of Y/Z on the target
            sign ^= (kind == 1) & z[:, i]
        x[:] = np.concatenate((x[:, n:], x[:, :n]), axis=1)
        z[:] = np.concatenate((z[:, n:], z[:, :n]), axis=1)

    @staticmethod
    def hamming(x: np.ndarray, z: np.ndarray, n: int) -> np.ndarray:
        return (x[:, :n] | z[:, :n]).sum(axis=1)

    @staticmethod
    def to_frames(x: np.ndarray, z: np.ndarray, sign: np.ndarray) -> list[PauliFrame]:
        code = x.astype(int) + 2 * z.astype(int)
        lut = "IXZY"
        return [
            PauliFrame(tuple(lut[c] for c in row), -1 if s else 1) for row, s in zip(code, sign)
        ]


def frames_confined(series: DistanceSeries, nodes: Iterable[int]) -> bool:
    """True if no frame touches a qubit outside ``nodes`` (either register)."""
    allowed = set(nodes)
    n = series.n
    return all(q % n in allowed for f in series.frames for q in f.support())
