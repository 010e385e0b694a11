"""Exact classical simulation of the reversible update rule.

A configuration is stored as a single integer of ``2n`` bits: bit ``i`` for
``i < n`` is the target register (previous values), bit ``n + i`` the control
register (current values).  Bit value 1 is spin +1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .netmodel import Action, Network, NetworkError


class HadamardPresent(NetworkError):
    """Classical simulation was asked to run a network with Hadamard gates."""


class PeriodNotFound(RuntimeError):
    def __init__(self, max_steps: int):
        super().__init__(f"no period found within {max_steps} steps")
        self.max_steps = max_steps


@dataclass(frozen=True)
class SpinConfig:
    n: int
    bits: int

    def __post_init__(self) -> None:
        if not 0 <= self.bits < 1 << (2 * self.n):
            raise ValueError(f"bits out of range for n={self.n}")

    @classmethod
    def from_spins(cls, current: Sequence[int], previous: Sequence[int]) -> "SpinConfig":
        """Build from +-1 spin lists for s_t (current) and s_{t-1} (previous)."""
        n = len(current)
        if len(previous) != n:
            raise ValueError("current and previous differ in length")
        bits = 0
        for i, (c, p) in enumerate(zip(current, previous)):
            if c not in (1, -1) or p not in (1, -1):
                raise ValueError("spins must be +1 or -1")
            bits |= (p == 1) << i
            bits |= (c == 1) << (n + i)
        return cls(n, bits)

    @property
    def previous(self) -> tuple[int, ...]:
        return tuple(1 if self.bits >> i & 1 else -1 for i in range(self.n))

    @property
    def current(self) -> tuple[int, ...]:
        return tuple(1 if self.bits >> (self.n + i) & 1 else -1 for i in range(self.n))

    def flip(self, position: int) -> "SpinConfig":
        return SpinConfig(self.n, self.bits ^ (1 << position))


@dataclass(frozen=True)
class CycleInfo:
    transient: int
    period: int


def _require_classical(net: Network) -> None:
    if net.has_hadamard:
        raise HadamardPresent("classical simulation requires a network without Hadamard flags")


def _compile(net: Network) -> list[tuple[int, tuple[int, ...], tuple[bool, ...]]]:
    # (node, control bit positions, flip per input pattern)
    n = net.n
    return [
        (i, tuple(n + j for j in node.inputs), tuple(e is Action.FLIP for e in node.table.entries))
        for i, node in enumerate(net.nodes)
    ]


def _swap_registers(bits: int, n: int) -> int:
    mask = (1 << n) - 1
    return ((bits & mask) << n) | (bits >> n)


def _step_bits(program, n: int, bits: int) -> int:
    for i, controls, flips in program:
        pattern = 0
        for j, c in enumerate(controls):
            pattern |= (bits >> c & 1) << j
        if flips[pattern]:
            bits ^= 1 << i
    return _swap_registers(bits, n)


def step_classical(net: Network, cfg: SpinConfig) -> SpinConfig:
    """One synchronous update: table actions on the targets, then the register swap."""
    _require_classical(net)
    return SpinConfig(net.n, _step_bits(_compile(net), net.n, cfg.bits))


def inverse_step_classical(net: Network, cfg: SpinConfig) -> SpinConfig:
    """Run the circuit backwards: undo the swaps, then re-apply the (self-inverse) gates."""
    _require_classical(net)
    n = net.n
    bits = _swap_registers(cfg.bits, n)
    for i, controls, flips in reversed(_compile(net)):
        pattern = 0
        for j, c in enumerate(controls):
            pattern |= (bits >> c & 1) << j
        if flips[pattern]:
            bits ^= 1 << i
    return SpinConfig(n, bits)


def trajectory(net: Network, cfg: SpinConfig, steps: int) -> list[SpinConfig]:
    _require_classical(net)
    program = _compile(net)
    bits, out = cfg.bits, []
    for _ in range(steps):
        bits = _step_bits(program, net.n, bits)
        out.append(SpinConfig(net.n, bits))
    return out


def find_cycle(net: Network, cfg: SpinConfig, max_steps: int = 1 << 20) -> CycleInfo:
    """Period of the orbit through ``cfg``.

    Reversible dynamics has no transient, so the orbit returns to ``cfg``
    itself and only the start state needs to be remembered.
    """
    _require_classical(net)
    program = _compile(net)
    bits = cfg.bits
    for t in range(1, max_steps + 1):
        bits = _step_bits(program, net.n, bits)
        if bits == cfg.bits:
            return CycleInfo(0, t)
    raise PeriodNotFound(max_steps)


def cycle_lengths(net: Network) -> list[int]:
    """Lengths of all cycles partitioning the ``4**n`` configurations (descending)."""
    _require_classical(net)
    program = _compile(net)
    size = 1 << (2 * net.n)
    seen = np.zeros(size, dtype=bool)
    lengths = []
    for start in range(size):
        if seen[start]:
            continue
        bits, length = start, 0
        while not seen[bits]:
            seen[bits] = True
            bits = _step_bits(program, net.n, bits)
            length += 1
        if bits != start:
            raise RuntimeError("update map is not a permutation")
        lengths.append(length)
    return sorted(lengths, reverse=True)


@dataclass(frozen=True)
class DamagePoint:
    mask: int
    distance: int


def classical_damage_series(
    net: Network, cfg: SpinConfig, flip_node: int, steps: int
) -> list[DamagePoint]:
    """Difference between a trajectory and its copy with target bit ``flip_node`` flipped.

    Each point is taken after a step's swaps; ``mask`` has bit ``i`` set when
    target-register position ``i`` differs.
    """
    _require_classical(net)
    if not 0 <= flip_node < net.n:
        raise ValueError(f"flip_node {flip_node} out of range")
    program = _compile(net)
    mask = (1 << net.n) - 1
    a, b = cfg.bits, cfg.bits ^ (1 << flip_node)
    out = []
    for _ in range(steps):
        a = _step_bits(program, net.n, a)
        b = _step_bits(program, net.n, b)
        diff = (a ^ b) & mask
        out.append(DamagePoint(diff, diff.bit_count()))
    return out


def damage_grid(series: Iterable[DamagePoint], n: int) -> np.ndarray:
    """Stack masks into a ``(steps, n)`` 0/1 array (time down, node across)."""
    rows = [[p.mask >> i & 1 for i in range(n)] for p in series]
    return np.array(rows, dtype=np.uint8).reshape(-1, n)


def rule90_oracle(initial: Sequence[int], steps: int, periodic: bool = True) -> np.ndarray:
    """Rule 90 evolved from ``initial``: ``row[k+1][x] = row[k][x-1] XOR row[k][x+1]``.

    Returns a ``(steps + 1, len(initial))`` grid whose first row is ``initial``.
    With ``periodic`` the row wraps; otherwise cells beyond the edges are 0.
    Read as damage data, ``x`` is time and the row index walks along the
    network against the wiring direction.
    """
    row = np.asarray(initial, dtype=np.uint8) & 1
    grid = [row]
    for _ in range(steps):
        if periodic:
            nxt = np.roll(row, 1) ^ np.roll(row, -1)
        else:
            left = np.concatenate(([0], row[:-1]))
            right = np.concatenate((row[1:], [0]))
            nxt = (left ^ right).astype(np.uint8)
        grid.append(nxt)
        row = nxt
    return np.array(grid, dtype=np.uint8)
