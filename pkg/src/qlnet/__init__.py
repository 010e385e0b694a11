"""Reversible Boolean networks, their Clifford-extended quantum versions, and
Pauli-frame damage spreading."""

from .classical import SpinConfig, classical_damage_series, cycle_lengths, find_cycle, step_classical
from .netmodel import (
    K1Kind,
    Network,
    Node,
    TruthTable,
    chain_network,
    decompose,
    k1_network,
    loop_network,
    random_k1_network,
)
from .pauliframe import PauliFrame, damage_series, detect_solitary, frame_period, step_frame
from .statevec import StateVector, apply_step, build_propagator, spectrum

__version__ = "0.1.0"

__all__ = [
    "SpinConfig",
    "classical_damage_series",
    "cycle_lengths",
    "find_cycle",
    "step_classical",
    "K1Kind",
    "Network",
    "Node",
    "TruthTable",
    "chain_network",
    "decompose",
    "k1_network",
    "loop_network",
    "random_k1_network",
    "PauliFrame",
    "damage_series",
    "detect_solitary",
    "frame_period",
    "step_frame",
    "StateVector",
    "apply_step",
    "build_propagator",
    "spectrum",
]
