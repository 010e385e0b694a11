"""Network topology, truth tables, random K=1 ensembles and component analysis.

Qubit layout used throughout the package: positions ``0..n-1`` are the target
register (values from the previous step at the start of an update), positions
``n..2n-1`` are the control register (current values).  In a truth table the
entry index is built from the inputs with input ``j`` as bit ``j`` (lowest
input first); a bit value of 1 is spin +1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np


class NetworkError(ValueError):
    """Invalid network description."""


class NotFunctionalGraph(NetworkError):
    """A node has more than one effective input."""


class Action(enum.IntEnum):
    IDENTITY = 0
    FLIP = 1


class K1Kind(str, enum.Enum):
    CONST_I = "CONST_I"
    CONST_X = "CONST_X"
    COPY = "COPY"
    NOT = "NOT"


K1_KINDS: tuple[K1Kind, ...] = tuple(K1Kind)


class ComponentClass(str, enum.Enum):
    SIMPLE_LOOP = "SIMPLE_LOOP"
    SIMPLE_CHAIN = "SIMPLE_CHAIN"
    LOOP_WITH_TREES = "LOOP_WITH_TREES"
    CHAIN_WITH_TREES = "CHAIN_WITH_TREES"


@dataclass(frozen=True)
class TruthTable:
    """Dense table of ``2**k`` actions indexed by the input bit pattern."""

    k: int
    entries: tuple[Action, ...]

    def __post_init__(self) -> None:
        if self.k < 0:
            raise NetworkError(f"input count must be >= 0, got {self.k}")
        entries = tuple(Action(int(e)) for e in self.entries)
        if len(entries) != 1 << self.k:
            raise NetworkError(
                f"table with k={self.k} needs {1 << self.k} entries, got {len(entries)}"
            )
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_bits(cls, bits: str) -> "TruthTable":
        """Parse a string of 0/1 characters, 1 meaning FLIP."""
        if not bits or any(c not in "01" for c in bits):
            raise NetworkError(f"bad table bitstring {bits!r}")
        k = len(bits).bit_length() - 1
        if 1 << k != len(bits):
            raise NetworkError(f"table length {len(bits)} is not a power of two")
        return cls(k, tuple(Action(int(c)) for c in bits))

    def to_bits(self) -> str:
        return "".join(str(int(e)) for e in self.entries)

    def action(self, pattern: int) -> Action:
        return self.entries[pattern]

    def flip_rows(self) -> list[int]:
        """Input patterns whose action is FLIP (one controlled-X gate each)."""
        return [p for p, e in enumerate(self.entries) if e is Action.FLIP]

    def depends_on(self, j: int) -> bool:
        bit = 1 << j
        return any(
            self.entries[p] != self.entries[p ^ bit] for p in range(len(self.entries)) if not p & bit
        )

    def k1_kind(self) -> K1Kind | None:
        """The single-input kind this table implements, if any."""
        if self.k == 0:
            return K1Kind.CONST_X if self.entries[0] is Action.FLIP else K1Kind.CONST_I
        if self.k != 1:
            return None
        return {
            (Action.IDENTITY, Action.IDENTITY): K1Kind.CONST_I,
            (Action.FLIP, Action.FLIP): K1Kind.CONST_X,
            (Action.IDENTITY, Action.FLIP): K1Kind.COPY,
            (Action.FLIP, Action.IDENTITY): K1Kind.NOT,
        }[self.entries]


def make_k1_function(kind: K1Kind | str) -> TruthTable:
    """Two-entry table for a single-input kind.

    COPY is the controlled-X activated by a control bit of 1; NOT is the one
    activated by 0.  Constants keep both entries so the node still carries
    its (non-effective) input.
    """
    kind = K1Kind(kind)
    I, X = Action.IDENTITY, Action.FLIP
    entries = {
        K1Kind.CONST_I: (I, I),
        K1Kind.CONST_X: (X, X),
        K1Kind.COPY: (I, X),
        K1Kind.NOT: (X, I),
    }[kind]
    return TruthTable(1, entries)


@dataclass(frozen=True)
class Node:
    inputs: tuple[int, ...]
    table: TruthTable
    hadamard: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", tuple(int(j) for j in self.inputs))
        if self.table.k != len(self.inputs):
            raise NetworkError(
                f"table has k={self.table.k} but node has {len(self.inputs)} inputs"
            )


@dataclass(frozen=True)
class Network:
    n: int
    nodes: tuple[Node, ...]

    def __post_init__(self) -> None:
        nodes = tuple(self.nodes)
        object.__setattr__(self, "nodes", nodes)
        if self.n < 1:
            raise NetworkError(f"network needs at least one node, got n={self.n}")
        if len(nodes) != self.n:
            raise NetworkError(f"expected {self.n} nodes, got {len(nodes)}")
        for i, node in enumerate(nodes):
            for j in node.inputs:
                if not 0 <= j < self.n:
                    raise NetworkError(f"node {i} has invalid input {j}")

    @property
    def num_qubits(self) -> int:
        return 2 * self.n

    @property
    def has_hadamard(self) -> bool:
        return any(node.hadamard for node in self.nodes)

    @property
    def max_k(self) -> int:
        return max(node.table.k for node in self.nodes)

    def with_hadamard(self, flags: bool | Iterable[bool]) -> "Network":
        if isinstance(flags, bool):
            flags = [flags] * self.n
        flags = list(flags)
        if len(flags) != self.n:
            raise NetworkError("one hadamard flag per node required")
        return Network(
            self.n,
            tuple(Node(nd.inputs, nd.table, bool(h)) for nd, h in zip(self.nodes, flags)),
        )

    def k1_kinds(self) -> list[K1Kind]:
        kinds = []
        for i, node in enumerate(self.nodes):
            kind = node.table.k1_kind()
            if kind is None:
                raise NetworkError(f"node {i} is not a single-input node (k={node.table.k})")
            kinds.append(kind)
        return kinds


def k1_network(
    inputs: Sequence[int],
    kinds: Sequence[K1Kind | str],
    hadamard: bool | Sequence[bool] = False,
) -> Network:
    """Build a single-input network from an input map and per-node kinds."""
    n = len(inputs)
    if len(kinds) != n:
        raise NetworkError("inputs and kinds differ in length")
    if isinstance(hadamard, bool):
        hadamard = [hadamard] * n
    nodes = tuple(
        Node((int(j),), make_k1_function(kind), bool(h))
        for j, kind, h in zip(inputs, kinds, hadamard)
    )
    return Network(n, nodes)


def loop_network(n: int, kind: K1Kind | str = K1Kind.COPY, hadamard: bool = False) -> Network:
    """Ring in which node ``i`` reads node ``i-1`` (node 0 reads node n-1)."""
    return k1_network([(i - 1) % n for i in range(n)], [kind] * n, hadamard)


def chain_network(
    n: int,
    kind: K1Kind | str = K1Kind.COPY,
    head: K1Kind | str = K1Kind.CONST_I,
    hadamard: bool = False,
) -> Network:
    """Path 0 -> 1 -> ... -> n-1 whose head node 0 has a constant function."""
    inputs = [0] + [i - 1 for i in range(1, n)]
    return k1_network(inputs, [head] + [kind] * (n - 1), hadamard)


def effective_inputs(node: Node) -> list[int]:
    """Inputs the node's table actually depends on (duplicates kept once)."""
    out: list[int] = []
    for j, src in enumerate(node.inputs):
        if node.table.depends_on(j) and src not in out:
            out.append(src)
    return out


@dataclass(frozen=True)
class Component:
    nodes: frozenset[int]
    cls: ComponentClass


@dataclass(frozen=True)
class ComponentReport:
    components: tuple[Component, ...]
    effective_edges: tuple[tuple[int, int], ...]

    def component_of(self, node: int) -> Component:
        for comp in self.components:
            if node in comp.nodes:
                return comp
        raise KeyError(node)

    def sizes(self) -> list[int]:
        return [len(c.nodes) for c in self.components]


def effective_parent(net: Network) -> list[int | None]:
    """Single effective input per node, or None for nodes without one."""
    parent: list[int | None] = []
    for i, node in enumerate(net.nodes):
        eff = effective_inputs(node)
        if len(eff) > 1:
            raise NotFunctionalGraph(f"node {i} has {len(eff)} effective inputs")
        parent.append(eff[0] if eff else None)
    return parent


def decompose(net: Network) -> ComponentReport:
    """Split a K=1 network into weakly connected components of its effective graph."""
    parent = effective_parent(net)
    n = net.n
    edges = tuple((p, i) for i, p in enumerate(parent) if p is not None)

    # union-find over the undirected effective graph
    root = list(range(n))

    def find(a: int) -> int:
        while root[a] != a:
            root[a] = root[root[a]]
            a = root[a]
        return a

    for src, dst in edges:
        ra, rb = find(src), find(dst)
        if ra != rb:
            root[ra] = rb

    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)

    out_deg = [0] * n
    for src, _ in edges:
        out_deg[src] += 1

    components = []
    for members in sorted(groups.values(), key=min):
        has_root = any(parent[i] is None for i in members)
        branched = any(out_deg[i] > 1 for i in members)
        if has_root:
            cls = ComponentClass.CHAIN_WITH_TREES if branched else ComponentClass.SIMPLE_CHAIN
        else:
            # in-degree 1 everywhere: one cycle, and any tree hanging off it forces a branch
            cls = ComponentClass.LOOP_WITH_TREES if branched else ComponentClass.SIMPLE_LOOP
        components.append(Component(frozenset(members), cls))
    return ComponentReport(tuple(components), edges)


def _normalize_weights(weights: Mapping[K1Kind | str, float] | None) -> np.ndarray:
    if weights is None:
        return np.full(len(K1_KINDS), 0.25)
    probs = np.zeros(len(K1_KINDS))
    for key, w in weights.items():
        try:
            idx = K1_KINDS.index(K1Kind(key))
        except ValueError as exc:
            raise NetworkError(f"unknown function kind {key!r}") from exc
        if not np.isfinite(w) or w < 0:
            raise NetworkError(f"weight for {key} must be finite and >= 0, got {w}")
        probs[idx] = w
    total = probs.sum()
    if total <= 0:
        raise NetworkError("function weights sum to zero")
    return probs / total


def random_k1_network(
    n: int,
    seed: int | np.random.SeedSequence | np.random.Generator | None = None,
    function_weights: Mapping[K1Kind | str, float] | None = None,
    hadamard_all: bool = False,
) -> Network:
    """Draw a K=1 network: uniform input over all nodes, kind from ``function_weights``."""
    if n < 1:
        raise NetworkError(f"n must be >= 1, got {n}")
    probs = _normalize_weights(function_weights)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    inputs = rng.integers(0, n, size=n)
    kinds = rng.choice(len(K1_KINDS), size=n, p=probs)
    return k1_network(inputs.tolist(), [K1_KINDS[k] for k in kinds], hadamard_all)


# ---------------------------------------------------------------- file format

FORMAT_HEADER = "qlnet v1"


def dumps(net: Network, comments: Iterable[str] = ()) -> str:
    lines = [f"# {c}" for c in comments]
    lines += [FORMAT_HEADER, f"nodes {net.n}"]
    for i, node in enumerate(net.nodes):
        ins = ",".join(str(j) for j in node.inputs) if node.inputs else "-"
        lines.append(
            f"node {i} inputs {ins} table {node.table.to_bits()} hadamard {int(node.hadamard)}"
        )
    return "\n".join(lines) + "\n"


def loads(text: str) -> Network:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or lines[0] != FORMAT_HEADER:
        raise NetworkError(f"missing '{FORMAT_HEADER}' header")
    parts = lines[1].split() if len(lines) > 1 else []
    if len(parts) != 2 or parts[0] != "nodes":
        raise NetworkError("second line must be 'nodes <n>'")
    n = int(parts[1])
    found: dict[int, Node] = {}
    for ln in lines[2:]:
        tok = ln.split()
        if len(tok) != 8 or tok[0] != "node" or tok[2] != "inputs" or tok[4] != "table" or tok[6] != "hadamard":
            raise NetworkError(f"bad node line: {ln!r}")
        i = int(tok[1])
        if i in found:
            raise NetworkError(f"node {i} defined twice")
        ins = () if tok[3] == "-" else tuple(int(j) for j in tok[3].split(","))
        if tok[7] not in ("0", "1"):
            raise NetworkError(f"hadamard flag must be 0 or 1: {ln!r}")
        found[i] = Node(ins, TruthTable.from_bits(tok[5]), tok[7] == "1")
    if sorted(found) != list(range(n)):
        raise NetworkError(f"expected node lines 0..{n - 1}")
    return Network(n, tuple(found[i] for i in range(n)))


def load(path: str | Path) -> Network:
    return loads(Path(path).read_text(encoding="utf-8"))


def save(net: Network, path: str | Path, comments: Iterable[str] = ()) -> None:
    Path(path).write_text(dumps(net, comments), encoding="utf-8")


def to_dot(net: Network) -> str:
    """Graphviz rendering of the wiring; non-effective inputs are dashed."""
    lines = ["digraph qlnet {"]
    for i, node in enumerate(net.nodes):
        shape = "doublecircle" if node.hadamard else "circle"
        lines.append(f'  {i} [shape={shape}, label="{i}"];')
    for i, node in enumerate(net.nodes):
        eff = set(effective_inputs(node))
        for j in dict.fromkeys(node.inputs):
            style = "" if j in eff else " [style=dashed]"
            lines.append(f"  {j} -> {i}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"
