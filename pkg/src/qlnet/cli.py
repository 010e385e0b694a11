"""``qlnet`` command line.

Exit status: 0 on success, 1 on usage errors, 2 when a network or state
violates a precondition of the requested analysis.
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import classical, export, netmodel, pauliframe, statevec
from .data import network_path
from .experiments import EnsembleConfig, result_rows, run_ensemble


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit 2
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _invocation(argv: Sequence[str]) -> str:
    return "qlnet " + shlex.join(argv)


def _load_net(spec: str) -> netmodel.Network:
    if spec.startswith("builtin:"):
        return netmodel.load(network_path(spec.split(":", 1)[1]))
    return netmodel.load(spec)


def _parse_weights(text: str | None) -> dict[str, float] | None:
    if text is None or text == "uniform":
        return None
    if text == "nontrivial":
        return {"COPY": 1.0, "NOT": 1.0}
    weights = {}
    for item in text.split(","):
        key, _, val = item.partition("=")
        weights[key.strip().upper()] = float(val) if val else 1.0
    return weights


def _parse_state(text: str, n: int) -> classical.SpinConfig:
    """Integer label, or a 2n-character bitstring written qubit 0 first."""
    text = text.strip()
    if len(text) == 2 * n and set(text) <= {"0", "1"}:
        return classical.SpinConfig(n, sum(int(c) << q for q, c in enumerate(text)))
    return classical.SpinConfig(n, int(text, 0))


def _state_str(cfg: classical.SpinConfig) -> str:
    return "".join(str(cfg.bits >> q & 1) for q in range(2 * cfg.n))


def _hadamard_flags(net: netmodel.Network, choice: str) -> netmodel.Network:
    if choice == "keep":
        return net
    if choice == "all":
        return net.with_hadamard(True)
    if choice == "none":
        return net.with_hadamard(False)
    flags = [False] * net.n
    for tok in choice.split(","):
        flags[int(tok)] = True
    return net.with_hadamard(flags)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qlnet", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="draw a random K=1 network")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--kinds", default="uniform", help="uniform | nontrivial | KIND=w,...")
    g.add_argument("--hadamard", choices=["none", "all"], default="none")
    g.add_argument("--out", required=True)

    s = sub.add_parser("step", help="iterate the classical update")
    s.add_argument("--net", required=True)
    s.add_argument("--state", required=True)
    s.add_argument("--steps", type=int, default=1)

    c = sub.add_parser("cycle", help="orbit period of a classical state, or all cycle lengths")
    c.add_argument("--net", required=True)
    c.add_argument("--state", help="omit to list every cycle length")
    c.add_argument("--max-steps", type=int, default=1 << 20)

    sp = sub.add_parser("spectrum", help="eigenphases of the one-step propagator")
    sp.add_argument("--net", required=True)
    sp.add_argument("--tol", type=float, default=1e-9)
    sp.add_argument("--lmax", type=int, default=4096)
    sp.add_argument("--out", required=True, help="CSV path")
    sp.add_argument("--svg", help="unit-circle plot path")

    pt = sub.add_parser("perturb", help="Pauli-frame damage series from a single X")
    pt.add_argument("--net", required=True)
    pt.add_argument("--node", type=int, required=True)
    pt.add_argument("--steps", type=int, default=100)
    pt.add_argument("--hadamard", default="keep", help="keep | none | all | i,j,...")
    pt.add_argument("--out", required=True, help="CSV path")
    pt.add_argument("--image", help="pattern image path (.svg or .pgm)")

    e = sub.add_parser("ensemble", help="ensemble-averaged Hamming distance versus size")
    e.add_argument("--config", help="JSON file with EnsembleConfig fields")
    e.add_argument("--sizes", help="comma list or a:b[:step]")
    e.add_argument("--realizations", type=int)
    e.add_argument("--steps", type=int)
    e.add_argument("--seed", type=int)
    e.add_argument("--kinds")
    e.add_argument("--workers", type=int, default=1)
    e.add_argument("--out", required=True)

    r = sub.add_parser("render", help="turn a pattern CSV into SVG or PGM")
    r.add_argument("--csv", required=True)
    r.add_argument("--out", required=True)
    return p


def _parse_sizes(text: str) -> tuple[int, ...]:
    if ":" in text:
        parts = [int(x) for x in text.split(":")]
        lo, hi = parts[0], parts[1]
        step = parts[2] if len(parts) > 2 else 1
        return tuple(range(lo, hi + 1, step))
    return tuple(int(x) for x in text.split(","))


def _write_image(path: str, grid: np.ndarray, comments: list[str]) -> None:
    if path.endswith(".pgm"):
        Path(path).write_text(export.grid_pgm(grid, comments=comments), encoding="utf-8")
    else:
        body = export.grid_svg(grid)
        head = "".join(f"<!-- {c} -->\n" for c in comments)
        Path(path).write_text(head + body, encoding="utf-8")


def _cmd_gen(args, header) -> int:
    if args.n < 1:
        raise UsageError(f"--n must be >= 1, got {args.n}")
    net = netmodel.random_k1_network(args.n, args.seed, _parse_weights(args.kinds), args.hadamard == "all")
    netmodel.save(net, args.out, header)
    print(f"wrote {args.out} ({args.n} nodes)")
    return 0


def _cmd_step(args, header) -> int:
    net = _load_net(args.net)
    cfg = _parse_state(args.state, net.n)
    for t, nxt in enumerate(classical.trajectory(net, cfg, args.steps), start=1):
        print(t, _state_str(nxt))
    return 0


def _cmd_cycle(args, header) -> int:
    net = _load_net(args.net)
    if args.state is None:
        lengths = classical.cycle_lengths(net)
        print("cycle lengths:", ",".join(map(str, lengths)))
        return 0
    info = classical.find_cycle(net, _parse_state(args.state, net.n), args.max_steps)
    print(f"transient {info.transient} period {info.period}")
    return 0


def _cmd_spectrum(args, header) -> int:
    net = _load_net(args.net)
    rep = statevec.spectrum(statevec.build_propagator(net), args.tol, args.lmax)
    rows = [
        (f"{ev.real:.15g}", f"{ev.imag:.15g}", f"{phase:.15g}", mult, root[1] if root else "")
        for ev, phase, mult, root in zip(rep.eigenvalues, rep.phases, rep.multiplicity, rep.roots_of_unity)
    ]
    comments = header + [
        "cycle lengths: " + (",".join(map(str, rep.cycle_lengths)) if rep.cycle_lengths else "n/a"),
        f"min phase gap: {rep.min_gap:.6g}",
    ]
    export.write_csv(args.out, ["re", "im", "phase", "degeneracy", "L"], rows, comments)
    if args.svg:
        head = "".join(f"<!-- {c} -->\n" for c in header)
        Path(args.svg).write_text(head + export.unit_circle_svg(rep.eigenvalues, rep.degeneracies), encoding="utf-8")
    if rep.cycle_lengths:
        print("cycle lengths:", ",".join(map(str, rep.cycle_lengths)))
    irrational = sum(r is None for r in rep.roots_of_unity)
    print(f"{len(rep.phases)} eigenvalues, {len(rep.degeneracies)} distinct, {irrational} not a root of unity with L <= {args.lmax}")
    return 0


def _cmd_perturb(args, header) -> int:
    net = _hadamard_flags(_load_net(args.net), args.hadamard)
    if not 0 <= args.node < net.n:
        raise UsageError(f"--node must be in 0..{net.n - 1}")
    series = pauliframe.damage_series(net, pauliframe.PauliFrame.single(net.n, args.node), args.steps)
    grid = series.grid()
    kind = pauliframe.detect_solitary(series)
    comments = header + [f"pattern: {kind.value}", f"max distance: {max(series.hamming)}"]
    export.write_csv(args.out, ["t", "labels", "distance"], export.pattern_rows(grid), comments)
    if args.image:
        _write_image(args.image, grid, header)
    print(f"max distance {max(series.hamming)}; pattern {kind.value}")
    return 0


def _cmd_ensemble(args, header) -> int:
    fields: dict = {}
    if args.config:
        fields.update(json.loads(Path(args.config).read_text(encoding="utf-8")))
    if args.sizes:
        fields["sizes"] = _parse_sizes(args.sizes)
    for key in ("realizations", "steps", "seed"):
        if getattr(args, key) is not None:
            fields[key] = getattr(args, key)
    if args.kinds:
        fields["function_weights"] = _parse_weights(args.kinds)
    if "sizes" not in fields:
        raise UsageError("ensemble needs --sizes or a config with 'sizes'")
    try:
        cfg = EnsembleConfig(**fields)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    result = run_ensemble(cfg, workers=args.workers)
    rows = result_rows(result)
    cols = ["n", "mode", "mean", "stderr", "timeMax", "realizations", "steps", "seed"]
    comments = header + ["mean: time average over steps, then realization average; timeMax: mean of per-run maxima"]
    export.write_csv(args.out, cols, [[row[c] for c in cols] for row in rows], comments)
    export.write_json(
        Path(args.out).with_suffix(".json"),
        {"invocation": header[0], "config": cfg.to_dict(), "averaging": "time-mean then realization-mean"},
    )
    for row in rows:
        print(f"n={row['n']:3d} {row['mode']:14s} mean={row['mean']:.4f} +- {row['stderr']:.4f}")
    return 0


def _cmd_render(args, header) -> int:
    cols, rows = export.read_csv(args.csv)
    if "labels" not in cols:
        raise UsageError("render expects a pattern CSV with a 'labels' column")
    k = cols.index("labels")
    grid = np.array([[int(c) for c in row[k]] for row in rows], dtype=np.uint8)
    _write_image(args.out, grid, header)
    print(f"wrote {args.out}")
    return 0


COMMANDS = {
    "gen": _cmd_gen,
    "step": _cmd_step,
    "cycle": _cmd_cycle,
    "spectrum": _cmd_spectrum,
    "perturb": _cmd_perturb,
    "ensemble": _cmd_ensemble,
    "render": _cmd_render,
}


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        header = [_invocation(argv)]
        if getattr(args, "seed", None) is not None:
            header.append(f"seed {args.seed}")
        return COMMANDS[args.command](args, header)
    except UsageError as exc:
        print(f"qlnet: usage error: {exc}", file=sys.stderr)
        return 1
    except (netmodel.NetworkError, statevec.DimensionCap, statevec.NotUnitary, classical.PeriodNotFound, FileNotFoundError, ValueError) as exc:
        print(f"qlnet: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
