"""Ensemble studies over random K=1 networks.

Every realization draws its own generator from ``SeedSequence(seed,
spawn_key=(n, r))``, so results do not depend on batching or worker count.
Classical and quantum modes reuse the same networks and perturbation sites.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .netmodel import ComponentClass, Network, decompose, random_k1_network
from .pauliframe import BatchFrames


class Mode(str, enum.Enum):
    CLASSICAL = "CLASSICAL"
    QUANTUM_ALL_H = "QUANTUM_ALL_H"


@dataclass(frozen=True)
class EnsembleConfig:
    sizes: tuple[int, ...]
    realizations: int = 1000
    steps: int = 200
    seed: int = 0
    modes: tuple[Mode, ...] = (Mode.CLASSICAL, Mode.QUANTUM_ALL_H)
    function_weights: Mapping[str, float] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "sizes", tuple(int(n) for n in self.sizes))
        object.__setattr__(self, "modes", tuple(Mode(m) for m in self.modes))
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if not self.sizes or min(self.sizes) < 1:
            raise ValueError("sizes must be positive")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["modes"] = [m.value for m in self.modes]
        d["sizes"] = list(self.sizes)
        d["function_weights"] = dict(self.function_weights) if self.function_weights else None
        return d


@dataclass
class SizeResult:
    n: int
    mode: Mode
    mean: float
    stderr: float
    time_max: float
    per_realization: np.ndarray = field(repr=False)
    component_sizes: Counter = field(default_factory=Counter, repr=False)


@dataclass
class EnsembleResult:
    config: EnsembleConfig
    per_size: list[SizeResult]

    def get(self, n: int, mode: Mode | str) -> SizeResult:
        mode = Mode(mode)
        for r in self.per_size:
            if r.n == n and r.mode is mode:
                return r
        raise KeyError((n, mode))


def realization_rng(seed: int, n: int, r: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(n, r)))


def draw_realization(
    n: int, seed: int, r: int, function_weights: Mapping[str, float] | None = None
) -> tuple[Network, int]:
    """Network and perturbed node for realization ``r`` at size ``n``."""
    rng = realization_rng(seed, n, r)
    net = random_k1_network(n, rng, function_weights)
    return net, int(rng.integers(n))


def hamming_traces(
    nets: Sequence[Network], sites: Sequence[int], mode: Mode, steps: int
) -> np.ndarray:
    """``(len(nets), steps)`` Hamming distances after each step, single X on each site's target."""
    had = mode is Mode.QUANTUM_ALL_H
    nets = [net.with_hadamard(had) for net in nets]
    engine = BatchFrames.from_networks(nets)
    x, z, sign = engine.seed(np.asarray(sites))
    out = np.empty((len(nets), steps), dtype=np.int64)
    for t in range(steps):
        engine.step(x, z, sign)
        out[:, t] = engine.hamming(x, z, engine.n)
    return out


def _fmean(values: np.ndarray) -> float:
    return math.fsum(values.tolist()) / len(values)


def _stderr(values: np.ndarray) -> float:
    if len(values) < 2:
        return 0.0
    m = _fmean(values)
    var = math.fsum(((values - m) ** 2).tolist()) / (len(values) - 1)
    return math.sqrt(var / len(values))


def _run_size(cfg: EnsembleConfig, n: int) -> list[SizeResult]:
    draws = [draw_realization(n, cfg.seed, r, cfg.function_weights) for r in range(cfg.realizations)]
    nets = [d[0] for d in draws]
    sites = [d[1] for d in draws]
    sizes: Counter = Counter()
    for net in nets:
        sizes.update(decompose(net).sizes())
    results = []
    for mode in cfg.modes:
        traces = hamming_traces(nets, sites, mode, cfg.steps)
        time_mean = traces.mean(axis=1)
        time_max = traces.max(axis=1).astype(float)
        results.append(
            SizeResult(
                n=n,
                mode=mode,
                mean=_fmean(time_mean),
                stderr=_stderr(time_mean),
                time_max=_fmean(time_max),
                per_realization=time_mean,
                component_sizes=sizes,
            )
        )
    return results


def run_ensemble(cfg: EnsembleConfig, workers: int = 1) -> EnsembleResult:
    """Time-averaged Hamming distance per size and mode, then averaged over realizations."""
    if workers > 1 and len(cfg.sizes) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_size, [cfg] * len(cfg.sizes), cfg.sizes))
    else:
        chunks = [_run_size(cfg, n) for n in cfg.sizes]
    return EnsembleResult(cfg, [r for chunk in chunks for r in chunk])


@dataclass
class ComponentStats:
    size_histogram: Counter
    class_by_size: dict[int, Counter]

    def simple_fraction(self, size: int) -> float:
        counts = self.class_by_size.get(size, Counter())
        total = sum(counts.values())
        if not total:
            return math.nan
        simple = counts[ComponentClass.SIMPLE_LOOP] + counts[ComponentClass.SIMPLE_CHAIN]
        return simple / total


def component_stats(cfg: EnsembleConfig) -> dict[int, ComponentStats]:
    """Component sizes and classes over the ensemble, keyed by network size."""
    out = {}
    for n in cfg.sizes:
        hist: Counter = Counter()
        by_size: dict[int, Counter] = {}
        for r in range(cfg.realizations):
            net, _ = draw_realization(n, cfg.seed, r, cfg.function_weights)
            for comp in decompose(net).components:
                size = len(comp.nodes)
                hist[size] += 1
                by_size.setdefault(size, Counter())[comp.cls] += 1
        out[n] = ComponentStats(hist, by_size)
    return out


def result_rows(result: EnsembleResult) -> list[dict]:
    cfg = result.config
    return [
        {
            "n": r.n,
            "mode": r.mode.value,
            "mean": r.mean,
            "stderr": r.stderr,
            "timeMax": r.time_max,
            "realizations": cfg.realizations,
            "steps": cfg.steps,
            "seed": cfg.seed,
        }
        for r in result.per_size
    ]

