import math

import numpy as np
import pytest

from qlnet import netmodel
from qlnet.experiments import (
    EnsembleConfig,
    Mode,
    component_stats,
    draw_realization,
    hamming_traces,
    result_rows,
    run_ensemble,
)
from qlnet.netmodel import ComponentClass
from qlnet.pauliframe import PauliFrame, damage_series


def test_config_validation():
    with pytest.raises(ValueError):
        EnsembleConfig(sizes=())
    with pytest.raises(ValueError):
        EnsembleConfig(sizes=(3,), realizations=0)
    with pytest.raises(ValueError):
        EnsembleConfig(sizes=(0,))
    cfg = EnsembleConfig(sizes=[4, 5], modes=["CLASSICAL"])
    assert cfg.sizes == (4, 5) and cfg.modes == (Mode.CLASSICAL,)
    assert cfg.to_dict()["modes"] == ["CLASSICAL"]


def test_draw_is_deterministic():
    a = draw_realization(7, 3, 11)
    assert a == draw_realization(7, 3, 11)
    assert a != draw_realization(7, 3, 12)


def test_ensemble_deterministic_and_worker_independent():
    cfg = EnsembleConfig(sizes=(3, 5, 6), realizations=40, steps=30, seed=9)
    a = run_ensemble(cfg)
    b = run_ensemble(cfg, workers=2)
    assert result_rows(a) == result_rows(b)


def test_single_const_node_classical():
    # one CONST_I node: the X bounces between registers, visible every other step
    cfg = EnsembleConfig(sizes=(1,), realizations=5, steps=10, function_weights={"CONST_I": 1})
    res = run_ensemble(cfg)
    assert res.get(1, "CLASSICAL").mean == 0.5
    assert res.get(1, Mode.CLASSICAL).time_max == 1.0


def test_matches_direct_recomputation():
    cfg = EnsembleConfig(sizes=(4,), realizations=30, steps=25, seed=2)
    res = run_ensemble(cfg)
    for mode in cfg.modes:
        per = []
        for r in range(cfg.realizations):
            net, site = draw_realization(4, cfg.seed, r)
            net = net.with_hadamard(mode is Mode.QUANTUM_ALL_H)
            series = damage_series(net, PauliFrame.single(4, site), cfg.steps)
            per.append(np.mean(series.hamming))
        got = res.get(4, mode)
        np.testing.assert_allclose(got.per_realization, per, rtol=0, atol=1e-12)
        assert math.isclose(got.mean, float(np.mean(per)), rel_tol=1e-12)
        assert math.isclose(got.stderr, float(np.std(per, ddof=1) / np.sqrt(len(per))), rel_tol=1e-9)


def test_hamming_traces_shape():
    nets = [netmodel.loop_network(5, "COPY")] * 3
    out = hamming_traces(nets, [0, 1, 2], Mode.QUANTUM_ALL_H, 12)
    assert out.shape == (3, 12)
    assert out.max() == 1


def test_get_missing():
    res = run_ensemble(EnsembleConfig(sizes=(2,), realizations=2, steps=2, modes=("CLASSICAL",)))
    with pytest.raises(KeyError):
        res.get(2, "QUANTUM_ALL_H")


def test_component_stats():
    cfg = EnsembleConfig(sizes=(6,), realizations=200, seed=4)
    stats = component_stats(cfg)[6]
    assert sum(s * c for s, c in stats.size_histogram.items()) == 6 * 200
    assert stats.simple_fraction(1) == 1.0
    assert math.isnan(stats.simple_fraction(99))
    # larger components are more often branched
    big = [s for s in stats.class_by_size if s >= 4]
    assert any(
        stats.class_by_size[s][ComponentClass.LOOP_WITH_TREES] + stats.class_by_size[s][ComponentClass.CHAIN_WITH_TREES]
        for s in big
    )
