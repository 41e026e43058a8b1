import dataclasses
import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iotagg import analytic, montecarlo
from iotagg.geometry import CentroidAerial, CentroidTerrestrial, ClusterGeometry, ClusterInterior, RandomPPP
from iotagg.montecarlo import (
    McEstimate,
    SimConfig,
    SimulationResourceError,
    centroid_of,
    hppp_window_radius,
    realization_rng,
    sample_distances,
    sample_hppp,
    sample_uniform_disk,
    simulate,
    write_raw_samples,
)
from iotagg.scenario import table1

SC = table1()


def test_uniform_disk_moments():
    pts = sample_uniform_disk(200.0, 1_000_000, np.random.default_rng(1))
    r = np.hypot(pts[:, 0], pts[:, 1])
    assert r.max() <= 200.0
    # E[r] = 2R/3, sd = R/sqrt(18)
    assert abs(r.mean() - 400.0 / 3) < 3 * (200.0 / math.sqrt(18)) / 1000
    p = np.mean(r <= 100.0)
    assert abs(p - 0.25) < 3 * math.sqrt(0.25 * 0.75 / r.size)
    assert abs(pts[:, 0].mean()) < 3 * 100.0 / 1000
    with pytest.raises(ValueError):
        sample_uniform_disk(0.0, 3, np.random.default_rng(0))


def test_hppp_count_and_uniformity():
    rng = np.random.default_rng(2)
    lam, w = 25e-6, 300.0
    counts = np.array([len(sample_hppp(lam, w, rng)) for _ in range(4000)])
    mean = math.pi * lam * w * w
    assert abs(counts.mean() - mean) < 3 * math.sqrt(mean / counts.size)
    assert abs(counts.var(ddof=1) / mean - 1) < 0.1
    pts = np.vstack([sample_hppp(lam, w, rng) for _ in range(2000)])
    r = np.hypot(pts[:, 0], pts[:, 1])
    assert r.max() <= w
    p = np.mean(r <= w / 2)
    assert abs(p - 0.25) < 3 * math.sqrt(0.25 * 0.75 / r.size)


def test_hppp_resource_guard():
    with pytest.raises(SimulationResourceError):
        sample_hppp(1.0, 1e5, np.random.default_rng(0))
    with pytest.raises(ValueError):
        sample_hppp(0.0, 10.0, np.random.default_rng(0))


def test_hppp_window_nesting():
    # the same stream in a larger window only appends points
    small = sample_hppp(25e-6, 300.0, realization_rng(9, 4))
    large = sample_hppp(25e-6, 600.0, realization_rng(9, 4))
    assert np.array_equal(large[: len(small)], small)


def test_empty_window_saturates_and_is_uncovered(fresh_mc_cache, monkeypatch):
    # an empty window has probability < exp(-9) by construction, so force it
    monkeypatch.setattr(montecarlo, "sample_hppp", lambda lam, w, rng: np.empty((0, 2)))
    sim = SimConfig(n_realizations=5, devices_per_realization=4, seed=3)
    sc = dataclasses.replace(SC, geometry=ClusterGeometry(50.0))
    res = simulate(RandomPPP(5.0), sc, sim)
    empty = ~np.isfinite(res.distance_samples)
    assert empty.all()
    assert np.all(res.tx_power_w[empty] == sc.power.p_max_w)
    assert not res.covered[empty].any()


def test_centroid_of():
    assert np.array_equal(centroid_of([[1.0, 2.0]]), [1.0, 2.0])
    assert np.allclose(centroid_of([[0, 0], [2, 0], [0, 2], [2, 2]]), [1.0, 1.0])
    with pytest.raises(ValueError):
        centroid_of(np.empty((0, 2)))


def test_centroid_minimizes_mean_squared_distance():
    pts = sample_uniform_disk(10.0, 30, np.random.default_rng(5))
    c = centroid_of(pts)
    grid = np.linspace(-3.0, 3.0, 21)
    best = min(
        (np.sum((pts - [c[0] + a, c[1] + b]) ** 2), a, b) for a in grid for b in grid
    )
    assert best[1:] == (0.0, 0.0)


def test_window_radius():
    assert hppp_window_radius(1 / math.pi, 10.0, 5.0) == pytest.approx(15.0)


@pytest.mark.parametrize("strategy", [RandomPPP(5.0), ClusterInterior(3), CentroidTerrestrial(), CentroidAerial()])
def test_determinism_and_worker_invariance(strategy, fresh_mc_cache):
    sim = SimConfig(n_realizations=600, devices_per_realization=20, seed=42)
    a = sample_distances(strategy, SC.geometry, sim).copy()
    montecarlo._cached_distances.cache_clear()
    b = sample_distances(strategy, SC.geometry, sim).copy()
    montecarlo._cached_distances.cache_clear()
    c = sample_distances(strategy, SC.geometry, dataclasses.replace(sim, workers=3)).copy()
    assert np.array_equal(a, b)
    assert np.array_equal(a, c)
    other = sample_distances(strategy, SC.geometry, dataclasses.replace(sim, seed=43))
    if not isinstance(strategy, CentroidAerial | CentroidTerrestrial):
        assert not np.array_equal(a, other)


def test_window_margin_is_immaterial(fresh_mc_cache):
    sim = SimConfig(n_realizations=1000, devices_per_realization=100, seed=8)
    a = simulate(RandomPPP(5.0), SC, sim).avg_ptx
    b = simulate(RandomPPP(5.0), SC, dataclasses.replace(sim, window_margin_sigma=10.0)).avg_ptx
    assert abs(a.mean - b.mean) < a.std_error


def test_avg_ptx_bounds_and_saturation(fresh_mc_cache):
    sim = SimConfig(n_realizations=200, devices_per_realization=50, seed=1)
    lo = SC.energy.p_cp_w + SC.power.p_o_w / SC.energy.eta
    hi = SC.energy.p_cp_w + SC.power.p_max_w / SC.energy.eta
    for s in (RandomPPP(5.0), ClusterInterior(1), CentroidTerrestrial(), CentroidAerial()):
        est = simulate(s, SC, sim).avg_ptx
        assert lo <= est.mean <= hi
    sat = SC.with_epsilon(1.0)
    for s in (RandomPPP(25.0), ClusterInterior(5), CentroidAerial()):
        est = simulate(s, sat, sim).avg_ptx
        assert abs(est.mean - hi) <= est.std_error
        assert abs(est.mean - analytic.evaluate(s, sat).avg_tx_power_w) <= 3 * est.std_error


def test_eps_zero_has_zero_power_error(fresh_mc_cache):
    sim = SimConfig(n_realizations=20, devices_per_realization=10, seed=1)
    est = simulate(ClusterInterior(2), SC.with_epsilon(0.0), sim).avg_ptx
    assert est.std_error < 1e-15
    assert est.mean == pytest.approx(SC.energy.p_cp_w + SC.power.p_o_w / SC.energy.eta)


def test_se_floor():
    flat = np.full((10, 10), 0.5)
    est = montecarlo._estimate(flat, 2.0)
    assert est.mean == 0.5
    assert est.std_error == pytest.approx(0.02)
    noisy = np.random.default_rng(0).random((50, 20))
    est = montecarlo._estimate(noisy, 1.0)
    batch_se = noisy.mean(axis=1).std(ddof=1) / math.sqrt(50)
    assert est.std_error == pytest.approx(batch_se, rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**64 - 1), index=st.integers(0, 2**32))
def test_realization_streams_reproducible(seed, index):
    a = realization_rng(seed, index).random(4)
    b = realization_rng(seed, index).random(4)
    assert np.array_equal(a, b)


def test_write_raw_samples(fresh_mc_cache):
    sim = SimConfig(n_realizations=3, devices_per_realization=2, seed=0)
    res = simulate(ClusterInterior(2), SC, sim)
    buf = io.StringIO()
    write_raw_samples(res, ClusterInterior(2), buf)
    lines = buf.getvalue().split("\n")
    assert lines[0] == "realization,strategy,distance_m,tx_power_w,covered"
    assert len(lines) == 1 + 6 + 1 and lines[-1] == ""
    assert lines[1].startswith("0,")
    assert lines[6].startswith("2,")


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n_realizations": 0},
        {"devices_per_realization": 0},
        {"seed": -1},
        {"window_margin_sigma": 2.0},
        {"workers": 0},
        {"centroid_placement": "median"},
        {"centroid_placement": "empirical", "devices_per_realization": 1},
    ],
)
def test_sim_config_invariants(kwargs):
    with pytest.raises(ValueError):
        SimConfig(**kwargs)


def test_mc_estimate_invariants():
    with pytest.raises(ValueError):
        McEstimate(1.0, -1.0, 3)
    with pytest.raises(ValueError):
        McEstimate(1.0, 0.0, 0)


def test_empirical_centroid_close_to_expected(fresh_mc_cache):
    sim = SimConfig(n_realizations=400, devices_per_realization=100, seed=6, centroid_placement="empirical")
    mc = simulate(CentroidTerrestrial(), SC, sim).as_perf(SC.energy)
    ana = analytic.evaluate(CentroidTerrestrial(), SC)
    # with 100 devices the drawn centroid wanders ~R/10 from the center
    assert mc.avg_tx_power_w == pytest.approx(ana.avg_tx_power_w, rel=0.02)
