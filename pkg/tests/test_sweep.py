import io
import math

import pytest
from scipy import stats

from iotagg import analytic
from iotagg.geometry import CentroidAerial, CentroidTerrestrial, ClusterInterior, RandomPPP
from iotagg.montecarlo import SimConfig
from iotagg.scenario import table1
from iotagg.sweep import (
    CSV_HEADER,
    FIGURE_STRATEGIES,
    PRESETS,
    Axis,
    Discrepancy,
    Metric,
    Mode,
    Row,
    SweepSpec,
    apply_axis,
    discrepancies,
    emit_csv,
    preset,
    run_sweep,
    with_mode,
)

SMALL_SIM = SimConfig(n_realizations=40, devices_per_realization=20, seed=1)


def _csv(rows):
    buf = io.StringIO()
    emit_csv(rows, buf)
    return buf.getvalue()


def test_strategy_labels():
    assert [s.label for s in FIGURE_STRATEGIES] == [
        "random(λ=5)",
        "random(λ=25)",
        "cluster_interior(N=1)",
        "cluster_interior(N=5)",
        "centroid_terrestrial",
        "centroid_aerial(h=100)",
    ]
    assert RandomPPP(2.5).label == "random(λ=2.5)"


@pytest.mark.parametrize("name, count", [("fig3a", 6 * 11 * 2), ("fig3b", 6 * 10 * 2), ("fig4a", 6 * 17), ("fig4b", 6 * 10)])
def test_preset_row_counts(name, count):
    sc, spec, _ = preset(name)
    rows = run_sweep(sc, spec)
    assert len(rows) == count
    assert {r.mode for r in rows} == {Mode.ANALYTIC}


def test_fig3a_preset_contents():
    sc, spec, sim = preset("fig3a")
    assert spec.axis is Axis.PCF_EPSILON
    assert spec.grid == tuple(k / 10 for k in range(11))
    assert spec.strategies == FIGURE_STRATEGIES
    assert spec.outputs == (Metric.POWER, Metric.LIFETIME)
    assert sc.geometry.radius_m == 200.0
    _, spec4, _ = preset("fig4a")
    assert spec4.grid == tuple(float(x) for x in range(0, 81, 5))
    assert spec4.outputs == (Metric.COVERAGE,)
    with pytest.raises(KeyError):
        preset("fig9")


def test_emit_csv_format():
    assert _csv([]) == ",".join(CSV_HEADER) + "\n"
    assert CSV_HEADER == ("axis", "axis_value", "strategy", "metric", "mode", "value", "ci_halfwidth")
    spec = SweepSpec(Axis.CLUSTER_RADIUS, [200.0], [CentroidTerrestrial()], [Metric.POWER])
    rows = run_sweep(table1(), spec)
    text = _csv(rows)
    assert "\r" not in text
    line = text.split("\n")[1].split(",")
    assert line[:5] == ["cluster_radius", "200", "centroid_terrestrial", "power", "analytic"]
    assert line[6] == "0"
    assert float(line[5]) == pytest.approx(rows[0].value, rel=5e-9)
    assert len(line[5].replace(".", "").lstrip("0")) <= 9


def test_emit_csv_to_path(tmp_path):
    spec = SweepSpec(Axis.PCF_EPSILON, [0.0, 1.0], [ClusterInterior(1)], [Metric.LIFETIME])
    rows = run_sweep(table1(), spec)
    path = tmp_path / "out.csv"
    emit_csv(rows, path)
    assert path.read_bytes() == _csv(rows).encode("utf-8")
    with pytest.raises(OSError):
        emit_csv(rows, tmp_path / "missing" / "out.csv")


def test_row_order_and_metric_canonical_order():
    spec = SweepSpec(Axis.PCF_EPSILON, [0.2, 0.4], [RandomPPP(5), CentroidAerial()], [Metric.COVERAGE, Metric.POWER], Mode.BOTH)
    rows = run_sweep(table1(), spec, SMALL_SIM)
    keys = [(r.axis_value, r.strategy, r.metric, r.mode) for r in rows]
    assert keys[:4] == [
        (0.2, "random(λ=5)", Metric.POWER, Mode.ANALYTIC),
        (0.2, "random(λ=5)", Metric.POWER, Mode.MC),
        (0.2, "random(λ=5)", Metric.COVERAGE, Mode.ANALYTIC),
        (0.2, "random(λ=5)", Metric.COVERAGE, Mode.MC),
    ]
    assert len(rows) == 2 * 2 * 2 * 2
    assert all((r.ci_halfwidth == 0) == (r.mode is Mode.ANALYTIC) for r in rows if r.metric is Metric.POWER)


def test_analytic_rows_match_evaluate():
    spec = SweepSpec(Axis.CLUSTER_RADIUS, [100.0, 400.0], [ClusterInterior(1)], [Metric.POWER, Metric.LIFETIME, Metric.COVERAGE])
    rows = run_sweep(table1(), spec)
    res = analytic.evaluate(ClusterInterior(1), table1().with_radius(400.0))
    assert [r.value for r in rows[3:]] == [res.avg_tx_power_w, res.lifetime_years, res.coverage_prob]


def test_apply_axis():
    sc = table1()
    assert apply_axis(Axis.DENSITY, 12.0, sc, RandomPPP(5))[1] == RandomPPP(12.0)
    assert apply_axis(Axis.DENSITY, 12.0, sc, ClusterInterior(2))[1] == ClusterInterior(2)
    assert apply_axis(Axis.N_AGGREGATORS, 4.0, sc, ClusterInterior(2))[1] == ClusterInterior(4)
    sc2, s2 = apply_axis(Axis.ALTITUDE, 50.0, sc, CentroidAerial(100.0))
    assert s2 == CentroidAerial(50.0)
    assert apply_axis(Axis.PENETRATION_DB, 10.0, sc, CentroidTerrestrial())[0].channel.penetration_loss_db == 10.0


@pytest.mark.parametrize(
    "kwargs",
    [
        {"grid": []},
        {"grid": [0.2, 0.2]},
        {"grid": [0.4, 0.2]},
        {"strategies": []},
        {"outputs": []},
        {"axis": Axis.N_AGGREGATORS, "grid": [1.5]},
    ],
)
def test_sweep_spec_invariants(kwargs):
    base = {"axis": Axis.PCF_EPSILON, "grid": [0.1], "strategies": [ClusterInterior(1)], "outputs": [Metric.POWER]}
    base.update(kwargs)
    with pytest.raises(ValueError):
        SweepSpec(**base)


def test_discrepancy_z():
    assert Discrepancy(1.0, "x", Metric.POWER, 1.0, 1.3, 0.1).z == pytest.approx(3.0)
    assert Discrepancy(1.0, "x", Metric.POWER, 1.0, 1.0, 0.0).z == 0.0
    assert Discrepancy(1.0, "x", Metric.POWER, 1.0, 0.9, 0.0).z == -math.inf
    rows = [
        Row(Axis.PCF_EPSILON, 0.1, "a", Metric.POWER, Mode.ANALYTIC, 1.0, 0.0),
        Row(Axis.PCF_EPSILON, 0.1, "a", Metric.POWER, Mode.MC, 1.2, 0.2, 0.1),
        Row(Axis.PCF_EPSILON, 0.2, "a", Metric.POWER, Mode.ANALYTIC, 1.0, 0.0),
    ]
    (d,) = discrepancies(rows)
    assert d.z == pytest.approx(2.0)


def test_same_seed_same_csv(fresh_mc_cache):
    from iotagg import montecarlo

    spec = SweepSpec(Axis.PCF_EPSILON, [0.4], FIGURE_STRATEGIES, [Metric.POWER, Metric.COVERAGE], Mode.MC)
    a = _csv(run_sweep(table1(), spec, SMALL_SIM))
    montecarlo._cached_distances.cache_clear()
    b = _csv(run_sweep(table1(), spec, SMALL_SIM))
    assert a == b


# --- preset self-consistency ---------------------------------------------------------


def _both(name):
    sc, spec, sim = preset(name)
    return discrepancies(run_sweep(sc, with_mode(spec, Mode.BOTH), sim))


@pytest.mark.slow
@pytest.mark.parametrize("name", PRESETS)
def test_preset_both_mode_within_three_std_errors(name):
    """Every analytic/MC pair of a preset, at the preset's own seed."""
    pairs = _both(name)
    bad = [(d.strategy, d.metric.value, d.axis_value, round(d.z, 2)) for d in pairs if abs(d.z) > 3]
    assert not bad


@pytest.mark.slow
@pytest.mark.parametrize("name", PRESETS)
def test_preset_both_mode_familywise(name):
    """Same comparison with a Bonferroni threshold over the preset's pairs,
    restricted to strategies whose distance law is exact (one aggregator per
    cluster or a Poisson field)."""
    pairs = [d for d in _both(name) if d.strategy != "cluster_interior(N=5)"]
    z_crit = stats.norm.isf(0.01 / (2 * len(pairs)))
    worst = max(pairs, key=lambda d: abs(d.z))
    assert abs(worst.z) <= z_crit, (worst, z_crit)
