"""Parameter sweeps over one axis, comparing strategies analytically and/or
by simulation, with CSV output."""

from __future__ import annotations

import csv
import dataclasses
import enum
from dataclasses import dataclass

import numpy as np

from . import analytic, montecarlo
from .geometry import CentroidAerial, CentroidTerrestrial, ClusterInterior, RandomPPP
from .montecarlo import SimConfig
from .scenario import SystemScenario, table1

CSV_HEADER = ("axis", "axis_value", "strategy", "metric", "mode", "value", "ci_halfwidth")


class Axis(str, enum.Enum):
    PCF_EPSILON = "pcf_epsilon"
    CLUSTER_RADIUS = "cluster_radius"
    DENSITY = "density"
    N_AGGREGATORS = "n_aggregators"
    ALTITUDE = "altitude"
    PENETRATION_DB = "penetration_db"


class Metric(str, enum.Enum):
    POWER = "power"
    LIFETIME = "lifetime"
    COVERAGE = "coverage"


class Mode(str, enum.Enum):
    ANALYTIC = "analytic"
    MC = "mc"
    BOTH = "both"


@dataclass(frozen=True)
class SweepSpec:
    axis: Axis
    grid: tuple[float, ...]
    strategies: tuple
    outputs: tuple[Metric, ...] = (Metric.POWER, Metric.LIFETIME, Metric.COVERAGE)
    mode: Mode = Mode.ANALYTIC

    def __post_init__(self):
        object.__setattr__(self, "axis", Axis(self.axis))
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "grid", tuple(float(x) for x in self.grid))
        object.__setattr__(self, "strategies", tuple(self.strategies))
        # canonical metric order keeps row order independent of how they were listed
        outs = {Metric(m) for m in self.outputs}
        object.__setattr__(self, "outputs", tuple(m for m in Metric if m in outs))
        if not self.grid:
            raise ValueError("sweep grid must not be empty")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise ValueError("sweep grid must be strictly increasing")
        if not self.strategies:
            raise ValueError("at least one strategy is required")
        if not self.outputs:
            raise ValueError("at least one output metric is required")
        if self.axis is Axis.N_AGGREGATORS and any(x != int(x) or x < 1 for x in self.grid):
            raise ValueError("n_aggregators grid must hold integers >= 1")


@dataclass(frozen=True)
class Row:
    axis: Axis
    axis_value: float
    strategy: str
    metric: Metric
    mode: Mode
    value: float
    ci_halfwidth: float
    std_error: float = 0.0


def apply_axis(axis: Axis, value: float, scenario: SystemScenario, strategy):
    """Scenario and strategy at one grid point. Axes that do not concern a
    strategy (e.g. density for a centroid) leave it unchanged."""
    if axis is Axis.PCF_EPSILON:
        return scenario.with_epsilon(value), strategy
    if axis is Axis.CLUSTER_RADIUS:
        return scenario.with_radius(value), strategy
    if axis is Axis.PENETRATION_DB:
        return scenario.with_penetration(value), strategy
    if axis is Axis.DENSITY:
        return scenario, RandomPPP(value) if isinstance(strategy, RandomPPP) else strategy
    if axis is Axis.N_AGGREGATORS:
        if isinstance(strategy, ClusterInterior):
            return scenario, ClusterInterior(int(value))
        return scenario, strategy
    if axis is Axis.ALTITUDE:
        if isinstance(strategy, CentroidAerial):
            return scenario.with_altitude(value), CentroidAerial(value)
        return scenario.with_altitude(value), strategy
    raise ValueError(f"unknown axis {axis!r}")


def run_sweep(scenario: SystemScenario, spec: SweepSpec, sim: SimConfig | None = None) -> list[Row]:
    """Rows ordered by grid value, then strategy, metric and mode."""
    sim = sim or SimConfig()
    modes = [Mode.ANALYTIC, Mode.MC] if spec.mode is Mode.BOTH else [spec.mode]
    rows = []
    for x in spec.grid:
        for base in spec.strategies:
            sc, strategy = apply_axis(spec.axis, x, scenario, base)
            if isinstance(strategy, CentroidAerial) and strategy.altitude is None:
                # pin the altitude so the row label carries it
                strategy = CentroidAerial(sc.geometry.altitude_m)
            results = {}
            if Mode.ANALYTIC in modes:
                results[Mode.ANALYTIC] = analytic.evaluate(strategy, sc)
            if Mode.MC in modes:
                results[Mode.MC] = montecarlo.simulate(strategy, sc, sim).as_perf(sc.energy)
            for metric in spec.outputs:
                for mode in modes:
                    res = results[mode]
                    rows.append(
                        Row(
                            axis=spec.axis,
                            axis_value=x,
                            strategy=strategy.label,
                            metric=metric,
                            mode=mode,
                            value=res.value(metric.value),
                            ci_halfwidth=res.ci_halfwidth(metric.value),
                            std_error=res.std_error(metric.value),
                        )
                    )
    return rows


@dataclass(frozen=True)
class Discrepancy:
    axis_value: float
    strategy: str
    metric: Metric
    analytic: float
    mc: float
    std_error: float

    @property
    def z(self) -> float:
        diff = self.mc - self.analytic
        if self.std_error == 0:
            return 0.0 if diff == 0 else float(np.copysign(np.inf, diff))
        return diff / self.std_error


def discrepancies(rows: list[Row]) -> list[Discrepancy]:
    """Pair analytic and MC rows of a BOTH-mode sweep."""
    by_key = {}
    for r in rows:
        by_key.setdefault((r.axis_value, r.strategy, r.metric), {})[r.mode] = r
    out = []
    for (x, label, metric), pair in by_key.items():
        if Mode.ANALYTIC in pair and Mode.MC in pair:
            out.append(
                Discrepancy(
                    x, label, metric, pair[Mode.ANALYTIC].value, pair[Mode.MC].value,
                    pair[Mode.MC].std_error,
                )
            )
    return out


def _num(x: float) -> str:
    return f"{x:.9g}"


def emit_csv(rows: list[Row], destination) -> None:
    """Write rows to a path or text stream (UTF-8, LF line endings)."""
    if hasattr(destination, "write"):
        _write(rows, destination)
        return
    with open(destination, "w", encoding="utf-8", newline="") as fh:
        _write(rows, fh)


def _write(rows, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow(
            [r.axis.value, _num(r.axis_value), r.strategy, r.metric.value, r.mode.value,
             _num(r.value), _num(r.ci_halfwidth)]
        )


# --- presets ----------------------------------------------------------------------

FIGURE_STRATEGIES = (
    RandomPPP(5.0),
    RandomPPP(25.0),
    ClusterInterior(1),
    ClusterInterior(5),
    CentroidTerrestrial(),
    CentroidAerial(100.0),
)

RADIUS_GRID = tuple(float(r) for r in range(100, 1001, 100))


def _frange(start: int, stop: int, step: int, scale: float = 1.0) -> tuple[float, ...]:
    return tuple(round(k * scale, 12) for k in range(start, stop + 1, step))


def preset(name: str) -> tuple[SystemScenario, SweepSpec, SimConfig]:
    base = table1()
    sim = SimConfig(n_realizations=1000, devices_per_realization=100, seed=0)
    power_life = (Metric.POWER, Metric.LIFETIME)
    if name == "fig3a":
        spec = SweepSpec(Axis.PCF_EPSILON, _frange(0, 10, 1, 0.1), FIGURE_STRATEGIES, power_life)
        return base.with_radius(200.0), spec, sim
    if name == "fig3b":
        spec = SweepSpec(Axis.CLUSTER_RADIUS, RADIUS_GRID, FIGURE_STRATEGIES, power_life)
        return base.with_epsilon(0.4), spec, sim
    if name == "fig4a":
        spec = SweepSpec(
            Axis.PENETRATION_DB, _frange(0, 80, 5), FIGURE_STRATEGIES, (Metric.COVERAGE,)
        )
        return base.with_radius(200.0), spec, sim
    if name == "fig4b":
        spec = SweepSpec(Axis.CLUSTER_RADIUS, RADIUS_GRID, FIGURE_STRATEGIES, (Metric.COVERAGE,))
        return base.with_penetration(25.0), spec, sim
    raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")


PRESETS = ("fig3a", "fig3b", "fig4a", "fig4b")


def with_mode(spec: SweepSpec, mode: Mode) -> SweepSpec:
    return dataclasses.replace(spec, mode=Mode(mode))
