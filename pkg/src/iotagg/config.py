"""Flat ``section.key = value`` scenario files.

    # comments start with '#'
    preset = fig3a                 # optional base: table1 or a figure preset
    power.epsilon = 0.4
    geometry.radius_m = 200
    sweep.axis = cluster_radius
    sweep.grid = 100:1000:100      # start:stop:step (inclusive) or a comma list
    sweep.strategies = random(5), cluster_interior(1), centroid_aerial(100)
    sweep.outputs = power, lifetime
    sweep.mode = both
    sim.seed = 7

Every key is optional except the sweep axis, grid and strategies when no
figure preset is given. Unknown keys are rejected.
"""

from __future__ import annotations

import dataclasses
import re
from dataclasses import dataclass, fields

from .energy import EnergyProfile
from .geometry import CentroidAerial, CentroidTerrestrial, ClusterGeometry, ClusterInterior, RandomPPP
from .link import ChannelParams, LinkBudgetParams, LosModelParams, OpenLoopConvention, PowerControlParams
from .montecarlo import SimConfig
from .scenario import SystemScenario, table1
from .sweep import PRESETS, Axis, Metric, Mode, SweepSpec, preset


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.key = key
        self.line = line


_SECTIONS = {
    "channel": ChannelParams,
    "power": PowerControlParams,
    "budget": LinkBudgetParams,
    "energy": EnergyProfile,
    "geometry": ClusterGeometry,
    "los": LosModelParams,
    "sim": SimConfig,
}
_SWEEP_KEYS = ("axis", "grid", "strategies", "outputs", "mode")
_INT_FIELDS = {("sim", "n_realizations"), ("sim", "devices_per_realization"), ("sim", "seed"), ("sim", "workers")}
_STR_FIELDS = {("power", "open_loop_convention"), ("sim", "centroid_placement")}

_STRATEGY_RE = re.compile(r"\s*([a-z_]+)\s*(?:\(\s*(?:[^=()]*=)?\s*([^()]*?)\s*\))?\s*(?:,|$)")


@dataclass(frozen=True)
class LoadedConfig:
    scenario: SystemScenario
    sweep: SweepSpec
    sim: SimConfig


def parse_strategies(text: str) -> tuple:
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _STRATEGY_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse strategy list near {text[pos:]!r}")
        name, arg = m.group(1), m.group(2)
        pos = m.end()
        if name == "random":
            if not arg:
                raise ValueError("random(...) needs a density in aggregators/km^2")
            out.append(RandomPPP(float(arg)))
        elif name == "cluster_interior":
            if not arg:
                raise ValueError("cluster_interior(...) needs an aggregator count")
            n = float(arg)
            if n != int(n):
                raise ValueError(f"aggregator count must be an integer, got {arg}")
            out.append(ClusterInterior(int(n)))
        elif name == "centroid_terrestrial":
            if arg:
                raise ValueError("centroid_terrestrial takes no argument")
            out.append(CentroidTerrestrial())
        elif name == "centroid_aerial":
            out.append(CentroidAerial(float(arg)) if arg else CentroidAerial())
        else:
            raise ValueError(f"unknown strategy {name!r}")
    if not out:
        raise ValueError("empty strategy list")
    return tuple(out)


def format_strategy(strategy) -> str:
    if isinstance(strategy, RandomPPP):
        return f"random({strategy.density_km2!r})"
    if isinstance(strategy, ClusterInterior):
        return f"cluster_interior({strategy.count})"
    if isinstance(strategy, CentroidTerrestrial):
        return "centroid_terrestrial"
    if strategy.altitude is None:
        return "centroid_aerial"
    return f"centroid_aerial({strategy.altitude!r})"


def parse_grid(text: str) -> tuple[float, ...]:
    text = text.strip()
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise ValueError("range grid must be start:stop:step with step > 0")
        start, stop, step = parts
        n = int(round((stop - start) / step))
        if n < 0:
            raise ValueError("range grid stop is below start")
        return tuple(round(start + k * step, 12) for k in range(n + 1))
    if not text:
        raise ValueError("sweep grid must not be empty")
    return tuple(float(p) for p in text.split(","))


def _split_list(text: str) -> list[str]:
    return [p.strip() for p in text.split(",") if p.strip()]


def _read_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=lineno)
        key, value = (p.strip() for p in line.split("=", 1))
        yield lineno, key, value


def loads(text: str) -> LoadedConfig:
    entries = {}
    for lineno, key, value in _read_lines(text):
        if key in entries:
            raise ConfigError("duplicate key", key, lineno)
        entries[key] = (lineno, value)

    base_name = entries.pop("preset", (None, "table1"))
    lineno, name = base_name
    if name == "table1":
        scenario, sweep_spec, sim = table1(), None, SimConfig()
    elif name in PRESETS:
        scenario, sweep_spec, sim = preset(name)
    else:
        raise ConfigError(f"unknown preset {name!r}", "preset", lineno)

    overrides: dict[str, dict[str, tuple[int, object]]] = {}
    for key, (lineno, value) in entries.items():
        section, _, name = key.partition(".")
        if section == "sweep":
            if name not in _SWEEP_KEYS:
                raise ConfigError("unknown key", key, lineno)
        elif section in _SECTIONS:
            known = {f.name for f in fields(_SECTIONS[section])}
            if name not in known:
                raise ConfigError("unknown key", key, lineno)
        else:
            raise ConfigError("unknown key", key, lineno)
        overrides.setdefault(section, {})[name] = (lineno, value)

    built = {}
    for section, cls in _SECTIONS.items():
        given = overrides.get(section, {})
        if section == "los":
            current = scenario.los
            if not given and current is None:
                built[section] = None
                continue
        elif section == "sim":
            current = sim
        else:
            current = getattr(scenario, section)
        kwargs = {}
        for name, (lineno, raw) in given.items():
            key = f"{section}.{name}"
            try:
                if (section, name) in _STR_FIELDS:
                    kwargs[name] = raw
                elif (section, name) in _INT_FIELDS:
                    val = float(raw)
                    if val != int(val):
                        raise ValueError("expected an integer")
                    kwargs[name] = int(val)
                else:
                    kwargs[name] = float(raw)
            except ValueError as exc:
                raise ConfigError(f"bad value {raw!r}: {exc}", key, lineno) from None
        try:
            if current is None:
                missing = [n for n in ("gamma1_m", "gamma2_m") if n not in kwargs]
                if missing:
                    raise ConfigError("missing required key", f"los.{missing[0]}")
                built[section] = cls(**kwargs)
            else:
                built[section] = dataclasses.replace(current, **kwargs)
        except ConfigError:
            raise
        except ValueError as exc:
            name, lineno = _blame(str(exc), given) or (None, None)
            raise ConfigError(str(exc), f"{section}.{name}" if name else section, lineno) from None

    try:
        built["power"] = dataclasses.replace(
            built["power"], open_loop_convention=OpenLoopConvention(built["power"].open_loop_convention)
        )
    except ValueError as exc:
        lineno = overrides.get("power", {}).get("open_loop_convention", (None,))[0]
        raise ConfigError(str(exc), "power.open_loop_convention", lineno) from None

    scenario = SystemScenario(
        channel=built["channel"],
        power=built["power"],
        budget=built["budget"],
        energy=built["energy"],
        geometry=built["geometry"],
        los=built["los"],
    )
    sweep_spec = _build_sweep(sweep_spec, overrides.get("sweep", {}))
    return LoadedConfig(scenario, sweep_spec, built["sim"])


def _blame(message: str, given: dict) -> tuple[str, int] | None:
    """Pick the overridden field a validation message refers to."""
    for name, (lineno, _) in given.items():
        if name in message:
            return name, lineno
    if len(given) == 1:
        (name, (lineno, _)), = given.items()
        return name, lineno
    return None


def _build_sweep(base: SweepSpec | None, given: dict) -> SweepSpec:
    values = {}
    if base is not None:
        values = {
            "axis": base.axis,
            "grid": base.grid,
            "strategies": base.strategies,
            "outputs": base.outputs,
            "mode": base.mode,
        }
    parsers = {
        "axis": Axis,
        "grid": parse_grid,
        "strategies": parse_strategies,
        "outputs": lambda t: tuple(Metric(m) for m in _split_list(t)),
        "mode": Mode,
    }
    for name, (lineno, raw) in given.items():
        try:
            values[name] = parsers[name](raw)
        except (ValueError, KeyError) as exc:
            raise ConfigError(str(exc), f"sweep.{name}", lineno) from None
    for name in ("axis", "grid", "strategies"):
        if name not in values:
            raise ConfigError("missing required key", f"sweep.{name}")
    try:
        return SweepSpec(**values)
    except ValueError as exc:
        bad = _blame(str(exc).replace("sweep ", ""), given)
        key, lineno = bad if bad else ("grid", None)
        raise ConfigError(str(exc), f"sweep.{key}", lineno) from None


def load_config(path) -> LoadedConfig:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def dumps(cfg: LoadedConfig) -> str:
    """Effective configuration with every key spelled out; ``loads`` of the
    result reproduces ``cfg`` exactly."""
    lines = []
    sc = cfg.scenario
    for section in ("channel", "power", "budget", "energy", "geometry", "los"):
        obj = getattr(sc, section)
        if obj is None:
            continue
        for f in fields(obj):
            val = getattr(obj, f.name)
            if isinstance(val, OpenLoopConvention):
                val = val.value
            lines.append(f"{section}.{f.name} = {val!r}" if isinstance(val, float) else f"{section}.{f.name} = {val}")
    for f in fields(cfg.sim):
        lines.append(f"sim.{f.name} = {getattr(cfg.sim, f.name)!r}".replace("'", ""))
    sw = cfg.sweep
    lines.append(f"sweep.axis = {sw.axis.value}")
    lines.append("sweep.grid = " + ", ".join(repr(x) for x in sw.grid))
    lines.append("sweep.strategies = " + ", ".join(format_strategy(s) for s in sw.strategies))
    lines.append("sweep.outputs = " + ", ".join(m.value for m in sw.outputs))
    lines.append(f"sweep.mode = {sw.mode.value}")
    return "\n".join(lines) + "\n"
