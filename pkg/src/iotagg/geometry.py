"""Cluster geometry and the four aggregator deployment strategies."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class ClusterGeometry:
    radius_m: float = 200.0
    altitude_m: float = 100.0

    def __post_init__(self):
        if not self.radius_m > 0:
            raise ValueError(f"cluster radius must be > 0, got {self.radius_m}")
        if not self.altitude_m >= 0:
            raise ValueError(f"altitude must be >= 0, got {self.altitude_m}")


def _fmt(x: float) -> str:
    return f"{x:g}"


@dataclass(frozen=True)
class RandomPPP:
    """Terrestrial aggregators forming an HPPP.

    Stored per km^2 (the unit used in configs and labels); ``density`` gives
    aggregators per m^2.
    """

    density_km2: float

    def __post_init__(self):
        if not self.density_km2 > 0 or not math.isfinite(self.density_km2):
            raise ValueError(f"density must be positive and finite, got {self.density_km2}")

    @property
    def density(self) -> float:
        return self.density_km2 * 1e-6

    @property
    def label(self) -> str:
        return f"random(λ={_fmt(self.density_km2)})"

    def exponent(self, ch) -> float:
        return ch.alpha_g


@dataclass(frozen=True)
class ClusterInterior:
    """``count`` aggregators dropped uniformly inside the device cluster."""

    count: int

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 1:
            raise ValueError(f"aggregator count must be an integer >= 1, got {self.count}")
        object.__setattr__(self, "count", int(self.count))

    @property
    def label(self) -> str:
        return f"cluster_interior(N={self.count})"

    def exponent(self, ch) -> float:
        return ch.alpha_g


@dataclass(frozen=True)
class CentroidTerrestrial:
    @property
    def label(self) -> str:
        return "centroid_terrestrial"

    def exponent(self, ch) -> float:
        return ch.alpha_g

    def altitude_for(self, geometry: ClusterGeometry) -> float:
        return 0.0


@dataclass(frozen=True)
class CentroidAerial:
    """UAV hovering above the centroid. ``altitude=None`` defers to the
    scenario geometry."""

    altitude: float | None = None

    def __post_init__(self):
        if self.altitude is not None and not self.altitude >= 0:
            raise ValueError(f"altitude must be >= 0, got {self.altitude}")

    @property
    def label(self) -> str:
        return "centroid_aerial" if self.altitude is None else f"centroid_aerial(h={_fmt(self.altitude)})"

    def exponent(self, ch) -> float:
        return ch.alpha_air

    def altitude_for(self, geometry: ClusterGeometry) -> float:
        return geometry.altitude_m if self.altitude is None else self.altitude


DeploymentStrategy = Union[RandomPPP, ClusterInterior, CentroidTerrestrial, CentroidAerial]
