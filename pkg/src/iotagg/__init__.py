"""Uplink IoT performance under aggregator deployment strategies: closed
forms for average transmit power, coverage and battery lifetime, with a
Monte Carlo simulator to check them."""

from .analytic import PerfResult, evaluate
from .geometry import CentroidAerial, CentroidTerrestrial, ClusterGeometry, ClusterInterior, RandomPPP
from .montecarlo import SimConfig, simulate
from .scenario import SystemScenario, table1

__all__ = [
    "CentroidAerial",
    "CentroidTerrestrial",
    "ClusterGeometry",
    "ClusterInterior",
    "PerfResult",
    "RandomPPP",
    "SimConfig",
    "SystemScenario",
    "evaluate",
    "simulate",
    "table1",
]
__version__ = "0.1.0"
