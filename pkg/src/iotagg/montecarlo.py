"""Seeded Monte Carlo simulator used as the independent check of the closed
forms.

Every realization draws from its own counter-based Philox stream keyed by
(seed, realization index), so results are bit-identical regardless of how
realizations are split across worker threads.
"""

from __future__ import annotations

import csv
import functools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import energy
from .analytic import PerfResult, Source
from .geometry import CentroidAerial, CentroidTerrestrial, ClusterGeometry, ClusterInterior, RandomPPP
from .link import mcl_to_pathloss_threshold, path_loss, tx_power
from .scenario import SystemScenario

MAX_EXPECTED_POINTS = 1e8
_CHUNK = 256
_HPPP_BATCH = 64


class SimulationResourceError(RuntimeError):
    pass


@dataclass(frozen=True)
class SimConfig:
    n_realizations: int = 1000
    devices_per_realization: int = 100
    seed: int = 0
    window_margin_sigma: float = 5.0
    workers: int = 1
    # "expected": aggregator at the cluster center, the minimizer of the
    # expected squared distance; "empirical": centroid of the drawn devices
    centroid_placement: str = "expected"

    def __post_init__(self):
        if int(self.n_realizations) != self.n_realizations or self.n_realizations < 1:
            raise ValueError("n_realizations must be an integer >= 1")
        if int(self.devices_per_realization) != self.devices_per_realization or (
            self.devices_per_realization < 1
        ):
            raise ValueError("devices_per_realization must be an integer >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not self.window_margin_sigma >= 3:
            raise ValueError("window_margin_sigma must be >= 3")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.centroid_placement not in ("expected", "empirical"):
            raise ValueError("centroid_placement must be 'expected' or 'empirical'")
        if self.centroid_placement == "empirical" and self.devices_per_realization < 2:
            raise ValueError("empirical centroid placement needs >= 2 devices per realization")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n: int

    def __post_init__(self):
        if not self.std_error >= 0:
            raise ValueError("std_error must be >= 0")
        if self.n < 1:
            raise ValueError("n must be >= 1")


@dataclass(frozen=True)
class SimResult:
    avg_ptx: McEstimate
    coverage: McEstimate
    distance_samples: np.ndarray
    tx_power_w: np.ndarray
    covered: np.ndarray
    realization: np.ndarray

    def as_perf(self, ep: energy.EnergyProfile) -> PerfResult:
        """Fold the estimates into a PerfResult; the lifetime error is
        propagated from the power error to first order."""
        p = self.avg_ptx.mean
        return PerfResult(
            avg_tx_power_w=p,
            coverage_prob=self.coverage.mean,
            lifetime_years=energy.lifetime_from_consumption(p, ep),
            source=Source.MONTE_CARLO,
            power_se=self.avg_ptx.std_error,
            coverage_se=self.coverage.std_error,
            lifetime_se=energy.lifetime_sensitivity(p, ep) * self.avg_ptx.std_error,
        )


def realization_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.array([seed, index], dtype=np.uint64)))


def sample_uniform_disk(R: float, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` i.i.d. uniform points in the disk of radius R, shape (count, 2)."""
    if not R > 0:
        raise ValueError(f"disk radius must be > 0, got {R}")
    u = rng.random(count)
    v = rng.random(count)
    rad = R * np.sqrt(u)
    ang = 2.0 * math.pi * v
    return np.column_stack((rad * np.cos(ang), rad * np.sin(ang)))


def sample_hppp(lam: float, window_radius: float, rng: np.random.Generator) -> np.ndarray:
    """HPPP of density ``lam`` restricted to a disk centered at the origin.

    Points are generated outward in radius: pi*lam*r_k**2 are the arrival
    times of a unit-rate Poisson process. The count in the window is then
    Poisson(lam*pi*w**2) and the points are uniform given the count, and a
    larger window only appends points beyond the smaller one.
    """
    if not lam > 0:
        raise ValueError(f"density must be > 0, got {lam}")
    limit = math.pi * lam * window_radius**2
    if limit > MAX_EXPECTED_POINTS:
        raise SimulationResourceError(
            f"expected {limit:.3g} points in the HPPP window exceeds {MAX_EXPECTED_POINTS:.0e}"
        )
    arrivals, angles = [], []
    t = 0.0
    while t <= limit:
        gaps = rng.standard_exponential(_HPPP_BATCH)
        ang = rng.random(_HPPP_BATCH)
        times = t + np.cumsum(gaps)
        arrivals.append(times)
        angles.append(ang)
        t = times[-1]
    times = np.concatenate(arrivals)
    ang = 2.0 * math.pi * np.concatenate(angles)
    keep = times <= limit
    rad = np.sqrt(times[keep] / (math.pi * lam))
    return np.column_stack((rad * np.cos(ang[keep]), rad * np.sin(ang[keep])))


def centroid_of(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or len(pts) == 0:
        raise ValueError("centroid of an empty point set is undefined")
    return pts.mean(axis=0)


def hppp_window_radius(lam: float, R: float, margin_sigma: float) -> float:
    """Window leaving P(nearest aggregator outside) < exp(-margin_sigma**2)."""
    return R + margin_sigma / math.sqrt(math.pi * lam)


def _nearest_distance(devices: np.ndarray, aggregators: np.ndarray, h: float = 0.0) -> np.ndarray:
    if len(aggregators) == 0:
        return np.full(len(devices), np.inf)
    diff = devices[:, None, :] - aggregators[None, :, :]
    d2 = np.einsum("ijk,ijk->ij", diff, diff).min(axis=1)
    return np.sqrt(d2 + h * h)


def _realization_distances(strategy, geometry: ClusterGeometry, sim: SimConfig, index: int):
    rng = realization_rng(sim.seed, index)
    R = geometry.radius_m
    devices = sample_uniform_disk(R, sim.devices_per_realization, rng)
    if isinstance(strategy, RandomPPP):
        w = hppp_window_radius(strategy.density, R, sim.window_margin_sigma)
        return _nearest_distance(devices, sample_hppp(strategy.density, w, rng))
    if isinstance(strategy, ClusterInterior):
        return _nearest_distance(devices, sample_uniform_disk(R, strategy.count, rng))
    if isinstance(strategy, (CentroidTerrestrial, CentroidAerial)):
        if sim.centroid_placement == "empirical":
            center = centroid_of(devices)
        else:
            center = np.zeros(2)
        return _nearest_distance(devices, center[None, :], strategy.altitude_for(geometry))
    raise TypeError(f"unknown strategy {strategy!r}")


def _chunk(strategy, geometry, sim, start, stop):
    return [_realization_distances(strategy, geometry, sim, i) for i in range(start, stop)]


@functools.lru_cache(maxsize=64)
def _cached_distances(strategy, geometry: ClusterGeometry, sim: SimConfig) -> np.ndarray:
    bounds = [(s, min(s + _CHUNK, sim.n_realizations)) for s in range(0, sim.n_realizations, _CHUNK)]
    if sim.workers == 1:
        chunks = [_chunk(strategy, geometry, sim, a, b) for a, b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=sim.workers) as pool:
            chunks = list(pool.map(lambda ab: _chunk(strategy, geometry, sim, *ab), bounds))
    out = np.vstack([d for chunk in chunks for d in chunk])
    out.flags.writeable = False
    return out


def sample_distances(strategy, geometry: ClusterGeometry, sim: SimConfig) -> np.ndarray:
    """Device-to-serving-aggregator distances, shape (n_realizations,
    devices_per_realization); +inf marks an empty HPPP window."""
    return _cached_distances(strategy, geometry, sim)


def _estimate(per_device: np.ndarray, value_range: float) -> McEstimate:
    """Mean over all devices with a batch-means standard error (devices of
    one realization share aggregators and are not independent).

    The error is floored at value_range / n: when every sample lands on the
    same value (e.g. all devices saturated at P_max) the sample variance is
    zero, yet an effect with probability below ~1/n can still be missed, and
    3 * value_range / n is the rule-of-three bound on it.
    """
    n_real, n_dev = per_device.shape
    n = per_device.size
    mean = math.fsum(per_device.ravel()) / n
    if n_real > 1:
        batch = np.array([math.fsum(row) for row in per_device]) / n_dev
        se = float(np.std(batch, ddof=1)) / math.sqrt(n_real)
    elif n > 1:
        se = float(np.std(per_device, ddof=1)) / math.sqrt(n)
    else:
        se = 0.0
    return McEstimate(mean=mean, std_error=max(se, value_range / n), n=n)


def simulate(strategy, scenario: SystemScenario, sim: SimConfig) -> SimResult:
    dist = sample_distances(strategy, scenario.geometry, sim)
    ch, pc = scenario.channel, scenario.power
    exponent = strategy.exponent(ch)
    finite = np.isfinite(dist)
    safe = np.where(finite, dist, 1.0)
    p_t = np.where(finite, tx_power(safe, exponent, pc, ch), pc.p_max_w)
    mu = mcl_to_pathloss_threshold(scenario.budget, ch).mu
    covered = finite & (path_loss(safe, exponent, ch) <= mu)
    p_tx = scenario.energy.p_cp_w + p_t / scenario.energy.eta
    realization = np.repeat(np.arange(sim.n_realizations), sim.devices_per_realization)
    # with eps = 0 every device sends the same power, otherwise anything in [0, P_max]
    power_range = pc.p_max_w / scenario.energy.eta if pc.epsilon > 0 else 0.0
    return SimResult(
        avg_ptx=_estimate(p_tx, power_range),
        coverage=_estimate(covered.astype(float), 1.0),
        distance_samples=dist.ravel(),
        tx_power_w=p_t.ravel(),
        covered=covered.ravel(),
        realization=realization,
    )


def write_raw_samples(result: SimResult, strategy, stream) -> None:
    """One CSV record per device per realization."""
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["realization", "strategy", "distance_m", "tx_power_w", "covered"])
    for k, d, p, c in zip(
        result.realization, result.distance_samples, result.tx_power_w, result.covered
    ):
        writer.writerow([int(k), strategy.label, f"{d:.9g}", f"{p:.9g}", int(c)])
