"""Distance from a typical device to its serving aggregator.

One law per deployment strategy: nearest HPPP point, nearest of N uniform
points in the device disk, and the (possibly elevated) cluster center.
All pdf/cdf callables accept scalars or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import CentroidAerial, CentroidTerrestrial, ClusterGeometry, ClusterInterior, RandomPPP
from .numerics import quad

# slack for floating-point drift when callers pass r == 2R computed elsewhere
_SUPPORT_SLACK = 1e-12


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


@dataclass(frozen=True)
class DistanceLaw:
    pdf: Callable
    cdf: Callable
    r_min: float
    r_max: float

    @property
    def support(self) -> tuple[float, float]:
        return (self.r_min, self.r_max)


def disk_pair_pdf(r, R: float):
    """Density of the distance between two independent uniform points in a
    disk of radius R."""
    r = np.asarray(r, dtype=float)
    inside = (r >= 0) & (r <= 2.0 * R)
    rc = np.clip(r, 0.0, 2.0 * R)
    val = (4.0 * rc / (math.pi * R**2)) * np.arccos(rc / (2.0 * R)) - (
        2.0 * rc**2 / (math.pi * R**4)
    ) * np.sqrt(np.maximum(R**2 - 0.25 * rc**2, 0.0))
    return _out(np.where(inside, np.maximum(val, 0.0), 0.0))


def psi_cdf(r, R: float):
    """CDF of the distance between two independent uniform points in a disk
    of radius R, valid on [0, 2R]."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(r > 2.0 * R * (1.0 + _SUPPORT_SLACK)):
        raise ValueError(f"psi_cdf defined on [0, 2R] = [0, {2.0 * R}]")
    r = np.minimum(r, 2.0 * R)
    # arccsc(2R/r) = arcsin(r/2R) and arcsec(2R/r) = arccos(r/2R) are both
    # taken from one angle built on the same root, otherwise their separate
    # roundings blow up near r = 2R where arcsin has infinite slope
    root = np.sqrt(np.maximum((2.0 * R - r) * (2.0 * R + r), 0.0))
    theta = np.arctan2(r, root)
    val = (
        2.0 * theta
        + 2.0 * (r / R) ** 2 * np.arctan2(root, r)
        - r * (r**2 + 2.0 * R**2) * root / (4.0 * R**4)
    ) / math.pi
    return _out(np.clip(val, 0.0, 1.0))


def law_random_ppp(lam: float) -> DistanceLaw:
    """Nearest point of an HPPP with density ``lam`` (per m^2)."""
    if not lam > 0:
        raise ValueError(f"density must be > 0, got {lam}")

    def pdf(r):
        r = np.asarray(r, dtype=float)
        return _out(np.where(r >= 0, 2.0 * math.pi * lam * r * np.exp(-math.pi * lam * r**2), 0.0))

    def cdf(r):
        r = np.asarray(r, dtype=float)
        return _out(np.where(r > 0, -np.expm1(-math.pi * lam * np.maximum(r, 0.0) ** 2), 0.0))

    return DistanceLaw(pdf, cdf, 0.0, math.inf)


def nearest_of_n_weight(r, R: float, n: int):
    """(1 - Psi(r))**(n - 1), computed in log space so it does not flush to
    zero near 2R for large n."""
    if n == 1:
        return _out(np.ones_like(np.asarray(r, dtype=float)))
    psi = np.asarray(psi_cdf(np.clip(r, 0.0, 2.0 * R), R))
    with np.errstate(divide="ignore"):
        return _out(np.exp((n - 1) * np.log1p(-psi)))


def law_cluster_interior(R: float, n: int) -> DistanceLaw:
    """Nearest of ``n`` aggregators uniform in the device disk of radius R."""
    if not R > 0:
        raise ValueError(f"cluster radius must be > 0, got {R}")
    if int(n) != n or n < 1:
        raise ValueError(f"aggregator count must be an integer >= 1, got {n}")
    n = int(n)

    def pdf(r):
        r = np.asarray(r, dtype=float)
        inside = (r >= 0) & (r <= 2.0 * R)
        w = nearest_of_n_weight(np.clip(r, 0.0, 2.0 * R), R, n)
        return _out(np.where(inside, n * np.asarray(disk_pair_pdf(r, R)) * w, 0.0))

    def cdf(r):
        r = np.asarray(r, dtype=float)
        psi = np.asarray(psi_cdf(np.clip(r, 0.0, 2.0 * R), R))
        if n == 1:
            return _out(psi)
        with np.errstate(divide="ignore"):
            return _out(-np.expm1(n * np.log1p(-psi)))

    return DistanceLaw(pdf, cdf, 0.0, 2.0 * R)


def lens_area(rho, r: float, R: float):
    """Area of the intersection of a disk of radius r centered at distance
    rho from the center of a disk of radius R."""
    rho = np.asarray(rho, dtype=float)
    inner = r <= R - rho
    outer = r >= R + rho
    rs = np.where(rho > 0, rho, 1.0)
    a = r * r * np.arccos(np.clip((rs * rs + r * r - R * R) / (2.0 * rs * r), -1.0, 1.0))
    b = R * R * np.arccos(np.clip((rs * rs + R * R - r * r) / (2.0 * rs * R), -1.0, 1.0))
    k = (-rs + r + R) * (rs + r - R) * (rs - r + R) * (rs + r + R)
    lens = a + b - 0.5 * np.sqrt(np.maximum(k, 0.0))
    return _out(np.where(inner, math.pi * r * r, np.where(outer, math.pi * R * R, lens)))


def law_cluster_interior_exact(R: float, n: int) -> DistanceLaw:
    """Nearest of ``n`` uniform aggregators without assuming the n distances
    are independent: conditions on the device's radial position and
    averages (1 - lens/disk)**n over it. Agrees with law_cluster_interior
    for n = 1; for n > 1 the distances share the device position and the
    nearest one is stochastically larger than the product form implies."""
    base = law_cluster_interior(R, n)
    if n == 1:
        return base
    disk = math.pi * R * R

    def _survival(r: float) -> float:
        if r <= 0:
            return 1.0
        if r >= 2.0 * R:
            return 0.0
        kinks = [p for p in (R - r, r - R) if 0.0 < p < R]
        return quad(
            lambda rho: (1.0 - lens_area(rho, r, R) / disk) ** n * 2.0 * rho / (R * R),
            0.0,
            R,
            points=kinks or None,
        )

    def cdf(r):
        vals = np.array([1.0 - _survival(x) for x in np.ravel(np.asarray(r, dtype=float))])
        return _out(np.clip(vals.reshape(np.shape(r)), 0.0, 1.0))

    def pdf(r):
        # d/dr of the survival integrand: n (1 - A/disk)**(n-1) * (dA/dr)/disk,
        # with dA/dr the arc length of the r-circle inside the cluster disk
        def one(x):
            if not 0.0 < x < 2.0 * R:
                return 0.0
            kinks = [p for p in (R - x, x - R) if 0.0 < p < R]
            return quad(
                lambda rho: n
                * (1.0 - lens_area(rho, x, R) / disk) ** (n - 1)
                * _arc_inside(rho, x, R)
                / disk
                * 2.0
                * rho
                / (R * R),
                0.0,
                R,
                points=kinks or None,
            )

        vals = np.array([one(x) for x in np.ravel(np.asarray(r, dtype=float))])
        return _out(vals.reshape(np.shape(r)))

    return DistanceLaw(pdf, cdf, 0.0, 2.0 * R)


def _arc_inside(rho: float, r: float, R: float) -> float:
    """Length of the circle of radius r (center at distance rho from the
    cluster center) that lies inside the cluster disk."""
    if r <= R - rho:
        return 2.0 * math.pi * r
    if r >= R + rho or rho == 0:
        return 0.0
    c = (rho * rho + r * r - R * R) / (2.0 * rho * r)
    return 2.0 * r * math.acos(min(1.0, max(-1.0, c)))


def law_centroid(R: float, h: float = 0.0) -> DistanceLaw:
    """Distance from a uniform device in the disk to a point at altitude h
    above the disk center (h = 0: terrestrial)."""
    if not R > 0:
        raise ValueError(f"cluster radius must be > 0, got {R}")
    if not h >= 0:
        raise ValueError(f"altitude must be >= 0, got {h}")
    top2 = R**2 + h**2

    def pdf(r):
        r = np.asarray(r, dtype=float)
        return _out(np.where((r >= h) & (r * r <= top2), 2.0 * r / R**2, 0.0))

    def cdf(r):
        r = np.asarray(r, dtype=float)
        return _out(np.clip((np.minimum(r * r, top2) - h * h) / R**2, 0.0, 1.0))

    return DistanceLaw(pdf, cdf, h, math.sqrt(top2))


def law_for(strategy, geometry: ClusterGeometry) -> DistanceLaw:
    """Distance law of the serving aggregator under ``strategy``."""
    if isinstance(strategy, RandomPPP):
        return law_random_ppp(strategy.density)
    if isinstance(strategy, ClusterInterior):
        return law_cluster_interior(geometry.radius_m, strategy.count)
    if isinstance(strategy, (CentroidTerrestrial, CentroidAerial)):
        return law_centroid(geometry.radius_m, strategy.altitude_for(geometry))
    raise TypeError(f"unknown strategy {strategy!r}")
