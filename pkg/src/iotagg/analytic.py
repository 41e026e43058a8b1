"""Closed-form average power consumption and IoT coverage per strategy.

Every ``mean_tx_*`` function returns E[P_T] in watts (the radiated power
averaged over the device-aggregator distance); ``avg_power_*`` wraps it
into a PerfResult with consumption, coverage and lifetime.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from . import energy
from .distances import law_cluster_interior, law_cluster_interior_exact
from .energy import EnergyProfile
from .geometry import CentroidAerial, CentroidTerrestrial, ClusterInterior, RandomPPP
from .link import (
    ChannelParams,
    LinkBudgetParams,
    PowerControlParams,
    effective_open_loop,
    mcl_to_pathloss_threshold,
    saturation_root,
)
from .numerics import lower_incomplete_gamma, quad
from .scenario import SystemScenario

Z_95 = 1.959963984540054


class Source(str, enum.Enum):
    ANALYTIC = "analytic"
    MONTE_CARLO = "mc"


@dataclass(frozen=True)
class PerfResult:
    avg_tx_power_w: float
    coverage_prob: float
    lifetime_years: float
    source: Source = Source.ANALYTIC
    power_se: float = 0.0
    coverage_se: float = 0.0
    lifetime_se: float = 0.0

    def value(self, metric: str) -> float:
        return {
            "power": self.avg_tx_power_w,
            "coverage": self.coverage_prob,
            "lifetime": self.lifetime_years,
        }[metric]

    def std_error(self, metric: str) -> float:
        return {"power": self.power_se, "coverage": self.coverage_se, "lifetime": self.lifetime_se}[
            metric
        ]

    def ci_halfwidth(self, metric: str) -> float:
        """Half-width of the 95 % confidence interval (0 for analytic)."""
        return Z_95 * self.std_error(metric)


def _result(mean_tx_w: float, coverage: float, ep: EnergyProfile) -> PerfResult:
    p_tx = energy.consumption(mean_tx_w, ep)
    return PerfResult(
        avg_tx_power_w=p_tx,
        coverage_prob=min(max(coverage, 0.0), 1.0),
        lifetime_years=energy.lifetime_from_consumption(p_tx, ep),
    )


def _constant_power(pc: PowerControlParams) -> float:
    return min(pc.p_o_w, pc.p_max_w)


# --- random (HPPP) deployment -------------------------------------------------


def mean_tx_random(lam: float, pc: PowerControlParams, ch: ChannelParams) -> float:
    if not lam > 0:
        raise ValueError(f"density must be > 0, got {lam}")
    if pc.epsilon == 0:
        return _constant_power(pc)
    ea = pc.epsilon * ch.alpha_g
    p_hat = effective_open_loop(pc, ch.alpha_g, ch)
    zeta = saturation_root(ch.alpha_g, pc, ch)
    x = math.pi * lam * zeta * zeta
    below = p_hat * (math.pi * lam) ** (-ea / 2.0) * lower_incomplete_gamma(1.0 + ea / 2.0, x)
    return below + pc.p_max_w * math.exp(-x)


def coverage_random(lam: float, mu_hat: float, alpha_g: float) -> float:
    return -math.expm1(-math.pi * lam * mu_hat ** (2.0 / alpha_g))


def avg_power_random(
    lam: float, pc: PowerControlParams, ch: ChannelParams, ep: EnergyProfile, lb: LinkBudgetParams
) -> PerfResult:
    mu_hat = mcl_to_pathloss_threshold(lb, ch).mu_hat
    return _result(mean_tx_random(lam, pc, ch), coverage_random(lam, mu_hat, ch.alpha_g), ep)


def avg_power_random_unbounded(
    lam: float, pc: PowerControlParams, ch: ChannelParams, ep: EnergyProfile
) -> float:
    """Consumption without a power cap; the radio term scales as lam**(-eps*a/2)."""
    ea = pc.epsilon * ch.alpha_g
    p_hat = effective_open_loop(pc, ch.alpha_g, ch)
    radio = p_hat * (math.pi * lam) ** (-ea / 2.0) * math.gamma(1.0 + ea / 2.0)
    return energy.consumption(radio, ep)


def min_density(beta: float, lb: LinkBudgetParams, ch: ChannelParams) -> float:
    """Smallest HPPP density (per m^2) whose coverage reaches ``beta``."""
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    mu_hat = mcl_to_pathloss_threshold(lb, ch).mu_hat
    return -math.log1p(-beta) / (math.pi * mu_hat ** (2.0 / ch.alpha_g))


# --- cluster-interior deployment ---------------------------------------------


def _ci_law(R: float, n: int, exact: bool):
    return law_cluster_interior_exact(R, n) if exact else law_cluster_interior(R, n)


def mean_tx_cluster_interior(
    R: float, n: int, pc: PowerControlParams, ch: ChannelParams, exact: bool = False
) -> float:
    """Nearest-of-n weighting by the product-form order statistic, or by the
    exact law when ``exact`` is set (only differs for n > 1)."""
    law = _ci_law(R, n, exact)
    if pc.epsilon == 0:
        return _constant_power(pc)
    ea = pc.epsilon * ch.alpha_g
    p_hat = effective_open_loop(pc, ch.alpha_g, ch)
    zeta = min(2.0 * R, saturation_root(ch.alpha_g, pc, ch))
    below = quad(lambda r: r**ea * law.pdf(r), 0.0, zeta)
    above = quad(law.pdf, zeta, 2.0 * R)
    return p_hat * below + pc.p_max_w * above


def coverage_cluster_interior(
    R: float, n: int, mu_hat: float, alpha_g: float, exact: bool = False
) -> float:
    reach = min(mu_hat ** (1.0 / alpha_g), 2.0 * R)
    return min(_ci_law(R, n, exact).cdf(reach), 1.0)


def avg_power_cluster_interior(
    R: float,
    n: int,
    pc: PowerControlParams,
    ch: ChannelParams,
    ep: EnergyProfile,
    lb: LinkBudgetParams,
    exact: bool = False,
) -> PerfResult:
    mu_hat = mcl_to_pathloss_threshold(lb, ch).mu_hat
    return _result(
        mean_tx_cluster_interior(R, n, pc, ch, exact),
        coverage_cluster_interior(R, n, mu_hat, ch.alpha_g, exact),
        ep,
    )


def avg_power_cluster_interior_unbounded_n1(
    R: float, pc: PowerControlParams, ch: ChannelParams, ep: EnergyProfile
) -> float:
    """Single cluster head, no power cap: the radio term grows as (2R)**(eps*a)."""
    ea = pc.epsilon * ch.alpha_g
    q2, q3, q6 = 2.0 + ea, 3.0 + ea, 6.0 + ea
    coef = 8.0 * math.gamma(q3 / 2.0) / (math.sqrt(math.pi) * q2 * math.gamma(q6 / 2.0))
    radio = effective_open_loop(pc, ch.alpha_g, ch) * coef * (2.0 * R) ** ea
    return energy.consumption(radio, ep)


# --- centroid deployment (terrestrial: h = 0, alpha_g) -------------------------


def mean_tx_centroid(
    R: float, h: float, exponent: float, pc: PowerControlParams, ch: ChannelParams
) -> float:
    if not R > 0:
        raise ValueError(f"cluster radius must be > 0, got {R}")
    if not h >= 0:
        raise ValueError(f"altitude must be >= 0, got {h}")
    if pc.epsilon == 0:
        return _constant_power(pc)
    p2 = 2.0 + pc.epsilon * exponent
    p_hat = effective_open_loop(pc, exponent, ch)
    top = math.hypot(R, h)
    zeta = min(top, max(h, saturation_root(exponent, pc, ch)))
    below = p_hat * 2.0 / (p2 * R * R) * (zeta**p2 - h**p2)
    above = pc.p_max_w * (R * R + h * h - zeta * zeta) / (R * R)
    return below + max(above, 0.0)


def coverage_centroid(R: float, h: float, mu_hat: float, exponent: float) -> float:
    reach2 = mu_hat ** (2.0 / exponent)
    return (min(reach2, R * R + h * h) - min(reach2, h * h)) / (R * R)


def avg_power_centroid(
    R: float,
    h: float,
    exponent: float,
    pc: PowerControlParams,
    ch: ChannelParams,
    ep: EnergyProfile,
    lb: LinkBudgetParams,
) -> PerfResult:
    mu_hat = mcl_to_pathloss_threshold(lb, ch).mu_hat
    return _result(
        mean_tx_centroid(R, h, exponent, pc, ch), coverage_centroid(R, h, mu_hat, exponent), ep
    )


def avg_power_centroid_unbounded(
    R: float, h: float, exponent: float, pc: PowerControlParams, ch: ChannelParams, ep: EnergyProfile
) -> float:
    p2 = 2.0 + pc.epsilon * exponent
    radio = (
        effective_open_loop(pc, exponent, ch)
        * 2.0
        / (p2 * R * R)
        * ((R * R + h * h) ** (p2 / 2.0) - h**p2)
    )
    return energy.consumption(radio, ep)


# --- dispatch -------------------------------------------------------------------


def mean_tx_power(strategy, scenario: SystemScenario, exact_nearest: bool = False) -> float:
    """E[P_T] in watts for ``strategy`` under ``scenario``."""
    pc, ch, geo = scenario.power, scenario.channel, scenario.geometry
    if isinstance(strategy, RandomPPP):
        return mean_tx_random(strategy.density, pc, ch)
    if isinstance(strategy, ClusterInterior):
        return mean_tx_cluster_interior(geo.radius_m, strategy.count, pc, ch, exact_nearest)
    if isinstance(strategy, (CentroidTerrestrial, CentroidAerial)):
        return mean_tx_centroid(
            geo.radius_m, strategy.altitude_for(geo), strategy.exponent(ch), pc, ch
        )
    raise TypeError(f"unknown strategy {strategy!r}")


def coverage(strategy, scenario: SystemScenario, exact_nearest: bool = False) -> float:
    ch, geo = scenario.channel, scenario.geometry
    mu_hat = mcl_to_pathloss_threshold(scenario.budget, ch).mu_hat
    if isinstance(strategy, RandomPPP):
        return coverage_random(strategy.density, mu_hat, ch.alpha_g)
    if isinstance(strategy, ClusterInterior):
        return coverage_cluster_interior(
            geo.radius_m, strategy.count, mu_hat, ch.alpha_g, exact_nearest
        )
    if isinstance(strategy, (CentroidTerrestrial, CentroidAerial)):
        return coverage_centroid(
            geo.radius_m, strategy.altitude_for(geo), mu_hat, strategy.exponent(ch)
        )
    raise TypeError(f"unknown strategy {strategy!r}")


def evaluate(strategy, scenario: SystemScenario, exact_nearest: bool = False) -> PerfResult:
    return _result(
        mean_tx_power(strategy, scenario, exact_nearest),
        coverage(strategy, scenario, exact_nearest),
        scenario.energy,
    )


def unbounded_consumption(strategy, scenario: SystemScenario) -> float:
    """Consumption with no power cap (single cluster head for cluster-interior)."""
    pc, ch, geo, ep = scenario.power, scenario.channel, scenario.geometry, scenario.energy
    if isinstance(strategy, RandomPPP):
        return avg_power_random_unbounded(strategy.density, pc, ch, ep)
    if isinstance(strategy, ClusterInterior):
        if strategy.count != 1:
            raise ValueError("unbounded closed form exists only for a single cluster head")
        return avg_power_cluster_interior_unbounded_n1(geo.radius_m, pc, ch, ep)
    if isinstance(strategy, (CentroidTerrestrial, CentroidAerial)):
        return avg_power_centroid_unbounded(
            geo.radius_m, strategy.altitude_for(geo), strategy.exponent(ch), pc, ch, ep
        )
    raise TypeError(f"unknown strategy {strategy!r}")

