"""Radio-level primitives: unit conversions, path loss, fractional power
control, critical distance, receiver sensitivity and MCL thresholds.

Everything is computed in linear units (watts, meters, ratios); decibels
only appear at the parameter boundary.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .geometry import CentroidAerial, CentroidTerrestrial, ClusterGeometry, ClusterInterior, RandomPPP
from .numerics import quad


class OpenLoopConvention(str, enum.Enum):
    """How the open-loop power is scaled by the reference loss L_o.

    EQ10_FULL:           P_T = min{P_o * L_o**(eps*a) * r**(eps*a), P_max}
    STANDARD_FRACTIONAL: P_T = min{P_o * (L_o * r**a)**eps, P_max}
    """

    EQ10_FULL = "eq10_full"
    STANDARD_FRACTIONAL = "standard_fractional"


@dataclass(frozen=True)
class ChannelParams:
    l_o_db: float = 38.0
    alpha_g: float = 3.5
    alpha_air: float = 2.2
    penetration_loss_db: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.l_o_db):
            raise ValueError("l_o_db must be finite")
        if not self.alpha_g > 2:
            raise ValueError(f"alpha_g must be > 2, got {self.alpha_g}")
        if not self.alpha_air >= 2:
            raise ValueError(f"alpha_air must be >= 2, got {self.alpha_air}")
        if not self.penetration_loss_db >= 0:
            raise ValueError("penetration_loss_db must be >= 0")

    @property
    def l_o(self) -> float:
        return db_to_linear(self.l_o_db)


@dataclass(frozen=True)
class PowerControlParams:
    p_o_dbm: float = -46.0
    p_max_dbm: float = 20.0
    epsilon: float = 0.4
    open_loop_convention: OpenLoopConvention = OpenLoopConvention.EQ10_FULL

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must lie in [0, 1], got {self.epsilon}")
        if not self.p_o_dbm <= self.p_max_dbm:
            raise ValueError("p_o_dbm must not exceed p_max_dbm")
        object.__setattr__(
            self, "open_loop_convention", OpenLoopConvention(self.open_loop_convention)
        )

    @property
    def p_o_w(self) -> float:
        return dbm_to_watts(self.p_o_dbm)

    @property
    def p_max_w(self) -> float:
        return dbm_to_watts(self.p_max_dbm)


@dataclass(frozen=True)
class LinkBudgetParams:
    n0_dbm_hz: float = -174.0
    nf_db: float = 5.0
    bandwidth_hz: float = 180e3
    tau_db: float = -4.3
    gain_db: float = 0.0
    mcl_target_db: float = 154.0

    def __post_init__(self):
        if not self.bandwidth_hz > 0:
            raise ValueError("bandwidth_hz must be > 0")


@dataclass(frozen=True)
class LosModelParams:
    gamma1_m: float
    gamma2_m: float
    altitude_offset_m: float = 0.0

    def __post_init__(self):
        if not (self.gamma1_m > 0 and self.gamma2_m > 0):
            raise ValueError("gamma1_m and gamma2_m must be > 0")


def _scalar_or_array(x):
    return float(x) if np.ndim(x) == 0 else x


def db_to_linear(x_db):
    return _scalar_or_array(np.power(10.0, np.asarray(x_db, dtype=float) / 10.0))


def linear_to_db(x):
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise ValueError("linear_to_db requires a positive ratio")
    return _scalar_or_array(10.0 * np.log10(x))


def dbm_to_watts(p_dbm: float) -> float:
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watts_to_dbm(p_w: float) -> float:
    return linear_to_db(p_w) + 30.0


def _check_distance(r):
    if np.any(np.asarray(r) <= 0):
        raise ValueError("distance must be > 0")


def path_loss(r, exponent: float, ch: ChannelParams):
    """Linear path loss L_o * r**exponent (r in meters)."""
    _check_distance(r)
    return _scalar_or_array(ch.l_o * np.power(r, exponent))


def effective_open_loop(pc: PowerControlParams, exponent: float, ch: ChannelParams) -> float:
    """Open-loop power with the reference loss folded in, in watts.

    The transmit power below saturation is always this value times
    r**(eps*exponent); only the L_o scaling depends on the convention.
    """
    eps = pc.epsilon
    if pc.open_loop_convention is OpenLoopConvention.EQ10_FULL:
        return pc.p_o_w * ch.l_o ** (eps * exponent)
    return pc.p_o_w * ch.l_o**eps


def tx_power(r, exponent: float, pc: PowerControlParams, ch: ChannelParams):
    """Transmit power in watts of a device at distance r from its aggregator."""
    _check_distance(r)
    p_hat = effective_open_loop(pc, exponent, ch)
    return _scalar_or_array(np.minimum(p_hat * np.power(r, pc.epsilon * exponent), pc.p_max_w))


def saturation_root(exponent: float, pc: PowerControlParams, ch: ChannelParams) -> float:
    """Distance at which the unconstrained power reaches P_max (+inf if never)."""
    ea = pc.epsilon * exponent
    if ea == 0:
        return math.inf
    p_hat = effective_open_loop(pc, exponent, ch)
    # exp/log form keeps huge P_max (unbounded-power limit) from overflowing
    log_root = (math.log(pc.p_max_w) - math.log(p_hat)) / ea
    return math.exp(log_root) if log_root < 709 else math.inf


def critical_distance(
    strategy, pc: PowerControlParams, ch: ChannelParams, geometry: ClusterGeometry
) -> float:
    """Critical distance for a deployment strategy, clamped to its support.

    With epsilon = 0 the device never saturates: random deployment gets
    +inf and the bounded strategies get the upper end of their support.
    """
    exponent = strategy.exponent(ch)
    root = saturation_root(exponent, pc, ch)
    R = geometry.radius_m
    if isinstance(strategy, RandomPPP):
        return root
    if isinstance(strategy, ClusterInterior):
        return min(2.0 * R, root)
    if isinstance(strategy, CentroidTerrestrial):
        return min(R, root)
    if isinstance(strategy, CentroidAerial):
        h = strategy.altitude_for(geometry)
        return min(math.hypot(R, h), max(h, root))
    raise TypeError(f"unknown strategy {strategy!r}")


def receiver_sensitivity(lb: LinkBudgetParams) -> float:
    """Receiver sensitivity Q in dBm."""
    return lb.n0_dbm_hz + lb.nf_db + 10.0 * math.log10(lb.bandwidth_hz) + lb.tau_db


def achievable_mcl_db(pc: PowerControlParams, lb: LinkBudgetParams) -> float:
    """MCL = S - Q + G with S the maximum transmit power in dBm."""
    return pc.p_max_dbm - receiver_sensitivity(lb) + lb.gain_db


@dataclass(frozen=True)
class PathLossThreshold:
    mu: float
    mu_hat: float

    def coverage_radius(self, exponent: float) -> float:
        """Largest distance whose path loss still fits in the budget."""
        return self.mu_hat ** (1.0 / exponent)


def mcl_to_pathloss_threshold(lb: LinkBudgetParams, ch: ChannelParams) -> PathLossThreshold:
    # penetration loss eats into the budget left for distance-dependent loss
    mu = db_to_linear(lb.mcl_target_db - ch.penetration_loss_db)
    return PathLossThreshold(mu=mu, mu_hat=mu / ch.l_o)


def los_probability(d_2d, h: float, los: LosModelParams):
    """Ground-to-air LOS probability at horizontal distance d_2d.

    ``h`` is the altitude with any offset already applied; the two-branch
    model is only meant for 22.5 m < h <= 300 m.
    """
    if not 22.5 < h <= 300.0:
        raise ValueError(f"LOS model valid for 22.5 < h <= 300 m, got h={h}")
    d = np.asarray(d_2d, dtype=float)
    if np.any(d < 0):
        raise ValueError("d_2d must be >= 0")
    g1, g2 = los.gamma1_m, los.gamma2_m
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(d > g1, g1 / np.where(d > 0, d, 1.0), 1.0)
        p = np.where(d <= g1, 1.0, ratio + np.exp(-d / g2) * (1.0 - ratio))
    return _scalar_or_array(np.clip(p, 0.0, 1.0))


def mean_los_probability(R: float, h: float, los: LosModelParams) -> float:
    """LOS probability averaged over devices uniform in a disk under a UAV
    hovering above its center; the altitude offset is applied here."""
    h_eff = h + los.altitude_offset_m
    return quad(
        lambda r: los_probability(r, h_eff, los) * 2.0 * r / R**2,
        0.0,
        R,
        points=[los.gamma1_m] if los.gamma1_m < R else None,
    )
