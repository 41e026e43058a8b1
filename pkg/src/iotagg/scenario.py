"""The full parameter bundle evaluated by the analytic and Monte Carlo paths."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .energy import EnergyProfile
from .geometry import ClusterGeometry
from .link import ChannelParams, LinkBudgetParams, LosModelParams, PowerControlParams


@dataclass(frozen=True)
class SystemScenario:
    channel: ChannelParams = ChannelParams()
    power: PowerControlParams = PowerControlParams()
    budget: LinkBudgetParams = LinkBudgetParams()
    energy: EnergyProfile = EnergyProfile()
    geometry: ClusterGeometry = ClusterGeometry()
    los: LosModelParams | None = None

    def with_epsilon(self, epsilon: float) -> SystemScenario:
        return dataclasses.replace(self, power=dataclasses.replace(self.power, epsilon=epsilon))

    def with_radius(self, radius_m: float) -> SystemScenario:
        return dataclasses.replace(
            self, geometry=dataclasses.replace(self.geometry, radius_m=radius_m)
        )

    def with_altitude(self, altitude_m: float) -> SystemScenario:
        return dataclasses.replace(
            self, geometry=dataclasses.replace(self.geometry, altitude_m=altitude_m)
        )

    def with_penetration(self, loss_db: float) -> SystemScenario:
        return dataclasses.replace(
            self, channel=dataclasses.replace(self.channel, penetration_loss_db=loss_db)
        )

    def with_p_max(self, p_max_dbm: float) -> SystemScenario:
        return dataclasses.replace(self, power=dataclasses.replace(self.power, p_max_dbm=p_max_dbm))


def table1() -> SystemScenario:
    """NB-IoT evaluation scenario: R = 200 m, UAV at 100 m, MCL 154 dB."""
    return SystemScenario()
