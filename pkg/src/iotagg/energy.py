"""Device energy accounting: power drawn while transmitting, energy per day
and battery lifetime."""

from __future__ import annotations

from dataclasses import dataclass, fields

SECONDS_PER_HOUR = 3600.0
DAYS_PER_YEAR = 365.0


@dataclass(frozen=True)
class EnergyProfile:
    """Stage powers (W), stage durations (s), reports per day and battery (Wh).

    Defaults are the NB-IoT profile: 90 mW circuitry, 44 % PA efficiency,
    12 reports/day, 5 Wh battery.
    """

    p_cp_w: float = 0.090
    eta: float = 0.44
    p_rx_w: float = 0.090
    p_i_w: float = 0.003
    p_s_w: float = 0.015e-3
    t_tx_s: float = 0.983
    t_rx_s: float = 0.565
    t_i_s: float = 22.451
    t_s_s: float = 86400.0
    n_rep: float = 12.0
    battery_wh: float = 5.0

    def __post_init__(self):
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"eta must lie in (0, 1], got {self.eta}")
        for f in fields(self):
            if f.name in ("eta", "battery_wh"):
                continue
            if not getattr(self, f.name) >= 0:
                raise ValueError(f"{f.name} must be >= 0, got {getattr(self, f.name)}")
        if not self.battery_wh > 0:
            raise ValueError(f"battery_wh must be > 0, got {self.battery_wh}")


def consumption(avg_pt_w: float, ep: EnergyProfile) -> float:
    """Power drawn while transmitting: circuitry plus PA input power."""
    if avg_pt_w < 0:
        raise ValueError("average transmit power must be >= 0")
    return ep.p_cp_w + avg_pt_w / ep.eta


def daily_energy(avg_ptx_w: float, ep: EnergyProfile) -> float:
    """Joules per day; ``avg_ptx_w`` already includes circuitry power.

    Standby runs for the full T_S regardless of the reporting stages.
    """
    per_report = ep.t_tx_s * avg_ptx_w + ep.t_rx_s * ep.p_rx_w + ep.t_i_s * ep.p_i_w
    return ep.n_rep * per_report + ep.t_s_s * ep.p_s_w


def lifetime_years(daily_energy_j: float, ep: EnergyProfile) -> float:
    if not daily_energy_j > 0:
        raise ValueError(f"daily energy must be > 0, got {daily_energy_j}")
    return ep.battery_wh / daily_energy_j * SECONDS_PER_HOUR / DAYS_PER_YEAR


def lifetime_from_consumption(avg_ptx_w: float, ep: EnergyProfile) -> float:
    return lifetime_years(daily_energy(avg_ptx_w, ep), ep)


def lifetime_sensitivity(avg_ptx_w: float, ep: EnergyProfile) -> float:
    """|d lifetime / d avg_ptx| in years per watt, for propagating MC error."""
    e = daily_energy(avg_ptx_w, ep)
    return lifetime_years(e, ep) * ep.n_rep * ep.t_tx_s / e
