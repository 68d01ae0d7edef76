"""Every-other-day time compression.

Odd days of the year (1, 3, ..., 365) are simulated. Operating costs are
doubled, and hydro storage dynamics use doubled charge/discharge/inflow terms so
one simulated day stands in for two physical days. Daily pumped storages also
get doubled level bounds; batteries are left alone because they cycle within a
day.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from .system import Compression, StorageKind, StorageUnit

DAYS_PER_YEAR = 365
HOURS_PER_DAY = 24
# non-leap calendar used for month attribution
_CALENDAR_YEAR = 2015


@dataclass(frozen=True)
class TimeGrid:
    physical_hours: int
    simulated_hours: int
    day_map: tuple[int, ...]  # 1-based physical day of each simulated day
    cost_scale: float
    storage_scale: float
    hours_per_day: int = HOURS_PER_DAY

    @property
    def compressed(self) -> bool:
        return self.cost_scale != 1.0

    @property
    def simulated_days(self) -> int:
        return len(self.day_map)

    def physical_hour(self, t: int) -> int:
        """Physical (0-based) hour of simulated hour ``t``."""
        day, hour = divmod(t, self.hours_per_day)
        return (self.day_map[day] - 1) * self.hours_per_day + hour

    def physical_hours_index(self) -> np.ndarray:
        days = np.asarray(self.day_map) - 1
        return (days[:, None] * self.hours_per_day + np.arange(self.hours_per_day)).ravel()

    def month_of(self, t: int) -> int:
        """Calendar month (1-12) of simulated hour ``t``."""
        day = self.day_map[t // self.hours_per_day]
        return (dt.date(_CALENDAR_YEAR, 1, 1) + dt.timedelta(days=day - 1)).month


def build_time_grid(
    mode: Compression | str = Compression.FULL_YEAR,
    days: int = DAYS_PER_YEAR,
    hours_per_day: int = HOURS_PER_DAY,
) -> TimeGrid:
    mode = Compression(mode)
    if mode is Compression.FULL_YEAR:
        day_map = tuple(range(1, days + 1))
        scale = 1.0
    else:
        day_map = tuple(range(1, days + 1, 2))
        scale = 2.0
    return TimeGrid(
        physical_hours=days * hours_per_day,
        simulated_hours=len(day_map) * hours_per_day,
        day_map=day_map,
        cost_scale=scale,
        storage_scale=scale,
        hours_per_day=hours_per_day,
    )


def hourly_grid(n_hours: int) -> TimeGrid:
    """Uncompressed grid over an arbitrary short horizon (one 'day' of n hours)."""
    return TimeGrid(n_hours, n_hours, (1,), 1.0, 1.0, hours_per_day=n_hours)


def grid_for(mode: Compression | str, n_hours: int) -> TimeGrid:
    """Grid for a system horizon: a calendar year when divisible into days."""
    if n_hours % HOURS_PER_DAY == 0:
        return build_time_grid(mode, n_hours // HOURS_PER_DAY)
    if Compression(mode) is not Compression.FULL_YEAR:
        raise ValueError(f"cannot compress a horizon of {n_hours} h into days")
    return hourly_grid(n_hours)


def compress_series(grid: TimeGrid, series) -> np.ndarray:
    values = np.asarray(series, dtype=float)
    if values.shape != (grid.physical_hours,):
        raise ValueError(
            f"series has {values.shape[0] if values.ndim else 0} entries, expected {grid.physical_hours}"
        )
    if not grid.compressed:
        return values.copy()
    return values[grid.physical_hours_index()]


def embed_series(grid: TimeGrid, series) -> np.ndarray:
    """Copy each simulated day into its own slot and the skipped day after it."""
    values = np.asarray(series, dtype=float)
    if values.shape != (grid.simulated_hours,):
        raise ValueError(f"series has {values.shape[0]} entries, expected {grid.simulated_hours}")
    out = np.empty(grid.physical_hours)
    h = grid.hours_per_day
    idx = grid.physical_hours_index()
    out[idx] = values
    if grid.compressed:
        nxt = idx + h
        keep = nxt < grid.physical_hours
        out[nxt[keep]] = values[keep]
    return out


@dataclass(frozen=True)
class StorageScaling:
    charge_coeff: float
    discharge_coeff: float
    inflow_coeff: float
    bound_scale: float


def storage_scaling(grid: TimeGrid, unit: StorageUnit | StorageKind) -> StorageScaling:
    kind = unit if isinstance(unit, StorageKind) else unit.kind
    if not grid.compressed or not kind.is_hydro:
        return StorageScaling(1.0, 1.0, 1.0, 1.0)
    k = grid.storage_scale
    bound = k if kind is StorageKind.PUMP_DAILY else 1.0
    return StorageScaling(k, k, k, bound)


def storage_levels(
    unit: StorageUnit,
    scaling: StorageScaling,
    e_start: float,
    charge,
    discharge,
    inflow,
) -> np.ndarray:
    """Level trajectory implied by fixed charge/discharge/inflow schedules."""
    ch = np.asarray(charge, float)
    dis = np.asarray(discharge, float)
    xi = np.asarray(inflow, float)
    step = (
        scaling.charge_coeff * unit.eta_ch * ch
        - scaling.discharge_coeff * dis / unit.eta_dis
        + scaling.inflow_coeff * xi
    )
    return e_start + np.cumsum(step)
