"""Per-trip earnings transparency: itemized TCO, hours bonus, goal tracking.

All money is integer cents. Components are rounded half-to-even one at a
time and every total is computed from the rounded components, so the
breakdown identities hold exactly and serialized records reconstruct the
same numbers.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone


class NegativeInput(ValueError):
    pass


def cents(amount: float) -> int:
    """Round a fractional cent amount half-to-even to whole cents."""
    return round(amount)


def dollars(amount_c: int) -> str:
    sign = "-" if amount_c < 0 else ""
    amount_c = abs(amount_c)
    return f"{sign}{amount_c // 100}.{amount_c % 100:02d}"


@dataclass(frozen=True)
class CostProfile:
    """Annual fixed costs plus per-km running costs for one driver's car."""

    depreciation_per_year_c: int
    insurance_per_year_c: int
    taxes_per_year_c: int
    annual_working_hours: float
    fuel_per_km_c: float
    maintenance_per_km_c: float

    def __post_init__(self):
        amounts = (
            self.depreciation_per_year_c,
            self.insurance_per_year_c,
            self.taxes_per_year_c,
            self.fuel_per_km_c,
            self.maintenance_per_km_c,
        )
        if any(a < 0 for a in amounts):
            raise NegativeInput("cost profile amounts must be nonnegative")
        if self.annual_working_hours <= 0:
            raise NegativeInput("annual working hours must be positive")

    @property
    def fixed_per_hour_c(self) -> float:
        total = self.depreciation_per_year_c + self.insurance_per_year_c + self.taxes_per_year_c
        return total / self.annual_working_hours

    def to_dict(self) -> dict:
        return {
            "depreciation_per_year_c": self.depreciation_per_year_c,
            "insurance_per_year_c": self.insurance_per_year_c,
            "taxes_per_year_c": self.taxes_per_year_c,
            "annual_working_hours": self.annual_working_hours,
            "fuel_per_km_c": self.fuel_per_km_c,
            "maintenance_per_km_c": self.maintenance_per_km_c,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CostProfile":
        return cls(**data)


@dataclass(frozen=True)
class TripCostBreakdown:
    fare_c: int
    incentive_c: int
    tip_c: int
    fuel_c: int
    maintenance_c: int
    fixed_c: int
    tco_c: int
    net_c: int

    def __post_init__(self):
        if self.tco_c != self.fuel_c + self.maintenance_c + self.fixed_c:
            raise ValueError("tco must equal the sum of its components")
        if self.net_c != self.fare_c + self.incentive_c + self.tip_c - self.tco_c:
            raise ValueError("net must equal fare + incentive + tip - tco")

    def to_dict(self) -> dict:
        return {
            "fare_c": self.fare_c,
            "incentive_c": self.incentive_c,
            "tip_c": self.tip_c,
            "fuel_c": self.fuel_c,
            "maintenance_c": self.maintenance_c,
            "fixed_c": self.fixed_c,
            "tco_c": self.tco_c,
            "net_c": self.net_c,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TripCostBreakdown":
        return cls(**data)


def compute_trip_cost(
    cost: CostProfile,
    distance_km: float,
    duration_hours: float,
    fare_c: int,
    incentive_c: int = 0,
    tip_c: int = 0,
) -> TripCostBreakdown:
    """Itemize one trip: per-km running costs plus amortized fixed costs."""
    if distance_km < 0 or duration_hours < 0:
        raise NegativeInput("distance and duration must be nonnegative")
    if fare_c < 0 or incentive_c < 0 or tip_c < 0:
        raise NegativeInput("fare, incentive and tip must be nonnegative")

    fuel_c = cents(cost.fuel_per_km_c * distance_km)
    maintenance_c = cents(cost.maintenance_per_km_c * distance_km)
    fixed_c = cents(cost.fixed_per_hour_c * duration_hours)
    tco_c = fuel_c + maintenance_c + fixed_c
    return TripCostBreakdown(
        fare_c=fare_c,
        incentive_c=incentive_c,
        tip_c=tip_c,
        fuel_c=fuel_c,
        maintenance_c=maintenance_c,
        fixed_c=fixed_c,
        tco_c=tco_c,
        net_c=fare_c + incentive_c + tip_c - tco_c,
    )


def hours_bonus(hours_worked: float, rate_per_hour_c: float) -> int:
    """Flat hours-based bonus; the rate is the same for every driver."""
    if hours_worked < 0 or rate_per_hour_c < 0:
        raise NegativeInput("hours and rate must be nonnegative")
    return cents(hours_worked * rate_per_hour_c)


@dataclass(frozen=True)
class EarningGoal:
    amount_c: int
    period: str  # "daily" | "weekly"

    def __post_init__(self):
        if self.amount_c <= 0:
            raise ValueError("goal amount must be positive")
        if self.period not in ("daily", "weekly"):
            raise ValueError(f"goal period must be daily or weekly, got {self.period!r}")

    def to_dict(self) -> dict:
        return {"amount_c": self.amount_c, "period": self.period}

    @classmethod
    def from_dict(cls, data: dict) -> "EarningGoal":
        return cls(**data)


@dataclass(frozen=True)
class GoalProgress:
    period: str
    goal_c: int
    earned_c: int
    state: str  # "behind" | "on_track" | "met"


def period_elapsed_fraction(period: str, clock: datetime) -> float:
    clock = clock.astimezone(timezone.utc)
    seconds_into_day = clock.hour * 3600 + clock.minute * 60 + clock.second + clock.microsecond / 1e6
    if period == "daily":
        return seconds_into_day / 86400.0
    return (clock.weekday() * 86400.0 + seconds_into_day) / (7 * 86400.0)


def goal_progress(goal: EarningGoal, earned_c: int, clock: datetime) -> GoalProgress:
    """Where the driver stands against their stated goal right now.

    met when the goal is reached; on_track while earnings keep pace with
    the elapsed fraction of the period; behind otherwise.
    """
    if earned_c >= goal.amount_c:
        state = "met"
    elif earned_c >= goal.amount_c * period_elapsed_fraction(goal.period, clock):
        state = "on_track"
    else:
        state = "behind"
    return GoalProgress(period=goal.period, goal_c=goal.amount_c, earned_c=earned_c, state=state)
