"""Driver profiles: goals, preferences, work mode, and the settings lock.

Dispatch-affecting settings can only change once per disclosed lock
window; identity fields are always editable. Every successful change
returns the new lock expiry so the driver is told the time-frame up
front.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone

from .earnings import EarningGoal

RIDE_CATEGORIES = ("airport", "downtown", "restaurant", "residential", "other")

# settings that influence which rides a driver is offered; these share one lock
DISPATCH_SETTINGS = frozenset(
    {
        "earning_goal",
        "rating_floor",
        "employment_mode",
        "working_windows",
        "home_location",
        "home_route",
        "destination_filter",
        "ride_length_band",
        "assignment_mode",
    }
)
IDENTITY_SETTINGS = frozenset({"name", "date_of_birth", "license_no", "car_info"})


class SettingsLocked(Exception):
    def __init__(self, fld: str, until: datetime):
        super().__init__(f"setting {fld!r} is locked until {until.isoformat()}")
        self.field = fld
        self.until = until


class InvalidChange(ValueError):
    pass


@dataclass(frozen=True)
class WorkingWindow:
    """One weekly availability range, minutes from the UTC day start."""

    weekday: int  # 0=Monday .. 6=Sunday
    start_minute: int
    end_minute: int

    def __post_init__(self):
        if not 0 <= self.weekday <= 6:
            raise ValueError("weekday must be 0..6")
        if not 0 <= self.start_minute < self.end_minute <= 1440:
            raise ValueError("window must satisfy 0 <= start < end <= 1440")

    def contains(self, clock: datetime) -> bool:
        clock = clock.astimezone(timezone.utc)
        return clock.weekday() == self.weekday and (
            self.start_minute <= clock.hour * 60 + clock.minute < self.end_minute
        )

    def to_dict(self) -> dict:
        return {"weekday": self.weekday, "start_minute": self.start_minute, "end_minute": self.end_minute}

    @classmethod
    def from_dict(cls, data: dict) -> "WorkingWindow":
        return cls(**data)


@dataclass(frozen=True)
class SettingsLock:
    locked_until: datetime | None
    window_days: int = 7


@dataclass(frozen=True)
class DriverProfile:
    driver_id: str
    name: str = ""
    date_of_birth: str = ""
    license_no: str = ""
    car_info: str = ""
    earning_goal: EarningGoal | None = None
    rating_floor: float | None = None
    likes_tips: bool = False
    likes_conversation: bool = False
    employment_mode: str = "full_time"  # "part_time" | "full_time"
    working_windows: tuple[WorkingWindow, ...] = ()
    home_location: tuple[float, float] = (0.0, 0.0)
    home_route: tuple[tuple[float, float], tuple[float, float]] | None = None
    destination_filter: frozenset[str] = frozenset()
    ride_length_band: tuple[float, float] | None = None  # minutes
    assignment_mode: str = "random"  # "random" | "queued"
    settings_lock: SettingsLock = field(default_factory=lambda: SettingsLock(None))

    def __post_init__(self):
        if self.employment_mode not in ("part_time", "full_time"):
            raise InvalidChange(f"unknown employment mode {self.employment_mode!r}")
        if self.assignment_mode not in ("random", "queued"):
            raise InvalidChange(f"unknown assignment mode {self.assignment_mode!r}")
        unknown = set(self.destination_filter) - set(RIDE_CATEGORIES)
        if unknown:
            raise InvalidChange(f"unknown destination categories: {sorted(unknown)}")
        if self.rating_floor is not None and not 1.0 <= self.rating_floor <= 5.0:
            raise InvalidChange("rating floor must sit in [1, 5]")
        if self.ride_length_band is not None:
            lo, hi = self.ride_length_band
            if lo < 0 or hi <= lo:
                raise InvalidChange("ride length band must satisfy 0 <= min < max")
        self._check_windows()

    def _check_windows(self):
        by_day: dict[int, list[WorkingWindow]] = {}
        for win in self.working_windows:
            by_day.setdefault(win.weekday, []).append(win)
        for wins in by_day.values():
            wins = sorted(wins, key=lambda w: w.start_minute)
            for a, b in zip(wins, wins[1:]):
                if b.start_minute < a.end_minute:
                    raise InvalidChange("working windows must not overlap")

    @property
    def dispatch_mode(self) -> str:
        """part-time drivers ride the corridor; full-time get open dispatch."""
        return "RideShare" if self.employment_mode == "part_time" else "RideHailing"

    def in_working_window(self, clock: datetime) -> bool:
        if not self.working_windows:
            return True
        return any(win.contains(clock) for win in self.working_windows)

    def to_dict(self) -> dict:
        return {
            "driver_id": self.driver_id,
            "name": self.name,
            "date_of_birth": self.date_of_birth,
            "license_no": self.license_no,
            "car_info": self.car_info,
            "earning_goal": self.earning_goal.to_dict() if self.earning_goal else None,
            "rating_floor": self.rating_floor,
            "likes_tips": self.likes_tips,
            "likes_conversation": self.likes_conversation,
            "employment_mode": self.employment_mode,
            "working_windows": [w.to_dict() for w in self.working_windows],
            "home_location": list(self.home_location),
            "home_route": [list(p) for p in self.home_route] if self.home_route else None,
            "destination_filter": sorted(self.destination_filter),
            "ride_length_band": list(self.ride_length_band) if self.ride_length_band else None,
            "assignment_mode": self.assignment_mode,
            "settings_lock": {
                "locked_until": (
                    self.settings_lock.locked_until.isoformat()
                    if self.settings_lock.locked_until
                    else None
                ),
                "window_days": self.settings_lock.window_days,
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DriverProfile":
        data = dict(data)
        if data.get("earning_goal"):
            data["earning_goal"] = EarningGoal.from_dict(data["earning_goal"])
        data["working_windows"] = tuple(WorkingWindow.from_dict(w) for w in data.get("working_windows", []))
        data["home_location"] = tuple(data.get("home_location", (0.0, 0.0)))
        if data.get("home_route"):
            data["home_route"] = tuple(tuple(p) for p in data["home_route"])
        data["destination_filter"] = frozenset(data.get("destination_filter", ()))
        if data.get("ride_length_band"):
            data["ride_length_band"] = tuple(data["ride_length_band"])
        lock = data.get("settings_lock") or {"locked_until": None, "window_days": 7}
        data["settings_lock"] = SettingsLock(
            locked_until=(
                datetime.fromisoformat(lock["locked_until"]) if lock.get("locked_until") else None
            ),
            window_days=lock.get("window_days", 7),
        )
        return cls(**data)


def update_profile(
    profile: DriverProfile,
    changes: dict,
    clock: datetime,
    lock_window_days: int | None = None,
) -> tuple[DriverProfile, datetime | None]:
    """Apply profile changes, honoring and refreshing the settings lock.

    Returns the new profile and the lock expiry now in force (None when
    only identity fields changed). Raises SettingsLocked with the expiry
    when a dispatch-affecting field is still inside its window.
    """
    if not changes:
        return profile, profile.settings_lock.locked_until

    editable = DISPATCH_SETTINGS | IDENTITY_SETTINGS
    for name in changes:
        if name not in editable:
            raise InvalidChange(f"unknown or immutable profile field {name!r}")

    locked_changes = [name for name in changes if name in DISPATCH_SETTINGS]
    lock = profile.settings_lock
    if locked_changes and lock.locked_until is not None and clock < lock.locked_until:
        raise SettingsLocked(sorted(locked_changes)[0], lock.locked_until)

    window_days = lock.window_days if lock_window_days is None else lock_window_days
    new_lock = lock
    if locked_changes:
        new_lock = SettingsLock(locked_until=clock + timedelta(days=window_days), window_days=window_days)

    updated = dataclasses.replace(profile, settings_lock=new_lock, **changes)
    return updated, new_lock.locked_until
