"""Seeded synthetic demand: a Poisson stream of plausible ride requests.

One master seed, split per subsystem by stable labels, so reordering one
consumer never perturbs another and every run is bit-reproducible.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone

import numpy as np

from ..dispatch import MatchConfig, RideRequest
from ..earnings import cents

DEFAULT_START = datetime(2026, 3, 2, 8, 0, tzinfo=timezone.utc)

CATEGORY_WEIGHTS = {
    "airport": 0.15,
    "downtown": 0.30,
    "restaurant": 0.20,
    "residential": 0.25,
    "other": 0.10,
}

BASE_FARE_C = 250
FARE_PER_KM_C = 110
FARE_PER_MIN_C = 30


def rng_for(seed: int, label: str) -> np.random.Generator:
    """Independent deterministic stream for one subsystem label."""
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    label_key = int.from_bytes(digest[:8], "big")
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(label_key,)))


@dataclass(frozen=True)
class SimConfig:
    seed: int = 0
    n_drivers: int = 5
    requests_per_hour: float = 30.0
    duration_hours: float = 4.0
    match: MatchConfig = field(default_factory=MatchConfig)
    metric_bins: int = 10
    city_km: float = 30.0
    learning_enabled: bool = True
    start_time: datetime = DEFAULT_START

    def __post_init__(self):
        if self.duration_hours < 0:
            raise ValueError("duration must be nonnegative")
        if self.n_drivers < 0:
            raise ValueError("driver count must be nonnegative")
        if self.metric_bins < 1:
            raise ValueError("metric bins must be positive")

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "n_drivers": self.n_drivers,
            "requests_per_hour": self.requests_per_hour,
            "duration_hours": self.duration_hours,
            "match": self.match.to_dict(),
            "metric_bins": self.metric_bins,
            "city_km": self.city_km,
            "learning_enabled": self.learning_enabled,
            "start_time": self.start_time.isoformat(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SimConfig":
        data = dict(data)
        if "match" in data:
            data["match"] = MatchConfig.from_dict(data["match"])
        if "start_time" in data and isinstance(data["start_time"], str):
            data["start_time"] = datetime.fromisoformat(data["start_time"])
        return cls(**data)


def generate_trip_stream(cfg: SimConfig) -> list[RideRequest]:
    """Time-ordered requests drawn from the documented distributions."""
    rng = rng_for(cfg.seed, "trip_stream")
    categories = list(CATEGORY_WEIGHTS)
    weights = np.array(list(CATEGORY_WEIGHTS.values()))

    requests: list[RideRequest] = []
    elapsed_h = 0.0
    n = 0
    while True:
        elapsed_h += float(rng.exponential(1.0 / cfg.requests_per_hour))
        if elapsed_h >= cfg.duration_hours:
            break
        n += 1
        pickup = tuple(rng.uniform(0.0, cfg.city_km, size=2).round(3))
        duration_min = float(np.clip(rng.gamma(shape=2.0, scale=12.0), 4.0, 90.0))
        speed_kmh = float(rng.uniform(22.0, 35.0))
        distance_km = round(duration_min / 60.0 * speed_kmh, 3)
        heading = float(rng.uniform(0.0, 2.0 * np.pi))
        dropoff = (
            round(float(np.clip(pickup[0] + distance_km * np.cos(heading), 0.0, cfg.city_km)), 3),
            round(float(np.clip(pickup[1] + distance_km * np.sin(heading), 0.0, cfg.city_km)), 3),
        )
        category = categories[int(rng.choice(len(categories), p=weights / weights.sum()))]
        if rng.random() < 0.8:
            rating = float(rng.uniform(4.3, 5.0))
        else:
            rating = float(rng.uniform(2.5, 4.5))
        fare_c = BASE_FARE_C + cents(FARE_PER_KM_C * distance_km) + cents(FARE_PER_MIN_C * duration_min)
        requests.append(
            RideRequest(
                id=f"req-{n:06d}",
                pickup=pickup,
                dropoff=dropoff,
                request_time=cfg.start_time + timedelta(hours=elapsed_h),
                duration_minutes=round(duration_min, 2),
                distance_km=distance_km,
                destination_category=category,
                rider_rating=round(rating, 2),
                fare_c=fare_c,
                traffic=bool(rng.random() < 0.2),
                area_type="remote" if rng.random() < 0.15 else "urban",
                route_issues="construction reroute" if rng.random() < 0.05 else None,
            )
        )
    return requests
