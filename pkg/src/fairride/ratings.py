"""Factor-based likert ratings, low-score alerts, and telemetry disputes.

Riders score the concrete factors of the experience instead of dropping
one opaque number. Records are never deleted: an upheld dispute marks a
rating excluded and every aggregate is recomputed over active records
from scratch, so exclusion can never leave stale state behind.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta


class UnknownLabel(ValueError):
    pass


class UnknownFactor(ValueError):
    pass


class DuplicateRating(Exception):
    pass


class TripNotCompleted(Exception):
    pass


class MissingTelemetry(Exception):
    pass


class NotVerifiableFactor(Exception):
    pass


LIKERT_SCALE = {
    "Very dissatisfied": 1,
    "Somewhat dissatisfied": 2,
    "Neither dissatisfied or satisfied": 3,
    "Somewhat satisfied": 4,
    "Very satisfied": 5,
}

DEFAULT_FACTORS = ("cleanliness", "politeness", "punctuality", "navigation", "conversation")
VERIFIABLE_FACTORS = frozenset({"punctuality"})

FEEDBACK_PROMPTS = {
    "memorable": "Describe the most memorable aspect of this trip",
    "improve": "What could have made this trip better?",
}


def likert_value(label: str) -> int:
    """Map one of the five verbal anchors to its 1..5 score."""
    try:
        return LIKERT_SCALE[label]
    except KeyError:
        raise UnknownLabel(f"{label!r} is not on the satisfaction scale") from None


@dataclass(frozen=True)
class RatingsConfig:
    window: int = 10  # W: ratings considered for alerts
    min_count: int = 5  # m: evidence gate
    alert_threshold: float = 3.0  # t: mean below this alerts
    arrival_grace_minutes: float = 3.0
    factors: tuple[str, ...] = DEFAULT_FACTORS
    verifiable: frozenset[str] = VERIFIABLE_FACTORS

    def __post_init__(self):
        if not self.window >= self.min_count >= 1:
            raise ValueError("alert config must satisfy W >= m >= 1")
        if not set(self.verifiable) <= set(self.factors):
            raise ValueError("verifiable factors must be part of the factor set")

    def to_dict(self) -> dict:
        return {
            "window": self.window,
            "min_count": self.min_count,
            "alert_threshold": self.alert_threshold,
            "arrival_grace_minutes": self.arrival_grace_minutes,
            "factors": list(self.factors),
            "verifiable": sorted(self.verifiable),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RatingsConfig":
        data = dict(data)
        data["factors"] = tuple(data["factors"])
        data["verifiable"] = frozenset(data["verifiable"])
        return cls(**data)


@dataclass
class RatingRecord:
    rating_id: str
    trip_id: str
    driver_id: str
    scores: dict[str, int]
    text: str | None
    prompt_id: str | None
    created_at: datetime
    status: str = "active"  # "active" | "disputed" | "excluded"


@dataclass
class Dispute:
    dispute_id: str
    rating_id: str
    factor: str
    evidence_ref: str
    status: str = "filed"  # "filed" | "upheld" | "denied"
    resolution_note: str = ""


@dataclass(frozen=True)
class FactorAggregate:
    factor: str
    window: int
    mean: float | None
    count: int
    alert: bool


@dataclass(frozen=True)
class Alert:
    factor: str
    mean: float
    count: int


@dataclass(frozen=True)
class TripTelemetry:
    trip_id: str
    promised_pickup_at: datetime
    arrived_at: datetime


class RatingsBook:
    """Per-platform rating store; one serialized write stream per driver."""

    def __init__(self, config: RatingsConfig | None = None):
        self.config = config or RatingsConfig()
        self.records: dict[str, RatingRecord] = {}
        self.by_trip: dict[str, str] = {}
        self.by_driver: dict[str, list[str]] = {}
        self.disputes: dict[str, Dispute] = {}
        self.completed_trips: dict[str, str] = {}  # trip id -> driver id
        self.telemetry: dict[str, TripTelemetry] = {}

    # -- trip registry -----------------------------------------------------

    def mark_trip_completed(
        self, trip_id: str, driver_id: str, telemetry: TripTelemetry | None = None
    ) -> None:
        self.completed_trips[trip_id] = driver_id
        if telemetry is not None:
            self.telemetry[trip_id] = telemetry

    # -- submissions ---------------------------------------------------------

    def submit_rating(
        self,
        trip_id: str,
        factor_labels: dict[str, str],
        clock: datetime,
        text: str | None = None,
        prompt_id: str | None = None,
        rating_id: str | None = None,
    ) -> RatingRecord:
        if trip_id not in self.completed_trips:
            raise TripNotCompleted(f"trip {trip_id!r} has not completed")
        if trip_id in self.by_trip:
            raise DuplicateRating(f"trip {trip_id!r} is already rated")
        scores = {}
        for factor, label in factor_labels.items():
            if factor not in self.config.factors:
                raise UnknownFactor(f"{factor!r} is not a rated factor")
            scores[factor] = likert_value(label)
        record = RatingRecord(
            rating_id=rating_id or f"rating-{len(self.records) + 1}",
            trip_id=trip_id,
            driver_id=self.completed_trips[trip_id],
            scores=scores,
            text=text,
            prompt_id=prompt_id,
            created_at=clock,
        )
        self.records[record.rating_id] = record
        self.by_trip[trip_id] = record.rating_id
        self.by_driver.setdefault(record.driver_id, []).append(record.rating_id)
        return record

    # -- aggregates and alerts ------------------------------------------------

    def _recent_active(self, driver_id: str, window: int) -> list[RatingRecord]:
        ids = self.by_driver.get(driver_id, [])
        active = [self.records[rid] for rid in ids if self.records[rid].status != "excluded"]
        return active[-window:]

    def factor_aggregates(self, driver_id: str) -> list[FactorAggregate]:
        cfg = self.config
        recent = self._recent_active(driver_id, cfg.window)
        out = []
        for factor in cfg.factors:
            scores = [r.scores[factor] for r in recent if factor in r.scores]
            mean = sum(scores) / len(scores) if scores else None
            alert = (
                len(scores) >= cfg.min_count
                and mean is not None
                and mean < cfg.alert_threshold
            )
            out.append(
                FactorAggregate(
                    factor=factor, window=cfg.window, mean=mean, count=len(scores), alert=alert
                )
            )
        return out

    def check_low_score_alerts(self, driver_id: str) -> list[Alert]:
        """Factors scoring continually low over the driver's recent window."""
        return [
            Alert(factor=a.factor, mean=a.mean, count=a.count)
            for a in self.factor_aggregates(driver_id)
            if a.alert
        ]

    # -- disputes -------------------------------------------------------------

    def file_dispute(
        self, rating_id: str, factor: str, evidence_ref: str, dispute_id: str | None = None
    ) -> Dispute:
        record = self.records[rating_id]
        if factor not in self.config.verifiable:
            raise NotVerifiableFactor(f"{factor!r} has no verifiable telemetry")
        if factor not in record.scores:
            raise UnknownFactor(f"rating {rating_id!r} does not score {factor!r}")
        dispute = Dispute(
            dispute_id=dispute_id or f"dispute-{len(self.disputes) + 1}",
            rating_id=rating_id,
            factor=factor,
            evidence_ref=evidence_ref,
        )
        self.disputes[dispute.dispute_id] = dispute
        record.status = "disputed"
        return dispute

    def resolve_dispute(self, dispute_id: str) -> Dispute:
        """Adjudicate a punctuality dispute against the trip telemetry.

        Upheld when the recorded arrival beat the promised pickup time
        plus the grace window; the rating then leaves every aggregate.
        """
        dispute = self.disputes[dispute_id]
        if dispute.status != "filed":
            return dispute
        record = self.records[dispute.rating_id]
        telemetry = self.telemetry.get(record.trip_id)
        if telemetry is None:
            raise MissingTelemetry(f"no telemetry recorded for trip {record.trip_id!r}")

        grace = timedelta(minutes=self.config.arrival_grace_minutes)
        deadline = telemetry.promised_pickup_at + grace
        if telemetry.arrived_at <= deadline:
            dispute.status = "upheld"
            dispute.resolution_note = (
                f"arrival {telemetry.arrived_at.isoformat()} met the promised "
                f"pickup {telemetry.promised_pickup_at.isoformat()} within the "
                f"{self.config.arrival_grace_minutes:.0f}-minute grace window; rating excluded"
            )
            record.status = "excluded"
        else:
            dispute.status = "denied"
            dispute.resolution_note = (
                f"arrival {telemetry.arrived_at.isoformat()} exceeded the promised "
                f"pickup {telemetry.promised_pickup_at.isoformat()} beyond the "
                f"{self.config.arrival_grace_minutes:.0f}-minute grace window; rating stands"
            )
            record.status = "active"
        return dispute
