"""Turning ride requests into transparent offers.

The pipeline: hard-constraint filtering, per-driver acceptance scoring,
incentives when the probability dips below the community threshold (or
a stated preference had to be violated), bundling of simultaneous
options, and no-penalty resolution. Dispatch never reads a driver's
decline history — the only adaptation channel is the acceptance model,
and the only driver ordering is constraint eligibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timedelta

import numpy as np

from .bbn import (
    BayesNetwork,
    Evidence,
    FactorAttribution,
    discretize_context,
    infer_acceptance,
    pickup_eta_minutes,
    top_factors,
)
from .bbn.context import NOMINAL_SPEED_KMH
from .earnings import cents
from .profiles import DriverProfile

MIN_OFFER_WINDOW_FLOOR_S = 45.0


class AlreadyResolved(Exception):
    pass


class DecisionAfterExpiry(Exception):
    pass


@dataclass(frozen=True)
class RideRequest:
    id: str
    pickup: tuple[float, float]
    dropoff: tuple[float, float]
    request_time: datetime
    duration_minutes: float
    distance_km: float
    destination_category: str
    rider_rating: float
    fare_c: int
    traffic: bool = False
    area_type: str = "urban"  # "urban" | "remote"
    route_issues: str | None = None

    def __post_init__(self):
        if self.duration_minutes <= 0 or self.distance_km <= 0 or self.fare_c <= 0:
            raise ValueError("duration, distance and fare must be positive")
        if not 1.0 <= self.rider_rating <= 5.0:
            raise ValueError("rider rating must sit in [1, 5]")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "pickup": list(self.pickup),
            "dropoff": list(self.dropoff),
            "request_time": self.request_time.isoformat(),
            "duration_minutes": self.duration_minutes,
            "distance_km": self.distance_km,
            "destination_category": self.destination_category,
            "rider_rating": self.rider_rating,
            "fare_c": self.fare_c,
            "traffic": self.traffic,
            "area_type": self.area_type,
            "route_issues": self.route_issues,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RideRequest":
        data = dict(data)
        data["pickup"] = tuple(data["pickup"])
        data["dropoff"] = tuple(data["dropoff"])
        data["request_time"] = datetime.fromisoformat(data["request_time"])
        return cls(**data)


@dataclass
class DriverState:
    driver_id: str
    location: tuple[float, float] = (0.0, 0.0)
    on_trip: bool = False
    queued_request_id: str | None = None
    hours_driven_today: float = 0.0
    earnings_today_c: int = 0
    earnings_week_c: int = 0
    available: bool = True

    def __post_init__(self):
        if self.hours_driven_today < 0:
            raise ValueError("hours driven must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "driver_id": self.driver_id,
            "location": list(self.location),
            "on_trip": self.on_trip,
            "queued_request_id": self.queued_request_id,
            "hours_driven_today": self.hours_driven_today,
            "earnings_today_c": self.earnings_today_c,
            "earnings_week_c": self.earnings_week_c,
            "available": self.available,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DriverState":
        data = dict(data)
        data["location"] = tuple(data["location"])
        return cls(**data)


@dataclass(frozen=True)
class MatchConfig:
    incentive_threshold: float = 0.6  # τ, community-votable
    incentive_scale: float = 0.5  # κ
    min_offer_window_s: float = 120.0
    ride_hailing_radius_km: float = 10.0
    detour_budget_min: float = 15.0
    bundle_size: int = 3
    violated_bonus_rate: float = 0.2

    def __post_init__(self):
        if not 0.0 < self.incentive_threshold <= 1.0:
            raise ValueError("incentive threshold must sit in (0, 1]")
        if self.incentive_scale < 0:
            raise ValueError("incentive scale must be nonnegative")
        if self.min_offer_window_s <= MIN_OFFER_WINDOW_FLOOR_S:
            raise ValueError(
                f"offer window must exceed {MIN_OFFER_WINDOW_FLOOR_S:.0f} s, "
                f"got {self.min_offer_window_s}"
            )
        if not 1 <= self.bundle_size <= 3:
            raise ValueError("bundle size must sit in 1..3")
        if self.violated_bonus_rate < 0:
            raise ValueError("violated bonus rate must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "incentive_threshold": self.incentive_threshold,
            "incentive_scale": self.incentive_scale,
            "min_offer_window_s": self.min_offer_window_s,
            "ride_hailing_radius_km": self.ride_hailing_radius_km,
            "detour_budget_min": self.detour_budget_min,
            "bundle_size": self.bundle_size,
            "violated_bonus_rate": self.violated_bonus_rate,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MatchConfig":
        return cls(**data)


@dataclass(frozen=True)
class Violation:
    preference: str
    reason: str


@dataclass(frozen=True)
class RideOffer:
    offer_id: str
    request_id: str
    driver_id: str
    probability: float
    factors: tuple[FactorAttribution, ...]
    incentive_c: int
    violated_preferences: tuple[Violation, ...]
    issued_at: datetime
    expires_at: datetime
    evidence: Evidence
    fare_c: int
    pickup_eta_minutes: float
    duration_minutes: float
    distance_km: float
    destination_category: str
    rider_rating: float
    traffic: bool
    area_type: str
    route_issues: str | None

    def __post_init__(self):
        window = (self.expires_at - self.issued_at).total_seconds()
        if window <= MIN_OFFER_WINDOW_FLOOR_S:
            raise ValueError(f"offer window {window:.0f} s is below the floor")
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError("probability must sit in [0, 1]")
        if self.incentive_c < 0:
            raise ValueError("incentive must be nonnegative")
        if len(self.factors) > 3:
            raise ValueError("offers carry at most 3 factors")
        for violation in self.violated_preferences:
            if not violation.reason:
                raise ValueError("violated preferences need a reason")

    def to_dict(self) -> dict:
        return {
            "offer_id": self.offer_id,
            "request_id": self.request_id,
            "driver_id": self.driver_id,
            "probability": self.probability,
            "factors": [
                {"factor": f.factor, "impact": f.impact, "direction": f.direction}
                for f in self.factors
            ],
            "incentive_c": self.incentive_c,
            "violated_preferences": [
                {"preference": v.preference, "reason": v.reason} for v in self.violated_preferences
            ],
            "issued_at": self.issued_at.isoformat(),
            "expires_at": self.expires_at.isoformat(),
            "evidence": dict(sorted(self.evidence.items())),
            "fare_c": self.fare_c,
            "pickup_eta_minutes": self.pickup_eta_minutes,
            "duration_minutes": self.duration_minutes,
            "distance_km": self.distance_km,
            "destination_category": self.destination_category,
            "rider_rating": self.rider_rating,
            "traffic": self.traffic,
            "area_type": self.area_type,
            "route_issues": self.route_issues,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RideOffer":
        data = dict(data)
        data["factors"] = tuple(FactorAttribution(**f) for f in data["factors"])
        data["violated_preferences"] = tuple(Violation(**v) for v in data["violated_preferences"])
        data["issued_at"] = datetime.fromisoformat(data["issued_at"])
        data["expires_at"] = datetime.fromisoformat(data["expires_at"])
        return cls(**data)


@dataclass(frozen=True)
class OfferBundle:
    driver_id: str
    offers: tuple[RideOffer, ...]
    at_most_one_accept: bool = True

    def __post_init__(self):
        if not 1 <= len(self.offers) <= 3:
            raise ValueError("bundles carry 1..3 offers")
        requests = [o.request_id for o in self.offers]
        if len(set(requests)) != len(requests):
            raise ValueError("bundle offers must reference distinct requests")


@dataclass(frozen=True)
class OfferOutcome:
    offer_id: str
    request_id: str
    driver_id: str
    status: str  # "accepted" | "declined" | "expired" | "voided"
    decided_at: datetime


# -- constraint filtering --------------------------------------------------


def _euclid(a: tuple[float, float], b: tuple[float, float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def corridor_detour_minutes(
    current: tuple[float, float],
    pickup: tuple[float, float],
    dropoff: tuple[float, float],
    destination: tuple[float, float],
) -> float:
    """Extra minutes the trip inserts into the driver's declared leg."""
    direct = _euclid(current, destination)
    with_trip = _euclid(current, pickup) + _euclid(pickup, dropoff) + _euclid(dropoff, destination)
    return (with_trip - direct) / NOMINAL_SPEED_KMH * 60.0


def check_constraints(
    request: RideRequest,
    profile: DriverProfile,
    state: DriverState,
    clock: datetime,
    cfg: MatchConfig,
) -> list[Violation]:
    """Every constraint the pairing breaks; empty means eligible.

    Availability and trip/queue capacity are hard gates handled by the
    caller; this checks the preference- and geometry-shaped constraints
    an offer could name as violated.
    """
    violations: list[Violation] = []

    if not profile.in_working_window(clock):
        violations.append(
            Violation("working_window", "offer time falls outside your preferred working hours")
        )

    if request.destination_category in profile.destination_filter:
        violations.append(
            Violation(
                "destination_filter",
                f"destination category '{request.destination_category}' is on your filter list",
            )
        )

    if profile.ride_length_band is not None:
        lo, hi = profile.ride_length_band
        if not lo <= request.duration_minutes <= hi:
            violations.append(
                Violation(
                    "ride_length",
                    f"trip of {request.duration_minutes:.0f} min sits outside your "
                    f"{lo:.0f}-{hi:.0f} min preference",
                )
            )

    if profile.dispatch_mode == "RideHailing":
        distance = _euclid(state.location, request.pickup)
        if distance > cfg.ride_hailing_radius_km:
            violations.append(
                Violation(
                    "pickup_radius",
                    f"pickup is {distance:.1f} km away, outside the {cfg.ride_hailing_radius_km:.0f} km radius",
                )
            )
    else:  # RideShare: the trip must fit the declared route corridor
        route = profile.home_route or (state.location, profile.home_location)
        detour = corridor_detour_minutes(state.location, request.pickup, request.dropoff, route[1])
        if detour > cfg.detour_budget_min:
            violations.append(
                Violation(
                    "route_corridor",
                    f"trip adds {detour:.0f} min of detour, over your {cfg.detour_budget_min:.0f} min budget",
                )
            )

    return violations


def capacity_ok(profile: DriverProfile, state: DriverState) -> bool:
    if not state.available:
        return False
    if state.on_trip:
        return profile.assignment_mode == "queued" and state.queued_request_id is None
    return True


def filter_candidates(
    request: RideRequest,
    drivers: list[tuple[DriverProfile, DriverState]],
    clock: datetime,
    cfg: MatchConfig,
    rng: np.random.Generator | None = None,
) -> list[tuple[DriverProfile, DriverState]]:
    """Drivers eligible for this request, deterministically ordered.

    Base order is driver id; drivers who chose random assignment are
    then permuted among their own slots with the stream RNG.
    """
    eligible = [
        (profile, state)
        for profile, state in sorted(drivers, key=lambda d: d[0].driver_id)
        if capacity_ok(profile, state) and not check_constraints(request, profile, state, clock, cfg)
    ]
    if rng is not None:
        slots = [i for i, (p, _) in enumerate(eligible) if p.assignment_mode == "random"]
        shuffled = [eligible[i] for i in slots]
        order = rng.permutation(len(slots))
        for slot, pick in zip(slots, order):
            eligible[slot] = shuffled[int(pick)]
    return eligible


# -- scoring and offers ------------------------------------------------------


def compute_incentive(p: float, fare_c: int, violated: bool, cfg: MatchConfig) -> int:
    """Linear ramp below the threshold, plus a flat bonus for violations."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("probability must sit in [0, 1]")
    if fare_c <= 0:
        raise ValueError("fare must be positive")
    tau = cfg.incentive_threshold
    amount = fare_c * cfg.incentive_scale * max(0.0, tau - p) / tau
    if violated:
        amount += cfg.violated_bonus_rate * fare_c
    return cents(amount)


def make_offer(
    request: RideRequest,
    profile: DriverProfile,
    state: DriverState,
    network: BayesNetwork,
    cfg: MatchConfig,
    clock: datetime,
    violations: tuple[Violation, ...] = (),
    offer_id: str | None = None,
) -> RideOffer:
    """Score one request for one driver and wrap it as a transparent offer.

    The probability shown is the no-incentive acceptance probability (the
    evidence carries IncentivePresent=no); the incentive is the sweetener
    decided from it.
    """
    evidence = discretize_context(request, state, clock, profile)
    probability = infer_acceptance(network, evidence)
    factors = tuple(top_factors(network, evidence, k=3))
    incentive_c = compute_incentive(probability, request.fare_c, bool(violations), cfg)
    return RideOffer(
        offer_id=offer_id or f"{request.id}:{profile.driver_id}",
        request_id=request.id,
        driver_id=profile.driver_id,
        probability=probability,
        factors=factors,
        incentive_c=incentive_c,
        violated_preferences=tuple(violations),
        issued_at=clock,
        expires_at=clock + timedelta(seconds=cfg.min_offer_window_s),
        evidence=evidence,
        fare_c=request.fare_c,
        pickup_eta_minutes=pickup_eta_minutes(state.location, request.pickup),
        duration_minutes=request.duration_minutes,
        distance_km=request.distance_km,
        destination_category=request.destination_category,
        rider_rating=request.rider_rating,
        traffic=request.traffic,
        area_type=request.area_type,
        route_issues=request.route_issues,
    )


def bundle_options(driver_id: str, offers: list[RideOffer], cfg: MatchConfig) -> OfferBundle:
    """The driver's best simultaneous options: top-N by probability."""
    if not offers:
        raise ValueError("a bundle needs at least one offer")
    mine = [o for o in offers if o.driver_id == driver_id]
    if len(mine) != len(offers):
        raise ValueError("bundle offers must belong to the driver")
    ranked = sorted(mine, key=lambda o: (-o.probability, o.issued_at, o.request_id))
    return OfferBundle(driver_id=driver_id, offers=tuple(ranked[: cfg.bundle_size]))


def experienced_evidence(offer: RideOffer) -> Evidence:
    """The context as the driver experiences it: incentive flag included.

    Simulated drivers decide on this; the learning observation uses the
    offer's own evidence verbatim so the scored rows are the taught rows.
    """
    evidence = dict(offer.evidence)
    if offer.incentive_c > 0 and "IncentivePresent" in evidence:
        evidence["IncentivePresent"] = "yes"
    return evidence


def resolve_offer(
    offer: RideOffer,
    decision: str | None,
    clock: datetime,
    already_resolved: bool = False,
) -> tuple[OfferOutcome, str]:
    """Settle one offer; returns the outcome and the learning outcome label.

    A decision inside the window resolves to accepted/declined; silence
    past expiry resolves to expired, and a decision arriving after expiry
    raises DecisionAfterExpiry for the caller to settle as expired.
    Declines and expiries feed the acceptance model a decline observation
    and change nothing else — dispatch keeps no score against the driver.
    """
    if already_resolved:
        raise AlreadyResolved(f"offer {offer.offer_id} is already resolved")
    if decision not in ("accept", "decline", None):
        raise ValueError(f"unknown decision {decision!r}")

    if clock >= offer.expires_at:
        if decision is not None:
            raise DecisionAfterExpiry(f"offer {offer.offer_id} expired at {offer.expires_at.isoformat()}")
        status, outcome_label = "expired", "decline"
    elif decision is None:
        raise ValueError("no decision supplied before expiry")
    else:
        status = "accepted" if decision == "accept" else "declined"
        outcome_label = "accept" if decision == "accept" else "decline"

    outcome = OfferOutcome(
        offer_id=offer.offer_id,
        request_id=offer.request_id,
        driver_id=offer.driver_id,
        status=status,
        decided_at=clock,
    )
    return outcome, outcome_label


def void_offer(offer: RideOffer, clock: datetime) -> OfferOutcome:
    """Withdraw a bundle sibling after an accept; not a decline, no observation."""
    return OfferOutcome(
        offer_id=offer.offer_id,
        request_id=offer.request_id,
        driver_id=offer.driver_id,
        status="voided",
        decided_at=clock,
    )
