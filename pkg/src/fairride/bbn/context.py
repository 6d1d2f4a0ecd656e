"""Mapping concrete offer situations onto the default network's variables.

The bins here are the documented contract: every valid request/state
pair maps to a complete assignment over the context variables, so
discretization can never fail at offer time.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone
from importlib import resources
from typing import TYPE_CHECKING

from ..earnings import goal_progress
from .network import BayesNetwork, Evidence, Preference, build_network, elicit_priors
from .spec import NetworkSpec

if TYPE_CHECKING:  # pragma: no cover
    from ..dispatch import DriverState, RideRequest
    from ..profiles import DriverProfile

CONTEXT_NODES = (
    "TimeOfDay",
    "DayType",
    "PickupDistance",
    "TripLength",
    "DestinationCategory",
    "RiderRating",
    "Fatigue",
    "GoalProgress",
    "IncentivePresent",
)

# bin boundaries (documented contract)
NEAR_PICKUP_MAX_MIN = 7.0
SHORT_TRIP_MAX_MIN = 15.0
LONG_TRIP_MIN_MIN = 40.0
HIGH_RATING_MIN = 4.5
FRESH_MAX_HOURS = 3.0
TIRED_MIN_HOURS = 7.0

NOMINAL_SPEED_KMH = 30.0  # desk-scale geometry: straight lines at city speed


def _load_default_doc() -> dict:
    text = resources.files("fairride.data").joinpath("default_network.json").read_text()
    return json.loads(text)


def default_network_spec() -> NetworkSpec:
    return NetworkSpec.from_dict(_load_default_doc())


def default_network(smoothing: float = 1.0) -> BayesNetwork:
    """Fresh default network: uniform acceptance, seeded attractiveness map."""
    doc = _load_default_doc()
    spec = NetworkSpec.from_dict(doc)
    net = build_network(spec, smoothing=smoothing)
    for name, rows in doc.get("seed_counts", {}).items():
        table = net.cpt_counts[name]
        for entry in rows:
            assignment = dict(part.split("=", 1) for part in entry["parents"].split("|"))
            table[spec.row_index(name, assignment)] = entry["counts"]
    net.validate()
    return net


def pickup_eta_minutes(driver_location: tuple[float, float], pickup: tuple[float, float]) -> float:
    dx = driver_location[0] - pickup[0]
    dy = driver_location[1] - pickup[1]
    return (dx * dx + dy * dy) ** 0.5 / NOMINAL_SPEED_KMH * 60.0


def time_of_day(clock: datetime) -> str:
    hour = clock.astimezone(timezone.utc).hour
    if 5 <= hour < 12:
        return "morning"
    if 12 <= hour < 17:
        return "afternoon"
    if 17 <= hour < 22:
        return "evening"
    return "night"


def day_type(clock: datetime) -> str:
    return "weekend" if clock.astimezone(timezone.utc).weekday() >= 5 else "weekday"


def fatigue_level(hours_driven_today: float) -> str:
    if hours_driven_today < FRESH_MAX_HOURS:
        return "fresh"
    if hours_driven_today > TIRED_MIN_HOURS:
        return "tired"
    return "moderate"


def trip_length_band(duration_minutes: float) -> str:
    if duration_minutes < SHORT_TRIP_MAX_MIN:
        return "short"
    if duration_minutes > LONG_TRIP_MIN_MIN:
        return "long"
    return "medium"


def destination_bin(category: str) -> str:
    return category if category in ("airport", "downtown", "restaurant", "residential") else "other"


def discretize_context(
    request: "RideRequest",
    driver_state: "DriverState",
    clock: datetime,
    profile: "DriverProfile | None" = None,
) -> Evidence:
    """Total mapping from one concrete offer situation to network evidence.

    GoalProgress comes from the driver's stated goal when one exists
    (on_track otherwise); IncentivePresent starts at "no" — the
    dispatcher flips it once an incentive is actually attached.
    """
    goal_state = "on_track"
    if profile is not None and profile.earning_goal is not None:
        earned = (
            driver_state.earnings_today_c
            if profile.earning_goal.period == "daily"
            else driver_state.earnings_week_c
        )
        goal_state = goal_progress(profile.earning_goal, earned, clock).state

    return {
        "TimeOfDay": time_of_day(clock),
        "DayType": day_type(clock),
        "PickupDistance": (
            "near"
            if pickup_eta_minutes(driver_state.location, request.pickup) <= NEAR_PICKUP_MAX_MIN
            else "far"
        ),
        "TripLength": trip_length_band(request.duration_minutes),
        "DestinationCategory": destination_bin(request.destination_category),
        "RiderRating": "high" if request.rider_rating >= HIGH_RATING_MIN else "low",
        "Fatigue": fatigue_level(driver_state.hours_driven_today),
        "GoalProgress": goal_state,
        "IncentivePresent": "no",
    }


# canonical minute spans of the trip-length states, used to decide which
# states a stated ride-length band covers entirely
TRIP_LENGTH_SPANS = {"short": (0.0, 15.0), "medium": (15.0, 40.0), "long": (40.0, 180.0)}


def profile_preferences(profile: "DriverProfile", spec: NetworkSpec) -> list[Preference]:
    """Translate profile-stated ride preferences into network leans.

    Destination-filter categories lean decline; ride-length states fully
    inside the preferred band and a stated rating floor lean accept.
    Dimensions missing from the spec are skipped — hard constraints stay
    enforced by dispatch filtering regardless.
    """
    prefs: list[Preference] = []
    if spec.has_node("DestinationCategory"):
        for category in sorted(profile.destination_filter):
            prefs.append(Preference("DestinationCategory", destination_bin(category), lean="decline"))
    if profile.ride_length_band is not None and spec.has_node("TripLength"):
        lo, hi = profile.ride_length_band
        for state, (smin, smax) in TRIP_LENGTH_SPANS.items():
            if lo <= smin and smax <= hi:
                prefs.append(Preference("TripLength", state, lean="accept"))
    if (
        profile.rating_floor is not None
        and profile.rating_floor >= HIGH_RATING_MIN
        and spec.has_node("RiderRating")
    ):
        prefs.append(Preference("RiderRating", "low", lean="decline"))
    return prefs


def elicit_profile_priors(
    network: BayesNetwork, profile: "DriverProfile", equivalent_sample_size: float = 10.0
) -> BayesNetwork:
    """Seed a driver's fresh network with their profile-stated preferences."""
    prefs = profile_preferences(profile, network.spec)
    return elicit_priors(network, prefs, equivalent_sample_size)
