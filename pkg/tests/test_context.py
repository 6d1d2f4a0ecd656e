from __future__ import annotations

from datetime import datetime, timezone

from fairride.bbn import CONTEXT_NODES, default_network, discretize_context
from fairride.bbn.context import day_type, fatigue_level, time_of_day, trip_length_band
from fairride.dispatch import DriverState, RideRequest
from fairride.earnings import EarningGoal
from fairride.profiles import DriverProfile

SAT_11AM = datetime(2026, 3, 7, 11, 0, tzinfo=timezone.utc)
THU_8PM = datetime(2026, 3, 5, 20, 0, tzinfo=timezone.utc)


def request(eta_km=2.5, duration=20.0, category="downtown", rating=4.8):
    return RideRequest(
        id="r1",
        pickup=(eta_km, 0.0),
        dropoff=(eta_km + 5.0, 0.0),
        request_time=SAT_11AM,
        duration_minutes=duration,
        distance_km=5.0,
        destination_category=category,
        rider_rating=rating,
        fare_c=1500,
    )


def state(hours=0.0, earned=0, location=(0.0, 0.0)):
    return DriverState(
        driver_id="d1",
        location=location,
        hours_driven_today=hours,
        earnings_today_c=earned,
    )


class TestBins:
    def test_pickup_eta_five_minutes_is_near(self):
        # 2.5 km at 30 km/h is exactly 5 minutes
        ev = discretize_context(request(eta_km=2.5), state(), SAT_11AM)
        assert ev["PickupDistance"] == "near"

    def test_pickup_eta_fifteen_minutes_is_far(self):
        ev = discretize_context(request(eta_km=7.5), state(), SAT_11AM)
        assert ev["PickupDistance"] == "far"

    def test_riding_all_day_is_tired_and_first_ride_fresh(self):
        assert fatigue_level(9.0) == "tired"
        assert fatigue_level(0.0) == "fresh"
        assert fatigue_level(5.0) == "moderate"

    def test_saturday_morning(self):
        assert time_of_day(SAT_11AM) == "morning"
        assert day_type(SAT_11AM) == "weekend"

    def test_thursday_evening(self):
        assert time_of_day(THU_8PM) == "evening"
        assert day_type(THU_8PM) == "weekday"

    def test_trip_length_bands(self):
        assert trip_length_band(10.0) == "short"
        assert trip_length_band(20.0) == "medium"
        assert trip_length_band(55.0) == "long"

    def test_unknown_category_maps_to_other(self):
        ev = discretize_context(request(category="zoo"), state(), SAT_11AM)
        assert ev["DestinationCategory"] == "other"


class TestTotality:
    def test_covers_every_context_node(self):
        ev = discretize_context(request(), state(), SAT_11AM)
        assert set(ev) == set(CONTEXT_NODES)

    def test_always_valid_against_default_network(self):
        net = default_network()
        clocks = [SAT_11AM, THU_8PM, datetime(2026, 3, 9, 2, 30, tzinfo=timezone.utc)]
        for clock in clocks:
            for hours in (0.0, 3.0, 7.0, 12.0):
                for duration in (5.0, 15.0, 40.0, 90.0):
                    ev = discretize_context(request(duration=duration), state(hours=hours), clock)
                    for node, value in ev.items():
                        assert value in net.spec.node(node).states

    def test_incentive_defaults_to_no(self):
        ev = discretize_context(request(), state(), SAT_11AM)
        assert ev["IncentivePresent"] == "no"


class TestGoalProgress:
    def test_no_profile_defaults_on_track(self):
        ev = discretize_context(request(), state(), SAT_11AM)
        assert ev["GoalProgress"] == "on_track"

    def test_goal_met(self):
        profile = DriverProfile(driver_id="d1", earning_goal=EarningGoal(10_000, "daily"))
        ev = discretize_context(request(), state(earned=10_000), SAT_11AM, profile)
        assert ev["GoalProgress"] == "met"

    def test_behind_at_noon_with_under_half(self):
        profile = DriverProfile(driver_id="d1", earning_goal=EarningGoal(10_000, "daily"))
        noon = datetime(2026, 3, 7, 12, 0, tzinfo=timezone.utc)
        ev = discretize_context(request(), state(earned=4_000), noon, profile)
        assert ev["GoalProgress"] == "behind"


def test_determinism():
    ev1 = discretize_context(request(), state(), SAT_11AM)
    ev2 = discretize_context(request(), state(), SAT_11AM)
    assert ev1 == ev2
