from __future__ import annotations

from datetime import datetime, timedelta, timezone

import numpy as np
import pytest

from fairride.bbn import default_network, infer_acceptance
from fairride.dispatch import (
    AlreadyResolved,
    DecisionAfterExpiry,
    DriverState,
    MatchConfig,
    RideRequest,
    bundle_options,
    check_constraints,
    compute_incentive,
    corridor_detour_minutes,
    experienced_evidence,
    filter_candidates,
    make_offer,
    resolve_offer,
    void_offer,
)
from fairride.profiles import DriverProfile, WorkingWindow

NOW = datetime(2026, 3, 7, 11, 0, tzinfo=timezone.utc)
CFG = MatchConfig()


def request(rid="r1", pickup=(4.0, 0.0), dropoff=(8.0, 0.0), duration=20.0, category="downtown", fare=1500):
    return RideRequest(
        id=rid,
        pickup=pickup,
        dropoff=dropoff,
        request_time=NOW,
        duration_minutes=duration,
        distance_km=5.0,
        destination_category=category,
        rider_rating=4.8,
        fare_c=fare,
    )


def driver(did="d1", mode="full_time", **profile_kw):
    profile = DriverProfile(driver_id=did, employment_mode=mode, **profile_kw)
    state = DriverState(driver_id=did)
    return profile, state


def fixture_network(p_accept=0.7):
    """Default network with every acceptance row pinned to one probability."""
    net = default_network()
    total = 10.0
    net.cpt_counts["Accept"][:] = [p_accept * total, (1 - p_accept) * total]
    return net


class TestFilterCandidates:
    def test_destination_filter_excludes(self):
        profile, state = driver(destination_filter=frozenset({"airport"}))
        req = request(category="airport")
        assert filter_candidates(req, [(profile, state)], NOW, CFG) == []
        violations = check_constraints(req, profile, state, NOW, CFG)
        assert [v.preference for v in violations] == ["destination_filter"]
        assert violations[0].reason

    def test_radius_boundary(self):
        profile, state = driver()
        near = request(pickup=(4.0, 0.0))
        far = request(pickup=(14.0, 0.0))
        assert filter_candidates(near, [(profile, state)], NOW, CFG) == [(profile, state)]
        assert filter_candidates(far, [(profile, state)], NOW, CFG) == []

    def test_corridor_math_on_three_point_fixture(self):
        # driver at origin heading home to (10, 0); straight-line legs at 30 km/h
        profile, state = driver(
            mode="part_time",
            home_location=(10.0, 0.0),
            home_route=((0.0, 0.0), (10.0, 0.0)),
        )
        on_corridor = request(pickup=(2.0, 5.0), dropoff=(6.0, 5.0))
        # detour km: sqrt(29) + 4 + sqrt(41) - 10 = 5.7876...; about 11.6 min
        detour = corridor_detour_minutes((0.0, 0.0), (2.0, 5.0), (6.0, 5.0), (10.0, 0.0))
        assert detour == pytest.approx(11.575, abs=0.01)
        assert filter_candidates(on_corridor, [(profile, state)], NOW, CFG) == [(profile, state)]

        off_corridor = request(pickup=(2.0, 10.0), dropoff=(6.0, 10.0))
        detour = corridor_detour_minutes((0.0, 0.0), (2.0, 10.0), (6.0, 10.0), (10.0, 0.0))
        assert detour == pytest.approx(29.94, abs=0.01)
        assert filter_candidates(off_corridor, [(profile, state)], NOW, CFG) == []

    def test_working_window_gate(self):
        windows = (WorkingWindow(weekday=5, start_minute=9 * 60, end_minute=17 * 60),)
        profile, state = driver(working_windows=windows)
        assert filter_candidates(request(), [(profile, state)], NOW, CFG)  # Sat 11:00
        night = NOW.replace(hour=23)
        assert filter_candidates(request(), [(profile, state)], night, CFG) == []

    def test_ride_length_band(self):
        profile, state = driver(ride_length_band=(10.0, 30.0))
        assert filter_candidates(request(duration=20.0), [(profile, state)], NOW, CFG)
        assert filter_candidates(request(duration=45.0), [(profile, state)], NOW, CFG) == []

    def test_on_trip_only_queued_opt_in(self):
        queued_profile, queued_state = driver("dq")
        queued_profile = DriverProfile(driver_id="dq", assignment_mode="queued")
        queued_state.on_trip = True
        random_profile, random_state = driver("dr")
        random_state.on_trip = True
        out = filter_candidates(
            request(), [(queued_profile, queued_state), (random_profile, random_state)], NOW, CFG
        )
        assert [p.driver_id for p, _ in out] == ["dq"]
        # queue already holds a trip: no second queued offer
        queued_state.queued_request_id = "r0"
        assert filter_candidates(request(), [(queued_profile, queued_state)], NOW, CFG) == []

    def test_unavailable_driver_excluded(self):
        profile, state = driver()
        state.available = False
        assert filter_candidates(request(), [(profile, state)], NOW, CFG) == []

    def test_random_mode_drivers_shuffled_deterministically(self):
        drivers = [driver(f"d{i}")[0:2] for i in range(6)]
        rng1 = np.random.default_rng(42)
        rng2 = np.random.default_rng(42)
        out1 = filter_candidates(request(), drivers, NOW, CFG, rng=rng1)
        out2 = filter_candidates(request(), drivers, NOW, CFG, rng=rng2)
        assert [p.driver_id for p, _ in out1] == [p.driver_id for p, _ in out2]


class TestComputeIncentive:
    def test_threshold_is_exclusive(self):
        assert compute_incentive(0.6, 1000, False, CFG) == 0

    def test_zero_probability_full_ramp(self):
        assert compute_incentive(0.0, 1000, False, CFG) == 500  # 10.00 * 0.5

    def test_violated_flat_bonus(self):
        assert compute_incentive(0.9, 1000, True, CFG) == 200  # 20% of 10.00

    def test_just_below_threshold_pays_something(self):
        assert compute_incentive(0.599, 1000, False, CFG) > 0

    def test_monotone_non_increasing_in_p(self):
        values = [compute_incentive(i / 100.0, 1000, False, CFG) for i in range(101)]
        assert all(a >= b for a, b in zip(values, values[1:]))
        assert values[60] == 0


class TestMakeOffer:
    def test_offer_fields_from_fixture(self):
        net = fixture_network(0.7)
        profile, state = driver()
        offer = make_offer(request(), profile, state, net, CFG, NOW)
        assert offer.probability == pytest.approx(0.7, abs=1e-6)
        assert offer.incentive_c == 0
        assert len(offer.factors) == 3
        assert offer.expires_at - offer.issued_at == timedelta(seconds=120)

    def test_probability_is_passthrough_of_inference(self):
        net = default_network()
        rng = np.random.default_rng(9)
        net.cpt_counts["Accept"][:] = rng.uniform(0.5, 12.0, size=net.cpt_counts["Accept"].shape)
        profile, state = driver()
        offer = make_offer(request(), profile, state, net, CFG, NOW)
        assert offer.probability == infer_acceptance(net, offer.evidence)

    def test_violated_preference_attaches_incentive_and_reason(self):
        net = fixture_network(0.9)
        profile, state = driver(destination_filter=frozenset({"airport"}))
        req = request(category="airport")
        violations = tuple(check_constraints(req, profile, state, NOW, CFG))
        offer = make_offer(req, profile, state, net, CFG, NOW, violations=violations)
        assert offer.incentive_c > 0
        assert [v.preference for v in offer.violated_preferences] == ["destination_filter"]
        assert all(v.reason for v in offer.violated_preferences)

    def test_low_probability_attaches_incentive(self):
        net = fixture_network(0.2)
        profile, state = driver()
        offer = make_offer(request(), profile, state, net, CFG, NOW)
        assert offer.incentive_c > 0

    def test_offer_roundtrips_through_dict(self):
        net = fixture_network(0.4)
        profile, state = driver()
        offer = make_offer(request(), profile, state, net, CFG, NOW)
        from fairride.dispatch import RideOffer

        again = RideOffer.from_dict(offer.to_dict())
        assert again == offer


class TestResolveOffer:
    def make(self, p=0.7):
        net = fixture_network(p)
        profile, state = driver()
        return make_offer(request(), profile, state, net, CFG, NOW)

    def test_accept_before_expiry(self):
        offer = self.make()
        outcome, label = resolve_offer(offer, "accept", NOW + timedelta(seconds=30))
        assert outcome.status == "accepted"
        assert label == "accept"

    def test_decline_before_expiry(self):
        offer = self.make()
        outcome, label = resolve_offer(offer, "decline", NOW + timedelta(seconds=30))
        assert outcome.status == "declined"
        assert label == "decline"

    def test_timeout_expires_with_decline_observation(self):
        offer = self.make()
        outcome, label = resolve_offer(offer, None, NOW + timedelta(seconds=121))
        assert outcome.status == "expired"
        assert label == "decline"

    def test_decision_after_expiry_raises(self):
        offer = self.make()
        with pytest.raises(DecisionAfterExpiry):
            resolve_offer(offer, "accept", NOW + timedelta(seconds=300))

    def test_already_resolved(self):
        offer = self.make()
        with pytest.raises(AlreadyResolved):
            resolve_offer(offer, "accept", NOW, already_resolved=True)

    def test_experienced_evidence_flips_incentive_flag(self):
        # the simulated driver's view; learning observations keep the
        # offer evidence verbatim so taught rows equal scored rows
        cheap = self.make(p=0.9)
        assert experienced_evidence(cheap)["IncentivePresent"] == "no"
        sweetened = self.make(p=0.2)
        assert sweetened.incentive_c > 0
        assert experienced_evidence(sweetened)["IncentivePresent"] == "yes"
        assert sweetened.evidence["IncentivePresent"] == "no"


class TestBundles:
    def offers(self, n):
        net = default_network()
        profile, state = driver()
        out = []
        for i in range(n):
            rows = net.cpt_counts["Accept"]
            rows[:] = [1.0 + i, 9.0 - i]  # distinct probabilities per offer
            out.append(make_offer(request(rid=f"r{i}"), profile, state, net, CFG, NOW))
        return out

    def test_top_three_by_probability(self):
        offers = self.offers(5)
        bundle = bundle_options("d1", offers, CFG)
        assert len(bundle.offers) == 3
        probs = [o.probability for o in bundle.offers]
        assert probs == sorted(probs, reverse=True)
        assert probs[0] == max(o.probability for o in offers)

    def test_single_offer_bundle(self):
        offers = self.offers(1)
        bundle = bundle_options("d1", offers, CFG)
        assert len(bundle.offers) == 1
        assert bundle.at_most_one_accept

    def test_void_is_not_a_decline(self):
        offers = self.offers(3)
        outcome = void_offer(offers[0], NOW)
        assert outcome.status == "voided"

    def test_probability_tie_breaks_by_request_time_then_id(self):
        net = fixture_network(0.5)
        profile, state = driver()
        a = make_offer(request(rid="rb"), profile, state, net, CFG, NOW)
        b = make_offer(request(rid="ra"), profile, state, net, CFG, NOW)
        bundle = bundle_options("d1", [a, b], CFG)
        assert [o.request_id for o in bundle.offers] == ["ra", "rb"]


class TestMatchConfig:
    def test_window_floor_rejected(self):
        with pytest.raises(ValueError):
            MatchConfig(min_offer_window_s=45.0)
        with pytest.raises(ValueError):
            MatchConfig(min_offer_window_s=30.0)
        MatchConfig(min_offer_window_s=46.0)

    def test_threshold_bounds(self):
        with pytest.raises(ValueError):
            MatchConfig(incentive_threshold=0.0)
        with pytest.raises(ValueError):
            MatchConfig(incentive_threshold=1.5)
