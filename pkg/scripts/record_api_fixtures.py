#!/usr/bin/env python3
"""Record live API responses as JSON fixtures for the console's contract tests.

Drives the real platform + FastAPI app under a manual clock through one
scripted session (bundle with an incentive and a violated-preference
offer, an accept, an expiry race, a locked profile, a completed trip, a
low rating with an upheld dispute, a complaint, and forum activity), and
dumps every interesting response under frontend/fixtures/.
"""

import json
from datetime import datetime, timedelta, timezone
from pathlib import Path

from fastapi.testclient import TestClient

from fairride.api import OPERATOR_TOKEN, create_app
from fairride.config import PlatformConfig
from fairride.dispatch import RideRequest
from fairride.earnings import EarningGoal
from fairride.events import EventLog
from fairride.profiles import DriverProfile
from fairride.state import Platform

START = datetime(2026, 3, 7, 11, 0, tzinfo=timezone.utc)
OUT = Path(__file__).resolve().parents[1] / "frontend" / "fixtures"


class ManualClock:
    def __init__(self, now):
        self.current = now

    def __call__(self):
        return self.current

    def advance(self, **kw):
        self.current = self.current + timedelta(**kw)


def request(rid, pickup, dropoff, duration, category, fare, when):
    return RideRequest(
        id=rid,
        pickup=pickup,
        dropoff=dropoff,
        request_time=when,
        duration_minutes=duration,
        distance_km=8.0,
        destination_category=category,
        rider_rating=4.8,
        fare_c=fare,
    )


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    fixtures: dict[str, object] = {}

    platform = Platform.bootstrap(PlatformConfig(), EventLog(), START)
    clock = ManualClock(START)
    client = TestClient(create_app(platform, clock=clock))
    d1 = {"Authorization": "Bearer driver-d1"}
    d2 = {"Authorization": "Bearer driver-d2"}
    operator = {"Authorization": f"Bearer {OPERATOR_TOKEN}"}

    platform.register_driver(
        DriverProfile(
            driver_id="d1",
            name="Ada Driver",
            earning_goal=EarningGoal(15_000, "daily"),
            ride_length_band=(10.0, 60.0),
            destination_filter=frozenset({"airport"}),
        ),
        START,
    )
    platform.register_driver(DriverProfile(driver_id="d2", name="Grace Driver"), START)
    platform.set_availability("d2", False, clock.current)

    # lock the profile by changing a dispatch-affecting setting
    fixtures["profile_patch_ok"] = client.patch(
        "/drivers/d1/profile", json={"assignment_mode": "queued"}, headers=d1
    ).json()
    clock.advance(hours=1)
    locked = client.patch("/drivers/d1/profile", json={"assignment_mode": "random"}, headers=d1)
    fixtures["profile_patch_locked"] = {"status": locked.status_code, "body": locked.json()}
    fixtures["profile"] = client.get("/drivers/d1/profile", headers=d1).json()

    # a 3-option bundle: far restaurant (elicited rows, no incentive),
    # near downtown (cold rows, incentive), airport (violates the filter)
    when = clock.current
    platform.dispatch_requests(
        [
            request("r-rest", (7.5, 0.0), (15.0, 0.0), 20.0, "restaurant", 2100, when),
            request("r-down", (2.0, 0.0), (9.0, 0.0), 20.0, "downtown", 1500, when),
            request("r-air", (6.0, 0.0), (14.0, 0.0), 20.0, "airport", 2600, when),
        ],
        when,
    )
    fixtures["offers_bundle"] = client.get("/drivers/d1/offers", headers=d1).json()

    accept_id = "r-rest:d1"
    clock.advance(seconds=20)
    fixtures["decision_accept"] = client.post(
        f"/offers/{accept_id}/decision", json={"decision": "accept"}, headers=d1
    ).json()
    conflict = client.post(f"/offers/{accept_id}/decision", json={"decision": "decline"}, headers=d1)
    fixtures["decision_conflict"] = {"status": conflict.status_code, "body": conflict.json()}
    fixtures["offers_after_accept"] = client.get("/drivers/d1/offers", headers=d1).json()

    # finish the trip, then rate it low on punctuality and dispute
    clock.advance(minutes=40)
    platform.complete_trip("d1", clock.current, tip_c=300)
    fixtures["earnings"] = client.get("/drivers/d1/earnings", headers=d1).json()

    client.post(
        "/ratings",
        json={
            "trip_id": "r-rest",
            "factor_labels": {
                "punctuality": "Very dissatisfied",
                "politeness": "Very satisfied",
                "cleanliness": "Somewhat satisfied",
            },
            "text": "driver seemed late but was friendly",
            "prompt_id": "memorable",
        },
        headers=d2,
    )
    fixtures["ratings"] = client.get("/drivers/d1/ratings", headers=d1).json()
    rating_id = fixtures["ratings"]["records"][0]["rating_id"]
    fixtures["dispute_upheld"] = client.post(
        f"/ratings/{rating_id}/dispute",
        json={"factor": "punctuality", "evidence_ref": "arrival-log"},
        headers=d1,
    ).json()
    fixtures["ratings_after_dispute"] = client.get("/drivers/d1/ratings", headers=d1).json()

    # an offer left to expire, then a late decision (the race the console must surface)
    when = clock.current
    platform.dispatch_requests(
        [request("r-late", (7.0, 1.0), (13.0, 1.0), 25.0, "residential", 1700, when)], when
    )
    fixtures["offers_single"] = client.get("/drivers/d1/offers", headers=d1).json()
    clock.advance(seconds=300)
    late = client.post("/offers/r-late:d1/decision", json={"decision": "accept"}, headers=d1)
    fixtures["decision_expired"] = {"status": late.status_code, "body": late.json()}
    fixtures["offers_after_expiry"] = client.get("/drivers/d1/offers", headers=d1).json()

    # complaint with visible SLA, advanced once by the operator
    opened = client.post(
        "/drivers/d1/complaints",
        json={"category": "safety", "text": "rider refused the seatbelt"},
        headers=d1,
    ).json()
    clock.advance(hours=2)
    client.post(f"/complaints/{opened['ticket_id']}/advance", json={"status": "in_review"}, headers=operator)
    fixtures["complaints"] = client.get("/drivers/d1/complaints", headers=d1).json()

    # forum: a located topic, a post, a config poll with one vote
    topic = client.post(
        "/forum/actions",
        json={"action": "create_topic", "payload": {"title": "JFK staging lot tips", "location_tag": "NYC"}},
        headers=d1,
    ).json()
    client.post(
        "/forum/actions",
        json={"action": "post", "payload": {"topic_id": topic["topic_id"], "body": "go before 6pm"}},
        headers=d1,
    )
    poll = client.post(
        "/forum/actions",
        json={
            "action": "create_poll",
            "payload": {
                "question": "Lower the incentive threshold to 0.5?",
                "options": ["yes", "no"],
                "config_proposal": {"field": "incentive_threshold", "values": {"yes": 0.5, "no": 0.6}},
            },
        },
        headers=d1,
    ).json()
    client.post(
        "/forum/actions",
        json={"action": "vote", "payload": {"poll_id": poll["poll_id"], "option": "yes"}},
        headers=d1,
    )
    fixtures["forum_topics"] = client.get("/forum/topics", params={"location": "NYC"}, headers=d1).json()
    fixtures["forum_posts"] = client.get(f"/forum/topics/{topic['topic_id']}/posts", headers=d1).json()
    fixtures["forum_polls"] = client.get("/forum/polls", headers=d1).json()

    fixtures["transparency"] = client.get("/drivers/d1/transparency", headers=d1).json()
    fixtures["health"] = client.get("/health").json()

    for name, doc in fixtures.items():
        (OUT / f"{name}.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(f"wrote {len(fixtures)} fixtures to {OUT}")


if __name__ == "__main__":
    main()
