"""Event-sourced platform state.

Commands validate against current state, append one or more events to
the log, and then apply them; `apply` is the only mutation path, so
replaying the log — or a snapshot plus the suffix — reconstructs the
exact same state, byte for byte. Every number a driver sees (probability,
incentive, breakdown) is stored in the event that produced it.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta

import numpy as np

from .bbn import (
    BayesNetwork,
    NetworkSpec,
    Observation,
    build_network,
    default_network,
    default_network_spec,
    record_observation,
)
from .bbn.context import elicit_profile_priors
from .config import PlatformConfig
from .dispatch import (
    AlreadyResolved,
    DecisionAfterExpiry,
    DriverState,
    MatchConfig,
    OfferOutcome,
    RideOffer,
    RideRequest,
    bundle_options,
    capacity_ok,
    check_constraints,
    filter_candidates,
    make_offer,
    resolve_offer,
)
from .earnings import CostProfile, compute_trip_cost
from .events import EventLog, EventRecord
from .forum import Forum, Poll, Post, Topic
from .profiles import DriverProfile, update_profile
from .forum import InvalidOption, PollClosed, UnknownTopic
from .ratings import (
    Dispute,
    DuplicateRating,
    MissingTelemetry,
    NotVerifiableFactor,
    RatingRecord,
    RatingsBook,
    TripTelemetry,
    UnknownFactor,
)
from .support import ComplaintTicket, advance_ticket, open_complaint

DEFAULT_COST_PROFILE = CostProfile(
    depreciation_per_year_c=365_000,
    insurance_per_year_c=182_500,
    taxes_per_year_c=36_500,
    annual_working_hours=1825.0,
    fuel_per_km_c=10.0,
    maintenance_per_km_c=5.0,
)


@dataclass
class DriverRuntime:
    profile: DriverProfile
    state: DriverState
    cost: CostProfile
    network: BayesNetwork


class PlatformState:
    """Pure state container; mutated only through apply(event)."""

    def __init__(self):
        self.config: PlatformConfig | None = None
        self.spec: NetworkSpec | None = None
        self.drivers: dict[str, DriverRuntime] = {}
        self.offers: dict[str, dict] = {}  # offer_id -> {offer, status, bundle_id, decided_at}
        self.bundles: dict[str, list[str]] = {}
        self.live_bundle: dict[str, str | None] = {}
        self.requests: dict[str, RideRequest] = {}
        self.accepted_offer: dict[str, str] = {}  # request_id -> offer_id
        self.active_trips: dict[str, dict] = {}  # driver_id -> trip info
        self.trips: dict[str, dict] = {}  # completed trips by request id
        self.ratings = RatingsBook()
        self.tickets: dict[str, ComplaintTicket] = {}
        self.forum = Forum()
        self.proposals: list[dict] = []
        self.last_seq = 0

    # -- event application -------------------------------------------------

    def apply(self, record: EventRecord) -> None:
        handler = getattr(self, f"_apply_{record.kind}")
        handler(record)
        self.last_seq = record.seq

    def _apply_config_change(self, record: EventRecord) -> None:
        payload = record.payload
        action = payload["action"]
        if action == "bootstrap":
            self.config = PlatformConfig.from_dict(payload["config"])
            self.ratings = RatingsBook(self.config.ratings)
            if payload.get("network_spec"):
                self.spec = NetworkSpec.from_dict(payload["network_spec"])
            else:
                self.spec = default_network_spec()
        elif action == "driver_registered":
            profile = DriverProfile.from_dict(payload["profile"])
            network = self._fresh_network()
            network = elicit_profile_priors(network, profile, self.config.elicitation_ess)
            self.drivers[profile.driver_id] = DriverRuntime(
                profile=profile,
                state=DriverState.from_dict(payload["state"]),
                cost=CostProfile.from_dict(payload["cost"]),
                network=network,
            )
            self.live_bundle[profile.driver_id] = None
        elif action == "profile_updated":
            runtime = self.drivers[payload["driver_id"]]
            runtime.profile = DriverProfile.from_dict(payload["profile"])
        elif action == "availability":
            self.drivers[payload["driver_id"]].state.available = payload["available"]
        elif action == "match_config":
            self.config = PlatformConfig.from_dict(
                {**self.config.to_dict(), "match": payload["match"]}
            )
        elif action == "config_proposal":
            self.proposals.append(payload["proposal_event"])
        else:
            raise ValueError(f"unknown config_change action {action!r}")

    def _fresh_network(self) -> BayesNetwork:
        if self.config.network_spec_path is None:
            return default_network(self.config.smoothing)
        return build_network(
            NetworkSpec.from_file(self.config.network_spec_path), self.config.smoothing
        )

    def _apply_offer_issued(self, record: EventRecord) -> None:
        payload = record.payload
        offer = RideOffer.from_dict(payload["offer"])
        request = RideRequest.from_dict(payload["request"])
        self.requests[request.id] = request
        self.offers[offer.offer_id] = {
            "offer": offer,
            "status": "live",
            "bundle_id": payload["bundle_id"],
            "decided_at": None,
        }
        self.bundles.setdefault(payload["bundle_id"], []).append(offer.offer_id)
        self.live_bundle[offer.driver_id] = payload["bundle_id"]

    def _apply_offer_resolved(self, record: EventRecord) -> None:
        payload = record.payload
        entry = self.offers[payload["offer_id"]]
        entry["status"] = payload["status"]
        entry["decided_at"] = payload["decided_at"]
        offer: RideOffer = entry["offer"]
        driver_id = offer.driver_id

        if payload["status"] == "accepted":
            self.accepted_offer[offer.request_id] = offer.offer_id
            dstate = self.drivers[driver_id].state
            if dstate.on_trip:
                dstate.queued_request_id = offer.request_id
            else:
                dstate.on_trip = True
                self.active_trips[driver_id] = self._trip_info(offer, payload["decided_at"])

        bundle_id = entry["bundle_id"]
        if all(self.offers[oid]["status"] != "live" for oid in self.bundles[bundle_id]):
            if self.live_bundle.get(driver_id) == bundle_id:
                self.live_bundle[driver_id] = None

    def _trip_info(self, offer: RideOffer, accepted_at: str) -> dict:
        request = self.requests[offer.request_id]
        return {
            "request_id": offer.request_id,
            "offer_id": offer.offer_id,
            "accepted_at": accepted_at,
            "pickup_eta_minutes": offer.pickup_eta_minutes,
            "duration_minutes": offer.duration_minutes,
            "distance_km": offer.distance_km,
            "fare_c": offer.fare_c,
            "incentive_c": offer.incentive_c,
            "dropoff": list(request.dropoff),
            "destination_category": offer.destination_category,
        }

    def _apply_observation(self, record: EventRecord) -> None:
        payload = record.payload
        runtime = self.drivers[payload["driver_id"]]
        obs = Observation(
            evidence=dict(payload["evidence"]),
            outcome=payload["outcome"],
            timestamp=datetime.fromisoformat(record.ts),
        )
        runtime.network = record_observation(runtime.network, obs)

    def _apply_trip_completed(self, record: EventRecord) -> None:
        payload = record.payload
        driver_id = payload["driver_id"]
        runtime = self.drivers[driver_id]
        trip = self.active_trips.pop(driver_id)
        assert trip["request_id"] == payload["trip_id"]

        runtime.state.location = tuple(trip["dropoff"])
        runtime.state.hours_driven_today += payload["duration_hours"]
        net = payload["breakdown"]["net_c"]
        runtime.state.earnings_today_c += net
        runtime.state.earnings_week_c += net

        telemetry = None
        if payload.get("telemetry"):
            telemetry = TripTelemetry(
                trip_id=payload["trip_id"],
                promised_pickup_at=datetime.fromisoformat(payload["telemetry"]["promised_pickup_at"]),
                arrived_at=datetime.fromisoformat(payload["telemetry"]["arrived_at"]),
            )
        self.ratings.mark_trip_completed(payload["trip_id"], driver_id, telemetry)
        self.trips[payload["trip_id"]] = dict(payload)

        if runtime.state.queued_request_id is not None:
            queued = runtime.state.queued_request_id
            runtime.state.queued_request_id = None
            offer: RideOffer = self.offers[self.accepted_offer[queued]]["offer"]
            self.active_trips[driver_id] = self._trip_info(offer, record.ts)
        else:
            runtime.state.on_trip = False

    def _apply_rating(self, record: EventRecord) -> None:
        payload = record.payload
        doc = dict(payload["rating"])
        doc["created_at"] = datetime.fromisoformat(doc["created_at"])
        rating = RatingRecord(**doc)
        self.ratings.records[rating.rating_id] = rating
        self.ratings.by_trip[rating.trip_id] = rating.rating_id
        self.ratings.by_driver.setdefault(rating.driver_id, []).append(rating.rating_id)

    def _apply_dispute(self, record: EventRecord) -> None:
        payload = record.payload
        if payload["action"] == "filed":
            dispute = Dispute(**payload["dispute"])
            self.ratings.disputes[dispute.dispute_id] = dispute
            self.ratings.records[dispute.rating_id].status = "disputed"
        else:
            self.ratings.resolve_dispute(payload["dispute_id"])

    def _apply_ticket(self, record: EventRecord) -> None:
        payload = record.payload
        if payload["action"] == "opened":
            ticket = ComplaintTicket.from_dict(payload["ticket"])
            self.tickets[ticket.ticket_id] = ticket
        else:
            ticket = self.tickets[payload["ticket_id"]]
            self.tickets[ticket.ticket_id] = advance_ticket(
                ticket, payload["status"], datetime.fromisoformat(record.ts)
            )

    def _apply_forum(self, record: EventRecord) -> None:
        payload = record.payload
        action = payload["action"]
        clock = datetime.fromisoformat(record.ts)
        if action == "topic":
            self.forum.create_topic(
                payload["creator"],
                payload["title"],
                clock,
                location_tag=payload.get("location_tag"),
                topic_id=payload["topic_id"],
            )
        elif action == "post":
            self.forum.add_post(
                payload["author"], payload["topic_id"], payload["body"], clock,
                post_id=payload["post_id"],
            )
        elif action == "poll":
            self.forum.create_poll(
                payload["creator"], payload["question"], payload["options"], clock,
                config_proposal=payload.get("config_proposal"), poll_id=payload["poll_id"],
            )
        elif action == "vote":
            self.forum.vote(payload["driver_id"], payload["poll_id"], payload["option"])
        elif action == "close":
            self.forum.close_poll(payload["poll_id"])
        else:
            raise ValueError(f"unknown forum action {action!r}")

    # -- canonical serialization --------------------------------------------

    def state_doc(self) -> dict:
        """Full-state document; equal states produce equal documents."""
        return {
            "last_seq": self.last_seq,
            "config": self.config.to_dict() if self.config else None,
            "network_spec": self.spec.to_dict() if self.spec else None,
            "drivers": {
                driver_id: {
                    "profile": rt.profile.to_dict(),
                    "state": rt.state.to_dict(),
                    "cost": rt.cost.to_dict(),
                    "network_counts": {
                        name: table.tolist() for name, table in sorted(rt.network.cpt_counts.items())
                    },
                }
                for driver_id, rt in sorted(self.drivers.items())
            },
            "offers": {
                offer_id: {
                    "offer": entry["offer"].to_dict(),
                    "status": entry["status"],
                    "bundle_id": entry["bundle_id"],
                    "decided_at": entry["decided_at"],
                }
                for offer_id, entry in sorted(self.offers.items())
            },
            "bundles": {bid: list(oids) for bid, oids in sorted(self.bundles.items())},
            "live_bundle": dict(sorted(self.live_bundle.items())),
            "requests": {rid: req.to_dict() for rid, req in sorted(self.requests.items())},
            "accepted_offer": dict(sorted(self.accepted_offer.items())),
            "active_trips": dict(sorted(self.active_trips.items())),
            "trips": dict(sorted(self.trips.items())),
            "ratings": self._ratings_doc(),
            "tickets": {tid: t.to_dict() for tid, t in sorted(self.tickets.items())},
            "forum": self._forum_doc(),
            "proposals": list(self.proposals),
        }

    def _ratings_doc(self) -> dict:
        book = self.ratings
        return {
            "records": [
                {
                    "rating_id": r.rating_id,
                    "trip_id": r.trip_id,
                    "driver_id": r.driver_id,
                    "scores": dict(sorted(r.scores.items())),
                    "text": r.text,
                    "prompt_id": r.prompt_id,
                    "created_at": r.created_at.isoformat(),
                    "status": r.status,
                }
                for r in book.records.values()
            ],
            "disputes": [
                {
                    "dispute_id": d.dispute_id,
                    "rating_id": d.rating_id,
                    "factor": d.factor,
                    "evidence_ref": d.evidence_ref,
                    "status": d.status,
                    "resolution_note": d.resolution_note,
                }
                for d in book.disputes.values()
            ],
            "completed_trips": dict(sorted(book.completed_trips.items())),
            "telemetry": {
                tid: {
                    "promised_pickup_at": t.promised_pickup_at.isoformat(),
                    "arrived_at": t.arrived_at.isoformat(),
                }
                for tid, t in sorted(book.telemetry.items())
            },
        }

    def _forum_doc(self) -> dict:
        forum = self.forum
        return {
            "topics": [
                {
                    "topic_id": t.topic_id,
                    "title": t.title,
                    "creator": t.creator,
                    "location_tag": t.location_tag,
                    "created_at": t.created_at.isoformat(),
                }
                for t in forum.topics.values()
            ],
            "posts": {
                topic_id: [
                    {
                        "post_id": p.post_id,
                        "author": p.author,
                        "body": p.body,
                        "created_at": p.created_at.isoformat(),
                    }
                    for p in posts
                ]
                for topic_id, posts in sorted(forum.posts.items())
            },
            "polls": [
                {
                    "poll_id": p.poll_id,
                    "question": p.question,
                    "options": list(p.options),
                    "creator": p.creator,
                    "created_at": p.created_at.isoformat(),
                    "open": p.open,
                    "votes": dict(sorted(p.votes.items())),
                    "config_proposal": p.config_proposal,
                }
                for p in forum.polls.values()
            ],
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "PlatformState":
        state = cls()
        state.last_seq = doc["last_seq"]
        if doc["config"]:
            state.config = PlatformConfig.from_dict(doc["config"])
            state.ratings = RatingsBook(state.config.ratings)
        if doc["network_spec"]:
            state.spec = NetworkSpec.from_dict(doc["network_spec"])
        for driver_id, entry in doc["drivers"].items():
            counts = {
                name: np.array(rows, dtype=float) for name, rows in entry["network_counts"].items()
            }
            network = BayesNetwork(spec=state.spec, cpt_counts=counts, smoothing=state.config.smoothing)
            state.drivers[driver_id] = DriverRuntime(
                profile=DriverProfile.from_dict(entry["profile"]),
                state=DriverState.from_dict(entry["state"]),
                cost=CostProfile.from_dict(entry["cost"]),
                network=network,
            )
        for offer_id, entry in doc["offers"].items():
            state.offers[offer_id] = {
                "offer": RideOffer.from_dict(entry["offer"]),
                "status": entry["status"],
                "bundle_id": entry["bundle_id"],
                "decided_at": entry["decided_at"],
            }
        state.bundles = {bid: list(oids) for bid, oids in doc["bundles"].items()}
        state.live_bundle = dict(doc["live_bundle"])
        state.requests = {rid: RideRequest.from_dict(r) for rid, r in doc["requests"].items()}
        state.accepted_offer = dict(doc["accepted_offer"])
        state.active_trips = {k: dict(v) for k, v in doc["active_trips"].items()}
        state.trips = {k: dict(v) for k, v in doc["trips"].items()}

        ratings = doc["ratings"]
        for rdoc in ratings["records"]:
            rdoc = dict(rdoc)
            rdoc["created_at"] = datetime.fromisoformat(rdoc["created_at"])
            record = RatingRecord(**rdoc)
            state.ratings.records[record.rating_id] = record
            state.ratings.by_trip[record.trip_id] = record.rating_id
            state.ratings.by_driver.setdefault(record.driver_id, []).append(record.rating_id)
        for ddoc in ratings["disputes"]:
            dispute = Dispute(**ddoc)
            state.ratings.disputes[dispute.dispute_id] = dispute
        state.ratings.completed_trips = dict(ratings["completed_trips"])
        for tid, t in ratings["telemetry"].items():
            state.ratings.telemetry[tid] = TripTelemetry(
                trip_id=tid,
                promised_pickup_at=datetime.fromisoformat(t["promised_pickup_at"]),
                arrived_at=datetime.fromisoformat(t["arrived_at"]),
            )

        for tdoc in doc["tickets"].values():
            ticket = ComplaintTicket.from_dict(tdoc)
            state.tickets[ticket.ticket_id] = ticket

        fdoc = doc["forum"]
        for t in fdoc["topics"]:
            state.forum.topics[t["topic_id"]] = Topic(
                topic_id=t["topic_id"],
                title=t["title"],
                creator=t["creator"],
                location_tag=t["location_tag"],
                created_at=datetime.fromisoformat(t["created_at"]),
            )
            state.forum.posts[t["topic_id"]] = []
        for topic_id, posts in fdoc["posts"].items():
            state.forum.posts[topic_id] = [
                Post(
                    post_id=p["post_id"],
                    topic_id=topic_id,
                    author=p["author"],
                    body=p["body"],
                    created_at=datetime.fromisoformat(p["created_at"]),
                )
                for p in posts
            ]
        for p in fdoc["polls"]:
            state.forum.polls[p["poll_id"]] = Poll(
                poll_id=p["poll_id"],
                question=p["question"],
                options=tuple(p["options"]),
                creator=p["creator"],
                created_at=datetime.fromisoformat(p["created_at"]),
                open=p["open"],
                votes=dict(p["votes"]),
                config_proposal=p["config_proposal"],
            )
        state.proposals = list(doc["proposals"])
        return state


class Platform:
    """Command layer: validate, append to the log, apply."""

    def __init__(self, log: EventLog):
        self.log = log
        self.state = PlatformState()
        for record in log:
            self.state.apply(record)

    @classmethod
    def bootstrap(cls, config: PlatformConfig, log: EventLog, now: datetime) -> "Platform":
        platform = cls(log)
        if platform.state.config is None:
            spec_doc = None
            if config.network_spec_path is not None:
                spec_doc = NetworkSpec.from_file(config.network_spec_path).to_dict()
            platform._emit(
                "config_change",
                {"action": "bootstrap", "config": config.to_dict(), "network_spec": spec_doc},
                now,
            )
        return platform

    @classmethod
    def recover(cls, log: EventLog, snapshot_doc: dict | None = None) -> "Platform":
        """Rebuild from a snapshot plus the log suffix past its sequence."""
        platform = cls.__new__(cls)
        platform.log = log
        if snapshot_doc is None:
            platform.state = PlatformState()
            for record in log:
                platform.state.apply(record)
        else:
            platform.state = PlatformState.from_doc(snapshot_doc)
            for record in log:
                if record.seq > platform.state.last_seq:
                    platform.state.apply(record)
        return platform

    def _emit(self, kind: str, payload: dict, now: datetime) -> EventRecord:
        record = self.log.append(kind, payload, now.isoformat())
        self.state.apply(record)
        return record

    # -- driver lifecycle ---------------------------------------------------

    def register_driver(
        self,
        profile: DriverProfile,
        now: datetime,
        cost: CostProfile | None = None,
        state: DriverState | None = None,
    ) -> DriverRuntime:
        if profile.driver_id in self.state.drivers:
            raise ValueError(f"driver {profile.driver_id!r} already registered")
        self._emit(
            "config_change",
            {
                "action": "driver_registered",
                "profile": profile.to_dict(),
                "cost": (cost or DEFAULT_COST_PROFILE).to_dict(),
                "state": (state or DriverState(driver_id=profile.driver_id)).to_dict(),
            },
            now,
        )
        return self.state.drivers[profile.driver_id]

    def update_profile(self, driver_id: str, changes: dict, now: datetime):
        runtime = self.state.drivers[driver_id]
        window = self.state.config.lock_window_days
        updated, locked_until = update_profile(runtime.profile, changes, now, window)
        self._emit(
            "config_change",
            {
                "action": "profile_updated",
                "driver_id": driver_id,
                "profile": updated.to_dict(),
                "locked_until": locked_until.isoformat() if locked_until else None,
            },
            now,
        )
        return updated, locked_until

    def set_availability(self, driver_id: str, available: bool, now: datetime) -> None:
        self.state.drivers[driver_id]
        self._emit(
            "config_change",
            {"action": "availability", "driver_id": driver_id, "available": available},
            now,
        )

    def apply_match_config(self, match: MatchConfig, now: datetime) -> None:
        """Operator action, typically following a community config poll."""
        self._emit("config_change", {"action": "match_config", "match": match.to_dict()}, now)

    # -- dispatch -------------------------------------------------------------

    def dispatch_requests(
        self,
        requests: list[RideRequest],
        now: datetime,
        rng: np.random.Generator | None = None,
    ) -> list[str]:
        """Fan one batch of requests out to eligible drivers as bundles.

        Returns the bundle ids issued. Drivers with an unresolved bundle
        sit the batch out (one in-flight bundle per driver). A request no
        eligible driver can take falls back to capacity-free drivers with
        the violated preferences named on the offer.
        """
        cfg = self.state.config.match
        free = [
            (rt.profile, rt.state)
            for rt in self.state.drivers.values()
            if self.state.live_bundle.get(rt.profile.driver_id) is None
        ]
        tentative: dict[str, list[tuple[RideRequest, tuple]]] = {}
        for request in sorted(requests, key=lambda r: (r.request_time, r.id)):
            eligible = filter_candidates(request, free, now, cfg, rng=rng)
            if eligible:
                for profile, _state in eligible:
                    tentative.setdefault(profile.driver_id, []).append((request, ()))
            else:
                for profile, dstate in sorted(free, key=lambda d: d[0].driver_id):
                    if not capacity_ok(profile, dstate):
                        continue
                    violations = tuple(check_constraints(request, profile, dstate, now, cfg))
                    if violations:
                        tentative.setdefault(profile.driver_id, []).append((request, violations))

        bundle_ids = []
        for driver_id in sorted(tentative):
            runtime = self.state.drivers[driver_id]
            offers = [
                make_offer(
                    request,
                    runtime.profile,
                    runtime.state,
                    runtime.network,
                    cfg,
                    now,
                    violations=violations,
                )
                for request, violations in tentative[driver_id]
            ]
            bundle = bundle_options(driver_id, offers, cfg)
            bundle_id = f"bundle-{self.log.last_seq + 1}"
            for offer in bundle.offers:
                self._emit(
                    "offer_issued",
                    {
                        "offer": offer.to_dict(),
                        "request": self._request_doc(offer.request_id, requests),
                        "bundle_id": bundle_id,
                    },
                    now,
                )
            bundle_ids.append(bundle_id)
        return bundle_ids

    @staticmethod
    def _request_doc(request_id: str, requests: list[RideRequest]) -> dict:
        for request in requests:
            if request.id == request_id:
                return request.to_dict()
        raise KeyError(request_id)

    def resolve(self, offer_id: str, decision: str | None, now: datetime) -> OfferOutcome:
        """Settle one offer; accepting voids bundle siblings and rival offers."""
        entry = self.state.offers[offer_id]
        if entry["status"] != "live":
            raise AlreadyResolved(f"offer {offer_id} is already {entry['status']}")
        offer: RideOffer = entry["offer"]
        try:
            outcome, label = resolve_offer(offer, decision, now)
        except DecisionAfterExpiry:
            outcome, label = resolve_offer(offer, None, now)

        self._emit(
            "offer_resolved",
            {
                "offer_id": offer_id,
                "request_id": offer.request_id,
                "driver_id": offer.driver_id,
                "status": outcome.status,
                "decided_at": now.isoformat(),
            },
            now,
        )
        if self.state.config.learning_enabled:
            self._emit(
                "observation",
                {
                    "driver_id": offer.driver_id,
                    "evidence": dict(sorted(offer.evidence.items())),
                    "outcome": label,
                },
                now,
            )
        if outcome.status == "accepted":
            self._void_rivals(offer, now)
        return outcome

    def _void_rivals(self, accepted: RideOffer, now: datetime) -> None:
        # bundle siblings first, then other drivers' live offers on the request
        sibling_ids = self.state.bundles[self.state.offers[accepted.offer_id]["bundle_id"]]
        rivals = [oid for oid in sibling_ids if oid != accepted.offer_id]
        rivals += [
            oid
            for oid, entry in self.state.offers.items()
            if entry["offer"].request_id == accepted.request_id and oid != accepted.offer_id
        ]
        for oid in rivals:
            entry = self.state.offers[oid]
            if entry["status"] != "live":
                continue
            offer: RideOffer = entry["offer"]
            self._emit(
                "offer_resolved",
                {
                    "offer_id": oid,
                    "request_id": offer.request_id,
                    "driver_id": offer.driver_id,
                    "status": "voided",
                    "decided_at": now.isoformat(),
                },
                now,
            )

    def expire_due(self, now: datetime) -> list[str]:
        """Expire every live offer whose window has passed."""
        expired = []
        for offer_id, entry in list(self.state.offers.items()):
            if entry["status"] == "live" and now >= entry["offer"].expires_at:
                self.resolve(offer_id, None, now)
                expired.append(offer_id)
        return expired

    def complete_trip(
        self,
        driver_id: str,
        now: datetime,
        tip_c: int = 0,
        arrival_delay_min: float = 0.0,
    ) -> dict:
        """Close the driver's active trip with a full cost breakdown."""
        trip = self.state.active_trips[driver_id]
        runtime = self.state.drivers[driver_id]
        duration_hours = (trip["pickup_eta_minutes"] + trip["duration_minutes"]) / 60.0
        breakdown = compute_trip_cost(
            runtime.cost,
            trip["distance_km"],
            duration_hours,
            trip["fare_c"],
            incentive_c=trip["incentive_c"],
            tip_c=tip_c,
        )
        promised = datetime.fromisoformat(trip["accepted_at"]) + timedelta(
            minutes=trip["pickup_eta_minutes"]
        )
        payload = {
            "trip_id": trip["request_id"],
            "driver_id": driver_id,
            "completed_at": now.isoformat(),
            "duration_hours": duration_hours,
            "breakdown": breakdown.to_dict(),
            "telemetry": {
                "promised_pickup_at": promised.isoformat(),
                "arrived_at": (promised + timedelta(minutes=arrival_delay_min)).isoformat(),
            },
        }
        self._emit("trip_completed", payload, now)
        return self.state.trips[trip["request_id"]]

    # -- ratings ---------------------------------------------------------------

    def submit_rating(
        self,
        trip_id: str,
        factor_labels: dict[str, str],
        now: datetime,
        text: str | None = None,
        prompt_id: str | None = None,
    ) -> RatingRecord:
        probe = RatingsBook(self.state.config.ratings)
        probe.completed_trips = self.state.ratings.completed_trips
        if trip_id in self.state.ratings.by_trip:
            raise DuplicateRating(f"trip {trip_id!r} is already rated")
        record = probe.submit_rating(
            trip_id,
            factor_labels,
            now,
            text=text,
            prompt_id=prompt_id,
            rating_id=f"rating-{len(self.state.ratings.records) + 1}",
        )
        self._emit(
            "rating",
            {
                "action": "submitted",
                "rating": {
                    "rating_id": record.rating_id,
                    "trip_id": record.trip_id,
                    "driver_id": record.driver_id,
                    "scores": dict(sorted(record.scores.items())),
                    "text": record.text,
                    "prompt_id": record.prompt_id,
                    "created_at": record.created_at.isoformat(),
                    "status": record.status,
                },
            },
            now,
        )
        return self.state.ratings.records[record.rating_id]

    def file_dispute(self, rating_id: str, factor: str, evidence_ref: str, now: datetime) -> Dispute:
        record = self.state.ratings.records[rating_id]
        cfg = self.state.config.ratings
        if factor not in cfg.verifiable:
            raise NotVerifiableFactor(f"{factor!r} has no verifiable telemetry")
        if factor not in record.scores:
            raise UnknownFactor(f"rating {rating_id!r} does not score {factor!r}")
        dispute_id = f"dispute-{len(self.state.ratings.disputes) + 1}"
        self._emit(
            "dispute",
            {
                "action": "filed",
                "dispute": {
                    "dispute_id": dispute_id,
                    "rating_id": rating_id,
                    "factor": factor,
                    "evidence_ref": evidence_ref,
                    "status": "filed",
                    "resolution_note": "",
                },
            },
            now,
        )
        return self.state.ratings.disputes[dispute_id]

    def resolve_dispute(self, dispute_id: str, now: datetime) -> Dispute:
        dispute = self.state.ratings.disputes[dispute_id]
        record = self.state.ratings.records[dispute.rating_id]
        if record.trip_id not in self.state.ratings.telemetry:
            raise MissingTelemetry(f"no telemetry recorded for trip {record.trip_id!r}")
        self._emit("dispute", {"action": "resolved", "dispute_id": dispute_id}, now)
        return self.state.ratings.disputes[dispute_id]

    # -- complaints ---------------------------------------------------------------

    def open_complaint(self, driver_id: str, category: str, text: str, now: datetime) -> ComplaintTicket:
        ticket = open_complaint(
            driver_id,
            category,
            text,
            now,
            sla_hours=self.state.config.sla_hours,
            ticket_id=f"ticket-{len(self.state.tickets) + 1}",
        )
        self._emit("ticket", {"action": "opened", "ticket": ticket.to_dict()}, now)
        return self.state.tickets[ticket.ticket_id]

    def advance_ticket(self, ticket_id: str, status: str, now: datetime) -> ComplaintTicket:
        advance_ticket(self.state.tickets[ticket_id], status, now)  # validate before emitting
        self._emit("ticket", {"action": "advanced", "ticket_id": ticket_id, "status": status}, now)
        return self.state.tickets[ticket_id]

    # -- forum -----------------------------------------------------------------

    def forum_action(self, actor: str, action: str, payload: dict, now: datetime):
        """Create topics/posts/polls, vote, or close a poll, as ``actor``."""
        if actor not in self.state.drivers and actor != "operator":
            raise KeyError(f"unknown driver {actor!r}")
        forum = self.state.forum
        if action == "create_topic":
            topic_id = f"topic-{len(forum.topics) + 1}"
            self._emit(
                "forum",
                {
                    "action": "topic",
                    "topic_id": topic_id,
                    "creator": actor,
                    "title": payload["title"],
                    "location_tag": payload.get("location_tag"),
                },
                now,
            )
            return forum.topics[topic_id]
        if action == "post":
            if payload["topic_id"] not in forum.topics:
                raise UnknownTopic(payload["topic_id"])
            post_id = f"post-{payload['topic_id']}-{len(forum.posts[payload['topic_id']]) + 1}"
            self._emit(
                "forum",
                {
                    "action": "post",
                    "post_id": post_id,
                    "topic_id": payload["topic_id"],
                    "author": actor,
                    "body": payload["body"],
                },
                now,
            )
            return forum.posts[payload["topic_id"]][-1]
        if action == "create_poll":
            poll_id = f"poll-{len(forum.polls) + 1}"
            self._emit(
                "forum",
                {
                    "action": "poll",
                    "poll_id": poll_id,
                    "creator": actor,
                    "question": payload["question"],
                    "options": list(payload["options"]),
                    "config_proposal": payload.get("config_proposal"),
                },
                now,
            )
            return forum.polls[poll_id]
        if action == "vote":
            poll = forum.polls[payload["poll_id"]]
            if not poll.open:
                raise PollClosed(poll.poll_id)
            if payload["option"] not in poll.options:
                raise InvalidOption(f"poll {poll.poll_id!r} has no option {payload['option']!r}")
            self._emit(
                "forum",
                {
                    "action": "vote",
                    "poll_id": payload["poll_id"],
                    "driver_id": actor,
                    "option": payload["option"],
                },
                now,
            )
            return forum.polls[payload["poll_id"]]
        if action == "close_poll":
            poll = forum.polls[payload["poll_id"]]
            proposal = None
            if poll.config_proposal is not None:
                # compute the proposal before closing so the event carries it
                counts = forum.tally(poll.poll_id)
                winner = max(poll.options, key=lambda o: (counts[o], o))
                proposal = {
                    "poll_id": poll.poll_id,
                    "question": poll.question,
                    "winning_option": winner,
                    "tally": counts,
                    "proposal": poll.config_proposal,
                }
            self._emit("forum", {"action": "close", "poll_id": payload["poll_id"]}, now)
            if proposal is not None:
                self._emit(
                    "config_change",
                    {"action": "config_proposal", "proposal_event": proposal},
                    now,
                )
            return proposal
        raise ValueError(f"unknown forum action {action!r}")
