"""REST surface over the platform: everything a driver console needs.

Every number returned here is read straight from platform state, which
is itself replay-derived from the event log — the API never recomputes a
probability, incentive, or breakdown on its own. Auth is a static bearer
token per driver (dev mode), plus one operator token for ticket handling
and config application.
"""

from __future__ import annotations

from datetime import datetime, timezone
from typing import Callable

from fastapi import Depends, FastAPI, Header, HTTPException
from fastapi.responses import PlainTextResponse
from pydantic import BaseModel

from .dispatch import AlreadyResolved, MatchConfig
from .earnings import EarningGoal
from .forum import InvalidOption, PollClosed, UnknownPoll, UnknownTopic
from .profiles import InvalidChange, SettingsLocked, WorkingWindow
from .ratings import (
    DuplicateRating,
    MissingTelemetry,
    NotVerifiableFactor,
    TripNotCompleted,
    UnknownFactor,
    UnknownLabel,
)
from .state import Platform
from .support import EmptyComplaint, IllegalTransition, ticket_history_tsv

OPERATOR_TOKEN = "operator-dev"


def driver_token(driver_id: str) -> str:
    return f"driver-{driver_id}"


class DecisionBody(BaseModel):
    decision: str  # "accept" | "decline"


class ProfileChanges(BaseModel):
    name: str | None = None
    date_of_birth: str | None = None
    license_no: str | None = None
    car_info: str | None = None
    earning_goal: dict | None = None
    rating_floor: float | None = None
    employment_mode: str | None = None
    working_windows: list[dict] | None = None
    destination_filter: list[str] | None = None
    ride_length_band: list[float] | None = None
    assignment_mode: str | None = None


class RatingBody(BaseModel):
    trip_id: str
    factor_labels: dict[str, str]
    text: str | None = None
    prompt_id: str | None = None


class DisputeBody(BaseModel):
    factor: str
    evidence_ref: str


class ComplaintBody(BaseModel):
    category: str
    text: str


class TicketAdvanceBody(BaseModel):
    status: str


class ForumActionBody(BaseModel):
    action: str
    payload: dict


class MatchConfigBody(BaseModel):
    match: dict


def create_app(platform: Platform, clock: Callable[[], datetime] | None = None) -> FastAPI:
    app = FastAPI(title="fairride", version="0.1.0")
    now = clock or (lambda: datetime.now(timezone.utc))

    def auth_driver(authorization: str = Header(default="")) -> str:
        if not authorization.startswith("Bearer "):
            raise HTTPException(401, "missing bearer token")
        token = authorization.removeprefix("Bearer ")
        if token == OPERATOR_TOKEN:
            return "operator"
        if token.startswith("driver-"):
            driver_id = token.removeprefix("driver-")
            if driver_id in platform.state.drivers:
                return driver_id
        raise HTTPException(401, "unknown token")

    def require_self(driver_id: str, caller: str):
        if caller != driver_id and caller != "operator":
            raise HTTPException(403, "not your resource")

    def require_operator(caller: str):
        if caller != "operator":
            raise HTTPException(403, "operator only")

    # -- profile --------------------------------------------------------------

    @app.get("/drivers/{driver_id}/profile")
    def get_profile(driver_id: str, caller: str = Depends(auth_driver)):
        require_self(driver_id, caller)
        runtime = _runtime(driver_id)
        return {
            "profile": runtime.profile.to_dict(),
            "state": runtime.state.to_dict(),
        }

    @app.patch("/drivers/{driver_id}/profile")
    def patch_profile(driver_id: str, body: ProfileChanges, caller: str = Depends(auth_driver)):
        require_self(driver_id, caller)
        _runtime(driver_id)
        changes = _decode_changes(body)
        try:
            updated, locked_until = platform.update_profile(driver_id, changes, now())
        except SettingsLocked as exc:
            raise HTTPException(
                423,
                detail={
                    "error": "settings_locked",
                    "field": exc.field,
                    "locked_until": exc.until.isoformat(),
                },
            )
        except InvalidChange as exc:
            raise HTTPException(422, str(exc))
        return {
            "profile": updated.to_dict(),
            "locked_until": locked_until.isoformat() if locked_until else None,
        }

    @app.post("/drivers/{driver_id}/availability")
    def set_availability(driver_id: str, body: dict, caller: str = Depends(auth_driver)):
        require_self(driver_id, caller)
        _runtime(driver_id)
        platform.set_availability(driver_id, bool(body.get("available", True)), now())
        return {"available": platform.state.drivers[driver_id].state.available}

    # -- offers ----------------------------------------------------------------

    @app.get("/drivers/{driver_id}/offers")
    def get_offers(driver_id: str, caller: str = Depends(auth_driver)):
        require_self(driver_id, caller)
        _runtime(driver_id)
        platform.expire_due(now())
        bundle_id = platform.state.live_bundle.get(driver_id)
        offers = []
        if bundle_id is not None:
            for offer_id in platform.state.bundles[bundle_id]:
                entry = platform.state.offers[offer_id]
                if entry["status"] == "live":
                    offers.append(entry["offer"].to_dict())
        return {
            "bundle_id": bundle_id if offers else None,
            "at_most_one_accept": True,
            "offers": offers,
            "server_time": now().isoformat(),
        }

    @app.post("/offers/{offer_id}/decision")
    def post_decision(offer_id: str, body: DecisionBody, caller: str = Depends(auth_driver)):
        entry = platform.state.offers.get(offer_id)
        if entry is None:
            raise HTTPException(404, "unknown offer")
        require_self(entry["offer"].driver_id, caller)
        if body.decision not in ("accept", "decline"):
            raise HTTPException(422, "decision must be accept or decline")
        try:
            outcome = platform.resolve(offer_id, body.decision, now())
        except AlreadyResolved:
            raise HTTPException(409, detail={"error": "already_resolved", "status": entry["status"]})
        if outcome.status == "expired":
            raise HTTPException(410, detail={"error": "expired", "status": "expired"})
        trip = platform.state.active_trips.get(entry["offer"].driver_id)
        return {
            "status": outcome.status,
            "trip": trip if outcome.status == "accepted" else None,
        }

    # -- earnings -----------------------------------------------------------------

    @app.get("/drivers/{driver_id}/earnings")
    def get_earnings(driver_id: str, caller: str = Depends(auth_driver)):
        require_self(driver_id, caller)
        runtime = _runtime(driver_id)
        trips = [
            trip for trip in platform.state.trips.values() if trip["driver_id"] == driver_id
        ]
        goal = runtime.profile.earning_goal
        goal_doc = None
        if goal is not None:
            from .earnings import goal_progress

            earned = (
                runtime.state.earnings_today_c
                if goal.period == "daily"
                else runtime.state.earnings_week_c
            )
            progress = goal_progress(goal, earned, now())
            goal_doc = {
                "period": progress.period,
                "goal_c": progress.goal_c,
                "earned_c": progress.earned_c,
                "state": progress.state,
            }
        return {
            "earnings_today_c": runtime.state.earnings_today_c,
            "earnings_week_c": runtime.state.earnings_week_c,
            "goal": goal_doc,
            "trips": trips,
        }

    # -- ratings -----------------------------------------------------------------

    @app.get("/drivers/{driver_id}/ratings")
    def get_ratings(driver_id: str, caller: str = Depends(auth_driver)):
        require_self(driver_id, caller)
        _runtime(driver_id)
        book = platform.state.ratings
        records = [
            {
                "rating_id": r.rating_id,
                "trip_id": r.trip_id,
                "scores": dict(sorted(r.scores.items())),
                "text": r.text,
                "prompt_id": r.prompt_id,
                "created_at": r.created_at.isoformat(),
                "status": r.status,
            }
            for rid in book.by_driver.get(driver_id, [])
            for r in [book.records[rid]]
        ]
        aggregates = [
            {
                "factor": a.factor,
                "window": a.window,
                "mean": a.mean,
                "count": a.count,
                "alert": a.alert,
            }
            for a in book.factor_aggregates(driver_id)
        ]
        return {
            "records": records,
            "aggregates": aggregates,
            "alerts": [
                {"factor": a.factor, "mean": a.mean, "count": a.count}
                for a in book.check_low_score_alerts(driver_id)
            ],
            "verifiable_factors": sorted(book.config.verifiable),
        }

    @app.post("/ratings")
    def post_rating(body: RatingBody, caller: str = Depends(auth_driver)):
        # rider-side entry point; dev mode lets any authenticated caller file it
        try:
            record = platform.submit_rating(
                body.trip_id, body.factor_labels, now(), text=body.text, prompt_id=body.prompt_id
            )
        except TripNotCompleted as exc:
            raise HTTPException(409, str(exc))
        except DuplicateRating as exc:
            raise HTTPException(409, str(exc))
        except (UnknownLabel, UnknownFactor) as exc:
            raise HTTPException(422, str(exc))
        return {"rating_id": record.rating_id, "scores": dict(sorted(record.scores.items()))}

    @app.post("/ratings/{rating_id}/dispute")
    def post_dispute(rating_id: str, body: DisputeBody, caller: str = Depends(auth_driver)):
        record = platform.state.ratings.records.get(rating_id)
        if record is None:
            raise HTTPException(404, "unknown rating")
        require_self(record.driver_id, caller)
        try:
            dispute = platform.file_dispute(rating_id, body.factor, body.evidence_ref, now())
            resolved = platform.resolve_dispute(dispute.dispute_id, now())
        except NotVerifiableFactor as exc:
            raise HTTPException(422, str(exc))
        except UnknownFactor as exc:
            raise HTTPException(422, str(exc))
        except MissingTelemetry as exc:
            raise HTTPException(409, str(exc))
        return {
            "dispute_id": resolved.dispute_id,
            "status": resolved.status,
            "resolution_note": resolved.resolution_note,
            "rating_status": platform.state.ratings.records[rating_id].status,
        }

    # -- complaints ------------------------------------------------------------------

    @app.post("/drivers/{driver_id}/complaints")
    def post_complaint(driver_id: str, body: ComplaintBody, caller: str = Depends(auth_driver)):
        require_self(driver_id, caller)
        _runtime(driver_id)
        try:
            ticket = platform.open_complaint(driver_id, body.category, body.text, now())
        except EmptyComplaint as exc:
            raise HTTPException(422, str(exc))
        except ValueError as exc:
            raise HTTPException(422, str(exc))
        return ticket.to_dict()

    @app.get("/drivers/{driver_id}/complaints")
    def get_complaints(driver_id: str, caller: str = Depends(auth_driver)):
        require_self(driver_id, caller)
        return {
            "tickets": [
                t.to_dict()
                for t in platform.state.tickets.values()
                if t.driver_id == driver_id
            ]
        }

    @app.get("/complaints/{ticket_id}")
    def get_ticket(ticket_id: str, caller: str = Depends(auth_driver)):
        ticket = platform.state.tickets.get(ticket_id)
        if ticket is None:
            raise HTTPException(404, "unknown ticket")
        require_self(ticket.driver_id, caller)
        return ticket.to_dict()

    @app.get("/complaints/{ticket_id}/history.tsv")
    def ticket_history(ticket_id: str, caller: str = Depends(auth_driver)):
        ticket = platform.state.tickets.get(ticket_id)
        if ticket is None:
            raise HTTPException(404, "unknown ticket")
        require_self(ticket.driver_id, caller)
        return PlainTextResponse(ticket_history_tsv(ticket))

    @app.post("/complaints/{ticket_id}/advance")
    def advance(ticket_id: str, body: TicketAdvanceBody, caller: str = Depends(auth_driver)):
        require_operator(caller)
        if ticket_id not in platform.state.tickets:
            raise HTTPException(404, "unknown ticket")
        try:
            ticket = platform.advance_ticket(ticket_id, body.status, now())
        except IllegalTransition as exc:
            raise HTTPException(409, str(exc))
        return ticket.to_dict()

    # -- forum ---------------------------------------------------------------------

    @app.get("/forum/topics")
    def list_topics(location: str | None = None, caller: str = Depends(auth_driver)):
        topics = platform.state.forum.subforum(location)
        return {
            "topics": [
                {
                    "topic_id": t.topic_id,
                    "title": t.title,
                    "creator": t.creator,
                    "location_tag": t.location_tag,
                    "created_at": t.created_at.isoformat(),
                }
                for t in topics
            ]
        }

    @app.get("/forum/topics/{topic_id}/posts")
    def list_posts(topic_id: str, caller: str = Depends(auth_driver)):
        if topic_id not in platform.state.forum.topics:
            raise HTTPException(404, "unknown topic")
        return {
            "posts": [
                {
                    "post_id": p.post_id,
                    "author": p.author,
                    "body": p.body,
                    "created_at": p.created_at.isoformat(),
                }
                for p in platform.state.forum.posts[topic_id]
            ]
        }

    @app.get("/forum/polls")
    def list_polls(caller: str = Depends(auth_driver)):
        forum = platform.state.forum
        return {
            "polls": [
                {
                    "poll_id": p.poll_id,
                    "question": p.question,
                    "options": list(p.options),
                    "open": p.open,
                    "tally": forum.tally(p.poll_id),
                    "config_proposal": p.config_proposal,
                }
                for p in forum.polls.values()
            ]
        }

    @app.post("/forum/actions")
    def forum_action(body: ForumActionBody, caller: str = Depends(auth_driver)):
        try:
            result = platform.forum_action(caller, body.action, body.payload, now())
        except (UnknownTopic, UnknownPoll, KeyError) as exc:
            raise HTTPException(404, str(exc))
        except PollClosed as exc:
            raise HTTPException(409, f"poll closed: {exc}")
        except (InvalidOption, ValueError) as exc:
            raise HTTPException(422, str(exc))
        if body.action == "create_topic":
            return {"topic_id": result.topic_id}
        if body.action == "post":
            return {"post_id": result.post_id}
        if body.action == "create_poll":
            return {"poll_id": result.poll_id}
        if body.action == "vote":
            return {"tally": platform.state.forum.tally(body.payload["poll_id"])}
        return {"proposal": result}

    # -- transparency -----------------------------------------------------------------

    @app.get("/drivers/{driver_id}/transparency")
    def transparency(driver_id: str, caller: str = Depends(auth_driver)):
        require_self(driver_id, caller)
        runtime = _runtime(driver_id)
        last_offer = None
        for entry in reversed(list(platform.state.offers.values())):
            if entry["offer"].driver_id == driver_id:
                last_offer = entry
                break
        query = runtime.network.spec.query_node
        probs = runtime.network.probabilities(query)
        rows = []
        for row in range(probs.shape[0]):
            assignment = runtime.network.spec.row_assignment(query, row)
            rows.append(
                {
                    "context": assignment,
                    "p_accept": float(probs[row, 0]),
                    "observations": float(runtime.network.cpt_counts[query][row].sum() - 2.0),
                }
            )
        return {
            "query_node": query,
            "acceptance_rows": rows,
            "cpt_export": runtime.network.export_counts(),
            "last_offer": (
                {
                    "offer": last_offer["offer"].to_dict(),
                    "status": last_offer["status"],
                }
                if last_offer
                else None
            ),
            "incentive_threshold": platform.state.config.match.incentive_threshold,
        }

    @app.post("/config/match")
    def apply_match(body: MatchConfigBody, caller: str = Depends(auth_driver)):
        """Operator applies a community-voted dispatch config proposal."""
        require_operator(caller)
        try:
            match = MatchConfig.from_dict(body.match)
        except (TypeError, ValueError) as exc:
            raise HTTPException(422, str(exc))
        platform.apply_match_config(match, now())
        return {"match": platform.state.config.match.to_dict()}

    @app.get("/config/proposals")
    def list_proposals(caller: str = Depends(auth_driver)):
        return {"proposals": list(platform.state.proposals)}

    @app.get("/health")
    def health():
        return {"ok": True, "last_seq": platform.state.last_seq}

    def _runtime(driver_id: str):
        runtime = platform.state.drivers.get(driver_id)
        if runtime is None:
            raise HTTPException(404, "unknown driver")
        return runtime

    def _decode_changes(body: ProfileChanges) -> dict:
        changes: dict = {}
        raw = body.model_dump(exclude_unset=True)
        for name, value in raw.items():
            if name == "earning_goal":
                changes[name] = EarningGoal.from_dict(value) if value else None
            elif name == "working_windows":
                changes[name] = tuple(WorkingWindow.from_dict(w) for w in value)
            elif name == "destination_filter":
                changes[name] = frozenset(value)
            elif name == "ride_length_band":
                changes[name] = tuple(value) if value else None
            else:
                changes[name] = value
        return changes

    return app
