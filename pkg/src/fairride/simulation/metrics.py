"""Calibration metrics and log-derived reporting.

Every report number is a pure function of the event log, so an audit can
recompute the report from the persisted records and get the same bytes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ..events import EventRecord


def brier_score(probs: Sequence[float], outcomes: Sequence[int]) -> float:
    p = np.asarray(probs, dtype=float)
    y = np.asarray(outcomes, dtype=float)
    return float(np.mean((p - y) ** 2))


def expected_calibration_error(
    probs: Sequence[float], outcomes: Sequence[int], bins: int = 10
) -> float:
    """Standard binned ECE: count-weighted |mean prediction - hit rate|."""
    p = np.asarray(probs, dtype=float)
    y = np.asarray(outcomes, dtype=float)
    if len(p) == 0:
        return 0.0
    edges = np.linspace(0.0, 1.0, bins + 1)
    idx = np.clip(np.digitize(p, edges[1:-1]), 0, bins - 1)
    ece = 0.0
    for b in range(bins):
        mask = idx == b
        n_b = int(mask.sum())
        if n_b:
            ece += (n_b / len(p)) * abs(float(p[mask].mean()) - float(y[mask].mean()))
    return float(ece)


@dataclass
class SimReport:
    seed: int
    n_drivers: int
    offers_issued: int
    offers_accepted: int
    offers_declined: int
    offers_expired: int
    offers_voided: int
    overall_acceptance_rate: float | None
    overall_brier: float | None
    overall_ece: float | None
    incentive_spend_c: int
    per_driver: dict[str, dict]
    scenario_transcripts: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "n_drivers": self.n_drivers,
            "offers_issued": self.offers_issued,
            "offers_accepted": self.offers_accepted,
            "offers_declined": self.offers_declined,
            "offers_expired": self.offers_expired,
            "offers_voided": self.offers_voided,
            "overall_acceptance_rate": self.overall_acceptance_rate,
            "overall_brier": self.overall_brier,
            "overall_ece": self.overall_ece,
            "incentive_spend_c": self.incentive_spend_c,
            "per_driver": {k: dict(v) for k, v in sorted(self.per_driver.items())},
            "scenario_transcripts": list(self.scenario_transcripts),
        }


def report_from_log(records: Iterable[EventRecord], bins: int = 10, seed: int = 0) -> SimReport:
    """Recompute the full report from the event log alone."""
    offers: dict[str, dict] = {}
    resolutions: dict[str, dict] = {}
    goals: dict[str, int | None] = {}
    earned: dict[str, int] = {}
    order: list[str] = []

    for record in records:
        if record.kind == "offer_issued":
            offer = record.payload["offer"]
            offers[offer["offer_id"]] = offer
            order.append(offer["offer_id"])
        elif record.kind == "offer_resolved":
            resolutions[record.payload["offer_id"]] = record.payload
        elif record.kind == "trip_completed":
            payload = record.payload
            earned[payload["driver_id"]] = (
                earned.get(payload["driver_id"], 0) + payload["breakdown"]["net_c"]
            )
        elif record.kind == "config_change" and record.payload["action"] == "driver_registered":
            profile = record.payload["profile"]
            goal = profile.get("earning_goal")
            goals[profile["driver_id"]] = goal["amount_c"] if goal else None

    counts = {"accepted": 0, "declined": 0, "expired": 0, "voided": 0}
    by_driver: dict[str, dict] = {}
    all_probs: list[float] = []
    all_hits: list[int] = []
    incentive_spend_c = 0

    for offer_id in order:
        offer = offers[offer_id]
        resolution = resolutions.get(offer_id)
        if resolution is None:
            continue
        status = resolution["status"]
        counts[status] += 1
        driver_id = offer["driver_id"]
        slot = by_driver.setdefault(driver_id, {"probs": [], "hits": [], "accepted": 0, "decided": 0})
        if status == "voided":
            continue
        hit = 1 if status == "accepted" else 0
        slot["probs"].append(offer["probability"])
        slot["hits"].append(hit)
        slot["decided"] += 1
        slot["accepted"] += hit
        all_probs.append(offer["probability"])
        all_hits.append(hit)
        if status == "accepted":
            incentive_spend_c += offer["incentive_c"]

    per_driver = {}
    for driver_id in sorted(set(by_driver) | set(goals)):
        slot = by_driver.get(driver_id, {"probs": [], "hits": [], "accepted": 0, "decided": 0})
        decided = slot["decided"]
        goal_c = goals.get(driver_id)
        net = earned.get(driver_id, 0)
        per_driver[driver_id] = {
            "offers_decided": decided,
            "accepted": slot["accepted"],
            "acceptance_rate": slot["accepted"] / decided if decided else None,
            "brier": brier_score(slot["probs"], slot["hits"]) if decided else None,
            "ece": expected_calibration_error(slot["probs"], slot["hits"], bins) if decided else None,
            "earned_net_c": net,
            "goal_c": goal_c,
            "goal_attainment": net / goal_c if goal_c else None,
        }

    decided_total = len(all_probs)
    return SimReport(
        seed=seed,
        n_drivers=len(goals),
        offers_issued=len(order),
        offers_accepted=counts["accepted"],
        offers_declined=counts["declined"],
        offers_expired=counts["expired"],
        offers_voided=counts["voided"],
        overall_acceptance_rate=(counts["accepted"] / decided_total) if decided_total else None,
        overall_brier=brier_score(all_probs, all_hits) if decided_total else None,
        overall_ece=expected_calibration_error(all_probs, all_hits, bins) if decided_total else None,
        incentive_spend_c=incentive_spend_c,
        per_driver=per_driver,
    )
