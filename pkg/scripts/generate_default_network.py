#!/usr/bin/env python3
"""Regenerate src/fairride/data/default_network.json.

The default network ships as data. Structure: four observable trip
features feed a three-level TripAttractiveness summary; acceptance
depends on that summary plus driver-side context (fatigue, goal
progress, incentive). TimeOfDay and DayType are recorded as offer
context but carry no arcs, so their influence is visible in audits
without asserting a causal claim the data never supported.

TripAttractiveness seed counts encode a near-deterministic additive
score (199/200 mass on the scored level) so that the mapping is
informative from day one; acceptance itself starts uniform and is
learned per driver.
"""

import json
from pathlib import Path

NODES = [
    ("TimeOfDay", ["morning", "afternoon", "evening", "night"]),
    ("DayType", ["weekday", "weekend"]),
    ("PickupDistance", ["near", "far"]),
    ("TripLength", ["short", "medium", "long"]),
    ("DestinationCategory", ["airport", "downtown", "restaurant", "residential", "other"]),
    ("RiderRating", ["low", "high"]),
    ("Fatigue", ["fresh", "moderate", "tired"]),
    ("GoalProgress", ["behind", "on_track", "met"]),
    ("IncentivePresent", ["no", "yes"]),
    ("TripAttractiveness", ["low", "medium", "high"]),
    ("Accept", ["accept", "decline"]),
]

EDGES = [
    ("PickupDistance", "TripAttractiveness"),
    ("TripLength", "TripAttractiveness"),
    ("DestinationCategory", "TripAttractiveness"),
    ("RiderRating", "TripAttractiveness"),
    ("TripAttractiveness", "Accept"),
    ("Fatigue", "Accept"),
    ("GoalProgress", "Accept"),
    ("IncentivePresent", "Accept"),
]

SCORE = {
    "PickupDistance": {"near": 1, "far": -1},
    "TripLength": {"short": -1, "medium": 1, "long": 0},
    "DestinationCategory": {"airport": 2, "downtown": 1, "restaurant": 0, "residential": 0, "other": -1},
    "RiderRating": {"low": -2, "high": 1},
}

DOMINANT = 198.0
FLOOR = 1.0


def attractiveness_level(pickup: str, length: str, destination: str, rating: str) -> str:
    score = (
        SCORE["PickupDistance"][pickup]
        + SCORE["TripLength"][length]
        + SCORE["DestinationCategory"][destination]
        + SCORE["RiderRating"][rating]
    )
    if score <= -2:
        return "low"
    if score >= 2:
        return "high"
    return "medium"


def main() -> None:
    levels = ["low", "medium", "high"]
    rows = []
    # row order mirrors the engine's mixed-radix layout: parents in
    # declaration order, rightmost varying fastest
    for pickup in ["near", "far"]:
        for length in ["short", "medium", "long"]:
            for destination in ["airport", "downtown", "restaurant", "residential", "other"]:
                for rating in ["low", "high"]:
                    level = attractiveness_level(pickup, length, destination, rating)
                    counts = [DOMINANT if lv == level else FLOOR for lv in levels]
                    key = (
                        f"PickupDistance={pickup}|TripLength={length}"
                        f"|DestinationCategory={destination}|RiderRating={rating}"
                    )
                    rows.append({"parents": key, "counts": counts})

    doc = {
        "nodes": [{"name": name, "states": states} for name, states in NODES],
        "edges": [list(edge) for edge in EDGES],
        "query_node": "Accept",
        "seed_counts": {"TripAttractiveness": rows},
    }
    out = Path(__file__).resolve().parents[1] / "src" / "fairride" / "data" / "default_network.json"
    out.write_text(json.dumps(doc, indent=2) + "\n")
    print(f"wrote {out} ({len(rows)} attractiveness rows)")


if __name__ == "__main__":
    main()
