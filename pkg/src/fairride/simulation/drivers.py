"""Ground-truth decision models: the drivers the learner must fit.

Each simulated driver accepts with a logistic probability over the same
discretized context features the acceptance model sees, so a learnable
target exists; a misspecification knob adds a hidden feature the model
cannot see, for stress runs with no calibration guarantee.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..bbn import CONTEXT_NODES, Evidence, NetworkSpec
from ..dispatch import DriverState
from ..earnings import EarningGoal
from ..profiles import DriverProfile


@dataclass(frozen=True)
class GroundTruthDriver:
    driver_id: str
    weights: dict[str, float]  # "Node=state" -> weight
    bias: float
    hidden_shift: float = 0.0  # misspecification: applied off any modeled feature

    def p_accept(self, evidence: Evidence, hidden_on: bool = False) -> float:
        score = self.bias + (self.hidden_shift if hidden_on else 0.0)
        for node, state in evidence.items():
            score += self.weights.get(f"{node}={state}", 0.0)
        return 1.0 / (1.0 + math.exp(-score))


def simulate_decision(gt: GroundTruthDriver, evidence: Evidence, draw: float) -> str:
    """One click: accept when the uniform draw lands under the true probability."""
    return "accept" if draw < gt.p_accept(evidence) else "decline"


def make_ground_truth(
    rng: np.random.Generator,
    driver_id: str,
    spec: NetworkSpec,
    weight_scale: float = 1.1,
    bias_loc: float = -0.8,
    hidden_shift: float = 0.0,
) -> GroundTruthDriver:
    """Random logistic driver over every context feature-state.

    The negative bias center mirrors the observation that most blind
    assignments get declined.
    """
    weights = {}
    for name in CONTEXT_NODES:
        if not spec.has_node(name):
            continue
        for state in spec.node(name).states:
            weights[f"{name}={state}"] = float(rng.normal(0.0, weight_scale))
    bias = float(rng.normal(bias_loc, 0.4))
    return GroundTruthDriver(
        driver_id=driver_id, weights=weights, bias=bias, hidden_shift=hidden_shift
    )


def make_roster(
    rng: np.random.Generator, n_drivers: int, spec: NetworkSpec, city_km: float
) -> list[tuple[DriverProfile, DriverState, GroundTruthDriver]]:
    """Profiles, starting states, and decision models for a simulated fleet."""
    roster = []
    for i in range(n_drivers):
        driver_id = f"driver-{i:03d}"
        part_time = rng.random() < 0.3
        location = tuple(rng.uniform(0.0, city_km, size=2).round(3))
        home = tuple(rng.uniform(0.0, city_km, size=2).round(3))
        destination_filter = frozenset()
        if rng.random() < 0.2:
            destination_filter = frozenset({["airport", "other", "residential"][int(rng.integers(3))]})
        profile = DriverProfile(
            driver_id=driver_id,
            name=f"Sim Driver {i}",
            employment_mode="part_time" if part_time else "full_time",
            earning_goal=EarningGoal(amount_c=int(rng.integers(120, 220)) * 100, period="daily"),
            home_location=home,
            home_route=(location, home) if part_time else None,
            destination_filter=destination_filter,
            ride_length_band=(5.0, 60.0) if rng.random() < 0.2 else None,
            assignment_mode="queued" if rng.random() < 0.2 else "random",
        )
        state = DriverState(driver_id=driver_id, location=location)
        gt = make_ground_truth(rng, driver_id, spec)
        roster.append((profile, state, gt))
    return roster
