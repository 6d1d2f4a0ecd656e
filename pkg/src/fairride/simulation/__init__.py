"""Deterministic marketplace simulator and learning-calibration harness."""

from .drivers import GroundTruthDriver, make_ground_truth, make_roster, simulate_decision
from .metrics import SimReport, brier_score, expected_calibration_error, report_from_log
from .runner import (
    CalibrationResult,
    calibration_run,
    replay_interview_scenarios,
    run_simulation,
    sample_context,
    train_network,
)
from .stream import SimConfig, generate_trip_stream, rng_for

__all__ = [
    "CalibrationResult",
    "GroundTruthDriver",
    "SimConfig",
    "SimReport",
    "brier_score",
    "calibration_run",
    "expected_calibration_error",
    "generate_trip_stream",
    "make_ground_truth",
    "make_roster",
    "replay_interview_scenarios",
    "report_from_log",
    "rng_for",
    "run_simulation",
    "sample_context",
    "simulate_decision",
    "train_network",
]
