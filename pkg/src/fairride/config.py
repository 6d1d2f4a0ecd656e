"""Platform configuration: validated once at load, rejected loudly.

The offer-window floor lives here as well as in MatchConfig itself, so a
bad config can never reach offer time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .dispatch import MatchConfig
from .ratings import RatingsConfig
from .support import CATEGORIES, DEFAULT_SLA_HOURS


class ConfigInvalid(ValueError):
    pass


@dataclass(frozen=True)
class PlatformConfig:
    match: MatchConfig = field(default_factory=MatchConfig)
    ratings: RatingsConfig = field(default_factory=RatingsConfig)
    sla_hours: dict = field(default_factory=lambda: dict(DEFAULT_SLA_HOURS))
    lock_window_days: int = 7
    elicitation_ess: float = 10.0
    smoothing: float = 1.0
    learning_enabled: bool = True
    network_spec_path: str | None = None  # None -> packaged default network
    sim: dict = field(default_factory=dict)  # defaults forwarded to the simulator

    def __post_init__(self):
        if set(self.sla_hours) != set(CATEGORIES):
            raise ConfigInvalid(f"SLA table must cover exactly {sorted(CATEGORIES)}")
        if any(h <= 0 for h in self.sla_hours.values()):
            raise ConfigInvalid("SLA hours must be positive")
        if self.lock_window_days < 0:
            raise ConfigInvalid("lock window must be nonnegative")
        if self.elicitation_ess < 0:
            raise ConfigInvalid("elicitation sample size must be nonnegative")
        if self.smoothing <= 0:
            raise ConfigInvalid("smoothing must be positive")

    def to_dict(self) -> dict:
        return {
            "match": self.match.to_dict(),
            "ratings": self.ratings.to_dict(),
            "sla_hours": dict(self.sla_hours),
            "lock_window_days": self.lock_window_days,
            "elicitation_ess": self.elicitation_ess,
            "smoothing": self.smoothing,
            "learning_enabled": self.learning_enabled,
            "network_spec_path": self.network_spec_path,
            "sim": dict(self.sim),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PlatformConfig":
        data = dict(data)
        try:
            if "match" in data:
                data["match"] = MatchConfig.from_dict(data["match"])
            if "ratings" in data:
                data["ratings"] = RatingsConfig.from_dict(data["ratings"])
            return cls(**data)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigInvalid):
                raise
            raise ConfigInvalid(str(exc)) from None


def load_config(path: str | Path | None = None) -> PlatformConfig:
    """Read and validate a config file; no file means all defaults."""
    if path is None:
        return PlatformConfig()
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigInvalid(f"config file {path} does not exist") from None
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"config file {path} is not valid JSON: {exc}") from None
    return PlatformConfig.from_dict(doc)
