"""Simulation parameters with the defaults used throughout the pipeline."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from .errors import ScenarioError


@dataclass
class SimParams:
    """Free parameters of the pipeline; field names match the scenario JSON keys."""

    dt_s: float = 1.0
    comm_range_m: float = 250.0
    target_group_size: int = 20
    recluster_interval_s: float = 30.0
    gossip_interval_s: float = 5.0
    sssp_interval_s: float = 10.0
    t_expire_s: float = 60.0
    epsilon_v: float = 0.05
    k_max: int = 4096

    def validate(self) -> None:
        if not 0.0 < self.epsilon_v < 1.0:
            raise ScenarioError(f"epsilon_v must be in (0, 1), got {self.epsilon_v}")
        if self.dt_s <= 0:
            raise ScenarioError(f"dt_s must be > 0, got {self.dt_s}")
        for name in ("recluster_interval_s", "gossip_interval_s", "sssp_interval_s", "t_expire_s"):
            value = getattr(self, name)
            if value <= 0:
                raise ScenarioError(f"{name} must be > 0, got {value}")
        if self.comm_range_m <= 0:
            raise ScenarioError(f"comm_range_m must be > 0, got {self.comm_range_m}")
        if self.target_group_size < 1:
            raise ScenarioError(f"target_group_size must be >= 1, got {self.target_group_size}")
        if self.k_max < 1:
            raise ScenarioError(f"k_max must be >= 1, got {self.k_max}")
        # Protocol phases fire on "time mod interval == 0"; with discrete steps that
        # is only well defined when each interval is a whole number of steps.
        for name in ("recluster_interval_s", "gossip_interval_s", "sssp_interval_s"):
            value = getattr(self, name)
            if math.isfinite(value) and not _is_multiple(value, self.dt_s):
                raise ScenarioError(f"{name}={value} is not a multiple of dt_s={self.dt_s}")

    def steps_per(self, interval_s: float) -> int:
        """Number of dt-steps making up one interval (>= 1)."""
        return max(1, round(interval_s / self.dt_s))

    @classmethod
    def from_dict(cls, doc: dict) -> "SimParams":
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ScenarioError(f"unknown params keys: {sorted(unknown)}")
        params = cls(**doc)
        params.validate()
        return params

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _is_multiple(value: float, dt: float) -> bool:
    ratio = value / dt
    return abs(ratio - round(ratio)) < 1e-9
