"""Exact construction and verification of fence-patrolling schedules."""

from .errors import PatrolError
from .model import (Agent, Fence, Horizon, Periodic, Schedule, Trajectory, deserialize,
                    serialize, validate_schedule)
from .numeric import parse_rational, render
from .verify import analyze_gaps, compare, exact_idle, sampled_idle, volume_lower_bound

__all__ = [
    "Agent", "Fence", "Horizon", "Periodic", "PatrolError", "Schedule", "Trajectory",
    "analyze_gaps", "compare", "deserialize", "exact_idle", "parse_rational", "render",
    "sampled_idle", "serialize", "validate_schedule", "volume_lower_bound",
]
