"""Assembly approach clips and deterministic pose sampling.

A clip moves the successor from an offset approach pose to its mating
pose, both expressed in the predecessor's (anchor's) local frame.
Sampling interpolates position linearly and orientation spherically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .database import combined_name
from .errors import UnknownComponent
from .model import AnimationClip, Database, Pose, Quat, Vec3


@dataclass(frozen=True)
class AnimationParams:
    """Approach trajectory knobs: how far away the clip starts and how long it runs."""

    approach_distance: float = 0.2
    approach_axis: Vec3 = (0.0, 0.0, 1.0)
    duration: float = 2.0

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError(f"duration must be > 0, got {self.duration}")
        axis = tuple(float(v) for v in self.approach_axis)
        if len(axis) != 3:
            raise ValueError("approach_axis must have 3 entries")
        norm = math.sqrt(sum(v * v for v in axis))
        if norm == 0.0:
            raise ValueError("approach_axis must be non-zero")
        object.__setattr__(self, "approach_axis", tuple(v / norm for v in axis))
        object.__setattr__(self, "approach_distance", float(self.approach_distance))

    def to_dict(self) -> dict:
        return {
            "approach_distance": self.approach_distance,
            "approach_axis": list(self.approach_axis),
            "duration": self.duration,
        }


DEFAULT_PARAMS = AnimationParams()


def make_animation(
    db: Database,
    predecessor: str,
    successor: str,
    params: AnimationParams = DEFAULT_PARAMS,
    instance_count: int = 1,
) -> AnimationClip:
    """Build the looping approach clip for successor-onto-predecessor.

    The end pose is the successor's mating pose stored on the assembled
    record named ``<predecessor>_<successor>``; the start pose backs away
    from it by ``approach_distance`` along the approach axis, orientation
    unchanged.
    """
    key = combined_name(predecessor, successor)
    record = db.get(key)
    if record is None:
        raise UnknownComponent(key)
    if record.mating_pose is None:
        raise ValueError(f"assembled record {key!r} has no mating pose")
    end = record.mating_pose
    dist = params.approach_distance
    start = Pose(
        position=tuple(p + dist * a for p, a in zip(end.position, params.approach_axis)),
        orientation=end.orientation,
    )
    return AnimationClip(
        target=successor,
        anchor=predecessor,
        instance_count=instance_count,
        start_pose=start,
        end_pose=end,
        duration=params.duration,
        looping=True,
    )


def _lerp(a: Vec3, b: Vec3, u: float) -> Vec3:
    return tuple(x + (y - x) * u for x, y in zip(a, b))  # type: ignore[return-value]


def _slerp(q1: Quat, q2: Quat, u: float) -> Quat:
    dot = sum(a * b for a, b in zip(q1, q2))
    if dot < 0.0:
        q2 = tuple(-v for v in q2)  # type: ignore[assignment]
        dot = -dot
    if dot > 0.9995:
        # nearly parallel: fall back to normalized linear interpolation
        mixed = tuple(a + (b - a) * u for a, b in zip(q1, q2))
        norm = math.sqrt(sum(v * v for v in mixed))
        return tuple(v / norm for v in mixed)  # type: ignore[return-value]
    theta = math.acos(max(-1.0, min(1.0, dot)))
    sin_theta = math.sin(theta)
    w1 = math.sin((1.0 - u) * theta) / sin_theta
    w2 = math.sin(u * theta) / sin_theta
    mixed = tuple(w1 * a + w2 * b for a, b in zip(q1, q2))
    norm = math.sqrt(sum(v * v for v in mixed))
    return tuple(v / norm for v in mixed)  # type: ignore[return-value]


def sample_animation(clip: AnimationClip, t: float) -> Pose:
    """Pose at time ``t`` seconds: modular phase when looping, clamped otherwise."""
    if t < 0:
        raise ValueError(f"sample time must be >= 0, got {t}")
    if clip.looping:
        u = (t % clip.duration) / clip.duration
    else:
        u = min(t / clip.duration, 1.0)
    if u == 0.0:
        return clip.start_pose
    if u == 1.0:
        return clip.end_pose
    return Pose(
        position=_lerp(clip.start_pose.position, clip.end_pose.position, u),
        orientation=_slerp(clip.start_pose.orientation, clip.end_pose.orientation, u),
    )
