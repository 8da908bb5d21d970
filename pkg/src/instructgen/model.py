"""Shared domain types for the instruction pipeline.

Everything here is an immutable value object: safe to share between
threads, compared structurally, and serialized to plain JSON-friendly
dicts via ``to_dict``/``from_dict`` pairs. No I/O happens in this module.

Conventions: right-handed coordinates, meters, quaternions stored as
(w, x, y, z) and kept unit-length to within 1e-9.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Iterable, Mapping

_NAME_RE = re.compile(r"^[a-z0-9]+(_[a-z0-9]+)*$")

QUAT_NORM_TOL = 1e-9

Vec3 = tuple[float, float, float]
Quat = tuple[float, float, float, float]
Color = tuple[float, float, float, float]


class CanonicalName(str):
    """Lowercase identifier (tokens joined by single underscores).

    The one naming space shared by the extractor output, the lexicon and
    the component database, so a triple can be matched against records
    by plain string equality.
    """

    __slots__ = ()

    def __new__(cls, value: str) -> "CanonicalName":
        if not isinstance(value, str) or not _NAME_RE.fullmatch(value):
            raise ValueError(f"invalid canonical name: {value!r}")
        return super().__new__(cls, value)


def _as_vec3(value: Iterable[float], what: str) -> Vec3:
    items = tuple(float(v) for v in value)
    if len(items) != 3:
        raise ValueError(f"{what} must have 3 entries, got {len(items)}")
    return items  # type: ignore[return-value]


def _as_quat(value: Iterable[float]) -> Quat:
    items = tuple(float(v) for v in value)
    if len(items) != 4:
        raise ValueError(f"orientation must have 4 entries (w, x, y, z), got {len(items)}")
    norm = math.sqrt(sum(v * v for v in items))
    if abs(norm - 1.0) > QUAT_NORM_TOL:
        raise ValueError(f"orientation must be a unit quaternion, |q|={norm!r}")
    return items  # type: ignore[return-value]


def _as_color(value: Iterable[float]) -> Color:
    items = tuple(float(v) for v in value)
    if len(items) != 4:
        raise ValueError(f"color must be RGBA, got {len(items)} channels")
    for v in items:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"color channel {v!r} outside [0, 1]")
    return items  # type: ignore[return-value]


def _require_positive_int(value: Any, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"{what} must be an integer, got {value!r}")
    if value < 1:
        raise ValueError(f"{what} must be >= 1, got {value}")
    return value


@dataclass(frozen=True)
class ExtractionResult:
    """The (predecessor, successor, count) triple: the extractor's whole contract.

    ``predecessor`` is the already-assembled component the step references,
    ``successor`` the component being added, ``count`` how many successor
    instances the step assembles.
    """

    predecessor: CanonicalName
    successor: CanonicalName
    count: int = 1

    def __post_init__(self):
        object.__setattr__(self, "predecessor", CanonicalName(self.predecessor))
        object.__setattr__(self, "successor", CanonicalName(self.successor))
        _require_positive_int(self.count, "count")
        if self.predecessor == self.successor:
            raise ValueError(f"predecessor and successor are both {self.predecessor!r}")

    def to_dict(self) -> dict:
        return {
            "predecessor": str(self.predecessor),
            "successor": str(self.successor),
            "count": self.count,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "ExtractionResult":
        return cls(
            predecessor=CanonicalName(data["predecessor"]),
            successor=CanonicalName(data["successor"]),
            count=data["count"],
        )


@dataclass(frozen=True)
class Pose:
    """Position (meters) plus unit-quaternion orientation."""

    position: Vec3 = (0.0, 0.0, 0.0)
    orientation: Quat = (1.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "position", _as_vec3(self.position, "position"))
        object.__setattr__(self, "orientation", _as_quat(self.orientation))

    def to_dict(self) -> dict:
        return {"position": list(self.position), "orientation": list(self.orientation)}

    @classmethod
    def from_dict(cls, data: Mapping) -> "Pose":
        return cls(position=tuple(data["position"]), orientation=tuple(data["orientation"]))


IDENTITY_POSE = Pose()


@dataclass(frozen=True)
class ShapeSpec:
    """Render primitive: a box, a cylinder, or an opaque mesh file reference.

    Dimensions are meters: (x, y, z) edge lengths for boxes,
    (radius, height) for cylinders. Mesh paths are passed through to the
    renderer untouched; the engine never opens them.
    """

    type: str
    dimensions: tuple[float, ...] | None = None
    mesh_path: str | None = None

    def __post_init__(self):
        if self.type not in ("box", "cylinder", "mesh"):
            raise ValueError(f"unknown shape type {self.type!r}")
        dims = None if self.dimensions is None else tuple(float(v) for v in self.dimensions)
        object.__setattr__(self, "dimensions", dims)
        if self.type == "box":
            if dims is None or len(dims) != 3:
                raise ValueError("box shape needs 3 dimensions")
        elif self.type == "cylinder":
            if dims is None or len(dims) != 2:
                raise ValueError("cylinder shape needs (radius, height)")
        else:
            if not self.mesh_path:
                raise ValueError("mesh shape needs a mesh_path")
        if dims is not None and any(v <= 0 for v in dims):
            raise ValueError(f"shape dimensions must be positive, got {dims}")

    def to_dict(self) -> dict:
        out: dict = {"type": self.type}
        if self.dimensions is not None:
            out["dimensions"] = list(self.dimensions)
        if self.mesh_path is not None:
            out["path"] = self.mesh_path
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> "ShapeSpec":
        return cls(
            type=data["type"],
            dimensions=tuple(data["dimensions"]) if "dimensions" in data else None,
            mesh_path=data.get("path"),
        )


@dataclass(frozen=True)
class ComponentRecord:
    """One named entry in the component database.

    ``kind`` is "atomic" for individual parts and "assembled" for the
    post-step combination of exactly two constituents. Assembled records
    carry ``mating_pose``: the successor's pose relative to the
    predecessor's local frame once mated, which is what the animation
    builder interpolates toward.

    Cross-record rules (naming, constituent resolution, uniqueness) are
    deliberately NOT enforced here; ``validate_database`` reports them as
    data so a loader can surface every problem in a manifest at once.
    """

    name: CanonicalName
    kind: str
    shape: ShapeSpec
    default_color: Color
    instances: tuple[Pose, ...]
    constituents: tuple[CanonicalName, ...] = ()
    mating_pose: Pose | None = None

    def __post_init__(self):
        object.__setattr__(self, "name", CanonicalName(self.name))
        if self.kind not in ("atomic", "assembled"):
            raise ValueError(f"unknown component kind {self.kind!r}")
        object.__setattr__(self, "default_color", _as_color(self.default_color))
        object.__setattr__(self, "instances", tuple(self.instances))
        object.__setattr__(
            self, "constituents", tuple(CanonicalName(c) for c in self.constituents)
        )

    def to_dict(self) -> dict:
        out: dict = {
            "name": str(self.name),
            "kind": self.kind,
            "shape": self.shape.to_dict(),
            "color": list(self.default_color),
            "instances": [p.to_dict() for p in self.instances],
            "constituents": [str(c) for c in self.constituents],
        }
        if self.mating_pose is not None:
            out["mating_pose"] = self.mating_pose.to_dict()
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> "ComponentRecord":
        return cls(
            name=CanonicalName(data["name"]),
            kind=data["kind"],
            shape=ShapeSpec.from_dict(data["shape"]),
            default_color=tuple(data["color"]),
            instances=tuple(Pose.from_dict(p) for p in data["instances"]),
            constituents=tuple(CanonicalName(c) for c in data.get("constituents", ())),
            mating_pose=Pose.from_dict(data["mating_pose"]) if data.get("mating_pose") else None,
        )


@dataclass(frozen=True)
class Database:
    """Ordered component records; manifest order is the engine's scan order."""

    components: tuple[ComponentRecord, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))

    @cached_property
    def index(self) -> dict[str, int]:
        """Name -> first position in manifest order."""
        out: dict[str, int] = {}
        for pos, rec in enumerate(self.components):
            out.setdefault(rec.name, pos)
        return out

    def get(self, name: str) -> ComponentRecord | None:
        pos = self.index.get(name)
        return None if pos is None else self.components[pos]

    def to_dict(self) -> dict:
        return {"components": [rec.to_dict() for rec in self.components]}

    @classmethod
    def from_dict(cls, data: Mapping) -> "Database":
        return cls(components=tuple(ComponentRecord.from_dict(r) for r in data["components"]))


@dataclass(frozen=True)
class Violation:
    """One broken database rule, reported as data rather than raised."""

    record: str
    rule: str
    detail: str


def validate_database(db: Database) -> list[Violation]:
    """Check every database-level invariant, returning all violations found.

    An empty list means the database is well-formed. Rules checked:
    unique names, non-empty instance lists, assembled records having
    exactly two resolvable constituents plus a mating pose and a name
    equal to ``<first>_<second>``, atomic records having no constituents,
    and atomic names that would shadow a combined-name lookup.
    """
    violations: list[Violation] = []
    seen: set[str] = set()
    names = [rec.name for rec in db.components]

    for rec in db.components:
        if rec.name in seen:
            violations.append(Violation(rec.name, "duplicate-name", "name already used by an earlier record"))
        seen.add(rec.name)

        if not rec.instances:
            violations.append(Violation(rec.name, "no-instances", "record has no instance poses"))

        if rec.kind == "assembled":
            if len(rec.constituents) != 2:
                violations.append(
                    Violation(
                        rec.name,
                        "constituent-count",
                        f"assembled record needs exactly 2 constituents, has {len(rec.constituents)}",
                    )
                )
            else:
                expected = f"{rec.constituents[0]}_{rec.constituents[1]}"
                if rec.name != expected:
                    violations.append(
                        Violation(rec.name, "combined-name", f"name should be {expected!r}")
                    )
            for c in rec.constituents:
                if c not in db.index:
                    violations.append(
                        Violation(rec.name, "unresolved-constituent", f"constituent {c!r} has no record")
                    )
            if rec.mating_pose is None:
                violations.append(
                    Violation(rec.name, "missing-mating-pose", "assembled record has no mating_pose")
                )
        else:
            if rec.constituents:
                violations.append(
                    Violation(rec.name, "atomic-constituents", "atomic record must not list constituents")
                )
            # An atomic record named like "<a>_<b>" for existing records a, b
            # would make combined-name lookup ambiguous.
            for a in names:
                for b in names:
                    if a != b and rec.name == f"{a}_{b}":
                        violations.append(
                            Violation(
                                rec.name,
                                "combined-collision",
                                f"atomic name shadows the combination of {a!r} and {b!r}",
                            )
                        )
    return violations


@dataclass(frozen=True)
class InstanceState:
    """Activation, color, pose and animation binding of one component instance."""

    active: bool
    color: Color
    pose: Pose
    animating: bool = False

    def __post_init__(self):
        object.__setattr__(self, "color", _as_color(self.color))
        if self.animating and not self.active:
            raise ValueError("an inactive instance cannot be animating")

    def to_dict(self) -> dict:
        return {
            "active": self.active,
            "animating": self.animating,
            "color": list(self.color),
            "pose": self.pose.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "InstanceState":
        return cls(
            active=data["active"],
            color=tuple(data["color"]),
            pose=Pose.from_dict(data["pose"]),
            animating=data["animating"],
        )


@dataclass(frozen=True)
class AnimationClip:
    """Successor trajectory relative to the anchor (predecessor) local frame."""

    target: CanonicalName
    anchor: CanonicalName
    instance_count: int
    start_pose: Pose
    end_pose: Pose
    duration: float
    looping: bool = True

    def __post_init__(self):
        object.__setattr__(self, "target", CanonicalName(self.target))
        object.__setattr__(self, "anchor", CanonicalName(self.anchor))
        _require_positive_int(self.instance_count, "instance_count")
        object.__setattr__(self, "duration", float(self.duration))
        if not self.duration > 0:
            raise ValueError(f"duration must be > 0, got {self.duration}")

    def to_dict(self) -> dict:
        return {
            "target": str(self.target),
            "anchor": str(self.anchor),
            "instance_count": self.instance_count,
            "start_pose": self.start_pose.to_dict(),
            "end_pose": self.end_pose.to_dict(),
            "duration": self.duration,
            "looping": self.looping,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "AnimationClip":
        return cls(
            target=CanonicalName(data["target"]),
            anchor=CanonicalName(data["anchor"]),
            instance_count=data["instance_count"],
            start_pose=Pose.from_dict(data["start_pose"]),
            end_pose=Pose.from_dict(data["end_pose"]),
            duration=data["duration"],
            looping=data["looping"],
        )


@dataclass(frozen=True)
class SceneState:
    """Full per-instance state map plus the (at most one) bound animation clip.

    Keys are (component name, instance index). The map is never mutated in
    place; engine operations build a fresh dict, so snapshots can share
    state objects safely.
    """

    states: dict[tuple[str, int], InstanceState]
    current_clip: AnimationClip | None = None
    step_cursor: int = 0

    def __post_init__(self):
        if self.step_cursor < 0:
            raise ValueError("step_cursor must be >= 0")

    def to_dict(self) -> dict:
        return {
            "step_cursor": self.step_cursor,
            "clip": self.current_clip.to_dict() if self.current_clip else None,
            "states": [
                {"component": name, "instance": idx, "state": st.to_dict()}
                for (name, idx), st in sorted(self.states.items())
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "SceneState":
        states = {
            (entry["component"], entry["instance"]): InstanceState.from_dict(entry["state"])
            for entry in data["states"]
        }
        clip = AnimationClip.from_dict(data["clip"]) if data.get("clip") else None
        return cls(states=states, current_clip=clip, step_cursor=data["step_cursor"])


@dataclass(frozen=True)
class AssemblyStep:
    """One line of procedural instruction text, 1-indexed."""

    index: int
    text: str

    def __post_init__(self):
        _require_positive_int(self.index, "step index")
        if not self.text.strip():
            raise ValueError(f"step {self.index} has empty text")

    def to_dict(self) -> dict:
        return {"index": self.index, "text": self.text}

    @classmethod
    def from_dict(cls, data: Mapping) -> "AssemblyStep":
        return cls(index=data["index"], text=data["text"])


@dataclass(frozen=True)
class TrainingSession:
    """Step list plus cursor and the scene history that Next/Previous walk.

    ``state_stack`` holds one snapshot per completed Next (the scene as it
    was just before that step was applied), so cursor always equals the
    stack depth and Previous is a pop.
    """

    steps: tuple[AssemblyStep, ...]
    cursor: int
    scene: SceneState
    state_stack: tuple[SceneState, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        object.__setattr__(self, "state_stack", tuple(self.state_stack))
        if not 0 <= self.cursor <= len(self.steps):
            raise ValueError(f"cursor {self.cursor} outside [0, {len(self.steps)}]")
        if self.cursor != len(self.state_stack):
            raise ValueError(
                f"cursor {self.cursor} must equal state stack depth {len(self.state_stack)}"
            )

    def to_dict(self) -> dict:
        return {
            "steps": [s.to_dict() for s in self.steps],
            "cursor": self.cursor,
            "scene": self.scene.to_dict(),
            "state_stack": [s.to_dict() for s in self.state_stack],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "TrainingSession":
        return cls(
            steps=tuple(AssemblyStep.from_dict(s) for s in data["steps"]),
            cursor=data["cursor"],
            scene=SceneState.from_dict(data["scene"]),
            state_stack=tuple(SceneState.from_dict(s) for s in data["state_stack"]),
        )


@dataclass(frozen=True)
class SftRecord:
    """One supervised fine-tuning example: instruction, input, output.

    ``output`` is expected to parse as a serialized triple; that check
    lives with the dataset reader/writer since it needs the parser.
    """

    instruction: str
    input: str
    output: str

    def __post_init__(self):
        for fld in ("instruction", "input", "output"):
            if not getattr(self, fld).strip():
                raise ValueError(f"SFT record field {fld!r} is empty")

    def to_dict(self) -> dict:
        return {"instruction": self.instruction, "input": self.input, "output": self.output}

    @classmethod
    def from_dict(cls, data: Mapping) -> "SftRecord":
        return cls(instruction=data["instruction"], input=data["input"], output=data["output"])
