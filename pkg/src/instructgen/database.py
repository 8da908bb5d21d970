"""Component database: manifest loading, validation, lookup.

The manifest is a JSON document ``{"components": [...]}``; list order is
preserved and defines the engine's scan order. A portable file stands in
for a game-engine project of imported CAD models.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

from .errors import ManifestError
from .model import CanonicalName, ComponentRecord, Database, Pose, ShapeSpec, validate_database

_RECORD_KEYS = {"name", "kind", "shape", "color", "instances", "constituents", "mating_pose"}
_SHAPE_KEYS = {"type", "dimensions", "path"}
_POSE_KEYS = {"position", "orientation"}


def combined_name(a: str, b: str) -> CanonicalName:
    """The lookup key for the assembled form of two components."""
    return CanonicalName(f"{CanonicalName(a)}_{CanonicalName(b)}")


def lookup(db: Database, name: str) -> ComponentRecord | None:
    """First record with the given name, or None."""
    return db.get(name)


def _check_keys(obj: Mapping, allowed: set, where: str) -> None:
    extra = set(obj) - allowed
    if extra:
        raise ManifestError(f"{where}: unknown keys {sorted(extra)}")


def _pose_from(obj: Any, where: str) -> Pose:
    if not isinstance(obj, Mapping):
        raise ManifestError(f"{where}: pose must be an object")
    _check_keys(obj, _POSE_KEYS, where)
    try:
        return Pose(
            position=tuple(obj.get("position", (0.0, 0.0, 0.0))),
            orientation=tuple(obj.get("orientation", (1.0, 0.0, 0.0, 0.0))),
        )
    except (TypeError, ValueError) as exc:
        raise ManifestError(f"{where}: {exc}") from exc


def _record_from(obj: Any, where: str) -> ComponentRecord:
    if not isinstance(obj, Mapping):
        raise ManifestError(f"{where}: component entry must be an object")
    _check_keys(obj, _RECORD_KEYS, where)
    for key in ("name", "kind", "shape", "color", "instances"):
        if key not in obj:
            raise ManifestError(f"{where}: missing required field {key!r}")
    shape_obj = obj["shape"]
    if not isinstance(shape_obj, Mapping):
        raise ManifestError(f"{where}.shape: must be an object")
    _check_keys(shape_obj, _SHAPE_KEYS, f"{where}.shape")
    if not isinstance(obj["instances"], list):
        raise ManifestError(f"{where}.instances: must be an array")
    try:
        shape = ShapeSpec(
            type=shape_obj.get("type", ""),
            dimensions=tuple(shape_obj["dimensions"]) if "dimensions" in shape_obj else None,
            mesh_path=shape_obj.get("path"),
        )
        instances = tuple(
            _pose_from(p, f"{where}.instances[{i}]") for i, p in enumerate(obj["instances"])
        )
        mating = (
            _pose_from(obj["mating_pose"], f"{where}.mating_pose")
            if obj.get("mating_pose") is not None
            else None
        )
        return ComponentRecord(
            name=CanonicalName(obj["name"]),
            kind=obj["kind"],
            shape=shape,
            default_color=tuple(obj["color"]),
            instances=instances,
            constituents=tuple(CanonicalName(c) for c in obj.get("constituents", ())),
            mating_pose=mating,
        )
    except ManifestError:
        raise
    except (TypeError, ValueError) as exc:
        raise ManifestError(f"{where}: {exc}") from exc


def read_manifest(path: str | Path) -> Database:
    """Parse a manifest file against the schema, without database validation."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(data, dict) or "components" not in data:
        raise ManifestError(f'{path}: top level must be an object with a "components" array')
    if not isinstance(data["components"], list):
        raise ManifestError(f'{path}: "components" must be an array')
    records = tuple(
        _record_from(entry, f"components[{i}]") for i, entry in enumerate(data["components"])
    )
    return Database(components=records)


def load_manifest(path: str | Path) -> Database:
    """Load and fully validate a manifest; every violation is reported at once."""
    db = read_manifest(path)
    violations = validate_database(db)
    if violations:
        lines = "; ".join(f"{v.record}: {v.rule} ({v.detail})" for v in violations)
        raise ManifestError(f"{path}: invalid database: {lines}", violations=violations)
    return db


def save_manifest(db: Database, path: str | Path) -> None:
    """Write a database back out in the manifest schema (load/save round-trips)."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(db.to_dict(), fh, indent=2, ensure_ascii=False)
        fh.write("\n")
