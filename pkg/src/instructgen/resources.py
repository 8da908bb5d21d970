"""Paths to the bundled pneumatic-cylinder reference data."""

from __future__ import annotations

from importlib import resources
from pathlib import Path


def bundled(name: str) -> Path:
    """Absolute path of a file shipped in the package data directory."""
    path = Path(str(resources.files("instructgen").joinpath("data", name)))
    if not path.exists():
        raise FileNotFoundError(f"no bundled data file named {name!r}")
    return path


def pneumatic_manifest_path() -> Path:
    return bundled("pneumatic_manifest.json")


def pneumatic_steps_path() -> Path:
    return bundled("pneumatic_steps.txt")


def pneumatic_lexicon_path() -> Path:
    return bundled("pneumatic_lexicon.json")


def templates_path() -> Path:
    return bundled("templates.json")


def verbs_path() -> Path:
    return bundled("assembly_verbs.json")


def labeled_steps_path() -> Path:
    return bundled("labeled_steps.json")
