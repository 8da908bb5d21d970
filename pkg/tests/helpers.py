"""Shared test utilities: random scene/database cases and slot bookkeeping.

The slot map here is computed independently of the engine's own
bookkeeping on purpose: invariant checks should not share code with the
implementation they judge.
"""

from __future__ import annotations

import math
import random
import string

from instructgen.model import (
    CanonicalName,
    ComponentRecord,
    Database,
    ExtractionResult,
    Pose,
    ShapeSpec,
)

GREEN = (0.0, 1.0, 0.0, 1.0)

BOX = ShapeSpec(type="box", dimensions=(0.1, 0.1, 0.1))


def random_unit_quat(rng: random.Random) -> tuple[float, float, float, float]:
    while True:
        q = [rng.gauss(0.0, 1.0) for _ in range(4)]
        norm = math.sqrt(sum(v * v for v in q))
        if norm > 1e-6:
            return tuple(v / norm for v in q)


def random_pose(rng: random.Random) -> Pose:
    return Pose(
        position=tuple(rng.uniform(-1.0, 1.0) for _ in range(3)),
        orientation=random_unit_quat(rng),
    )


def random_color(rng: random.Random) -> tuple[float, float, float, float]:
    color = tuple(round(rng.uniform(0.0, 1.0), 3) for _ in range(4))
    return color if color != GREEN else (0.5, 1.0, 0.0, 1.0)


def _fresh_token(rng: random.Random, taken: set[str]) -> str:
    while True:
        name = "".join(rng.choice(string.ascii_lowercase) for _ in range(rng.randint(2, 8)))
        if name not in taken:
            taken.add(name)
            return name


def atomic_record(rng: random.Random, name: str, n_instances: int | None = None) -> ComponentRecord:
    count = n_instances if n_instances is not None else rng.randint(1, 4)
    return ComponentRecord(
        name=CanonicalName(name),
        kind="atomic",
        shape=BOX,
        default_color=random_color(rng),
        instances=tuple(random_pose(rng) for _ in range(count)),
    )


def assembled_record(rng: random.Random, first: str, second: str) -> ComponentRecord:
    return ComponentRecord(
        name=CanonicalName(f"{first}_{second}"),
        kind="assembled",
        shape=BOX,
        default_color=random_color(rng),
        instances=(random_pose(rng),),
        constituents=(CanonicalName(first), CanonicalName(second)),
        mating_pose=random_pose(rng),
    )


class RandomCase:
    """One randomized (database, triple) scenario plus what to expect of it."""

    def __init__(self, rng: random.Random):
        taken: set[str] = set()
        names = [_fresh_token(rng, taken) for _ in range(rng.randint(2, 6))]
        records = [atomic_record(rng, n) for n in names]

        self.predecessor, self.successor = rng.sample(names, 2)
        self.combined = f"{self.predecessor}_{self.successor}"
        self.has_combined = rng.random() < 0.7
        self.duplicate_combined = self.has_combined and rng.random() < 0.25

        if self.has_combined:
            first = assembled_record(rng, self.predecessor, self.successor)
            pos = rng.randrange(len(records) + 1)
            records.insert(pos, first)
            if self.duplicate_combined:
                second = assembled_record(rng, self.predecessor, self.successor)
                records.insert(rng.randrange(pos + 1, len(records) + 1), second)

        if rng.random() < 0.3 and len(names) >= 3:
            others = [n for n in names if n not in (self.predecessor, self.successor)]
            a = rng.choice(others)
            b = rng.choice([n for n in names if n != a])
            if f"{a}_{b}" != self.combined:
                records.insert(rng.randrange(len(records) + 1), assembled_record(rng, a, b))

        self.db = Database(components=tuple(records))
        succ_instances = len(self.db.get(self.successor).instances)
        self.triple = ExtractionResult(
            CanonicalName(self.predecessor),
            CanonicalName(self.successor),
            rng.randint(1, succ_instances),
        )


def slot_records(db: Database) -> dict[tuple[str, int], ComponentRecord]:
    """(name, instance index) -> owning record, allowing duplicate names."""
    offsets: dict[str, int] = {}
    out: dict[tuple[str, int], ComponentRecord] = {}
    for rec in db.components:
        base = offsets.get(str(rec.name), 0)
        for i in range(len(rec.instances)):
            out[(str(rec.name), base + i)] = rec
        offsets[str(rec.name)] = base + len(rec.instances)
    return out


def highlighted_records(scene, slots) -> set[str]:
    """Names of records owning any instance whose color differs from its default."""
    out = set()
    for key, st in scene.states.items():
        if st.color != slots[key].default_color:
            out.add(key[0])
    return out
