"""Fine-tuning dataset tooling: templated corpus generation, emit, validate.

The corpus generator substitutes deterministic templating for a chat
model: every record's input is a filled role-labeled template and its
output is the serialized ground-truth triple, so the rule extractor can
be held to 100% exact match against it.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path

from .errors import DatasetError, ExtractionError
from .extraction import DEFAULT_INSTRUCTION, Lexicon, parse_llm_output
from .model import CanonicalName, SftRecord

_SFT_KEYS = {"instruction", "input", "output"}

_COUNT_WORDS = {2: "two", 3: "three", 4: "four", 5: "five", 6: "six"}


@dataclass(frozen=True)
class Template:
    """One sentence pattern with {predecessor}, {successor} and optional {count} slots."""

    text: str

    def __post_init__(self):
        if "{predecessor}" not in self.text or "{successor}" not in self.text:
            raise ValueError(f"template must use both role slots: {self.text!r}")

    @property
    def uses_count(self) -> bool:
        return "{count}" in self.text

    def fill(self, predecessor: str, successor: str, count_text: str) -> str:
        return self.text.format(predecessor=predecessor, successor=successor, count=count_text)


def load_templates(path: str | Path) -> list[Template]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, list) or not data:
        raise ValueError(f"template file {path} must hold a non-empty JSON array")
    return [Template(entry["text"]) for entry in data]


def _surface_forms(lexicon: Lexicon) -> dict[CanonicalName, tuple[str, str]]:
    """(singular, plural) surface per canonical name, derived from the lexicon."""
    grouped: dict[CanonicalName, list[str]] = {}
    for surface, name in sorted(lexicon.entries.items()):
        grouped.setdefault(name, []).append(surface)
    forms: dict[CanonicalName, tuple[str, str]] = {}
    for name, surfaces in grouped.items():
        singular = min(surfaces, key=len)
        plural = singular
        for candidate in (singular + "s", singular + "es"):
            if candidate in surfaces:
                plural = candidate
                break
        forms[name] = (singular, plural)
    return forms


def generate_sft_corpus(
    lexicon: Lexicon,
    templates: list[Template],
    n: int,
    seed: int = 0,
    instruction: str = DEFAULT_INSTRUCTION,
) -> list[SftRecord]:
    """Produce ``n`` records whose outputs are ground truth by construction.

    Deterministic for a given seed. Counts above one are only emitted for
    templates with a {count} slot, rendered either as a digit or a number
    word, with the successor pluralized.
    """
    if n <= 0:
        raise ValueError(f"corpus size must be positive, got {n}")
    if not templates:
        raise ValueError("no templates to fill")
    rng = random.Random(seed)
    names = sorted(lexicon.canonical_names)
    if len(names) < 2:
        raise ValueError("lexicon must name at least two components")
    forms = _surface_forms(lexicon)

    records: list[SftRecord] = []
    for _ in range(n):
        template = rng.choice(templates)
        predecessor, successor = rng.sample(names, 2)
        pred_surface = forms[predecessor][0]
        if template.uses_count:
            count = rng.randint(2, max(_COUNT_WORDS))
            count_text = rng.choice((str(count), _COUNT_WORDS[count]))
            succ_surface = forms[successor][1]
        else:
            count = 1
            count_text = ""
            succ_surface = forms[successor][0]
        records.append(
            SftRecord(
                instruction=instruction,
                input=template.fill(pred_surface, succ_surface, count_text),
                output=f"{pred_surface}, {succ_surface}, {count}",
            )
        )
    return records


def emit_sft_dataset(records: list[SftRecord], path: str | Path) -> None:
    """Write records as a JSON array of {instruction, input, output} objects."""
    payload = [record.to_dict() for record in records]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, ensure_ascii=False)
        fh.write("\n")


def load_sft_dataset(path: str | Path) -> list[SftRecord]:
    """Read a dataset back, checking structure and that every output parses."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise DatasetError(f"{path}: top level must be a JSON array")
    records: list[SftRecord] = []
    for i, entry in enumerate(data):
        if not isinstance(entry, dict) or set(entry) != _SFT_KEYS:
            raise DatasetError(f"{path}: record {i} must have exactly keys {sorted(_SFT_KEYS)}")
        try:
            record = SftRecord.from_dict(entry)
            parse_llm_output(record.output)
        except (ValueError, ExtractionError) as exc:
            raise DatasetError(f"{path}: record {i}: {exc}") from exc
        records.append(record)
    return records
