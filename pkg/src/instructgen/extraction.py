"""Turning procedural step text into (predecessor, successor, count) triples.

Two producers share one output contract:

* ``rule_extract`` — a deterministic lexicon-and-verb-pattern extractor.
  It is the offline reference: the component mention that is the direct
  object of the first assembly verb is the successor (the part being
  added); the other mentioned component is the predecessor (the part it
  goes onto). A cardinal numeral immediately before the successor mention
  sets the count, defaulting to 1 — numerals attached to anything else
  are ignored.
* ``remote_extract`` — posts the step text to a text-generation endpoint
  and parses its raw comma-separated reply.

Raw replies keep whatever surface forms the model produced; resolving
them to database names happens in ``resolve_names`` so unknown names fail
only after the raw output could be logged.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, Mapping, Sequence

import httpx

from .errors import (
    AmbiguousRoles,
    BadCount,
    BadName,
    ExtractionError,
    ExtractorTimeout,
    NoComponentsFound,
    SingleComponent,
    TransportError,
    UnknownComponent,
    WrongArity,
)
from .model import CanonicalName, ExtractionResult

DEFAULT_INSTRUCTION = "List all the components mentioned in the procedural step."


def load_verbs(path: str | Path) -> tuple[str, ...]:
    """Read an assembly-verb list from a JSON array file."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, list) or not all(isinstance(v, str) and v for v in data):
        raise ValueError(f"verb file {path} must hold a JSON array of words")
    return tuple(data)


def _bundled_verbs() -> tuple[str, ...]:
    from .resources import verbs_path

    return load_verbs(verbs_path())


# The verb list is configuration, not code: new domains swap the file.
DEFAULT_VERBS = _bundled_verbs()

# Prepositions that mark the predecessor when three or more components
# are mentioned ("fasten the X onto the Y ...").
_PREDECESSOR_MARKERS = frozenset(
    {"onto", "into", "to", "on", "in", "with", "against", "over", "under", "inside", "beneath"}
)
_MARKER_WINDOW = 4  # max tokens between marker and the mention it marks

_WS_RE = re.compile(r"\s+")
_TOKEN_RE = re.compile(r"[a-z0-9]+")

NUMBER_WORDS = {
    "one": 1,
    "two": 2,
    "three": 3,
    "four": 4,
    "five": 5,
    "six": 6,
    "seven": 7,
    "eight": 8,
    "nine": 9,
    "ten": 10,
}


def normalize_surface(text: str) -> str:
    """Lowercase, trim, and collapse internal whitespace to single spaces."""
    return _WS_RE.sub(" ", text.strip()).lower()


@dataclass(frozen=True)
class Lexicon:
    """Surface form (lowercased, possibly multi-word) -> canonical component name.

    Stands in for the fine-tuned model's learned vocabulary: every way a
    component may be written in step text, mapped onto the single name the
    database uses.
    """

    entries: dict[str, CanonicalName]

    def __post_init__(self):
        normalized: dict[str, CanonicalName] = {}
        for surface, name in self.entries.items():
            key = normalize_surface(surface)
            if not key:
                raise ValueError("lexicon surface form is empty")
            canon = CanonicalName(name)
            if key in normalized and normalized[key] != canon:
                raise ValueError(f"surface form {key!r} maps to both {normalized[key]!r} and {canon!r}")
            normalized[key] = canon
        object.__setattr__(self, "entries", normalized)

    @cached_property
    def canonical_names(self) -> frozenset[CanonicalName]:
        return frozenset(self.entries.values())

    def surfaces_for(self, name: str) -> list[str]:
        return sorted(s for s, n in self.entries.items() if n == name)

    def to_dict(self) -> dict:
        return {surface: str(name) for surface, name in sorted(self.entries.items())}

    @classmethod
    def from_dict(cls, data: Mapping[str, str]) -> "Lexicon":
        return cls(entries={k: CanonicalName(v) for k, v in data.items()})

    @classmethod
    def from_file(cls, path: str | Path) -> "Lexicon":
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError(f"lexicon file {path} must hold a JSON object")
        return cls.from_dict(data)


@dataclass(frozen=True)
class RawTriple:
    """An unresolved triple: name fields are whatever the producer emitted."""

    predecessor: str
    successor: str
    count: int

    def __post_init__(self):
        if not self.predecessor or not self.successor:
            raise ValueError("raw triple has an empty name field")
        if self.count < 1:
            raise ValueError(f"raw triple count must be >= 1, got {self.count}")


@dataclass(frozen=True)
class ExtractorConfig:
    """How triples are produced: locally by rule, or by a remote endpoint."""

    mode: str = "rule"
    endpoint: str | None = None
    timeout: float = 10.0
    instruction: str = DEFAULT_INSTRUCTION

    def __post_init__(self):
        if self.mode not in ("rule", "remote"):
            raise ValueError(f"unknown extractor mode {self.mode!r}")
        if self.mode == "remote" and not self.endpoint:
            raise ValueError("remote extractor needs an endpoint URL")

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "endpoint": self.endpoint,
            "timeout": self.timeout,
            "instruction": self.instruction,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "ExtractorConfig":
        return cls(**data)


@dataclass(frozen=True)
class _Mention:
    start: int  # token index of first token
    end: int  # token index one past the last token
    surface: str  # the lexicon key that matched
    name: CanonicalName


def _scan_mentions(tokens: Sequence[str], lexicon: Lexicon) -> list[_Mention]:
    """Longest-match left-to-right scan of the token stream against the lexicon."""
    if not lexicon.entries:
        raise ValueError("lexicon is empty")
    max_len = max(len(s.split(" ")) for s in lexicon.entries)
    mentions: list[_Mention] = []
    i = 0
    while i < len(tokens):
        matched = None
        for k in range(min(max_len, len(tokens) - i), 0, -1):
            candidate = " ".join(tokens[i : i + k])
            if candidate in lexicon.entries:
                matched = _Mention(i, i + k, candidate, lexicon.entries[candidate])
                break
        if matched:
            mentions.append(matched)
            i = matched.end
        else:
            i += 1
    return mentions


def _verb_forms(verb: str) -> set[str]:
    forms = {verb, verb + "s", verb + "es", verb + "ed", verb + "d", verb + "ing"}
    if verb.endswith("e"):
        forms.add(verb[:-1] + "ing")
    # doubled final consonant ("put" -> "putting")
    forms.add(verb + verb[-1] + "ing")
    forms.add(verb + verb[-1] + "ed")
    return forms


def _first_verb_index(tokens: Sequence[str], mentions: Sequence[_Mention], verbs: Sequence[str]) -> int | None:
    covered = set()
    for m in mentions:
        covered.update(range(m.start, m.end))
    forms: set[str] = set()
    for v in verbs:
        forms |= _verb_forms(v)
    for i, tok in enumerate(tokens):
        if i in covered:
            continue
        if tok in forms:
            return i
    return None


def _count_before(tokens: Sequence[str], mention: _Mention) -> int:
    """Cardinal numeral directly preceding the mention, else 1."""
    j = mention.start - 1
    if j < 0:
        return 1
    tok = tokens[j]
    if tok in NUMBER_WORDS:
        return NUMBER_WORDS[tok]
    if tok.isdigit() and int(tok) >= 1:
        return int(tok)
    return 1


def _marked_predecessor(
    tokens: Sequence[str], mentions: Sequence[_Mention], successor: _Mention
) -> _Mention | None:
    """First mention of a different component that follows a marker preposition."""
    for i in range(successor.end, len(tokens)):
        if tokens[i] not in _PREDECESSOR_MARKERS:
            continue
        for m in mentions:
            if m.start > i and m.start - i <= _MARKER_WINDOW and m.name != successor.name:
                return m
        # marker without a usable mention nearby; keep scanning
    return None


def _resolve_roles(
    text: str, lexicon: Lexicon, verbs: Sequence[str] | None = None
) -> tuple[_Mention, _Mention, int]:
    """Shared mention/role analysis behind the rule extractor.

    Returns (predecessor mention, successor mention, count).
    """
    verbs = tuple(verbs) if verbs is not None else DEFAULT_VERBS
    tokens = _TOKEN_RE.findall(normalize_surface(text))
    mentions = _scan_mentions(tokens, lexicon)
    if not mentions:
        raise NoComponentsFound(f"no lexicon component mentioned in {text!r}")

    distinct: list[CanonicalName] = []
    for m in mentions:
        if m.name not in distinct:
            distinct.append(m.name)
    if len(distinct) == 1:
        raise SingleComponent(f"only {distinct[0]!r} is mentioned; no predecessor to pair it with")

    verb_idx = _first_verb_index(tokens, mentions, verbs)
    successor = None
    if verb_idx is not None:
        successor = next((m for m in mentions if m.start > verb_idx), None)
    if successor is None:
        raise AmbiguousRoles(f"no assembly verb resolves the successor in {text!r}")

    others = [name for name in distinct if name != successor.name]
    if len(others) == 1:
        predecessor = next(m for m in mentions if m.name == others[0])
    else:
        predecessor = _marked_predecessor(tokens, mentions, successor)
        if predecessor is None:
            raise AmbiguousRoles(
                f"{len(distinct)} components mentioned and no pattern resolves roles in {text!r}"
            )

    return predecessor, successor, _count_before(tokens, successor)


def rule_extract_raw(text: str, lexicon: Lexicon, verbs: Sequence[str] | None = None) -> RawTriple:
    """Rule-based extraction keeping the surface forms found in the text.

    This mirrors what the remote model is trained to emit (mentions as
    written, e.g. "small screws"), before any lexicon resolution.
    """
    predecessor, successor, count = _resolve_roles(text, lexicon, verbs)
    return RawTriple(predecessor.surface, successor.surface, count)


def rule_extract(text: str, lexicon: Lexicon, verbs: Sequence[str] | None = None) -> ExtractionResult:
    """Rule-based extraction resolved to canonical database names."""
    predecessor, successor, count = _resolve_roles(text, lexicon, verbs)
    return ExtractionResult(predecessor.name, successor.name, count)


def parse_llm_output(raw: str) -> RawTriple:
    """Split raw model output into a triple: "pred, succ, count".

    Name fields are normalized and space-joined tokens become underscores;
    nothing is checked against a lexicon here (see ``resolve_names``).
    """
    parts = raw.split(",")
    if len(parts) != 3:
        raise WrongArity(f"expected 3 comma-separated fields, got {len(parts)}", raw=raw)
    pred_s, succ_s, count_s = (p.strip() for p in parts)
    if not pred_s or not succ_s:
        raise BadName("empty name field", raw=raw)
    try:
        count = int(count_s)
    except ValueError:
        raise BadCount(f"count field {count_s!r} is not an integer", raw=raw) from None
    if count < 1:
        raise BadCount(f"count must be >= 1, got {count}", raw=raw)
    return RawTriple(
        normalize_surface(pred_s).replace(" ", "_"),
        normalize_surface(succ_s).replace(" ", "_"),
        count,
    )


def resolve_names(triple: RawTriple | ExtractionResult, lexicon: Lexicon) -> ExtractionResult:
    """Map a raw triple's surface forms onto canonical database names.

    Underscores are treated as spaces for lookup, so both "small screws"
    and "small_screws" resolve. Names already canonical pass through.
    """

    def _resolve(name: str) -> CanonicalName:
        surface = normalize_surface(str(name).replace("_", " "))
        found = lexicon.entries.get(surface)
        if found is not None:
            return found
        if name in lexicon.canonical_names:
            return CanonicalName(name)
        raise UnknownComponent(str(name))

    return ExtractionResult(
        predecessor=_resolve(triple.predecessor),
        successor=_resolve(triple.successor),
        count=triple.count,
    )


def serialize_extraction(result: ExtractionResult | RawTriple) -> str:
    """Render a triple in the wire form "pred, succ, count"."""
    return f"{result.predecessor}, {result.successor}, {result.count}"


def remote_extract(config: ExtractorConfig, step_text: str, lexicon: Lexicon) -> ExtractionResult:
    """Send step text to the configured endpoint and resolve its reply.

    The request body is ``{"instruction": ..., "input": <step text>}`` and
    the response body is read as raw triple text. Parse or resolution
    failures are re-raised with the raw reply attached.
    """
    if config.mode != "remote":
        raise ValueError("remote_extract needs an ExtractorConfig with mode='remote'")
    try:
        response = httpx.post(
            config.endpoint,
            json={"instruction": config.instruction, "input": step_text},
            timeout=config.timeout,
        )
    except httpx.TimeoutException as exc:
        raise ExtractorTimeout(f"extractor endpoint timed out: {exc}") from exc
    except httpx.HTTPError as exc:
        raise TransportError(f"extractor endpoint unreachable: {exc}") from exc
    raw = response.text
    if response.status_code != 200:
        raise TransportError(f"extractor endpoint returned HTTP {response.status_code}", raw=raw)
    try:
        return resolve_names(parse_llm_output(raw), lexicon)
    except ExtractionError as exc:
        exc.raw = raw
        raise


def build_extractor(
    config: ExtractorConfig, lexicon: Lexicon, verbs: Sequence[str] | None = None
) -> Callable[[str], ExtractionResult]:
    """Bind a config to a plain ``text -> ExtractionResult`` callable."""
    if config.mode == "rule":
        return lambda text: rule_extract(text, lexicon, verbs)
    return lambda text: remote_extract(config, text, lexicon)
