"""Exception hierarchy shared across the pipeline.

Extraction failures carry the raw model output (when there is one) in
``raw`` so callers can log what the remote endpoint actually said before
the parse or name resolution blew up.
"""

from __future__ import annotations


class PipelineError(Exception):
    """Base class for every error this package raises deliberately."""


class ExtractionError(PipelineError):
    """A step text (or raw model output) could not be turned into a triple."""

    def __init__(self, message: str, *, raw: str | None = None):
        super().__init__(message)
        self.raw = raw
        self.step_index: int | None = None


class NoComponentsFound(ExtractionError):
    """The text mentions nothing from the lexicon."""


class SingleComponent(ExtractionError):
    """Only one component was mentioned, so there is no predecessor."""


class AmbiguousRoles(ExtractionError):
    """Component mentions exist but no verb pattern resolves who is added to what."""


class WrongArity(ExtractionError):
    """Raw output did not split into exactly three comma-separated fields."""


class BadCount(ExtractionError):
    """The count field is not a positive decimal integer."""


class BadName(ExtractionError):
    """A name field is empty after trimming."""


class UnknownComponent(ExtractionError):
    """A name resolves to nothing in the lexicon or component database."""

    def __init__(self, *names: str, raw: str | None = None):
        self.names = tuple(names)
        pretty = ", ".join(repr(n) for n in names)
        super().__init__(f"unknown component {pretty}", raw=raw)


class TransportError(ExtractionError):
    """The remote extractor endpoint could not be reached or answered badly."""


class ExtractorTimeout(ExtractionError):
    """The remote extractor did not answer within the configured timeout."""


class EngineError(PipelineError):
    """Instruction or session state machine failure."""


class InsufficientInstances(EngineError):
    """The triple asks for more successor instances than the database holds."""


class EndOfSteps(EngineError):
    """Next was requested but every step has already been consumed."""


class AtBeginning(EngineError):
    """Previous was requested on a session that has not advanced."""


class ManifestError(PipelineError):
    """A component manifest failed schema parsing or database validation."""

    def __init__(self, message: str, *, violations: list | None = None):
        super().__init__(message)
        self.violations = violations or []


class DatasetError(PipelineError):
    """A fine-tuning dataset file is malformed."""


class QueueFull(PipelineError):
    """Too many mutations are already waiting on the gateway."""
