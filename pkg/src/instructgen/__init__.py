"""Text-to-virtual-instruction pipeline for assembly training.

Extracts (predecessor, successor, count) triples from procedural step
text, looks components up in a manifest-backed database, and turns each
triple into a scene instruction: green-highlighted parts plus a looping
approach animation, served to clients over an HTTP gateway.
"""

from .animation import AnimationParams, make_animation, sample_animation
from .database import combined_name, load_manifest, lookup, read_manifest, save_manifest
from .engine import (
    HIGHLIGHT_COLOR,
    clear_instruction,
    generate_instruction,
    initial_scene,
    load_steps,
    new_session,
    next_step,
    previous_step,
)
from .extraction import (
    DEFAULT_INSTRUCTION,
    DEFAULT_VERBS,
    ExtractorConfig,
    Lexicon,
    RawTriple,
    build_extractor,
    normalize_surface,
    parse_llm_output,
    remote_extract,
    resolve_names,
    rule_extract,
    rule_extract_raw,
    serialize_extraction,
)
from .model import (
    AnimationClip,
    AssemblyStep,
    CanonicalName,
    ComponentRecord,
    Database,
    ExtractionResult,
    InstanceState,
    Pose,
    SceneState,
    SftRecord,
    ShapeSpec,
    TrainingSession,
    Violation,
    validate_database,
)
from .sft import emit_sft_dataset, generate_sft_corpus, load_sft_dataset, load_templates
from .snapshot import canonical_snapshot

__version__ = "0.1.0"
