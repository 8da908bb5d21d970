#!/usr/bin/env python3
"""Walk the bundled pneumatic session step by step, printing what changes.

Shows the triple extracted for each step, which records turn green, and
the bound animation clip, without starting a server.
"""

from instructgen.database import load_manifest
from instructgen.engine import HIGHLIGHT_COLOR, load_steps, new_session, next_step
from instructgen.extraction import ExtractorConfig, Lexicon, build_extractor
from instructgen.resources import (
    pneumatic_lexicon_path,
    pneumatic_manifest_path,
    pneumatic_steps_path,
)


def main() -> None:
    db = load_manifest(pneumatic_manifest_path())
    steps = load_steps(pneumatic_steps_path())
    lexicon = Lexicon.from_file(pneumatic_lexicon_path())
    extractor = build_extractor(ExtractorConfig(mode="rule"), lexicon)

    session = new_session(db, steps)
    for step in steps:
        session = next_step(session, extractor, db)
        scene = session.scene
        green = sorted({k[0] for k, st in scene.states.items() if st.color == HIGHLIGHT_COLOR})
        clip = scene.current_clip
        print(f"step {step.index}: {step.text}")
        print(f"  highlighted: {', '.join(green)}")
        if clip:
            print(
                f"  animation: {clip.target} -> {clip.anchor} frame, "
                f"{clip.instance_count} instance(s), {clip.duration}s loop"
            )
        print()


if __name__ == "__main__":
    main()
