"""Instruction generation and the Next/Previous session state machine.

``generate_instruction`` applies one extraction triple to a scene:

1. clear the previous instruction (colors back to defaults, clip and
   animating flags dropped, activation untouched);
2. scan records in manifest order and activate + highlight every record
   named like the predecessor or the successor;
3. scan again and, at the FIRST record named ``<predecessor>_<successor>``,
   activate + highlight it and bind the approach animation, then stop
   scanning. If no combined record exists the highlights stand alone.

Sessions advance lazily: each Next extracts the triple for the current
step, commits the previous step's assembly (the combined record stays,
its constituents' standalone instances disappear), then generates the new
instruction. Previous restores the exact snapshot taken before the
matching Next.
"""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path
from typing import Callable

from .animation import DEFAULT_PARAMS, AnimationParams, make_animation
from .database import combined_name
from .errors import (
    AtBeginning,
    EndOfSteps,
    ExtractionError,
    InsufficientInstances,
    UnknownComponent,
)
from .model import (
    AssemblyStep,
    Database,
    ExtractionResult,
    InstanceState,
    SceneState,
    TrainingSession,
)

HIGHLIGHT_COLOR = (0.0, 1.0, 0.0, 1.0)

Extractor = Callable[[str], ExtractionResult]


def _record_slots(db: Database) -> list[tuple[str, int]]:
    """Per record position: (name, base instance index).

    Records sharing a name (an invalid but representable manifest) get
    consecutive index ranges so each keeps distinct scene keys and the
    engine can still activate only the earliest one.
    """
    offsets: dict[str, int] = {}
    slots: list[tuple[str, int]] = []
    for rec in db.components:
        name = str(rec.name)
        base = offsets.get(name, 0)
        slots.append((name, base))
        offsets[name] = base + len(rec.instances)
    return slots


def initial_scene(db: Database) -> SceneState:
    """Atomic parts laid out at their manifest poses; assemblies hidden."""
    states: dict[tuple[str, int], InstanceState] = {}
    for rec, (name, base) in zip(db.components, _record_slots(db)):
        for i, pose in enumerate(rec.instances):
            states[(name, base + i)] = InstanceState(
                active=rec.kind == "atomic", color=rec.default_color, pose=pose
            )
    return SceneState(states=states, current_clip=None, step_cursor=0)


def _slot_defaults(db: Database) -> dict[tuple[str, int], tuple[float, float, float, float]]:
    defaults = {}
    for rec, (name, base) in zip(db.components, _record_slots(db)):
        for i in range(len(rec.instances)):
            defaults[(name, base + i)] = rec.default_color
    return defaults


def clear_instruction(db: Database, scene: SceneState) -> SceneState:
    """Drop the previous instruction: default colors, no clip, nothing animating.

    Activation is preserved so completed assemblies stay visible.
    """
    defaults = _slot_defaults(db)
    states: dict[tuple[str, int], InstanceState] = {}
    for key, st in scene.states.items():
        states[key] = InstanceState(
            active=st.active, color=defaults.get(key, st.color), pose=st.pose, animating=False
        )
    return SceneState(states=states, current_clip=None, step_cursor=scene.step_cursor)


def generate_instruction(
    db: Database,
    scene: SceneState,
    result: ExtractionResult,
    params: AnimationParams = DEFAULT_PARAMS,
) -> SceneState:
    """Apply one triple to the scene and return the new scene."""
    pred, succ = result.predecessor, result.successor
    if pred not in db.index and succ not in db.index:
        raise UnknownComponent(pred, succ)
    succ_record = db.get(succ)
    if succ_record is not None and result.count > len(succ_record.instances):
        raise InsufficientInstances(
            f"step needs {result.count} instances of {succ!r}, database has "
            f"{len(succ_record.instances)}"
        )

    cleared = clear_instruction(db, scene)
    states = dict(cleared.states)
    slots = _record_slots(db)

    def _highlight(rec_pos: int) -> None:
        rec = db.components[rec_pos]
        name, base = slots[rec_pos]
        for i in range(len(rec.instances)):
            st = states[(name, base + i)]
            states[(name, base + i)] = replace(st, active=True, color=HIGHLIGHT_COLOR)

    for pos, rec in enumerate(db.components):
        if rec.name in (pred, succ):
            _highlight(pos)

    clip = None
    key = combined_name(pred, succ)
    for pos, rec in enumerate(db.components):
        if rec.name == key:
            _highlight(pos)
            clip = make_animation(db, pred, succ, params, instance_count=result.count)
            break

    if clip is not None and succ_record is not None:
        for i in range(min(result.count, len(succ_record.instances))):
            st = states[(str(succ), i)]
            states[(str(succ), i)] = replace(st, animating=True)

    return SceneState(states=states, current_clip=clip, step_cursor=scene.step_cursor)


def _commit_assembly(db: Database, scene: SceneState) -> SceneState:
    """Fold the bound instruction's assembly into the persistent scene.

    The combined record stays active at its rest pose; the standalone
    instances of its two constituents are deactivated so the scene shows
    one copy of every physical part.
    """
    clip = scene.current_clip
    if clip is None:
        return scene
    constituents = {str(clip.anchor), str(clip.target)}
    states = {
        key: (replace(st, active=False, animating=False) if key[0] in constituents and st.active else st)
        for key, st in scene.states.items()
    }
    return SceneState(states=states, current_clip=clip, step_cursor=scene.step_cursor)


def new_session(db: Database, steps: list[AssemblyStep]) -> TrainingSession:
    return TrainingSession(
        steps=tuple(steps), cursor=0, scene=initial_scene(db), state_stack=()
    )


def next_step(
    session: TrainingSession,
    extractor: Extractor,
    db: Database,
    params: AnimationParams = DEFAULT_PARAMS,
) -> TrainingSession:
    """Consume the step under the cursor and return the advanced session.

    The pre-step scene is pushed for Previous; extraction errors carry the
    1-based step index and leave the session untouched.
    """
    if session.cursor >= len(session.steps):
        raise EndOfSteps(f"all {len(session.steps)} steps already completed")
    step = session.steps[session.cursor]
    try:
        result = extractor(step.text)
    except ExtractionError as exc:
        exc.step_index = step.index
        raise
    committed = _commit_assembly(db, session.scene)
    scene = generate_instruction(db, committed, result, params)
    scene = replace(scene, step_cursor=session.cursor + 1)
    return TrainingSession(
        steps=session.steps,
        cursor=session.cursor + 1,
        scene=scene,
        state_stack=session.state_stack + (session.scene,),
    )


def previous_step(session: TrainingSession) -> TrainingSession:
    """Undo the most recent Next by restoring its snapshot."""
    if session.cursor == 0:
        raise AtBeginning("session is already at the first step")
    return TrainingSession(
        steps=session.steps,
        cursor=session.cursor - 1,
        scene=session.state_stack[-1],
        state_stack=session.state_stack[:-1],
    )


def load_steps(path: str | Path) -> list[AssemblyStep]:
    """Read a step script: plain UTF-8 text, one step per line, blanks skipped."""
    steps: list[AssemblyStep] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            text = line.strip()
            if text:
                steps.append(AssemblyStep(index=len(steps) + 1, text=text))
    return steps
