"""Canonical, byte-stable text encoding of a scene for golden-file diffing.

Fixed 9-decimal formatting, key-sorted state lines, LF line endings.
Structurally equal scenes always produce byte-equal snapshots, and any
single field change shows up in the diff.
"""

from __future__ import annotations

from .model import Pose, SceneState


def _fmt(value: float) -> str:
    return "%.9f" % (value + 0.0)  # +0.0 folds away negative zero


def _fmt_vec(values) -> str:
    return " ".join(_fmt(v) for v in values)


def _pose_fields(pose: Pose) -> str:
    return f"pos={_fmt_vec(pose.position)} quat={_fmt_vec(pose.orientation)}"


def canonical_snapshot(scene: SceneState) -> str:
    lines = [f"step_cursor {scene.step_cursor}"]
    clip = scene.current_clip
    if clip is None:
        lines.append("clip none")
    else:
        lines.append(
            f"clip anchor={clip.anchor} target={clip.target} count={clip.instance_count} "
            f"duration={_fmt(clip.duration)} looping={1 if clip.looping else 0}"
        )
        lines.append(f"clip_start {_pose_fields(clip.start_pose)}")
        lines.append(f"clip_end {_pose_fields(clip.end_pose)}")
    for (name, idx), st in sorted(scene.states.items()):
        lines.append(
            f"state {name} {idx} active={1 if st.active else 0} "
            f"animating={1 if st.animating else 0} "
            f"color={_fmt_vec(st.color)} {_pose_fields(st.pose)}"
        )
    return "\n".join(lines) + "\n"
