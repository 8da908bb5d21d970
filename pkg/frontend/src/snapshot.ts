/** Canonical scene encoding, byte-identical to the server's golden format.
 *
 * Fixed 9-decimal fields, key-sorted state lines, LF endings, trailing
 * newline. Convergence checks compare this text against the server's
 * GET /scene/snapshot, so every formatting detail matters. (toFixed and
 * the server's formatter can only disagree on exact decimal ties, which
 * scene data made of non-dyadic literals never produces.)
 */

import type { ClipDto, PoseDto, SceneDto } from "./types.js";

function fmt(value: number): string {
  return (Object.is(value, -0) ? 0 : value).toFixed(9);
}

function fmtVec(values: readonly number[]): string {
  return values.map(fmt).join(" ");
}

function poseFields(pose: PoseDto): string {
  return `pos=${fmtVec(pose.position)} quat=${fmtVec(pose.orientation)}`;
}

function clipLines(clip: ClipDto | null): string[] {
  if (clip === null) return ["clip none"];
  return [
    `clip anchor=${clip.anchor} target=${clip.target} count=${clip.instance_count} ` +
      `duration=${fmt(clip.duration)} looping=${clip.looping ? 1 : 0}`,
    `clip_start ${poseFields(clip.start_pose)}`,
    `clip_end ${poseFields(clip.end_pose)}`,
  ];
}

export function encodeSnapshot(scene: SceneDto): string {
  const lines = [`step_cursor ${scene.step_cursor}`, ...clipLines(scene.clip)];
  const entries = [...scene.states].sort((a, b) =>
    a.component < b.component
      ? -1
      : a.component > b.component
        ? 1
        : a.instance - b.instance,
  );
  for (const entry of entries) {
    const st = entry.state;
    lines.push(
      `state ${entry.component} ${entry.instance} active=${st.active ? 1 : 0} ` +
        `animating=${st.animating ? 1 : 0} color=${fmtVec(st.color)} ${poseFields(st.pose)}`,
    );
  }
  return lines.join("\n") + "\n";
}
