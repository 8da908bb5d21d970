/** Client-side clip sampling, mirroring the server's interpolation math
 * (linear position, spherical orientation) so the animation channel only
 * needs the clip parameters, never per-frame poses.
 */

import type { ClipDto, PoseDto } from "./types.js";

type Quat = [number, number, number, number];
type Vec3 = [number, number, number];

function lerp(a: Vec3, b: Vec3, u: number): Vec3 {
  return [a[0] + (b[0] - a[0]) * u, a[1] + (b[1] - a[1]) * u, a[2] + (b[2] - a[2]) * u];
}

function slerp(q1: Quat, q2in: Quat, u: number): Quat {
  let q2: Quat = q2in;
  let dot = q1[0] * q2[0] + q1[1] * q2[1] + q1[2] * q2[2] + q1[3] * q2[3];
  if (dot < 0) {
    q2 = [-q2[0], -q2[1], -q2[2], -q2[3]];
    dot = -dot;
  }
  let mixed: Quat;
  if (dot > 0.9995) {
    mixed = [
      q1[0] + (q2[0] - q1[0]) * u,
      q1[1] + (q2[1] - q1[1]) * u,
      q1[2] + (q2[2] - q1[2]) * u,
      q1[3] + (q2[3] - q1[3]) * u,
    ];
  } else {
    const theta = Math.acos(Math.min(1, Math.max(-1, dot)));
    const sinTheta = Math.sin(theta);
    const w1 = Math.sin((1 - u) * theta) / sinTheta;
    const w2 = Math.sin(u * theta) / sinTheta;
    mixed = [
      w1 * q1[0] + w2 * q2[0],
      w1 * q1[1] + w2 * q2[1],
      w1 * q1[2] + w2 * q2[2],
      w1 * q1[3] + w2 * q2[3],
    ];
  }
  const norm = Math.hypot(...mixed);
  return [mixed[0] / norm, mixed[1] / norm, mixed[2] / norm, mixed[3] / norm];
}

/** Pose at `t` seconds into the clip: modular phase when looping, clamped otherwise. */
export function sampleClip(clip: ClipDto, t: number): PoseDto {
  if (t < 0) throw new RangeError(`sample time must be >= 0, got ${t}`);
  const u = clip.looping ? (t % clip.duration) / clip.duration : Math.min(t / clip.duration, 1);
  if (u === 0) return clip.start_pose;
  if (u === 1) return clip.end_pose;
  return {
    position: lerp(clip.start_pose.position, clip.end_pose.position, u),
    orientation: slerp(clip.start_pose.orientation, clip.end_pose.orientation, u),
  };
}

/** Rotate a vector by a unit quaternion (w, x, y, z). */
export function rotate(q: Quat, v: Vec3): Vec3 {
  const [w, x, y, z] = q;
  // q * (0, v) * q^-1 expanded
  const tx = 2 * (y * v[2] - z * v[1]);
  const ty = 2 * (z * v[0] - x * v[2]);
  const tz = 2 * (x * v[1] - y * v[0]);
  return [
    v[0] + w * tx + y * tz - z * ty,
    v[1] + w * ty + z * tx - x * tz,
    v[2] + w * tz + x * ty - y * tx,
  ];
}

/** Compose an anchor world pose with a local pose expressed in its frame. */
export function composePose(anchor: PoseDto, local: PoseDto): PoseDto {
  const [aw, ax, ay, az] = anchor.orientation;
  const [lw, lx, ly, lz] = local.orientation;
  const rotated = rotate(anchor.orientation, local.position);
  return {
    position: [
      anchor.position[0] + rotated[0],
      anchor.position[1] + rotated[1],
      anchor.position[2] + rotated[2],
    ],
    orientation: [
      aw * lw - ax * lx - ay * ly - az * lz,
      aw * lx + ax * lw + ay * lz - az * ly,
      aw * ly - ax * lz + ay * lw + az * lx,
      aw * lz + ax * ly - ay * lx + az * lw,
    ],
  };
}
