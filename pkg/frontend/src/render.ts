/** Canvas renderer: orthographic front view (world x right, world z up).
 *
 * Primitive shapes from the manifest are the default; a mesh reference
 * degrades to a labeled box so instruction semantics stay visible without
 * real geometry. The animated target is drawn at the clip sample composed
 * with the anchor's current pose.
 */

import { composePose, sampleClip } from "./clip.js";
import type { TrainerStore } from "./viewmodel.js";
import type { ComponentDto, PoseDto, StateEntryDto } from "./types.js";

const SCALE = 640; // pixels per meter
const GROUND_Y = 0.86; // fraction of canvas height where z=0 sits

function cssColor(color: [number, number, number, number]): string {
  const [r, g, b, a] = color;
  return `rgba(${Math.round(r * 255)}, ${Math.round(g * 255)}, ${Math.round(b * 255)}, ${a})`;
}

export class SceneRenderer {
  private readonly ctx: CanvasRenderingContext2D;
  private byName = new Map<string, ComponentDto>();

  constructor(
    private readonly canvas: HTMLCanvasElement,
    private readonly store: TrainerStore,
  ) {
    const ctx = canvas.getContext("2d");
    if (!ctx) throw new Error("2d canvas context unavailable");
    this.ctx = ctx;
  }

  private toScreen(x: number, z: number): [number, number] {
    return [this.canvas.width / 2 + x * SCALE, this.canvas.height * GROUND_Y - z * SCALE];
  }

  private drawInstance(component: ComponentDto, pose: PoseDto, color: string, animating: boolean) {
    const ctx = this.ctx;
    const [cx, cy] = this.toScreen(pose.position[0], pose.position[2]);
    ctx.fillStyle = color;
    ctx.strokeStyle = animating ? "#0f0" : "#222";
    ctx.lineWidth = animating ? 2.5 : 1;
    const dims = component.shape.dimensions ?? [0.05, 0.05, 0.05];
    if (component.shape.type === "cylinder") {
      const [radius, height] = dims;
      const w = Math.max(2 * radius * SCALE, 3);
      const h = Math.max(height * SCALE, 3);
      ctx.beginPath();
      ctx.roundRect(cx - w / 2, cy - h / 2, w, h, w / 2);
      ctx.fill();
      ctx.stroke();
    } else {
      // box, or the labeled fallback for meshes we cannot load
      const w = Math.max(dims[0] * SCALE, 4);
      const h = Math.max((dims[2] ?? dims[0]) * SCALE, 4);
      ctx.fillRect(cx - w / 2, cy - h / 2, w, h);
      ctx.strokeRect(cx - w / 2, cy - h / 2, w, h);
      if (component.shape.type === "mesh") {
        ctx.fillStyle = "#111";
        ctx.font = "10px sans-serif";
        ctx.textAlign = "center";
        ctx.fillText(component.name, cx, cy + 3);
      }
    }
  }

  /** Draw the current store state, sampling the clip at wall-clock time. */
  draw(nowMs: number): void {
    const { canvas, ctx, store } = this;
    this.byName = new Map(store.manifest.components.map((c) => [c.name, c]));
    ctx.clearRect(0, 0, canvas.width, canvas.height);

    const ground = this.toScreen(0, 0)[1];
    ctx.strokeStyle = "#ccc";
    ctx.beginPath();
    ctx.moveTo(0, ground);
    ctx.lineTo(canvas.width, ground);
    ctx.stroke();

    const clip = store.clip;
    const elapsed = (nowMs - store.clipStartedAt) / 1000;
    const sample = clip ? sampleClip(clip, Math.max(elapsed, 0)) : null;
    const anchorEntry = clip
      ? store.entries().find((e) => e.component === clip.anchor && e.instance === 0)
      : undefined;

    const entries = [...store.entries()].sort(
      (a, b) => a.state.pose.position[2] - b.state.pose.position[2],
    );
    for (const entry of entries) {
      if (!entry.state.active) continue;
      const component = this.byName.get(entry.component);
      if (!component) continue;
      let pose = entry.state.pose;
      if (clip && sample && anchorEntry && entry.component === clip.target && entry.state.animating) {
        pose = composePose(anchorEntry.state.pose, sample);
      }
      this.drawInstance(component, pose, cssColor(entry.state.color), entry.state.animating);
    }
  }

  static statesByComponent(entries: StateEntryDto[]): Map<string, StateEntryDto[]> {
    const out = new Map<string, StateEntryDto[]>();
    for (const entry of entries) {
      const list = out.get(entry.component) ?? [];
      list.push(entry);
      out.set(entry.component, list);
    }
    return out;
  }
}
