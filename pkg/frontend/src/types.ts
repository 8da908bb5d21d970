/** Wire types for the gateway's JSON documents. */

export interface PoseDto {
  position: [number, number, number];
  orientation: [number, number, number, number]; // (w, x, y, z)
}

export interface ClipDto {
  target: string;
  anchor: string;
  instance_count: number;
  start_pose: PoseDto;
  end_pose: PoseDto;
  duration: number;
  looping: boolean;
}

export interface InstanceStateDto {
  active: boolean;
  animating: boolean;
  color: [number, number, number, number];
  pose: PoseDto;
}

export interface StateEntryDto {
  component: string;
  instance: number;
  state: InstanceStateDto;
}

export interface SceneDto {
  step_cursor: number;
  clip: ClipDto | null;
  states: StateEntryDto[];
}

export interface SceneDocument {
  revision: number;
  scene: SceneDto;
}

export interface StepDto {
  index: number;
  text: string;
}

export interface ShapeDto {
  type: "box" | "cylinder" | "mesh";
  dimensions?: number[];
  path?: string;
}

export interface ComponentDto {
  name: string;
  kind: "atomic" | "assembled";
  shape: ShapeDto;
  color: [number, number, number, number];
  instances: PoseDto[];
  constituents: string[];
  mating_pose?: PoseDto;
}

export interface ManifestDto {
  components: ComponentDto[];
}

export interface DeltaEvent {
  revision: number;
  step_cursor: number;
  clip: ClipDto | null;
  changed: StateEntryDto[];
}

export type GatewayEvent = DeltaEvent | { gap: true };

export interface MutationResponse extends DeltaEvent {
  status: "ok";
  step_text: string | null;
  triple: { predecessor: string; successor: string; count: number } | null;
}

export interface ErrorBody {
  error: { code: string; message: string; raw?: string; step_index?: number };
}

export function isGap(event: GatewayEvent): event is { gap: true } {
  return (event as { gap?: boolean }).gap === true;
}
