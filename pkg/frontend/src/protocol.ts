// Channel message schema: frames arriving from the gateway and commands
// going back. Parsing is defensive because the page must survive a
// malformed message by keeping the previous frame on screen.

import type { Quat, Vec3 } from "./defaults.js";

export interface PoseData {
  position: Vec3;
  orientation: Quat;
}

/** Display color, RGBA with each channel in [0, 1]. */
export type Rgba = [number, number, number, number];

export interface ObjectView {
  key: number;
  /** Shape family code; 0 is a box, other values are reserved. */
  kind: number;
  pose: PoseData;
  color: Rgba;
  half_extents: Vec3;
  held: boolean;
}

export interface FrameStats {
  avg_hz: number;
  low1_hz: number;
}

export interface ConsoleFrame {
  type: "frame";
  seq: number;
  ee_pose: PoseData;
  gripper_width: number;
  goal_width: number;
  paused: boolean;
  opacity: number;
  objects: ObjectView[];
  guard_violation: number[] | null;
  stats: FrameStats;
}

export type ConsoleCommand =
  | { type: "hand_pose"; position: Vec3; orientation: Quat }
  | { type: "gripper_axis"; value: number }
  | { type: "pause_toggle" }
  | { type: "camera"; action: string };

function finiteNumber(v: unknown): v is number {
  return typeof v === "number" && Number.isFinite(v);
}

function numberArray(v: unknown, n: number): v is number[] {
  return Array.isArray(v) && v.length === n && v.every(finiteNumber);
}

function asVec3(v: unknown): Vec3 | null {
  return numberArray(v, 3) ? [v[0], v[1], v[2]] : null;
}

function asQuat(v: unknown): Quat | null {
  return numberArray(v, 4) ? [v[0], v[1], v[2], v[3]] : null;
}

function asRgba(v: unknown): Rgba | null {
  return numberArray(v, 4) ? [v[0], v[1], v[2], v[3]] : null;
}

function asPose(v: unknown): PoseData | null {
  if (typeof v !== "object" || v === null) {
    return null;
  }
  const raw = v as Record<string, unknown>;
  const position = asVec3(raw.position);
  const orientation = asQuat(raw.orientation);
  if (position === null || orientation === null) {
    return null;
  }
  return { position, orientation };
}

function asObjectView(v: unknown): ObjectView | null {
  if (typeof v !== "object" || v === null) {
    return null;
  }
  const raw = v as Record<string, unknown>;
  const pose = asPose(raw.pose);
  const color = asRgba(raw.color);
  const half = asVec3(raw.half_extents);
  if (
    !finiteNumber(raw.key) ||
    !Number.isInteger(raw.key) ||
    !finiteNumber(raw.kind) ||
    !Number.isInteger(raw.kind) ||
    pose === null ||
    color === null ||
    half === null ||
    typeof raw.held !== "boolean"
  ) {
    return null;
  }
  return {
    key: raw.key,
    kind: raw.kind,
    pose,
    color,
    half_extents: half,
    held: raw.held,
  };
}

/**
 * Decode one channel message into a frame. Returns null for anything
 * that is not a well-formed frame; the caller logs and keeps the
 * previous frame.
 */
export function parseFrame(text: string): ConsoleFrame | null {
  let raw: unknown;
  try {
    raw = JSON.parse(text);
  } catch {
    return null;
  }
  if (typeof raw !== "object" || raw === null) {
    return null;
  }
  const msg = raw as Record<string, unknown>;
  if (msg.type !== "frame") {
    return null;
  }
  if (!finiteNumber(msg.seq) || !Number.isInteger(msg.seq) || msg.seq < 0) {
    return null;
  }
  const eePose = asPose(msg.ee_pose);
  if (eePose === null) {
    return null;
  }
  if (!finiteNumber(msg.gripper_width) || !finiteNumber(msg.goal_width)) {
    return null;
  }
  if (typeof msg.paused !== "boolean" || !finiteNumber(msg.opacity)) {
    return null;
  }
  if (!Array.isArray(msg.objects)) {
    return null;
  }
  const objects: ObjectView[] = [];
  for (const entry of msg.objects) {
    const view = asObjectView(entry);
    if (view === null) {
      return null;
    }
    objects.push(view);
  }
  let violation: number[] | null = null;
  if (msg.guard_violation !== null) {
    if (
      !Array.isArray(msg.guard_violation) ||
      !msg.guard_violation.every(
        (w) => finiteNumber(w) && Number.isInteger(w) && w >= 0,
      )
    ) {
      return null;
    }
    violation = msg.guard_violation.slice();
  }
  const stats = msg.stats as Record<string, unknown> | null;
  if (
    typeof stats !== "object" ||
    stats === null ||
    !finiteNumber(stats.avg_hz) ||
    !finiteNumber(stats.low1_hz)
  ) {
    return null;
  }
  return {
    type: "frame",
    seq: msg.seq,
    ee_pose: eePose,
    gripper_width: msg.gripper_width,
    goal_width: msg.goal_width,
    paused: msg.paused,
    opacity: msg.opacity,
    objects,
    guard_violation: violation,
    stats: { avg_hz: stats.avg_hz, low1_hz: stats.low1_hz },
  };
}

/**
 * Serialize a command with a fixed key order so an identical command
 * always yields identical bytes. Replay determinism depends on this.
 */
export function encodeCommand(cmd: ConsoleCommand): string {
  switch (cmd.type) {
    case "hand_pose":
      return JSON.stringify({
        type: "hand_pose",
        position: cmd.position,
        orientation: cmd.orientation,
      });
    case "gripper_axis":
      return JSON.stringify({ type: "gripper_axis", value: cmd.value });
    case "pause_toggle":
      return JSON.stringify({ type: "pause_toggle" });
    case "camera":
      return JSON.stringify({ type: "camera", action: cmd.action });
  }
}
