// Pure derivation from a delivered frame to drawing directives. The
// renderer applies these verbatim, so every visual change traces back
// to a frame; nothing here interpolates or extrapolates.

import type { Quat, Vec3 } from "./defaults.js";
import type { ConsoleFrame, Rgba } from "./protocol.js";

export interface ObjectDirective {
  key: number;
  kind: number;
  position: Vec3;
  orientation: Quat;
  color: Rgba;
  halfExtents: Vec3;
  held: boolean;
}

export interface RenderDirectives {
  seq: number;
  eePosition: Vec3;
  eeOrientation: Quat;
  /** Red alert tint on the end-effector while motion is paused. */
  eeTintRed: boolean;
  pausedBanner: boolean;
  /** Separation of the drawn fingers, from the measured gripper width. */
  fingerGap: number;
  /** Separation of the green goal fingers, from the commanded width. */
  goalGap: number;
  /** Hand cursor alpha as sent by the robot side. */
  cursorOpacity: number;
  cursorVisible: boolean;
  highlightedWalls: number[];
  objects: ObjectDirective[];
  hzText: string;
}

function clamp01(v: number): number {
  return Math.min(Math.max(v, 0), 1);
}

export function formatHz(avgHz: number, low1Hz: number): string {
  return `avg ${avgHz.toFixed(1)} Hz | 1% low ${low1Hz.toFixed(1)} Hz`;
}

export function deriveView(frame: ConsoleFrame): RenderDirectives {
  const opacity = clamp01(frame.opacity);
  return {
    seq: frame.seq,
    eePosition: [...frame.ee_pose.position],
    eeOrientation: [...frame.ee_pose.orientation],
    eeTintRed: frame.paused,
    pausedBanner: frame.paused,
    fingerGap: frame.gripper_width,
    goalGap: frame.goal_width,
    cursorOpacity: opacity,
    cursorVisible: opacity > 0,
    highlightedWalls:
      frame.guard_violation === null ? [] : [...frame.guard_violation],
    objects: frame.objects.map((obj) => ({
      key: obj.key,
      kind: obj.kind,
      position: [...obj.pose.position],
      orientation: [...obj.pose.orientation],
      color: [...obj.color],
      halfExtents: [...obj.half_extents],
      held: obj.held,
    })),
    hzText: formatHz(frame.stats.avg_hz, frame.stats.low1_hz),
  };
}
