// Pure input mapper: plain event records in, command records out.
// Keeping it free of DOM types means a recorded event trace can be
// replayed in tests and must produce a byte-identical command stream.

import {
  defaultViewForward,
  HOME_POSITION,
  IDENTITY_QUAT,
  normalize,
  type Quat,
  type Vec3,
} from "./defaults.js";
import type { ConsoleCommand } from "./protocol.js";

export type InputEvent =
  | { kind: "pointerdown"; x: number; y: number; shift: boolean }
  | { kind: "pointermove"; x: number; y: number }
  | { kind: "pointerup" }
  | { kind: "wheel"; delta: number }
  | { kind: "keydown"; code: string }
  | { kind: "keyup"; code: string }
  | { kind: "axis"; value: number };

export type PlaneName = "front" | "ground";

/** A drag plane: world direction for screen-right, world direction for screen-up. */
export interface DragPlane {
  screenX: Vec3;
  screenUp: Vec3;
}

export interface MapperConfig {
  /** Pointer drag displacement, metres of hand travel per pixel. */
  metersPerPixel: number;
  /** Depth travel per unit of wheel delta (one notch is about 100 units). */
  metersPerWheelUnit: number;
  /** Hand rotation per pixel of modified drag. */
  radiansPerPixel: number;
  /** Axis the wheel moves the hand along; points away from the viewer. */
  wheelAxis: Vec3;
  planes: Record<PlaneName, DragPlane>;
}

export function defaultConfig(): MapperConfig {
  const forward = defaultViewForward();
  const away = normalize([forward[0], forward[1], 0]);
  return {
    metersPerPixel: 0.001,
    metersPerWheelUnit: 0.0002,
    radiansPerPixel: 0.005,
    wheelAxis: forward,
    planes: {
      // Vertical plane facing the default camera: drag right goes +y,
      // drag up goes +z.
      front: { screenX: [0, 1, 0], screenUp: [0, 0, 1] },
      // Desk plane: drag up pushes the hand away from the viewer.
      ground: { screenX: [0, 1, 0], screenUp: away },
    },
  };
}

export const KEY_PAUSE = "Space";
/** Synthetic code for a gamepad pause button; never a KeyboardEvent code. */
export const KEY_PAUSE_ALT = "GamepadPause";
export const KEY_OPEN = "KeyQ";
export const KEY_CLOSE = "KeyE";
export const KEY_PLANE_FRONT = "Digit1";
export const KEY_PLANE_GROUND = "Digit2";

function quatMul(a: Quat, b: Quat): Quat {
  return [
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
    a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
    a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
    a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
  ];
}

function quatAxisAngle(axis: Vec3, angle: number): Quat {
  const h = angle / 2;
  const s = Math.sin(h);
  return [Math.cos(h), axis[0] * s, axis[1] * s, axis[2] * s];
}

export function quatNormalize(q: Quat): Quat {
  const n = Math.hypot(q[0], q[1], q[2], q[3]);
  return [q[0] / n, q[1] / n, q[2] / n, q[3] / n];
}

interface DragState {
  x: number;
  y: number;
  rotate: boolean;
}

/**
 * Maps operator input to hand pose, gripper axis, and pause edges.
 *
 * feed() absorbs events immediately; sample() drains whatever commands
 * are due. The caller invokes sample() on the send cadence, so command
 * emission is throttled without the mapper touching a clock. With no
 * new input, sample() returns nothing and the robot side holds the
 * last command it saw.
 */
export class InputMapper {
  position: Vec3;
  orientation: Quat;
  plane: PlaneName = "front";

  private readonly config: MapperConfig;
  private drag: DragState | null = null;
  private heldKeys = new Set<string>();
  private axisValue = 0;
  private poseDirty = false;
  private axisDirty = false;
  private pendingToggles = 0;

  constructor(config?: MapperConfig) {
    this.config = config ?? defaultConfig();
    this.position = [...HOME_POSITION];
    this.orientation = [...IDENTITY_QUAT];
  }

  /**
   * Re-aim the drag planes and wheel axis after the camera moves, so
   * pointer gestures keep matching what the operator sees.
   */
  updateView(front: DragPlane, ground: DragPlane, wheelAxis: Vec3): void {
    this.config.planes.front = front;
    this.config.planes.ground = ground;
    this.config.wheelAxis = wheelAxis;
  }

  /**
   * Align the mapper with a pose reported by the robot side, without
   * emitting a command: the session is already there.
   */
  anchor(position: Vec3, orientation: Quat): void {
    this.position = [position[0], position[1], position[2]];
    this.orientation = quatNormalize(orientation);
  }

  feed(event: InputEvent): void {
    switch (event.kind) {
      case "pointerdown":
        this.drag = { x: event.x, y: event.y, rotate: event.shift };
        break;
      case "pointermove":
        if (this.drag !== null) {
          this.applyDrag(event.x - this.drag.x, event.y - this.drag.y);
          this.drag.x = event.x;
          this.drag.y = event.y;
        }
        break;
      case "pointerup":
        this.drag = null;
        break;
      case "wheel":
        this.applyWheel(event.delta);
        break;
      case "keydown":
        if (!this.heldKeys.has(event.code)) {
          this.heldKeys.add(event.code);
          this.keyEdge(event.code);
        }
        break;
      case "keyup":
        if (this.heldKeys.delete(event.code)) {
          this.refreshKeyAxis();
        }
        break;
      case "axis":
        if (Number.isFinite(event.value)) {
          this.setAxis(Math.min(Math.max(event.value, -1), 1));
        }
        break;
    }
  }

  /** Drain commands that became due since the last call. */
  sample(): ConsoleCommand[] {
    const out: ConsoleCommand[] = [];
    for (; this.pendingToggles > 0; this.pendingToggles--) {
      out.push({ type: "pause_toggle" });
    }
    if (this.poseDirty) {
      this.poseDirty = false;
      out.push({
        type: "hand_pose",
        position: [this.position[0], this.position[1], this.position[2]],
        orientation: [
          this.orientation[0],
          this.orientation[1],
          this.orientation[2],
          this.orientation[3],
        ],
      });
    }
    if (this.axisDirty) {
      this.axisDirty = false;
      out.push({ type: "gripper_axis", value: this.axisValue });
    }
    return out;
  }

  private applyDrag(dx: number, dy: number): void {
    if (dx === 0 && dy === 0) {
      return;
    }
    if (this.drag !== null && this.drag.rotate) {
      const rpp = this.config.radiansPerPixel;
      // Drag right yaws the hand clockwise seen from above; drag up
      // pitches it back. Both act in the world frame.
      const yaw = quatAxisAngle([0, 0, 1], -dx * rpp);
      const pitch = quatAxisAngle([0, 1, 0], -dy * rpp);
      this.orientation = quatNormalize(
        quatMul(quatMul(yaw, pitch), this.orientation),
      );
    } else {
      const plane = this.config.planes[this.plane];
      const mpp = this.config.metersPerPixel;
      // Screen y grows downward, so moving the pointer up is -dy.
      for (let i = 0; i < 3; i++) {
        this.position[i] +=
          plane.screenX[i] * dx * mpp + plane.screenUp[i] * -dy * mpp;
      }
    }
    this.poseDirty = true;
  }

  private applyWheel(delta: number): void {
    if (delta === 0 || !Number.isFinite(delta)) {
      return;
    }
    // Scrolling up (negative delta) pushes the hand away from the viewer.
    const step = -delta * this.config.metersPerWheelUnit;
    const axis = this.config.wheelAxis;
    this.position = [
      this.position[0] + axis[0] * step,
      this.position[1] + axis[1] * step,
      this.position[2] + axis[2] * step,
    ];
    this.poseDirty = true;
  }

  private keyEdge(code: string): void {
    switch (code) {
      case KEY_PAUSE:
      case KEY_PAUSE_ALT:
        this.pendingToggles++;
        break;
      case KEY_PLANE_FRONT:
        this.plane = "front";
        break;
      case KEY_PLANE_GROUND:
        this.plane = "ground";
        break;
      case KEY_OPEN:
      case KEY_CLOSE:
        this.refreshKeyAxis();
        break;
    }
  }

  private refreshKeyAxis(): void {
    let value = 0;
    if (this.heldKeys.has(KEY_OPEN)) {
      value += 1;
    }
    if (this.heldKeys.has(KEY_CLOSE)) {
      value -= 1;
    }
    this.setAxis(value);
  }

  private setAxis(value: number): void {
    if (value !== this.axisValue) {
      this.axisValue = value;
      this.axisDirty = true;
    }
  }
}
