// Shared view constants. The workspace box and home pose mirror the
// simulator defaults; override the box with the ?ws= query parameter
// when the robot side runs a custom workspace YAML.

export type Vec3 = [number, number, number];
export type Quat = [number, number, number, number];

/** Desk workspace box, low corner. */
export const WORKSPACE_LOW: Vec3 = [0.1, -0.45, 0.01];

/** Desk workspace box, high corner. */
export const WORKSPACE_HIGH: Vec3 = [0.75, 0.45, 0.7];

/** Hand pose the mapper starts from before the first frame arrives. */
export const HOME_POSITION: Vec3 = [0.4, 0.0, 0.3];

export const IDENTITY_QUAT: Quat = [1, 0, 0, 0];

/** Default camera placement: in front of the desk, slightly above it. */
export const CAMERA_EYE: Vec3 = [1.55, 0.0, 0.85];
export const CAMERA_TARGET: Vec3 = [0.425, 0.0, 0.35];

export function normalize(v: Vec3): Vec3 {
  const n = Math.hypot(v[0], v[1], v[2]);
  if (n === 0 || !Number.isFinite(n)) {
    throw new Error("cannot normalize a zero or non-finite vector");
  }
  return [v[0] / n, v[1] / n, v[2] / n];
}

export function sub(a: Vec3, b: Vec3): Vec3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

/** Unit vector from the default camera toward the scene. */
export function defaultViewForward(): Vec3 {
  return normalize(sub(CAMERA_TARGET, CAMERA_EYE));
}

/**
 * Wall order used for guard violation indices: the six box faces come as
 * +x, -x, +y, -y, +z, -z. A violation report names walls by position in
 * this list, so the drawn planes must keep the same order.
 */
export const WALL_ORDER = ["+x", "-x", "+y", "-y", "+z", "-z"] as const;
