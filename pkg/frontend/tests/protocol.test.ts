import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";
import { encodeCommand, parseFrame } from "../src/protocol.js";

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), "fixtures");

function goodFrame(): Record<string, unknown> {
  return {
    type: "frame",
    seq: 412,
    ee_pose: { position: [0.42, -0.03, 0.31], orientation: [1, 0, 0, 0] },
    gripper_width: 0.052,
    goal_width: 0.04,
    paused: false,
    opacity: 0.62,
    objects: [
      {
        key: 7,
        kind: 0,
        pose: { position: [0.5, 0.1, 0.05], orientation: [1, 0, 0, 0] },
        color: [0.8, 0.3, 0.2, 1.0],
        half_extents: [0.02, 0.02, 0.02],
        held: false,
      },
    ],
    guard_violation: [2, 5],
    stats: { avg_hz: 71.8, low1_hz: 64.2 },
  };
}

describe("parseFrame", () => {
  it("accepts a complete frame and mirrors every field", () => {
    const frame = parseFrame(JSON.stringify(goodFrame()));
    expect(frame).not.toBeNull();
    expect(frame!.seq).toBe(412);
    expect(frame!.ee_pose.position).toEqual([0.42, -0.03, 0.31]);
    expect(frame!.gripper_width).toBeCloseTo(0.052, 12);
    expect(frame!.goal_width).toBeCloseTo(0.04, 12);
    expect(frame!.paused).toBe(false);
    expect(frame!.opacity).toBeCloseTo(0.62, 12);
    expect(frame!.objects).toHaveLength(1);
    expect(frame!.objects[0].key).toBe(7);
    expect(frame!.objects[0].kind).toBe(0);
    expect(frame!.objects[0].held).toBe(false);
    expect(frame!.guard_violation).toEqual([2, 5]);
    expect(frame!.stats.avg_hz).toBeCloseTo(71.8, 12);
  });

  it("accepts a null guard violation and an empty object list", () => {
    const raw = goodFrame();
    raw.objects = [];
    raw.guard_violation = null;
    const frame = parseFrame(JSON.stringify(raw));
    expect(frame).not.toBeNull();
    expect(frame!.objects).toEqual([]);
    expect(frame!.guard_violation).toBeNull();
  });

  const broken: Array<[string, (raw: Record<string, unknown>) => void]> = [
    ["wrong type tag", (raw) => (raw.type = "telemetry")],
    ["missing seq", (raw) => delete raw.seq],
    ["string seq", (raw) => (raw.seq = "7")],
    ["negative seq", (raw) => (raw.seq = -1)],
    ["fractional seq", (raw) => (raw.seq = 1.5)],
    ["missing pose", (raw) => delete raw.ee_pose],
    ["short position", (raw) => (raw.ee_pose = { position: [1, 2], orientation: [1, 0, 0, 0] })],
    ["null in position", (raw) => (raw.ee_pose = { position: [1, null, 3], orientation: [1, 0, 0, 0] })],
    ["short orientation", (raw) => (raw.ee_pose = { position: [1, 2, 3], orientation: [1, 0, 0] })],
    ["string width", (raw) => (raw.gripper_width = "0.05")],
    ["numeric paused flag", (raw) => (raw.paused = 1)],
    ["string opacity", (raw) => (raw.opacity = "1")],
    ["objects not a list", (raw) => (raw.objects = {})],
    ["object missing key", (raw) => ((raw.objects as object[])[0] = { kind: 0 })],
    [
      "object kind as a string",
      (raw) => {
        const obj = (raw.objects as Record<string, unknown>[])[0];
        obj.kind = "block";
      },
    ],
    [
      "object color missing the alpha channel",
      (raw) => {
        const obj = (raw.objects as Record<string, unknown>[])[0];
        obj.color = [1, 0, 0];
      },
    ],
    [
      "object held not boolean",
      (raw) => {
        const obj = (raw.objects as Record<string, unknown>[])[0];
        obj.held = "yes";
      },
    ],
    ["violation not a list", (raw) => (raw.guard_violation = "wall 2")],
    ["violation with float index", (raw) => (raw.guard_violation = [1.5])],
    ["missing stats", (raw) => delete raw.stats],
    ["stats missing low1", (raw) => (raw.stats = { avg_hz: 60 })],
  ];

  it.each(broken)("rejects a frame with %s", (_label, mutate) => {
    const raw = goodFrame();
    mutate(raw);
    expect(parseFrame(JSON.stringify(raw))).toBeNull();
  });

  it("rejects non-JSON text and non-object payloads", () => {
    expect(parseFrame("not json at all")).toBeNull();
    expect(parseFrame("[1,2,3]")).toBeNull();
    expect(parseFrame("null")).toBeNull();
    expect(parseFrame('"frame"')).toBeNull();
  });

  it("rejects non-finite numbers encoded as JSON null", () => {
    const raw = goodFrame();
    raw.opacity = null;
    expect(parseFrame(JSON.stringify(raw))).toBeNull();
  });

  it("accepts a frame captured from a live gateway", () => {
    const text = readFileSync(join(FIXTURES, "gateway_frame.json"), "utf8");
    const frame = parseFrame(text);
    expect(frame).not.toBeNull();
    expect(frame!.seq).toBe(2165);
    expect(frame!.objects).toHaveLength(4);
    expect(frame!.objects.every((obj) => obj.kind === 0)).toBe(true);
    expect(frame!.guard_violation).toBeNull();
    expect(frame!.stats.avg_hz).toBeGreaterThan(0);
  });
});

describe("encodeCommand", () => {
  it("serializes each command kind with a fixed key order", () => {
    expect(
      encodeCommand({
        type: "hand_pose",
        position: [0.4, 0, 0.3],
        orientation: [1, 0, 0, 0],
      }),
    ).toBe('{"type":"hand_pose","position":[0.4,0,0.3],"orientation":[1,0,0,0]}');
    expect(encodeCommand({ type: "gripper_axis", value: -0.25 })).toBe(
      '{"type":"gripper_axis","value":-0.25}',
    );
    expect(encodeCommand({ type: "pause_toggle" })).toBe(
      '{"type":"pause_toggle"}',
    );
    expect(encodeCommand({ type: "camera", action: "orbit" })).toBe(
      '{"type":"camera","action":"orbit"}',
    );
  });

  it("round trips through JSON without losing fields", () => {
    const cmd = {
      type: "hand_pose" as const,
      position: [0.123456789, -0.5, 0.3] as [number, number, number],
      orientation: [0.7071067811865476, 0, 0.7071067811865476, 0] as [
        number,
        number,
        number,
        number,
      ],
    };
    expect(JSON.parse(encodeCommand(cmd))).toEqual(cmd);
  });
});
