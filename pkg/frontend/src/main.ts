// Page entry point: wires DOM events into the pure input mapper, the
// channel into the frame parser, and directives into the renderer.

import {
  normalize,
  WORKSPACE_HIGH,
  WORKSPACE_LOW,
  type Vec3,
} from "./defaults.js";
import {
  defaultConfig,
  InputMapper,
  KEY_PAUSE_ALT,
  type InputEvent,
} from "./input.js";
import { encodeCommand, parseFrame } from "./protocol.js";
import { ConsoleRenderer } from "./render.js";
import { deriveView, type RenderDirectives } from "./viewmodel.js";
import { openChannel } from "./ws.js";

const STALL_MS = 2000;
const GAMEPAD_DEADZONE = 0.12;

function query(name: string): string | null {
  return new URLSearchParams(window.location.search).get(name);
}

function queryNumber(name: string, fallback: number): number {
  const raw = query(name);
  if (raw === null) {
    return fallback;
  }
  const value = Number(raw);
  return Number.isFinite(value) && value > 0 ? value : fallback;
}

function queryBox(): [Vec3, Vec3] {
  const raw = query("ws");
  if (raw !== null) {
    const parts = raw.split(",").map(Number);
    if (parts.length === 6 && parts.every(Number.isFinite)) {
      return [
        [parts[0], parts[2], parts[4]],
        [parts[1], parts[3], parts[5]],
      ];
    }
  }
  return [WORKSPACE_LOW, WORKSPACE_HIGH];
}

function element(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing page element #${id}`);
  }
  return node;
}

function run(): void {
  const canvas = element("scene") as unknown as HTMLCanvasElement;
  const hudStatus = element("hud-status");
  const hudHz = element("hud-hz");
  const hudMapping = element("hud-mapping");
  const hudPaused = element("hud-paused");

  const [low, high] = queryBox();
  const renderer = new ConsoleRenderer(canvas, low, high);

  const config = defaultConfig();
  config.metersPerPixel = queryNumber("mpp", config.metersPerPixel);
  const mapper = new InputMapper(config);
  const sendHz = queryNumber("sendhz", 60);
  hudMapping.textContent = `drag ${(config.metersPerPixel * 1000).toFixed(1)} mm/px | wheel ${(config.metersPerWheelUnit * 1000).toFixed(2)} mm/unit | [1] front plane [2] desk plane | Q open E close | Space pause | R re-anchor`;

  let latest: RenderDirectives | null = null;
  let framePending = false;
  let lastFrameAt = 0;
  let anchored = false;
  let connection = "connecting";

  const gatewayUrl =
    query("gw") ?? `ws://${window.location.host || "127.0.0.1:8765"}/ws`;
  const channel = openChannel(gatewayUrl, {
    onMessage(text) {
      const frame = parseFrame(text);
      if (frame === null) {
        console.warn("malformed frame skipped");
        return;
      }
      if (!anchored) {
        // Start the hand where the robot already is so the first drag
        // does not jump.
        mapper.anchor(frame.ee_pose.position, frame.ee_pose.orientation);
        anchored = true;
      }
      latest = deriveView(frame);
      framePending = true;
      lastFrameAt = performance.now();
    },
    onStatus(state) {
      connection = state;
    },
  });

  const resize = () => {
    canvas.width = window.innerWidth;
    canvas.height = window.innerHeight;
    renderer.resize(window.innerWidth, window.innerHeight);
  };
  window.addEventListener("resize", resize);
  resize();

  const feed = (event: InputEvent) => mapper.feed(event);

  const refreshViewAxes = () => {
    const axes = renderer.viewAxes();
    let away: Vec3;
    try {
      away = normalize([axes.forward[0], axes.forward[1], 0]);
    } catch {
      return; // Looking straight down; keep the previous planes.
    }
    mapper.updateView(
      { screenX: axes.right, screenUp: axes.up },
      { screenX: normalize([axes.right[0], axes.right[1], 0]), screenUp: away },
      axes.forward,
    );
  };

  canvas.addEventListener("pointerdown", (ev) => {
    canvas.setPointerCapture(ev.pointerId);
    if (ev.button === 2) {
      renderer.beginOrbit(ev.clientX, ev.clientY);
    } else if (ev.button === 0) {
      feed({
        kind: "pointerdown",
        x: ev.clientX,
        y: ev.clientY,
        shift: ev.shiftKey,
      });
    }
  });
  canvas.addEventListener("pointermove", (ev) => {
    if (renderer.orbiting) {
      renderer.orbitMove(ev.clientX, ev.clientY);
    } else {
      feed({ kind: "pointermove", x: ev.clientX, y: ev.clientY });
    }
  });
  const pointerDone = () => {
    if (renderer.orbiting) {
      renderer.endOrbit();
      refreshViewAxes();
    }
    feed({ kind: "pointerup" });
  };
  canvas.addEventListener("pointerup", pointerDone);
  canvas.addEventListener("pointercancel", pointerDone);
  canvas.addEventListener("contextmenu", (ev) => ev.preventDefault());
  canvas.addEventListener(
    "wheel",
    (ev) => {
      ev.preventDefault();
      if (ev.altKey) {
        renderer.zoomBy(ev.deltaY > 0 ? 1.1 : 1 / 1.1);
        refreshViewAxes();
      } else {
        feed({ kind: "wheel", delta: ev.deltaY });
      }
    },
    { passive: false },
  );

  window.addEventListener("keydown", (ev) => {
    if (ev.repeat) {
      return; // The mapper also dedupes, but skip the noise entirely.
    }
    if (ev.code === "KeyR") {
      if (latest !== null) {
        mapper.anchor(latest.eePosition, latest.eeOrientation);
      }
      return;
    }
    feed({ kind: "keydown", code: ev.code });
  });
  window.addEventListener("keyup", (ev) => {
    feed({ kind: "keyup", code: ev.code });
  });

  let gamepadPausePressed = false;
  const pollGamepad = () => {
    const pads = navigator.getGamepads ? navigator.getGamepads() : [];
    const pad = pads.find((p) => p !== null);
    if (pad === undefined || pad === null) {
      return;
    }
    const stick = pad.axes.length > 1 ? pad.axes[1] : 0;
    // Stick pushed forward reads negative; forward closes the gripper.
    const value = Math.abs(stick) < GAMEPAD_DEADZONE ? 0 : stick;
    feed({ kind: "axis", value });
    const pressed = pad.buttons.length > 0 && pad.buttons[0].pressed;
    if (pressed && !gamepadPausePressed) {
      // Rides the same edge machinery as the keyboard pause key.
      feed({ kind: "keydown", code: KEY_PAUSE_ALT });
      feed({ kind: "keyup", code: KEY_PAUSE_ALT });
    }
    gamepadPausePressed = pressed;
  };

  window.setInterval(() => {
    for (const command of mapper.sample()) {
      channel.send(encodeCommand(command));
    }
  }, 1000 / sendHz);

  const animate = () => {
    pollGamepad();
    if (framePending && latest !== null) {
      framePending = false;
      renderer.applyFrame(latest);
      hudHz.textContent = latest.hzText;
      hudPaused.style.display = latest.pausedBanner ? "block" : "none";
    }
    renderer.setHandPose(mapper.position, mapper.orientation);

    const stalled =
      latest !== null && performance.now() - lastFrameAt > STALL_MS;
    hudStatus.textContent = stalled
      ? `${connection} (no frames for ${((performance.now() - lastFrameAt) / 1000).toFixed(0)}s)`
      : connection;
    hudStatus.className = connection === "open" && !stalled ? "ok" : "bad";

    renderer.render();
    requestAnimationFrame(animate);
  };
  requestAnimationFrame(animate);

  window.addEventListener("beforeunload", () => channel.close());
}

run();
