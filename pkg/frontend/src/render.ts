// Scene renderer. Everything drawn here comes from RenderDirectives or
// from local input state (hand cursor, goal fingers), never from local
// physics: object poses move only when a new frame says so.

import * as THREE from "three";
import {
  CAMERA_EYE,
  CAMERA_TARGET,
  type Quat,
  type Vec3,
} from "./defaults.js";
import type { ObjectDirective, RenderDirectives } from "./viewmodel.js";

const EE_COLOR = 0x8899aa;
const EE_ALERT_COLOR = 0xdd2222;
const GOAL_COLOR = 0x22cc44;
const WALL_COLOR = 0x4488cc;
const WALL_ALERT_COLOR = 0xff3333;
const CURSOR_COLOR = 0xffcc33;
const HELD_GLOW = 0x664400;

const FINGER_SIZE: Vec3 = [0.012, 0.006, 0.045];
const PALM_SIZE: Vec3 = [0.025, 0.1, 0.022];

function toQuaternion(q: Quat): THREE.Quaternion {
  // Wire order is (w, x, y, z); three stores (x, y, z, w).
  return new THREE.Quaternion(q[1], q[2], q[3], q[0]);
}

interface WallSpec {
  center: Vec3;
  width: number;
  height: number;
  rotation: THREE.Euler;
}

function boxFaces(low: Vec3, high: Vec3): WallSpec[] {
  const cx = (low[0] + high[0]) / 2;
  const cy = (low[1] + high[1]) / 2;
  const cz = (low[2] + high[2]) / 2;
  const sx = high[0] - low[0];
  const sy = high[1] - low[1];
  const sz = high[2] - low[2];
  // Order matches guard violation indices: +x, -x, +y, -y, +z, -z.
  return [
    {
      center: [high[0], cy, cz],
      width: sz,
      height: sy,
      rotation: new THREE.Euler(0, Math.PI / 2, 0),
    },
    {
      center: [low[0], cy, cz],
      width: sz,
      height: sy,
      rotation: new THREE.Euler(0, -Math.PI / 2, 0),
    },
    {
      center: [cx, high[1], cz],
      width: sx,
      height: sz,
      rotation: new THREE.Euler(-Math.PI / 2, 0, 0),
    },
    {
      center: [cx, low[1], cz],
      width: sx,
      height: sz,
      rotation: new THREE.Euler(Math.PI / 2, 0, 0),
    },
    {
      center: [cx, cy, high[2]],
      width: sx,
      height: sy,
      rotation: new THREE.Euler(0, 0, 0),
    },
    {
      center: [cx, cy, low[2]],
      width: sx,
      height: sy,
      rotation: new THREE.Euler(Math.PI, 0, 0),
    },
  ];
}

interface GripperRig {
  group: THREE.Group;
  left: THREE.Mesh;
  right: THREE.Mesh;
}

function buildFingers(material: THREE.Material): GripperRig {
  const group = new THREE.Group();
  const geometry = new THREE.BoxGeometry(...FINGER_SIZE);
  const left = new THREE.Mesh(geometry, material);
  const right = new THREE.Mesh(geometry, material);
  group.add(left);
  group.add(right);
  return { group, left, right };
}

function setFingerGap(rig: GripperRig, gap: number): void {
  // The width is the inner separation between finger faces.
  const offset = gap / 2 + FINGER_SIZE[1] / 2;
  rig.left.position.set(0, -offset, -0.034);
  rig.right.position.set(0, offset, -0.034);
}

export class ConsoleRenderer {
  private readonly renderer: THREE.WebGLRenderer;
  private readonly scene: THREE.Scene;
  private readonly camera: THREE.PerspectiveCamera;

  private readonly eeGroup: THREE.Group;
  private readonly eeMaterial: THREE.MeshLambertMaterial;
  private readonly eeRig: GripperRig;
  private readonly goalGroup: THREE.Group;
  private readonly goalRig: GripperRig;
  private readonly cursor: THREE.Mesh;
  private readonly cursorMaterial: THREE.MeshBasicMaterial;
  private readonly wallMaterials: THREE.MeshBasicMaterial[] = [];
  private readonly objectMeshes = new Map<number, THREE.Mesh>();
  private readonly objectGroup: THREE.Group;

  private orbitTarget = new THREE.Vector3(...CAMERA_TARGET);
  private azimuth: number;
  private elevation: number;
  private radius: number;
  private orbitLast: { x: number; y: number } | null = null;

  constructor(canvas: HTMLCanvasElement, low: Vec3, high: Vec3) {
    this.renderer = new THREE.WebGLRenderer({ canvas, antialias: true });
    this.renderer.setPixelRatio(window.devicePixelRatio);
    this.scene = new THREE.Scene();
    this.scene.background = new THREE.Color(0x15181d);

    this.camera = new THREE.PerspectiveCamera(50, 1, 0.01, 20);
    this.camera.up.set(0, 0, 1);
    const eye = new THREE.Vector3(...CAMERA_EYE);
    const offset = eye.clone().sub(this.orbitTarget);
    this.radius = offset.length();
    this.azimuth = Math.atan2(offset.y, offset.x);
    this.elevation = Math.asin(offset.z / this.radius);
    this.placeCamera();

    this.scene.add(new THREE.AmbientLight(0xffffff, 0.75));
    const sun = new THREE.DirectionalLight(0xffffff, 1.6);
    sun.position.set(0.9, -0.7, 1.6);
    this.scene.add(sun);

    const grid = new THREE.GridHelper(2.4, 24, 0x333a44, 0x252a32);
    grid.rotation.x = Math.PI / 2;
    this.scene.add(grid);

    for (const face of boxFaces(low, high)) {
      const material = new THREE.MeshBasicMaterial({
        color: WALL_COLOR,
        transparent: true,
        opacity: 0.06,
        side: THREE.DoubleSide,
        depthWrite: false,
      });
      const mesh = new THREE.Mesh(
        new THREE.PlaneGeometry(face.width, face.height),
        material,
      );
      mesh.position.set(...face.center);
      mesh.setRotationFromEuler(face.rotation);
      this.wallMaterials.push(material);
      this.scene.add(mesh);
    }

    this.eeMaterial = new THREE.MeshLambertMaterial({ color: EE_COLOR });
    this.eeGroup = new THREE.Group();
    const palm = new THREE.Mesh(
      new THREE.BoxGeometry(...PALM_SIZE),
      this.eeMaterial,
    );
    this.eeGroup.add(palm);
    this.eeRig = buildFingers(this.eeMaterial);
    this.eeGroup.add(this.eeRig.group);
    setFingerGap(this.eeRig, 0.08);
    this.scene.add(this.eeGroup);

    const goalMaterial = new THREE.MeshBasicMaterial({
      color: GOAL_COLOR,
      wireframe: true,
    });
    this.goalGroup = new THREE.Group();
    this.goalRig = buildFingers(goalMaterial);
    this.goalGroup.add(this.goalRig.group);
    setFingerGap(this.goalRig, 0.08);
    this.scene.add(this.goalGroup);

    this.cursorMaterial = new THREE.MeshBasicMaterial({
      color: CURSOR_COLOR,
      transparent: true,
      opacity: 1,
      depthWrite: false,
    });
    this.cursor = new THREE.Mesh(
      new THREE.SphereGeometry(0.014, 20, 14),
      this.cursorMaterial,
    );
    this.scene.add(this.cursor);

    this.objectGroup = new THREE.Group();
    this.scene.add(this.objectGroup);
  }

  resize(width: number, height: number): void {
    this.renderer.setSize(width, height, false);
    this.camera.aspect = width / Math.max(height, 1);
    this.camera.updateProjectionMatrix();
  }

  /** Apply one frame's directives; called only when a new frame arrived. */
  applyFrame(d: RenderDirectives): void {
    this.eeGroup.position.set(...d.eePosition);
    this.eeGroup.setRotationFromQuaternion(toQuaternion(d.eeOrientation));
    setFingerGap(this.eeRig, d.fingerGap);
    setFingerGap(this.goalRig, d.goalGap);
    this.eeMaterial.color.setHex(d.eeTintRed ? EE_ALERT_COLOR : EE_COLOR);
    this.cursorMaterial.opacity = d.cursorOpacity;
    this.cursor.visible = d.cursorVisible;

    const highlighted = new Set(d.highlightedWalls);
    this.wallMaterials.forEach((material, index) => {
      if (highlighted.has(index)) {
        material.color.setHex(WALL_ALERT_COLOR);
        material.opacity = 0.35;
      } else {
        material.color.setHex(WALL_COLOR);
        material.opacity = 0.06;
      }
    });

    this.reconcileObjects(d.objects);
  }

  /** Place the hand cursor and the green goal fingers at the commanded pose. */
  setHandPose(position: Vec3, orientation: Quat): void {
    this.cursor.position.set(...position);
    this.goalGroup.position.set(...position);
    this.goalGroup.setRotationFromQuaternion(toQuaternion(orientation));
  }

  private reconcileObjects(objects: ObjectDirective[]): void {
    const seen = new Set<number>();
    for (const obj of objects) {
      seen.add(obj.key);
      let mesh = this.objectMeshes.get(obj.key);
      if (mesh === undefined) {
        mesh = new THREE.Mesh(
          new THREE.BoxGeometry(1, 1, 1),
          new THREE.MeshLambertMaterial(),
        );
        this.objectMeshes.set(obj.key, mesh);
        this.objectGroup.add(mesh);
      }
      mesh.position.set(...obj.position);
      mesh.setRotationFromQuaternion(toQuaternion(obj.orientation));
      mesh.scale.set(
        obj.halfExtents[0] * 2,
        obj.halfExtents[1] * 2,
        obj.halfExtents[2] * 2,
      );
      const material = mesh.material as THREE.MeshLambertMaterial;
      material.color.setRGB(obj.color[0], obj.color[1], obj.color[2]);
      material.transparent = obj.color[3] < 1;
      material.opacity = obj.color[3];
      material.emissive.setHex(obj.held ? HELD_GLOW : 0x000000);
    }
    for (const [key, mesh] of this.objectMeshes) {
      if (!seen.has(key)) {
        this.objectGroup.remove(mesh);
        mesh.geometry.dispose();
        (mesh.material as THREE.Material).dispose();
        this.objectMeshes.delete(key);
      }
    }
  }

  beginOrbit(x: number, y: number): void {
    this.orbitLast = { x, y };
  }

  orbitMove(x: number, y: number): void {
    if (this.orbitLast === null) {
      return;
    }
    const dx = x - this.orbitLast.x;
    const dy = y - this.orbitLast.y;
    this.orbitLast = { x, y };
    this.azimuth -= dx * 0.006;
    this.elevation = Math.min(
      Math.max(this.elevation + dy * 0.006, -1.35),
      1.35,
    );
    this.placeCamera();
  }

  endOrbit(): void {
    this.orbitLast = null;
  }

  get orbiting(): boolean {
    return this.orbitLast !== null;
  }

  zoomBy(factor: number): void {
    this.radius = Math.min(Math.max(this.radius * factor, 0.3), 8);
    this.placeCamera();
  }

  /** Camera basis in world coordinates, for remapping drag planes. */
  viewAxes(): { right: Vec3; up: Vec3; forward: Vec3 } {
    this.camera.updateMatrixWorld();
    const e = this.camera.matrixWorld.elements;
    const forward = new THREE.Vector3();
    this.camera.getWorldDirection(forward);
    return {
      right: [e[0], e[1], e[2]],
      up: [e[4], e[5], e[6]],
      forward: [forward.x, forward.y, forward.z],
    };
  }

  render(): void {
    this.renderer.render(this.scene, this.camera);
  }

  private placeCamera(): void {
    const ce = Math.cos(this.elevation);
    this.camera.position.set(
      this.orbitTarget.x + this.radius * ce * Math.cos(this.azimuth),
      this.orbitTarget.y + this.radius * ce * Math.sin(this.azimuth),
      this.orbitTarget.z + this.radius * Math.sin(this.elevation),
    );
    this.camera.lookAt(this.orbitTarget);
  }
}
