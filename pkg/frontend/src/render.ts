// Canvas drawing for the two-arm skeleton and hand-path overlays. All pose
// math comes from the server's per-sample joint solutions; this file only
// projects and draws.

import type { Camera } from "./projection.js";
import { project } from "./projection.js";
import type { ArmPoints, TrajectoryPayload } from "./types.js";

export const COLORS = {
  background: "#10141a",
  grid: "#2a3442",
  axisX: "#e05555",
  axisY: "#4caf6e",
  axisZ: "#4f7fd0",
  torso: "#5a6b80",
  armLeft: "#6fc2ff",
  armRight: "#ffb35c",
  collision: "#ff4242",
  pathA: "#6fc2ff",
  pathB: "#c792ea",
};

type Ctx = CanvasRenderingContext2D;

function line(ctx: Ctx, camera: Camera, a: [number, number, number], b: [number, number, number]) {
  const pa = project(camera, a);
  const pb = project(camera, b);
  ctx.beginPath();
  ctx.moveTo(pa.x, pa.y);
  ctx.lineTo(pb.x, pb.y);
  ctx.stroke();
}

function drawFrameAxes(ctx: Ctx, camera: Camera) {
  ctx.lineWidth = 1.5;
  ctx.strokeStyle = COLORS.axisX;
  line(ctx, camera, [0, 0, 0], [0.15, 0, 0]);
  ctx.strokeStyle = COLORS.axisY;
  line(ctx, camera, [0, 0, 0], [0, 0.15, 0]);
  ctx.strokeStyle = COLORS.axisZ;
  line(ctx, camera, [0, 0, 0], [0, 0, 0.15]);
}

function drawTorso(ctx: Ctx, camera: Camera) {
  ctx.strokeStyle = COLORS.torso;
  ctx.lineWidth = 10;
  ctx.lineCap = "round";
  line(ctx, camera, [0, 0, -0.5], [0, 0, 0.28]);
  ctx.lineWidth = 4;
  line(ctx, camera, [0, 0.2, 0.4], [0, -0.2, 0.4]); // shoulder girdle
  // head hint
  const head = project(camera, [0, 0, 0.55]);
  ctx.beginPath();
  ctx.arc(head.x, head.y, camera.zoom * 0.07, 0, Math.PI * 2);
  ctx.stroke();
}

function drawArm(
  ctx: Ctx,
  camera: Camera,
  points: ArmPoints,
  fingers: number[],
  color: string,
) {
  ctx.strokeStyle = color;
  ctx.lineCap = "round";
  ctx.lineWidth = 6;
  for (let i = 0; i + 1 < points.length; i++) {
    line(ctx, camera, points[i]!, points[i + 1]!);
  }
  const hand = project(camera, points[3]!);
  ctx.fillStyle = color;
  ctx.beginPath();
  ctx.arc(hand.x, hand.y, 5, 0, Math.PI * 2);
  ctx.fill();
  // finger aperture glyphs: five bars fanning from the hand point
  ctx.lineWidth = 2;
  for (let f = 0; f < 5; f++) {
    const aperture = fingers[f] ?? 0;
    const angle = -0.6 + f * 0.3;
    const length = 4 + aperture * 10;
    ctx.beginPath();
    ctx.moveTo(hand.x, hand.y);
    ctx.lineTo(hand.x + Math.cos(angle) * length, hand.y - Math.sin(angle) * length - 6);
    ctx.stroke();
  }
}

export interface FrameOptions {
  collision: boolean;
}

/** Draw one trajectory sample onto the canvas. */
export function drawSample(
  ctx: Ctx,
  camera: Camera,
  payload: TrajectoryPayload,
  index: number,
  options: FrameOptions,
): void {
  const canvas = ctx.canvas;
  ctx.fillStyle = COLORS.background;
  ctx.fillRect(0, 0, canvas.width, canvas.height);
  drawFrameAxes(ctx, camera);
  drawTorso(ctx, camera);

  const sample = payload.samples[index];
  if (!sample) return;
  const leftFingers = sample.slice(6, 11);
  const rightFingers = sample.slice(17, 22);
  const left = payload.joints.left[index];
  const right = payload.joints.right[index];
  const leftColor = options.collision ? COLORS.collision : COLORS.armLeft;
  const rightColor = options.collision ? COLORS.collision : COLORS.armRight;
  if (left) drawArm(ctx, camera, left, leftFingers, leftColor);
  if (right) drawArm(ctx, camera, right, rightFingers, rightColor);

  if (options.collision) {
    ctx.fillStyle = COLORS.collision;
    ctx.font = "bold 13px system-ui";
    ctx.fillText("self-collision", 12, 20);
  }
}

/** Overlay the hand paths of one trajectory (used by the compare view). */
export function drawHandPaths(
  ctx: Ctx,
  camera: Camera,
  payload: TrajectoryPayload,
  color: string,
): void {
  ctx.strokeStyle = color;
  ctx.lineWidth = 1.5;
  for (const offset of [0, 11]) {
    ctx.beginPath();
    payload.samples.forEach((sample, i) => {
      const p = project(camera, [
        sample[offset + 0]!,
        sample[offset + 1]!,
        sample[offset + 2]!,
      ]);
      if (i === 0) ctx.moveTo(p.x, p.y);
      else ctx.lineTo(p.x, p.y);
    });
    ctx.stroke();
  }
}
