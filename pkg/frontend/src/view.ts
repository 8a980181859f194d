// Canvas rendering of the remote scene: socket cross-section, plug at the
// measured pose, ghost outline at the commanded pose, measured wrench as an
// arrow, contact highlights. Renders only the frame it is given.

import { ViewTransform, worldToCanvas } from './input.js';
import { StateFrame } from './protocol.js';

export interface SceneGeometry {
  slot_width: number;
  socket_depth: number;
  chamfer_width: number;
  chamfer_angle: number;
  plug_width: number;
  plug_length: number;
  wall_extent: number;
}

export const DEFAULT_SCENE: SceneGeometry = {
  slot_width: 0.02,
  socket_depth: 0.03,
  chamfer_width: 0.003,
  chamfer_angle: Math.PI / 4,
  plug_width: 0.018,
  plug_length: 0.03,
  wall_extent: 0.04,
};

export interface RenderOptions {
  forceGain: number; // px per newton
}

function plugCornersPx(
  vt: ViewTransform, scene: SceneGeometry,
  pose: [number, number, number],
): { x: number; y: number }[] {
  const [px, py, yaw] = pose;
  const c = Math.cos(yaw);
  const s = Math.sin(yaw);
  const w2 = scene.plug_width / 2;
  const L = scene.plug_length;
  const body: [number, number][] = [[-w2, 0], [w2, 0], [w2, -L], [-w2, -L]];
  return body.map(([bx, by]) =>
    worldToCanvas(vt, px + c * bx - s * by, py + s * bx + c * by));
}

function tracePolygon(ctx: CanvasRenderingContext2D, pts: { x: number; y: number }[]): void {
  ctx.beginPath();
  ctx.moveTo(pts[0].x, pts[0].y);
  for (const p of pts.slice(1)) {
    ctx.lineTo(p.x, p.y);
  }
  ctx.closePath();
}

export function drawScene(
  ctx: CanvasRenderingContext2D, vt: ViewTransform, scene: SceneGeometry,
  bodyContact: boolean,
): void {
  const sh = scene.slot_width / 2;
  const oh = sh + scene.chamfer_width;
  const chd = scene.chamfer_width * Math.tan(scene.chamfer_angle);
  const ext = oh + scene.wall_extent;
  const floor = -scene.socket_depth;
  const base = floor - 0.008;

  ctx.fillStyle = bodyContact ? '#a04040' : '#4a4a55';
  for (const side of [-1, 1]) {
    const outline: [number, number][] = [
      [side * ext, 0],
      [side * oh, 0],
      [side * sh, -chd],
      [side * sh, floor],
      [side * ext, floor],
    ];
    tracePolygon(ctx, outline.map(([x, y]) => worldToCanvas(vt, x, y)));
    ctx.fill();
  }
  // slot floor slab
  tracePolygon(ctx, ([[-ext, floor], [ext, floor], [ext, base], [-ext, base]] as
    [number, number][]).map(([x, y]) => worldToCanvas(vt, x, y)));
  ctx.fill();
}

export function drawPlug(
  ctx: CanvasRenderingContext2D, vt: ViewTransform, scene: SceneGeometry,
  frame: StateFrame, opts: RenderOptions,
): void {
  // ghost at the commanded pose
  ctx.strokeStyle = 'rgba(120, 180, 255, 0.8)';
  ctx.setLineDash([5, 4]);
  ctx.lineWidth = 1.5;
  tracePolygon(ctx, plugCornersPx(vt, scene, frame.cmd));
  ctx.stroke();
  ctx.setLineDash([]);

  // body at the measured pose
  const corners = plugCornersPx(vt, scene, frame.actual);
  ctx.fillStyle = '#d8a040';
  tracePolygon(ctx, corners);
  ctx.fill();
  ctx.strokeStyle = '#7a5a20';
  ctx.lineWidth = 1;
  ctx.stroke();

  // contact highlights per corner (first four flags), body flag handled by
  // drawScene's tint
  for (let i = 0; i < Math.min(4, frame.contacts.length); i++) {
    if (frame.contacts[i]) {
      ctx.beginPath();
      ctx.arc(corners[i].x, corners[i].y, 5, 0, 2 * Math.PI);
      ctx.strokeStyle = '#ff5050';
      ctx.lineWidth = 2;
      ctx.stroke();
    }
  }

  // measured wrench as an arrow from the end-effector point
  const [fx, fy] = frame.wrench;
  const mag = Math.hypot(fx, fy);
  if (mag > 1e-6) {
    const ee = worldToCanvas(vt, frame.actual[0], frame.actual[1]);
    const tipX = ee.x + fx * opts.forceGain;
    const tipY = ee.y - fy * opts.forceGain;
    ctx.beginPath();
    ctx.moveTo(ee.x, ee.y);
    ctx.lineTo(tipX, tipY);
    ctx.strokeStyle = '#30d060';
    ctx.lineWidth = 2.5;
    ctx.stroke();
    const angle = Math.atan2(tipY - ee.y, tipX - ee.x);
    ctx.beginPath();
    ctx.moveTo(tipX, tipY);
    ctx.lineTo(tipX - 9 * Math.cos(angle - 0.45), tipY - 9 * Math.sin(angle - 0.45));
    ctx.lineTo(tipX - 9 * Math.cos(angle + 0.45), tipY - 9 * Math.sin(angle + 0.45));
    ctx.closePath();
    ctx.fillStyle = '#30d060';
    ctx.fill();
  }
}

export function render(
  ctx: CanvasRenderingContext2D, width: number, height: number,
  vt: ViewTransform, scene: SceneGeometry, frame: StateFrame | null,
  opts: RenderOptions,
): void {
  ctx.fillStyle = '#15151c';
  ctx.fillRect(0, 0, width, height);
  const body = frame !== null && frame.contacts.length > 4 && frame.contacts[4];
  drawScene(ctx, vt, scene, body);
  if (frame !== null) {
    drawPlug(ctx, vt, scene, frame, opts);
  }
}
