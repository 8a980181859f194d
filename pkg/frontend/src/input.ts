// Pointer / wheel / keyboard to pose-command mapping. The view transform is
// a fixed scale with world y up; yaw moves in discrete 0.02 rad steps; grip
// toggles between 0 and 1. Commands are clamped to the scene bounds so a
// pointer leaving the canvas cannot drive the simulator away.

import { PoseCommand } from './protocol.js';

export const YAW_STEP = 0.02;

export interface ViewTransform {
  pxPerMeter: number;
  originPx: { x: number; y: number }; // canvas pixel of world (0, 0)
}

export interface WorldBounds {
  xMin: number;
  xMax: number;
  yMin: number;
  yMax: number;
}

export function canvasToWorld(vt: ViewTransform, px: number, py: number): { x: number; y: number } {
  return {
    x: (px - vt.originPx.x) / vt.pxPerMeter,
    y: (vt.originPx.y - py) / vt.pxPerMeter,
  };
}

export function worldToCanvas(vt: ViewTransform, x: number, y: number): { x: number; y: number } {
  return {
    x: vt.originPx.x + x * vt.pxPerMeter,
    y: vt.originPx.y - y * vt.pxPerMeter,
  };
}

const clamp = (v: number, lo: number, hi: number) => Math.min(hi, Math.max(lo, v));

export class CommandSource {
  private x = 0;
  private y = 0;
  private yaw = 0;
  private grip = 1;

  constructor(private bounds: WorldBounds) {}

  setPose(x: number, y: number, yaw: number): void {
    this.x = x;
    this.y = y;
    this.yaw = yaw;
  }

  pointer(vt: ViewTransform, px: number, py: number): void {
    const w = canvasToWorld(vt, px, py);
    this.x = w.x;
    this.y = w.y;
  }

  /** One wheel tick adjusts yaw by exactly YAW_STEP. */
  wheel(deltaY: number): void {
    if (deltaY !== 0) {
      this.yaw += deltaY < 0 ? YAW_STEP : -YAW_STEP;
    }
  }

  yawKey(direction: 1 | -1): void {
    this.yaw += direction * YAW_STEP;
  }

  toggleGrip(): void {
    this.grip = this.grip > 0.5 ? 0 : 1;
  }

  command(): PoseCommand {
    return {
      type: 'pose',
      x: clamp(this.x, this.bounds.xMin, this.bounds.xMax),
      y: clamp(this.y, this.bounds.yMin, this.bounds.yMax),
      yaw: this.yaw,
      grip: this.grip,
    };
  }
}
