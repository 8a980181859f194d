// Pointer / wheel / keyboard to pose-command mapping. The view transform is
// a fixed scale with world y up; yaw moves in discrete 0.02 rad steps; grip
// toggles between 0 and 1. Commands are clamped to the scene bounds so a
// pointer leaving the canvas cannot drive the simulator away.
export const YAW_STEP = 0.02;
export function canvasToWorld(vt, px, py) {
    return {
        x: (px - vt.originPx.x) / vt.pxPerMeter,
        y: (vt.originPx.y - py) / vt.pxPerMeter,
    };
}
export function worldToCanvas(vt, x, y) {
    return {
        x: vt.originPx.x + x * vt.pxPerMeter,
        y: vt.originPx.y - y * vt.pxPerMeter,
    };
}
const clamp = (v, lo, hi) => Math.min(hi, Math.max(lo, v));
export class CommandSource {
    constructor(bounds) {
        this.bounds = bounds;
        this.x = 0;
        this.y = 0;
        this.yaw = 0;
        this.grip = 1;
    }
    setPose(x, y, yaw) {
        this.x = x;
        this.y = y;
        this.yaw = yaw;
    }
    pointer(vt, px, py) {
        const w = canvasToWorld(vt, px, py);
        this.x = w.x;
        this.y = w.y;
    }
    /** One wheel tick adjusts yaw by exactly YAW_STEP. */
    wheel(deltaY) {
        if (deltaY !== 0) {
            this.yaw += deltaY < 0 ? YAW_STEP : -YAW_STEP;
        }
    }
    yawKey(direction) {
        this.yaw += direction * YAW_STEP;
    }
    toggleGrip() {
        this.grip = this.grip > 0.5 ? 0 : 1;
    }
    command() {
        return {
            type: 'pose',
            x: clamp(this.x, this.bounds.xMin, this.bounds.xMax),
            y: clamp(this.y, this.bounds.yMin, this.bounds.yMax),
            yaw: this.yaw,
            grip: this.grip,
        };
    }
}
