import assert from 'node:assert/strict';
import { test } from 'node:test';

import { CommandSource, ViewTransform, YAW_STEP, canvasToWorld, worldToCanvas } from '../src/input.js';

const vt: ViewTransform = { pxPerMeter: 1000, originPx: { x: 400, y: 500 } };

test('canvas/world transforms are inverse of each other', () => {
  for (const [px, py] of [[0, 0], [400, 500], [123, 456], [899, 7]]) {
    const w = canvasToWorld(vt, px, py);
    const back = worldToCanvas(vt, w.x, w.y);
    assert.ok(Math.abs(back.x - px) < 1e-9);
    assert.ok(Math.abs(back.y - py) < 1e-9);
  }
});

test('pointer at the canvas point for world (0.1, 0.2) emits that pose', () => {
  const source = new CommandSource({ xMin: -1, xMax: 1, yMin: -1, yMax: 1 });
  const px = worldToCanvas(vt, 0.1, 0.2);
  source.pointer(vt, px.x, px.y);
  const cmd = source.command();
  assert.equal(cmd.type, 'pose');
  assert.equal(cmd.x, 0.1);
  assert.equal(cmd.y, 0.2);
});

test('one scroll tick changes yaw by exactly the step', () => {
  const source = new CommandSource({ xMin: -1, xMax: 1, yMin: -1, yMax: 1 });
  source.wheel(-53);
  assert.equal(source.command().yaw, YAW_STEP);
  source.wheel(97);
  assert.equal(source.command().yaw, 0);
});

test('bracket keys step yaw', () => {
  const source = new CommandSource({ xMin: -1, xMax: 1, yMin: -1, yMax: 1 });
  source.yawKey(1);
  source.yawKey(1);
  source.yawKey(-1);
  assert.ok(Math.abs(source.command().yaw - YAW_STEP) < 1e-15);
});

test('pointer outside the canvas clamps to scene bounds', () => {
  const bounds = { xMin: -0.08, xMax: 0.08, yMin: -0.01, yMax: 0.12 };
  const source = new CommandSource(bounds);
  source.pointer(vt, -5000, -5000); // far up-left: x very negative, y very positive
  let cmd = source.command();
  assert.equal(cmd.x, bounds.xMin);
  assert.equal(cmd.y, bounds.yMax);
  source.pointer(vt, 5000, 5000);
  cmd = source.command();
  assert.equal(cmd.x, bounds.xMax);
  assert.equal(cmd.y, bounds.yMin);
});

test('grip toggles between held and released', () => {
  const source = new CommandSource({ xMin: -1, xMax: 1, yMin: -1, yMax: 1 });
  assert.equal(source.command().grip, 1);
  source.toggleGrip();
  assert.equal(source.command().grip, 0);
  source.toggleGrip();
  assert.equal(source.command().grip, 1);
});
