// Wire protocol shared with the simulator service: JSON text frames over a
// websocket. Every outbound message must pass validateClientMessage before
// it is sent; inbound text goes through parseServerFrame.

export interface PoseCommand {
  type: 'pose';
  x: number;
  y: number;
  yaw: number;
  grip: number;
}

export interface StartRecording {
  type: 'start_recording';
}

export interface StopRecording {
  type: 'stop_recording';
  save_as: string;
}

export interface ResetCommand {
  type: 'reset';
  dx: number;
  dy: number;
  dyaw: number;
}

export type ClientMessage = PoseCommand | StartRecording | StopRecording | ResetCommand;

export interface StateFrame {
  type: 'state';
  t: number;
  cmd: [number, number, number];
  actual: [number, number, number];
  wrench: [number, number, number];
  contacts: boolean[];
  recording: boolean;
}

export interface ErrorFrame {
  type: 'error';
  reason: string;
}

export interface SavedFrame {
  type: 'saved';
  path: string;
}

export type ServerFrame = StateFrame | ErrorFrame | SavedFrame;

function isFiniteNumber(v: unknown): v is number {
  return typeof v === 'number' && Number.isFinite(v);
}

/** Returns null when the message conforms to the schema, else a reason. */
export function validateClientMessage(msg: unknown): string | null {
  if (typeof msg !== 'object' || msg === null) {
    return 'message must be an object';
  }
  const m = msg as Record<string, unknown>;
  switch (m.type) {
    case 'pose': {
      for (const field of ['x', 'y', 'yaw'] as const) {
        if (!isFiniteNumber(m[field])) {
          return `pose.${field} must be a finite number`;
        }
      }
      if (!isFiniteNumber(m.grip) || m.grip < 0 || m.grip > 1) {
        return 'pose.grip must be a number in [0, 1]';
      }
      return null;
    }
    case 'start_recording':
      return null;
    case 'stop_recording':
      if (typeof m.save_as !== 'string' || m.save_as.length === 0) {
        return 'stop_recording.save_as must be a non-empty string';
      }
      return null;
    case 'reset': {
      for (const field of ['dx', 'dy', 'dyaw'] as const) {
        if (!isFiniteNumber(m[field])) {
          return `reset.${field} must be a finite number`;
        }
      }
      return null;
    }
    default:
      return `unknown message type ${String(m.type)}`;
  }
}

function isVec3(v: unknown): v is [number, number, number] {
  return Array.isArray(v) && v.length === 3 && v.every(isFiniteNumber);
}

export function parseServerFrame(text: string): ServerFrame {
  let obj: unknown;
  try {
    obj = JSON.parse(text);
  } catch {
    throw new Error('server frame is not valid JSON');
  }
  if (typeof obj !== 'object' || obj === null) {
    throw new Error('server frame must be an object');
  }
  const f = obj as Record<string, unknown>;
  switch (f.type) {
    case 'state': {
      if (!isFiniteNumber(f.t)) throw new Error('state.t missing');
      if (!isVec3(f.cmd) || !isVec3(f.actual) || !isVec3(f.wrench)) {
        throw new Error('state vectors malformed');
      }
      if (!Array.isArray(f.contacts) || !f.contacts.every((c) => typeof c === 'boolean')) {
        throw new Error('state.contacts malformed');
      }
      if (typeof f.recording !== 'boolean') throw new Error('state.recording missing');
      return f as unknown as StateFrame;
    }
    case 'error':
      if (typeof f.reason !== 'string') throw new Error('error.reason missing');
      return f as unknown as ErrorFrame;
    case 'saved':
      if (typeof f.path !== 'string') throw new Error('saved.path missing');
      return f as unknown as SavedFrame;
    default:
      throw new Error(`unknown server frame type ${String(f.type)}`);
  }
}
