// Websocket session plumbing. Outbound pose commands are coalesced: the
// latest command is stored and a fixed-cadence flusher emits at most one
// message per tick (<= 100 Hz regardless of pointer event rate). Inbound
// state frames land in a latest-frame slot so the renderer only ever sees
// the newest one; stale frames are dropped, never interpolated.

import { ClientMessage, ServerFrame, StateFrame, parseServerFrame, validateClientMessage } from './protocol.js';

export const SEND_INTERVAL_MS = 10;

export class LatestFrameSlot<T> {
  private frame: T | null = null;

  set(frame: T): void {
    this.frame = frame;
  }

  /** Newest frame since the last take, or null. */
  take(): T | null {
    const f = this.frame;
    this.frame = null;
    return f;
  }

  peek(): T | null {
    return this.frame;
  }
}

export type ConnectionStatus = 'disconnected' | 'connecting' | 'connected';

// The subset of the WebSocket interface the client uses; event parameters
// are typed loosely so both the DOM WebSocket and test doubles satisfy it.
export interface SocketLike {
  onopen: ((ev: any) => any) | null;
  onclose: ((ev: any) => any) | null;
  onerror: ((ev: any) => any) | null;
  onmessage: ((ev: any) => any) | null;
  send(data: string): void;
  close(): void;
}

export interface TeleopCallbacks {
  onStatus?: (status: ConnectionStatus) => void;
  onError?: (reason: string) => void;
  onSaved?: (path: string) => void;
}

export class TeleopClient {
  readonly states = new LatestFrameSlot<StateFrame>();
  status: ConnectionStatus = 'disconnected';

  private socket: SocketLike | null = null;
  private pending: ClientMessage | null = null;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private socketFactory: (address: string) => SocketLike,
    private callbacks: TeleopCallbacks = {},
  ) {}

  connect(address: string): void {
    this.disconnect();
    this.setStatus('connecting');
    let socket: SocketLike;
    try {
      socket = this.socketFactory(address);
    } catch {
      this.setStatus('disconnected');
      return;
    }
    this.socket = socket;
    socket.onopen = () => {
      this.setStatus('connected');
      this.timer = setInterval(() => this.flushTick(), SEND_INTERVAL_MS);
    };
    socket.onclose = () => this.dropConnection();
    socket.onerror = () => this.dropConnection();
    socket.onmessage = (ev) => this.handleMessage(String(ev.data));
  }

  disconnect(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
    if (this.socket !== null) {
      const s = this.socket;
      this.socket = null;
      s.onclose = null;
      try {
        s.close();
      } catch {
        // already closed
      }
    }
    this.setStatus('disconnected');
  }

  /** Queue the latest pose; the flusher sends it on the next tick. */
  sendPose(cmd: ClientMessage): void {
    this.pending = cmd;
  }

  /** Control messages bypass coalescing but still validate. */
  sendNow(msg: ClientMessage): void {
    this.emit(msg);
  }

  /** One cadence tick: emit the coalesced command, if any. */
  flushTick(): void {
    if (this.pending !== null) {
      const msg = this.pending;
      this.pending = null;
      this.emit(msg);
    }
  }

  private emit(msg: ClientMessage): void {
    const problem = validateClientMessage(msg);
    if (problem !== null) {
      throw new Error(`refusing to send invalid frame: ${problem}`);
    }
    this.socket?.send(JSON.stringify(msg));
  }

  private handleMessage(text: string): void {
    let frame: ServerFrame;
    try {
      frame = parseServerFrame(text);
    } catch (err) {
      this.callbacks.onError?.(String(err));
      return;
    }
    if (frame.type === 'state') {
      this.states.set(frame);
    } else if (frame.type === 'error') {
      this.callbacks.onError?.(frame.reason);
    } else {
      this.callbacks.onSaved?.(frame.path);
    }
  }

  private dropConnection(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
    this.socket = null;
    this.setStatus('disconnected');
  }

  private setStatus(status: ConnectionStatus): void {
    this.status = status;
    this.callbacks.onStatus?.(status);
  }
}
