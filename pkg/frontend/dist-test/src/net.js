// Websocket session plumbing. Outbound pose commands are coalesced: the
// latest command is stored and a fixed-cadence flusher emits at most one
// message per tick (<= 100 Hz regardless of pointer event rate). Inbound
// state frames land in a latest-frame slot so the renderer only ever sees
// the newest one; stale frames are dropped, never interpolated.
import { parseServerFrame, validateClientMessage } from './protocol.js';
export const SEND_INTERVAL_MS = 10;
export class LatestFrameSlot {
    constructor() {
        this.frame = null;
    }
    set(frame) {
        this.frame = frame;
    }
    /** Newest frame since the last take, or null. */
    take() {
        const f = this.frame;
        this.frame = null;
        return f;
    }
    peek() {
        return this.frame;
    }
}
export class TeleopClient {
    constructor(socketFactory, callbacks = {}) {
        this.socketFactory = socketFactory;
        this.callbacks = callbacks;
        this.states = new LatestFrameSlot();
        this.status = 'disconnected';
        this.socket = null;
        this.pending = null;
        this.timer = null;
    }
    connect(address) {
        this.disconnect();
        this.setStatus('connecting');
        let socket;
        try {
            socket = this.socketFactory(address);
        }
        catch {
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
    disconnect() {
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
            }
            catch {
                // already closed
            }
        }
        this.setStatus('disconnected');
    }
    /** Queue the latest pose; the flusher sends it on the next tick. */
    sendPose(cmd) {
        this.pending = cmd;
    }
    /** Control messages bypass coalescing but still validate. */
    sendNow(msg) {
        this.emit(msg);
    }
    /** One cadence tick: emit the coalesced command, if any. */
    flushTick() {
        if (this.pending !== null) {
            const msg = this.pending;
            this.pending = null;
            this.emit(msg);
        }
    }
    emit(msg) {
        const problem = validateClientMessage(msg);
        if (problem !== null) {
            throw new Error(`refusing to send invalid frame: ${problem}`);
        }
        this.socket?.send(JSON.stringify(msg));
    }
    handleMessage(text) {
        let frame;
        try {
            frame = parseServerFrame(text);
        }
        catch (err) {
            this.callbacks.onError?.(String(err));
            return;
        }
        if (frame.type === 'state') {
            this.states.set(frame);
        }
        else if (frame.type === 'error') {
            this.callbacks.onError?.(frame.reason);
        }
        else {
            this.callbacks.onSaved?.(frame.path);
        }
    }
    dropConnection() {
        if (this.timer !== null) {
            clearInterval(this.timer);
            this.timer = null;
        }
        this.socket = null;
        this.setStatus('disconnected');
    }
    setStatus(status) {
        this.status = status;
        this.callbacks.onStatus?.(status);
    }
}
