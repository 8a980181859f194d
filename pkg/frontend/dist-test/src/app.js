// Browser entry point: wires the pointer/keyboard command source, the
// websocket client, and the canvas render loop together.
import { CommandSource } from './input.js';
import { SEND_INTERVAL_MS, TeleopClient } from './net.js';
import { DEFAULT_SCENE, render } from './view.js';
const canvas = document.getElementById('scene');
const ctx = canvas.getContext('2d');
const statusEl = document.getElementById('status');
const badgeEl = document.getElementById('recording-badge');
const toastEl = document.getElementById('toast');
const addressInput = document.getElementById('address');
const connectBtn = document.getElementById('connect');
const recordBtn = document.getElementById('record');
const stopBtn = document.getElementById('stop');
const resetBtn = document.getElementById('reset');
const vt = {
    pxPerMeter: 5000,
    originPx: { x: canvas.width / 2, y: canvas.height * 0.72 },
};
let scene = DEFAULT_SCENE;
let latest = null;
let toastTimer = null;
function toast(text) {
    toastEl.textContent = text;
    toastEl.classList.add('visible');
    if (toastTimer !== null)
        clearTimeout(toastTimer);
    toastTimer = setTimeout(() => toastEl.classList.remove('visible'), 4000);
}
const source = new CommandSource({
    xMin: -0.08, xMax: 0.08, yMin: -0.01, yMax: 0.12,
});
const client = new TeleopClient((address) => new WebSocket(address), {
    onStatus: (status) => {
        statusEl.textContent = status;
        statusEl.className = `status ${status}`;
    },
    onError: (reason) => toast(reason),
    onSaved: (path) => {
        toast(`saved ${path}`);
        badgeEl.classList.remove('on');
    },
});
async function loadSceneGeometry(httpBase) {
    try {
        const resp = await fetch(`${httpBase}/scene`);
        if (resp.ok) {
            scene = { ...scene, ...(await resp.json()) };
        }
    }
    catch {
        // keep defaults; rendering geometry only
    }
}
connectBtn.addEventListener('click', () => {
    const address = addressInput.value.trim();
    client.connect(address);
    const httpBase = address.replace(/^ws/, 'http').replace(/\/ws\/?$/, '');
    void loadSceneGeometry(httpBase);
});
canvas.addEventListener('pointermove', (ev) => {
    const rect = canvas.getBoundingClientRect();
    source.pointer(vt, ev.clientX - rect.left, ev.clientY - rect.top);
    client.sendPose(source.command());
});
canvas.addEventListener('wheel', (ev) => {
    ev.preventDefault();
    source.wheel(ev.deltaY);
    client.sendPose(source.command());
}, { passive: false });
window.addEventListener('keydown', (ev) => {
    if (ev.key === '[') {
        source.yawKey(1);
    }
    else if (ev.key === ']') {
        source.yawKey(-1);
    }
    else if (ev.key === ' ') {
        ev.preventDefault();
        source.toggleGrip();
    }
    else {
        return;
    }
    client.sendPose(source.command());
});
recordBtn.addEventListener('click', () => {
    client.sendNow({ type: 'start_recording' });
    badgeEl.classList.add('on');
});
stopBtn.addEventListener('click', () => {
    const name = window.prompt('save recording as', 'demo1');
    if (name) {
        client.sendNow({ type: 'stop_recording', save_as: name });
    }
});
resetBtn.addEventListener('click', () => {
    client.sendNow({ type: 'reset', dx: 0, dy: 0, dyaw: 0 });
});
function frameLoop() {
    const fresh = client.states.take();
    if (fresh !== null) {
        latest = fresh;
        badgeEl.classList.toggle('on', fresh.recording);
    }
    render(ctx, canvas.width, canvas.height, vt, scene, latest, { forceGain: 6 });
    requestAnimationFrame(frameLoop);
}
addressInput.value = `ws://${window.location.hostname || 'localhost'}:8800/ws`;
setInterval(() => {
    // keep-alive trickle so the held pose survives client-side hiccups; the
    // coalescer still caps the outbound rate
    if (client.status === 'connected') {
        client.sendPose(source.command());
    }
}, SEND_INTERVAL_MS * 10);
requestAnimationFrame(frameLoop);
