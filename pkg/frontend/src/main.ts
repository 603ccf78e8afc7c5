/** App wiring: field picker, zoomable map canvas, tag buttons, and the
 * live field-statistics readout. */

import { ApiClient } from './api.js';
import { hitTest, renderMap } from './render.js';
import { CurationSession, fitScale, unproject } from './state.js';
import { similarTerms } from './synonym.js';
import type { ColorMode, CurationTag, MapPayload, Viewport } from './types.js';

const api = new ApiClient();

interface AppState {
  field: string | null;
  session: CurationSession | null;
  viewport: Viewport;
  colorMode: ColorMode;
  selectedId: number | null;
  scale: number;
  offline: boolean;
}

const state: AppState = {
  field: null,
  session: null,
  viewport: { centerX: 0, centerY: 0, zoom: 1 },
  colorMode: 'impact',
  selectedId: null,
  scale: 1,
  offline: false,
};

const canvas = document.getElementById('map') as HTMLCanvasElement;
const ctx = canvas.getContext('2d')!;
const fieldSelect = document.getElementById('field') as HTMLSelectElement;
const modeButton = document.getElementById('mode') as HTMLButtonElement;
const statsBox = document.getElementById('stats') as HTMLElement;
const termBox = document.getElementById('term') as HTMLElement;
const synonymBox = document.getElementById('synonyms') as HTMLElement;
const pendingBox = document.getElementById('pending') as HTMLElement;

function resize(): void {
  canvas.width = canvas.clientWidth;
  canvas.height = canvas.clientHeight;
  draw();
}

function draw(): void {
  if (!state.session) return;
  renderMap(ctx, state.session.terms(), {
    width: canvas.width,
    height: canvas.height,
    viewport: state.viewport,
    colorMode: state.colorMode,
    fitScale: state.scale,
    selectedId: state.selectedId,
  });
  renderStats();
  renderPending();
}

function renderStats(): void {
  if (!state.session) return;
  const s = state.session.stats();
  statsBox.innerHTML =
    `<b>${state.field}</b><br>` +
    `terms: ${s.total}<br>` +
    `EPS-related: ${s.eps} (${s.epsPercent}%)<br>` +
    `not EPS: ${s.notEps}<br>` +
    `untagged: ${s.untagged}`;
}

function renderPending(): void {
  const n = state.session?.pendingCount ?? 0;
  pendingBox.textContent = n > 0 ? `${n} tag(s) pending...` : '';
}

function renderTermPanel(): void {
  if (!state.session || state.selectedId === null) {
    termBox.innerHTML = '<i>Click a term to inspect and tag it.</i>';
    synonymBox.innerHTML = '';
    return;
  }
  const term = state.session.terms().find((t) => t.id === state.selectedId);
  if (!term) return;
  termBox.innerHTML =
    `<b>${term.label}</b><br>` +
    `occurrences: ${term.weight}<br>` +
    `impact score: ${term.impact.toFixed(2)}<br>` +
    `tag: ${term.tag}${term.pending ? ' (pending)' : ''}`;
  const similar = similarTerms(term, state.session.terms());
  synonymBox.innerHTML = similar.length
    ? '<b>Possible synonyms</b><br>' + similar.map((s) => s.label).join('<br>')
    : '';
}

async function loadField(field: string): Promise<void> {
  const payload: MapPayload = await api.getMap(field);
  state.field = field;
  state.selectedId = null;
  state.viewport = { centerX: 0, centerY: 0, zoom: 1 };
  state.scale = fitScale(payload.terms, canvas.width, canvas.height);
  state.session = new CurationSession(payload, async (decision) => {
    await api.putTag(field, decision);
  });
  state.session.onChange = () => {
    draw();
    renderTermPanel();
  };
  draw();
  renderTermPanel();
}

function setupTagButtons(): void {
  for (const tag of ['EPS', 'NOT_EPS', 'UNTAGGED'] as CurationTag[]) {
    const button = document.getElementById(`tag-${tag}`) as HTMLButtonElement;
    button.addEventListener('click', () => {
      if (state.session && state.selectedId !== null) {
        state.session.tag(state.selectedId, tag);
      }
    });
  }
}

function setupCanvas(): void {
  canvas.addEventListener('wheel', (event) => {
    event.preventDefault();
    const factor = event.deltaY < 0 ? 1.2 : 1 / 1.2;
    const [wx, wy] = unproject(event.offsetX, event.offsetY, state.viewport,
      canvas.width, canvas.height, state.scale);
    const zoom = Math.min(64, Math.max(1, state.viewport.zoom * factor));
    // keep the cursor's map point fixed while zooming
    const ratio = state.viewport.zoom / zoom;
    state.viewport = {
      zoom,
      centerX: wx - (wx - state.viewport.centerX) * ratio,
      centerY: wy - (wy - state.viewport.centerY) * ratio,
    };
    draw();
  });

  let dragging = false;
  let last: [number, number] = [0, 0];
  canvas.addEventListener('mousedown', (event) => {
    dragging = true;
    last = [event.offsetX, event.offsetY];
  });
  canvas.addEventListener('mousemove', (event) => {
    if (!dragging) return;
    const scale = state.scale * state.viewport.zoom;
    state.viewport.centerX -= (event.offsetX - last[0]) / scale;
    state.viewport.centerY -= (event.offsetY - last[1]) / scale;
    last = [event.offsetX, event.offsetY];
    draw();
  });
  window.addEventListener('mouseup', () => {
    dragging = false;
  });

  canvas.addEventListener('click', (event) => {
    if (!state.session) return;
    const hit = hitTest(state.session.terms(), event.offsetX, event.offsetY, {
      width: canvas.width,
      height: canvas.height,
      viewport: state.viewport,
      colorMode: state.colorMode,
      fitScale: state.scale,
      selectedId: state.selectedId,
    });
    state.selectedId = hit ? hit.id : null;
    draw();
    renderTermPanel();
  });
}

async function start(): Promise<void> {
  setupTagButtons();
  setupCanvas();
  modeButton.addEventListener('click', () => {
    state.colorMode = state.colorMode === 'impact' ? 'curation' : 'impact';
    modeButton.textContent = `color: ${state.colorMode}`;
    draw();
  });
  window.addEventListener('resize', resize);

  const { fields } = await api.listFields();
  fieldSelect.innerHTML = fields.map((f) => `<option value="${f}">${f}</option>`).join('');
  fieldSelect.addEventListener('change', () => void loadField(fieldSelect.value));
  resize();
  if (fields.length > 0) await loadField(fields[0]);
  else statsBox.textContent = 'No term maps found; run the termmap command first.';
}

void start();
