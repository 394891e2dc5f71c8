/** DOM wiring for the studio page. All state transitions live in state.ts;
 * this file only reads controls, fires requests, and paints results. */

import { postReconstruct, ApiError } from "./api.js";
import { drawBars } from "./chart.js";
import { DINUCLEOTIDES, SLIDER_MAX, SLIDER_MIN, SLIDER_STEP, weightFromPosition } from "./sliders.js";
import { decodePgmBase64, grayToRgba } from "./pgm.js";
import {
  MAX_K,
  MIN_K,
  Mode,
  StudioState,
  availableModes,
  beginRequest,
  buildRequestBody,
  initialState,
  parseThetaUpload,
  recordFailure,
  recordResponse,
  replayBody,
  setK,
  setMode,
  setSlider,
  validate,
} from "./state.js";

const params = new URLSearchParams(location.search);
const API_BASE = params.get("api") ?? "";

let state: StudioState = initialState();

const el = <T extends HTMLElement>(id: string): T => {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
};

const kSelect = el<HTMLSelectElement>("k-select");
const nInput = el<HTMLInputElement>("n-input");
const seedInput = el<HTMLInputElement>("seed-input");
const modeTabs = el<HTMLDivElement>("mode-tabs");
const sliderPanel = el<HTMLDivElement>("slider-panel");
const uploadPanel = el<HTMLDivElement>("upload-panel");
const uploadInput = el<HTMLInputElement>("theta-file");
const generateButton = el<HTMLButtonElement>("generate");
const sampleButton = el<HTMLButtonElement>("sample-simplex");
const banner = el<HTMLDivElement>("banner");
const l1Badge = el<HTMLSpanElement>("l1-badge");
const statsLine = el<HTMLSpanElement>("stats-line");
const cgrCanvas = el<HTMLCanvasElement>("cgr-canvas");
const chartCanvas = el<HTMLCanvasElement>("theta-chart");
const chartWrap = el<HTMLDivElement>("chart-wrap");
const historyList = el<HTMLUListElement>("history");
const sequencePreview = el<HTMLPreElement>("sequence-preview");

function buildControls(): void {
  for (let k = MIN_K; k <= MAX_K; k++) {
    const option = document.createElement("option");
    option.value = String(k);
    option.textContent = `k = ${k}`;
    kSelect.appendChild(option);
  }
  DINUCLEOTIDES.forEach((word, i) => {
    const row = document.createElement("label");
    row.className = "slider-row";
    const name = document.createElement("span");
    name.textContent = word;
    const range = document.createElement("input");
    range.type = "range";
    range.min = String(SLIDER_MIN);
    range.max = String(SLIDER_MAX);
    range.step = String(SLIDER_STEP);
    range.value = String(state.sliderPositions[i]);
    range.dataset.index = String(i);
    const readout = document.createElement("span");
    readout.className = "weight";
    range.addEventListener("input", () => {
      state = setSlider(state, i, Number(range.value));
      readout.textContent = formatWeight(Number(range.value));
    });
    readout.textContent = formatWeight(state.sliderPositions[i]);
    row.append(name, range, readout);
    sliderPanel.appendChild(row);
  });
}

function formatWeight(position: number): string {
  const weight = weightFromPosition(position);
  return weight === 0 ? "0" : weight.toPrecision(3);
}

function syncControls(): void {
  kSelect.value = String(state.k);
  nInput.value = String(state.n);
  seedInput.value = String(state.seed);
  modeTabs.replaceChildren(
    ...availableModes(state.k).map((mode) => {
      const button = document.createElement("button");
      button.textContent = mode;
      button.className = mode === state.mode ? "tab active" : "tab";
      button.addEventListener("click", () => {
        state = setMode(state, mode);
        syncControls();
      });
      return button;
    })
  );
  sliderPanel.hidden = !(state.mode === "sliders" && state.k === 2);
  uploadPanel.hidden = state.mode !== "upload-theta";
  generateButton.disabled = state.inFlight;
  sampleButton.disabled = state.inFlight;
  banner.hidden = state.error === null;
  banner.textContent = state.error ?? "";
}

function paintResponse(): void {
  const response = state.lastResponse;
  if (!response) return;
  const image = decodePgmBase64(response.image);
  cgrCanvas.width = image.width;
  cgrCanvas.height = image.height;
  const ctx = cgrCanvas.getContext("2d");
  if (ctx) {
    const frame = ctx.createImageData(image.width, image.height);
    frame.data.set(grayToRgba(image));
    ctx.putImageData(frame, 0, 0);
  }
  l1Badge.textContent = `L1 = ${response.achievedL1.toPrecision(3)}`;
  l1Badge.className = response.achievedL1 <= 0.01 ? "badge good" : "badge warn";
  statsLine.textContent =
    `bound ${response.boundL1.toPrecision(3)}, artificial edges ${response.nArtificial}`;
  if (state.k <= 3) {
    chartWrap.hidden = false;
    drawBars(chartCanvas, response.thetaUsed, state.k);
  } else {
    chartWrap.hidden = true;
  }
  sequencePreview.textContent = response.sequence
    ? response.sequence.slice(0, 1000)
    : response.note ?? "";
}

function renderHistory(): void {
  historyList.replaceChildren(
    ...state.history.map((entry, index) => {
      const item = document.createElement("li");
      const button = document.createElement("button");
      button.textContent = `replay ${entry.label}`;
      button.addEventListener("click", () => void submit(replayBody(state, index), entry.label));
      item.appendChild(button);
      return item;
    })
  );
}

async function submit(body: string, label: string): Promise<void> {
  if (state.inFlight) return;
  state = beginRequest(state);
  syncControls();
  try {
    const response = await postReconstruct(API_BASE, body);
    state = recordResponse(state, body, label, response);
    paintResponse();
    renderHistory();
  } catch (error) {
    const message =
      error instanceof ApiError
        ? `${error.status} ${error.statusText}: ${error.message}`
        : `network failure, retry: ${String(error)}`;
    state = recordFailure(state, message);
  }
  syncControls();
}

function generate(): void {
  const invalid = validate(state);
  if (invalid) {
    state = recordFailure(state, invalid);
    syncControls();
    return;
  }
  void submit(buildRequestBody(state), `${state.mode} k=${state.k} n=${state.n}`);
}

function sampleFromSimplex(): void {
  state = setMode(state, "sample");
  syncControls();
  generate();
}

kSelect.addEventListener("change", () => {
  state = setK(state, Number(kSelect.value));
  syncControls();
});
nInput.addEventListener("change", () => {
  state = { ...state, n: Number(nInput.value) };
});
seedInput.addEventListener("change", () => {
  state = { ...state, seed: Number(seedInput.value) };
});
uploadInput.addEventListener("change", async () => {
  const file = uploadInput.files?.[0];
  if (!file) return;
  try {
    state = { ...state, uploadedTheta: parseThetaUpload(await file.text()), error: null };
  } catch (error) {
    state = recordFailure(state, String(error));
  }
  syncControls();
});
generateButton.addEventListener("click", generate);
sampleButton.addEventListener("click", sampleFromSimplex);

buildControls();
syncControls();
