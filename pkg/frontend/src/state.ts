/** Studio state and transitions.
 *
 * The state is a plain immutable object; every transition returns a new one.
 * Request bodies are serialized once and stored verbatim in the bounded
 * history, so a replay reissues byte-identical bytes.
 */

import { SLIDER_DEFAULT, weightsFromPositions } from "./sliders.js";

export type Mode = "sliders" | "sample" | "upload-theta";

export const MIN_K = 2;
export const MAX_K = 6;
export const MAX_N = 2_000_000;
export const IMAGE_RESOLUTION = 8; // 256 x 256, the service's studio default
export const HISTORY_LIMIT = 10;
export const DEFAULT_SAMPLE_ITERATIONS = 1000;

export interface ReconstructResponse {
  sequence?: string;
  note?: string;
  empiricalTheta: number[];
  achievedL1: number;
  boundL1: number;
  nArtificial: number;
  image: string;
  thetaUsed: number[];
}

export interface HistoryEntry {
  /** Exact serialized request body; replay sends these bytes unchanged. */
  body: string;
  label: string;
}

export interface StudioState {
  k: number;
  n: number;
  seed: number;
  mode: Mode;
  sliderPositions: readonly number[];
  uploadedTheta: readonly number[] | null;
  lastResponse: ReconstructResponse | null;
  history: readonly HistoryEntry[];
  inFlight: boolean;
  error: string | null;
}

export function initialState(): StudioState {
  return {
    k: 2,
    n: 3201,
    seed: 42,
    mode: "sliders",
    sliderPositions: Array(16).fill(SLIDER_DEFAULT),
    uploadedTheta: null,
    lastResponse: null,
    history: [],
    inFlight: false,
    error: null,
  };
}

/** Sliders exist only for k=2; higher orders offer sampling or file upload. */
export function availableModes(k: number): Mode[] {
  return k === 2 ? ["sliders", "sample", "upload-theta"] : ["sample", "upload-theta"];
}

export function setK(state: StudioState, k: number): StudioState {
  if (!Number.isInteger(k) || k < MIN_K || k > MAX_K) return state;
  const modes = availableModes(k);
  const mode = modes.includes(state.mode) ? state.mode : modes[0];
  return { ...state, k, mode, uploadedTheta: null };
}

export function setMode(state: StudioState, mode: Mode): StudioState {
  if (!availableModes(state.k).includes(mode)) return state;
  return { ...state, mode };
}

export function setSlider(state: StudioState, index: number, position: number): StudioState {
  const sliderPositions = state.sliderPositions.slice();
  sliderPositions[index] = position;
  return { ...state, sliderPositions };
}

export function validate(state: StudioState): string | null {
  if (!Number.isInteger(state.n) || state.n <= state.k) {
    return `length n must be an integer greater than k=${state.k}`;
  }
  if (state.n > MAX_N) return `length n must not exceed ${MAX_N}`;
  if (!Number.isInteger(state.seed)) return "seed must be an integer";
  if (state.mode === "upload-theta") {
    const expected = 4 ** state.k;
    if (!state.uploadedTheta) return "no theta file loaded";
    if (state.uploadedTheta.length !== expected) {
      return `uploaded theta has ${state.uploadedTheta.length} components, expected ${expected}`;
    }
  }
  return null;
}

/** Serialize the reconstruction request for the current state. Key order is
 * fixed by construction, so identical states produce identical bytes. */
export function buildRequestBody(state: StudioState): string {
  const invalid = validate(state);
  if (invalid) throw new Error(invalid);
  if (state.mode === "sliders") {
    return JSON.stringify({
      k: state.k,
      n: state.n,
      resolution: IMAGE_RESOLUTION,
      sliders: weightsFromPositions(state.sliderPositions),
    });
  }
  if (state.mode === "sample") {
    return JSON.stringify({
      k: state.k,
      n: state.n,
      resolution: IMAGE_RESOLUTION,
      sample: { iterations: DEFAULT_SAMPLE_ITERATIONS, seed: state.seed },
    });
  }
  return JSON.stringify({
    k: state.k,
    n: state.n,
    resolution: IMAGE_RESOLUTION,
    theta: state.uploadedTheta,
  });
}

export function beginRequest(state: StudioState): StudioState {
  return { ...state, inFlight: true, error: null };
}

export function recordResponse(
  state: StudioState,
  body: string,
  label: string,
  response: ReconstructResponse
): StudioState {
  const history = [...state.history, { body, label }].slice(-HISTORY_LIMIT);
  return { ...state, inFlight: false, error: null, lastResponse: response, history };
}

export function recordFailure(state: StudioState, message: string): StudioState {
  return { ...state, inFlight: false, error: message };
}

export function replayBody(state: StudioState, index: number): string {
  const entry = state.history[index];
  if (!entry) throw new Error(`no history entry ${index}`);
  return entry.body;
}

/** Parse an uploaded theta file: either a JSON array or the `kmer,theta` CSV
 * the CLI emits. Values are passed through untouched (no client-side
 * normalization). */
export function parseThetaUpload(text: string): number[] {
  const trimmed = text.trim();
  if (trimmed.startsWith("[")) {
    const parsed = JSON.parse(trimmed);
    if (!Array.isArray(parsed) || parsed.some((v) => typeof v !== "number")) {
      throw new Error("JSON theta must be an array of numbers");
    }
    return parsed;
  }
  const lines = trimmed.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines[0] !== "kmer,theta") throw new Error("expected 'kmer,theta' header");
  return lines.slice(1).map((line) => {
    const value = Number(line.split(",")[1]);
    if (!Number.isFinite(value)) throw new Error(`bad theta row: ${line}`);
    return value;
  });
}
