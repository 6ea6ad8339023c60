// Pure console state. Everything the view shows is a function of received
// frames plus local form input, so reloading mid-session rebuilds the same
// picture from /state and /regions alone.

import type { Box, Frame, Plan, Regions, TargetBody } from "./api.js";

// Commands are disabled once the stream has been quiet this long: never
// command against stale state.
export const STALE_AFTER_MS = 1000;

const MAX_EVENTS = 30;

export interface TargetForm {
  roll: string;
  pitch: string;
  splitMode: "auto" | "manual";
  lat: string;
  thor: string;
}

export interface FormErrors {
  roll?: string;
  pitch?: string;
  split?: string;
}

export interface ConsoleState {
  connected: boolean;
  frame: Frame | null;
  lastFrameAtMs: number | null;
  regions: Regions | null;
  form: TargetForm;
  formErrors: FormErrors;
  selectedViews: string[];
  subject: string | null;
  pendingPlan: Plan | null;
  events: string[];
}

export function initialState(): ConsoleState {
  return {
    connected: false,
    frame: null,
    lastFrameAtMs: null,
    regions: null,
    form: { roll: "", pitch: "", splitMode: "auto", lat: "", thor: "" },
    formErrors: {},
    selectedViews: [],
    subject: null,
    pendingPlan: null,
    events: [],
  };
}

export function isStale(state: ConsoleState, nowMs: number): boolean {
  return state.lastFrameAtMs === null || nowMs - state.lastFrameAtMs > STALE_AFTER_MS;
}

export function commandsEnabled(state: ConsoleState, nowMs: number): boolean {
  return state.connected && !isStale(state, nowMs);
}

export function applyFrame(state: ConsoleState, frame: Frame, atMs: number): ConsoleState {
  return { ...state, frame, lastFrameAtMs: atMs, connected: true };
}

export function disconnected(state: ConsoleState, reason: string): ConsoleState {
  return pushEvent({ ...state, connected: false }, `stream lost: ${reason}`);
}

export function pushEvent(state: ConsoleState, text: string): ConsoleState {
  return { ...state, events: [text, ...state.events].slice(0, MAX_EVENTS) };
}

function parseAngle(raw: string, what: string, limits: [number, number]): [number | null, string | null] {
  const value = Number(raw.trim());
  if (raw.trim() === "" || !Number.isFinite(value)) {
    return [null, `${what} must be a number`];
  }
  const [lo, hi] = limits;
  if (value < lo || value > hi) {
    return [null, `${what} must be within ${lo} to ${hi} deg`];
  }
  return [value, null];
}

// Client-side gate using the same bounds the service publishes. Nothing is
// sent unless this returns a body.
export function validateTarget(
  form: TargetForm,
  regions: Regions | null,
): { body: TargetBody | null; errors: FormErrors } {
  if (!regions) {
    return { body: null, errors: { roll: "limits not loaded yet" } };
  }
  const errors: FormErrors = {};
  const [roll, rollErr] = parseAngle(form.roll, "roll", regions.limits.roll_deg);
  if (rollErr) errors.roll = rollErr;
  const [pitch, pitchErr] = parseAngle(form.pitch, "pitch", regions.limits.pitch_deg);
  if (pitchErr) errors.pitch = pitchErr;

  let split: TargetBody["split"] = "auto";
  if (form.splitMode === "manual") {
    const lat = Number(form.lat.trim());
    const thor = Number(form.thor.trim());
    if (!Number.isFinite(lat) || !Number.isFinite(thor)) {
      errors.split = "lateral and thoracic shares must be numbers";
    } else if (roll !== null && Math.abs(lat + thor - roll) > 1e-6) {
      errors.split = `shares must sum to the roll target (${lat} + ${thor} != ${roll})`;
    } else {
      split = { lat_deg: lat, thor_deg: thor };
    }
  }

  if (errors.roll || errors.pitch || errors.split || roll === null || pitch === null) {
    return { body: null, errors };
  }
  return { body: { roll_deg: roll, pitch_deg: pitch, split }, errors: {} };
}

export function resolveView(name: string, regions: Regions): string {
  return regions.aliases[name] ?? name;
}

function regionOf(name: string, subject: string | null, regions: Regions): Box | null {
  const canonical = resolveView(name, regions);
  if (subject) {
    const override = regions.subjects[subject]?.[canonical];
    if (override) return override;
  }
  return regions.views[canonical] ?? null;
}

// Box intersection of the selected views, using the exact numbers served by
// /regions (subject overrides first). Null when nothing is selected, a view
// is unknown, or the boxes do not overlap.
export function viewOverlay(
  selected: string[],
  subject: string | null,
  regions: Regions,
): Box | null {
  if (selected.length === 0) return null;
  let rollLo = -Infinity;
  let rollHi = Infinity;
  let pitchLo = -Infinity;
  let pitchHi = Infinity;
  for (const name of selected) {
    const box = regionOf(name, subject, regions);
    if (!box) return null;
    rollLo = Math.max(rollLo, box.roll_deg[0]);
    rollHi = Math.min(rollHi, box.roll_deg[1]);
    pitchLo = Math.max(pitchLo, box.pitch_deg[0]);
    pitchHi = Math.min(pitchHi, box.pitch_deg[1]);
  }
  if (rollLo > rollHi || pitchLo > pitchHi) return null;
  return { roll_deg: [rollLo, rollHi], pitch_deg: [pitchLo, pitchHi] };
}
