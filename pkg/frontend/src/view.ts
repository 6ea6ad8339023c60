// DOM layer. The skeleton is built once; render() then projects ConsoleState
// onto it. No state lives here, so a re-render is always safe.

import type { ConsoleApp } from "./app.js";
import {
  commandsEnabled,
  isStale,
  viewOverlay,
  type ConsoleState,
} from "./model.js";

export function mount(root: HTMLElement, app: ConsoleApp): (state: ConsoleState) => void {
  root.innerHTML = `
    <header>
      <h1>posture bench</h1>
      <span id="mode-badge" class="badge">offline</span>
      <span id="conn" class="conn"></span>
      <button id="estop" class="estop" title="freeze immediately">STOP</button>
    </header>
    <div id="stale" class="stale-banner" hidden>
      telemetry is stale; commands are disabled until frames resume
    </div>
    <main>
      <section class="panel" id="gauges">
        <h2>posture</h2>
        <div class="gauge-grid"></div>
        <div class="load-bars">
          <label>legs <progress id="load-legs" max="2" value="0"></progress>
            <span id="load-legs-val"></span></label>
          <label>abdomen <progress id="load-abd" max="2" value="0"></progress>
            <span id="load-abd-val"></span></label>
          <label>move <progress id="move-progress" max="1" value="0"></progress></label>
        </div>
      </section>
      <section class="panel" id="views">
        <h2>views</h2>
        <div id="view-boxes" class="view-boxes"></div>
        <label>subject
          <select id="subject"><option value="">default</option></select>
        </label>
        <svg id="region-svg" viewBox="0 0 100 100" preserveAspectRatio="none">
          <rect id="region-rect" x="0" y="0" width="0" height="0"></rect>
          <circle id="posture-dot" r="1.6" cx="-10" cy="-10"></circle>
        </svg>
        <div id="overlay-text" class="overlay-text"></div>
        <button id="plan">suggest posture</button>
        <div id="plan-card" class="plan-card" hidden>
          <div id="plan-text"></div>
          <button id="plan-confirm">move there</button>
          <button id="plan-dismiss">dismiss</button>
        </div>
      </section>
      <section class="panel" id="target">
        <h2>target</h2>
        <form id="target-form">
          <label>roll <input id="roll" name="roll" inputmode="decimal"></label>
          <div class="err" id="err-roll"></div>
          <label>pitch <input id="pitch" name="pitch" inputmode="decimal"></label>
          <div class="err" id="err-pitch"></div>
          <label><input type="radio" name="splitmode" value="auto" checked> auto split</label>
          <label><input type="radio" name="splitmode" value="manual"> manual</label>
          <span id="manual-split">
            <label>lateral <input id="lat" name="lat" inputmode="decimal"></label>
            <label>thoracic <input id="thor" name="thor" inputmode="decimal"></label>
          </span>
          <div class="err" id="err-split"></div>
          <button id="send" type="submit">move</button>
          <button id="release" type="button">release stop</button>
        </form>
      </section>
      <section class="panel" id="history">
        <h2>events</h2>
        <ul id="events"></ul>
      </section>
    </main>
  `;

  const el = <T extends HTMLElement>(id: string) => root.querySelector<T>(`#${id}`)!;

  el("estop").addEventListener("click", () => void app.clickEStop());
  el("release").addEventListener("click", () => void app.clickRelease());
  el("plan").addEventListener("click", () => void app.requestPlan());
  el("plan-confirm").addEventListener("click", () => void app.confirmPlan());
  el("plan-dismiss").addEventListener("click", () => app.dismissPlan());
  el<HTMLFormElement>("target-form").addEventListener("submit", (ev) => {
    ev.preventDefault();
    void app.submitTarget();
  });
  for (const id of ["roll", "pitch", "lat", "thor"] as const) {
    el<HTMLInputElement>(id).addEventListener("input", (ev) => {
      app.updateForm({ [id]: (ev.target as HTMLInputElement).value });
    });
  }
  root.querySelectorAll<HTMLInputElement>("input[name=splitmode]").forEach((radio) =>
    radio.addEventListener("change", () => {
      app.updateForm({ splitMode: radio.value as "auto" | "manual" });
    }),
  );
  el<HTMLSelectElement>("subject").addEventListener("change", (ev) => {
    app.setSubject((ev.target as HTMLSelectElement).value || null);
  });

  let builtForRegions: unknown = null;

  function render(state: ConsoleState) {
    const now = Date.now();
    const frame = state.frame;
    const enabled = commandsEnabled(state, now);

    const badge = el("mode-badge");
    badge.textContent = frame ? frame.mode : "offline";
    badge.className = `badge badge-${frame ? frame.mode : "offline"}`;
    el("conn").textContent = state.connected ? "live" : "disconnected";
    el("stale").hidden = !state.connected || !isStale(state, now);

    (el("estop") as HTMLButtonElement).disabled = !state.connected;
    for (const id of ["send", "release", "plan", "plan-confirm"]) {
      (el(id) as HTMLButtonElement).disabled = !enabled;
    }

    renderGauges(state);
    if (frame) {
      (el("load-legs") as HTMLProgressElement).value = frame.load.legs;
      (el("load-abd") as HTMLProgressElement).value = frame.load.abdomen;
      el("load-legs-val").textContent = frame.load.legs.toFixed(3);
      el("load-abd-val").textContent = frame.load.abdomen.toFixed(3);
      (el("move-progress") as HTMLProgressElement).value = frame.progress;
    }

    if (state.regions && builtForRegions !== state.regions) {
      builtForRegions = state.regions;
      buildViewControls(state);
    }
    syncViewControls(state);
    renderRegion(state);
    renderForm(state);
    renderPlan(state);

    el("events").innerHTML = state.events
      .map((e) => `<li>${escapeHtml(e)}</li>`)
      .join("");
  }

  function renderGauges(state: ConsoleState) {
    const grid = root.querySelector(".gauge-grid")!;
    const frame = state.frame;
    const limits = state.regions?.limits;
    const rows: [string, number, [number, number]][] = frame
      ? [
          ["roll", frame.posture.roll_deg, limits?.roll_deg ?? [0, 65]],
          ["pitch", frame.posture.pitch_deg, limits?.pitch_deg ?? [0, 85]],
          ["lateral", frame.joints["theta_lateral_deg"] ?? 0, [0, 35]],
          ["thoracic", frame.joints["theta_thoracic_deg"] ?? 0, [0, 30]],
          ["base", frame.joints["theta_base_deg"] ?? 0, [0, 35]],
        ]
      : [];
    grid.innerHTML = rows
      .map(([name, value, [lo, hi]]) => {
        const pct = hi > lo ? Math.min(100, Math.max(0, ((value - lo) / (hi - lo)) * 100)) : 0;
        return `<div class="gauge"><span class="gauge-name">${name}</span>
          <span class="gauge-val">${value.toFixed(2)}&deg;</span>
          <div class="gauge-bar"><div style="width:${pct.toFixed(1)}%"></div></div></div>`;
      })
      .join("");
  }

  function buildViewControls(state: ConsoleState) {
    const regions = state.regions!;
    el("view-boxes").innerHTML = Object.keys(regions.views)
      .map(
        (name) =>
          `<label><input type="checkbox" data-view="${name}"> ${name.replace(/_/g, " ")}</label>`,
      )
      .join("");
    root.querySelectorAll<HTMLInputElement>("input[data-view]").forEach((box) =>
      box.addEventListener("change", () => app.toggleView(box.dataset.view!)),
    );
    const subject = el<HTMLSelectElement>("subject");
    subject.innerHTML =
      `<option value="">default</option>` +
      Object.keys(regions.subjects)
        .map((s) => `<option value="${s}">${s}</option>`)
        .join("");
  }

  function syncViewControls(state: ConsoleState) {
    root.querySelectorAll<HTMLInputElement>("input[data-view]").forEach((box) => {
      box.checked = state.selectedViews.includes(box.dataset.view!);
    });
    const subject = el<HTMLSelectElement>("subject");
    if (subject.value !== (state.subject ?? "")) subject.value = state.subject ?? "";
  }

  function renderRegion(state: ConsoleState) {
    const rect = el("region-rect") as unknown as SVGRectElement;
    const dot = el("posture-dot") as unknown as SVGCircleElement;
    const text = el("overlay-text");
    if (!state.regions) {
      text.textContent = "";
      return;
    }
    const limits = state.regions.limits;
    const sx = (roll: number) =>
      ((roll - limits.roll_deg[0]) / (limits.roll_deg[1] - limits.roll_deg[0])) * 100;
    const sy = (pitch: number) =>
      100 - ((pitch - limits.pitch_deg[0]) / (limits.pitch_deg[1] - limits.pitch_deg[0])) * 100;

    const overlay = viewOverlay(state.selectedViews, state.subject, state.regions);
    if (overlay) {
      rect.setAttribute("x", sx(overlay.roll_deg[0]).toFixed(2));
      rect.setAttribute("y", sy(overlay.pitch_deg[1]).toFixed(2));
      rect.setAttribute("width", (sx(overlay.roll_deg[1]) - sx(overlay.roll_deg[0])).toFixed(2));
      rect.setAttribute("height", (sy(overlay.pitch_deg[0]) - sy(overlay.pitch_deg[1])).toFixed(2));
      text.textContent =
        `roll ${overlay.roll_deg[0]} to ${overlay.roll_deg[1]} deg, ` +
        `pitch ${overlay.pitch_deg[0]} to ${overlay.pitch_deg[1]} deg`;
    } else {
      rect.setAttribute("width", "0");
      rect.setAttribute("height", "0");
      text.textContent = state.selectedViews.length
        ? "selected views do not overlap"
        : "select views to see their region";
    }
    if (state.frame) {
      dot.setAttribute("cx", sx(state.frame.posture.roll_deg).toFixed(2));
      dot.setAttribute("cy", sy(state.frame.posture.pitch_deg).toFixed(2));
    }
  }

  function renderForm(state: ConsoleState) {
    for (const id of ["roll", "pitch", "lat", "thor"] as const) {
      const input = el<HTMLInputElement>(id);
      const value = state.form[id === "lat" ? "lat" : id === "thor" ? "thor" : id];
      if (document.activeElement !== input && input.value !== value) input.value = value;
    }
    el("err-roll").textContent = state.formErrors.roll ?? "";
    el("err-pitch").textContent = state.formErrors.pitch ?? "";
    el("err-split").textContent = state.formErrors.split ?? "";
    (el("manual-split") as HTMLElement).style.display =
      state.form.splitMode === "manual" ? "" : "none";
  }

  function renderPlan(state: ConsoleState) {
    const card = el("plan-card");
    card.hidden = !state.pendingPlan;
    if (state.pendingPlan) {
      const p = state.pendingPlan;
      el("plan-text").textContent =
        `suggested: roll ${p.posture.roll_deg.toFixed(2)} deg, ` +
        `pitch ${p.posture.pitch_deg.toFixed(2)} deg ` +
        `(split ${p.split.lat_deg.toFixed(2)}/${p.split.thor_deg.toFixed(2)}, ` +
        `load ${p.load.legs.toFixed(3)}/${p.load.abdomen.toFixed(3)})`;
    }
  }

  return render;
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
