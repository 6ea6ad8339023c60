// The controller: owns one ConsoleState, talks to the service, and calls
// onChange after every transition. No DOM in here, so it runs under vitest
// against a loopback service as-is.

import { ServiceClient, ServiceError } from "./api.js";
import type { TargetBody } from "./api.js";
import {
  applyFrame,
  commandsEnabled,
  disconnected,
  initialState,
  pushEvent,
  validateTarget,
  type ConsoleState,
  type TargetForm,
} from "./model.js";

export class ConsoleApp {
  state: ConsoleState = initialState();
  onChange: (state: ConsoleState) => void = () => {};

  private controller: AbortController | null = null;

  constructor(
    private client: ServiceClient,
    private now: () => number = () => Date.now(),
  ) {}

  private set(next: ConsoleState) {
    this.state = next;
    this.onChange(this.state);
  }

  async connect(): Promise<void> {
    const regions = await this.client.regions();
    const snapshot = await this.client.state();
    this.set(applyFrame({ ...this.state, regions }, snapshot, this.now()));
    this.controller = new AbortController();
    void this.pump(this.controller.signal);
  }

  disconnect() {
    this.controller?.abort();
    this.controller = null;
  }

  private async pump(signal: AbortSignal) {
    try {
      for await (const frame of this.client.stream(signal)) {
        this.set(applyFrame(this.state, frame, this.now()));
      }
      if (!signal.aborted) this.set(disconnected(this.state, "stream closed"));
    } catch (err) {
      if (!signal.aborted) this.set(disconnected(this.state, describe(err)));
    }
  }

  updateForm(patch: Partial<TargetForm>) {
    this.set({ ...this.state, form: { ...this.state.form, ...patch }, formErrors: {} });
  }

  toggleView(name: string) {
    const selected = this.state.selectedViews.includes(name)
      ? this.state.selectedViews.filter((v) => v !== name)
      : [...this.state.selectedViews, name];
    this.set({ ...this.state, selectedViews: selected, pendingPlan: null });
  }

  setSubject(subject: string | null) {
    this.set({ ...this.state, subject, pendingPlan: null });
  }

  // Validates against the served limits first; an invalid form never reaches
  // the network.
  async submitTarget(): Promise<void> {
    const { body, errors } = validateTarget(this.state.form, this.state.regions);
    if (!body) {
      this.set({ ...this.state, formErrors: errors });
      return;
    }
    await this.sendTarget(body);
  }

  private async sendTarget(body: TargetBody): Promise<void> {
    if (!commandsEnabled(this.state, this.now())) {
      this.set(pushEvent(this.state, "command blocked: telemetry is stale"));
      return;
    }
    try {
      const ack = await this.client.setTarget(body);
      const split = ack.split
        ? ` split ${fmt(ack.split.lat_deg)}/${fmt(ack.split.thor_deg)}`
        : "";
      this.set(
        pushEvent(
          this.state,
          `moving to roll ${body.roll_deg}, pitch ${body.pitch_deg} deg;${split}` +
            ` ETA ${fmt(ack.duration_s ?? 0)} s`,
        ),
      );
    } catch (err) {
      this.set(pushEvent(this.state, `target rejected: ${describe(err)}`));
    }
  }

  // One click, always armed while connected, deliberately skips the form.
  async clickEStop(): Promise<void> {
    try {
      await this.client.estop();
      this.set(pushEvent(this.state, "emergency stop sent"));
    } catch (err) {
      this.set(pushEvent(this.state, `emergency stop failed: ${describe(err)}`));
    }
  }

  async clickRelease(): Promise<void> {
    try {
      await this.client.release();
      this.set(pushEvent(this.state, "released, holding posture"));
    } catch (err) {
      this.set(pushEvent(this.state, `release rejected: ${describe(err)}`));
    }
  }

  // Planner suggestions are held for explicit confirmation; the operator,
  // not the planner, authorises motion.
  async requestPlan(): Promise<void> {
    if (this.state.selectedViews.length === 0) {
      this.set(pushEvent(this.state, "select at least one view to plan"));
      return;
    }
    try {
      const plan = await this.client.plan(this.state.selectedViews, this.state.subject);
      this.set({ ...this.state, pendingPlan: plan });
    } catch (err) {
      this.set(pushEvent(this.state, `plan failed: ${describe(err)}`));
    }
  }

  async confirmPlan(): Promise<void> {
    const plan = this.state.pendingPlan;
    if (!plan) return;
    this.set({ ...this.state, pendingPlan: null });
    await this.sendTarget({
      roll_deg: plan.posture.roll_deg,
      pitch_deg: plan.posture.pitch_deg,
      split: plan.split,
    });
  }

  dismissPlan() {
    this.set({ ...this.state, pendingPlan: null });
  }
}

function describe(err: unknown): string {
  if (err instanceof ServiceError) return err.message;
  return err instanceof Error ? err.message : String(err);
}

function fmt(value: number): string {
  return value.toFixed(2).replace(/\.?0+$/, "");
}
