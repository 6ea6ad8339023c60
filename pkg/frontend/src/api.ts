// Wire types and HTTP client for the bench control service. The shapes
// mirror the service responses exactly; nothing is renamed on the way in.

export interface Box {
  roll_deg: [number, number];
  pitch_deg: [number, number];
}

export interface Angles {
  roll_deg: number;
  pitch_deg: number;
}

export interface Frame {
  t: number;
  tick: number;
  mode: string;
  joints: Record<string, number>;
  posture: Angles;
  gravity: Angles;
  load: { legs: number; abdomen: number };
  progress: number;
}

export interface Regions {
  limits: Box;
  views: Record<string, Box>;
  aliases: Record<string, string>;
  subjects: Record<string, Record<string, Box>>;
}

export type Split = "auto" | { lat_deg: number; thor_deg: number };

export interface TargetBody {
  roll_deg: number;
  pitch_deg: number;
  split: Split;
}

export interface Ack {
  mode?: string;
  split?: { lat_deg: number; thor_deg: number };
  duration_s?: number;
}

export interface Plan {
  views: string[];
  region: Box;
  posture: Angles;
  split: { lat_deg: number; thor_deg: number };
  load: { legs: number; abdomen: number };
  objective: number;
}

export class ServiceError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
    this.name = "ServiceError";
  }
}

type FetchFn = (input: string, init?: RequestInit) => Promise<Response>;

export class ServiceClient {
  constructor(
    private base = "",
    private fetchFn: FetchFn = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchFn(this.base + path, init);
    const body = await res.json().catch(() => null);
    if (!res.ok) {
      const detail =
        body && typeof body.detail === "string" ? body.detail : `HTTP ${res.status}`;
      throw new ServiceError(res.status, detail);
    }
    return body as T;
  }

  state(): Promise<Frame> {
    return this.request("/state");
  }

  regions(): Promise<Regions> {
    return this.request("/regions");
  }

  setTarget(body: TargetBody): Promise<Ack> {
    return this.request("/target", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  estop(): Promise<Ack> {
    return this.request("/estop", { method: "POST" });
  }

  release(): Promise<Ack> {
    return this.request("/release", { method: "POST" });
  }

  plan(views: string[], subject: string | null = null): Promise<Plan> {
    const params = new URLSearchParams({ views: views.join(",") });
    if (subject) params.set("subject", subject);
    return this.request(`/plan?${params}`);
  }

  // Newline-delimited JSON telemetry. The service primes the stream with the
  // current frame, so the first yield arrives without waiting for a tick.
  async *stream(signal?: AbortSignal): AsyncGenerator<Frame> {
    const res = await this.fetchFn(this.base + "/stream", { signal });
    if (!res.ok || !res.body) {
      throw new ServiceError(res.status, "telemetry stream unavailable");
    }
    const reader = res.body.getReader();
    const decoder = new TextDecoder();
    let pending = "";
    for (;;) {
      const { done, value } = await reader.read();
      if (done) break;
      pending += decoder.decode(value, { stream: true });
      let nl;
      while ((nl = pending.indexOf("\n")) >= 0) {
        const line = pending.slice(0, nl).trim();
        pending = pending.slice(nl + 1);
        if (line) yield JSON.parse(line) as Frame;
      }
    }
  }
}
