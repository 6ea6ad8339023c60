import { describe, expect, it } from "vitest";

import { ServiceClient, ServiceError, type Frame } from "../src/api.js";
import { Loopback } from "./loopback.js";

function chunkedResponse(chunks: string[]): Response {
  const encoder = new TextEncoder();
  const stream = new ReadableStream<Uint8Array>({
    start(controller) {
      for (const chunk of chunks) controller.enqueue(encoder.encode(chunk));
      controller.close();
    },
  });
  return new Response(stream, { status: 200 });
}

describe("stream parsing", () => {
  it("reassembles frames split across chunks", async () => {
    const lb = new Loopback();
    const a = JSON.stringify(lb.frame({ tick: 1 }));
    const b = JSON.stringify(lb.frame({ tick: 2 }));
    const c = JSON.stringify(lb.frame({ tick: 3 }));
    // one frame split mid-object, then two frames in a single chunk
    const client = new ServiceClient("", async () =>
      chunkedResponse([a.slice(0, 25), a.slice(25) + "\n" + b + "\n", c + "\n"]),
    );
    const ticks: number[] = [];
    for await (const frame of client.stream()) ticks.push(frame.tick);
    expect(ticks).toEqual([1, 2, 3]);
  });

  it("ignores blank keep-alive lines", async () => {
    const lb = new Loopback();
    const client = new ServiceClient("", async () =>
      chunkedResponse(["\n\n", JSON.stringify(lb.frame({ tick: 9 })) + "\n\n"]),
    );
    const frames: Frame[] = [];
    for await (const frame of client.stream()) frames.push(frame);
    expect(frames.map((f) => f.tick)).toEqual([9]);
  });
});

describe("error mapping", () => {
  it("carries the service detail and status", async () => {
    const lb = new Loopback();
    lb.mode = "moving";
    const client = new ServiceClient("", lb.fetch);
    const err = await client
      .setTarget({ roll_deg: 5, pitch_deg: 5, split: "auto" })
      .catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ServiceError);
    expect((err as ServiceError).status).toBe(409);
    expect((err as ServiceError).message).toMatch(/current mode is moving/);
  });

  it("falls back to the status code when the body is not JSON", async () => {
    const client = new ServiceClient("", async () => new Response("gone", { status: 503 }));
    const err = await client.state().catch((e: unknown) => e);
    expect((err as ServiceError).message).toBe("HTTP 503");
  });
});

describe("request shapes", () => {
  it("plan builds the views and subject query", async () => {
    const lb = new Loopback();
    const client = new ServiceClient("", lb.fetch);
    await client.plan(["plax", "a4c"], "S1");
    expect(lb.requests).toEqual(["GET /plan"]);
    // URLSearchParams keeps the comma encoded; the service decodes it
  });

  it("target posts the body unchanged", async () => {
    let seen: string | undefined;
    const lb = new Loopback();
    const client = new ServiceClient("", async (input, init) => {
      seen = String(init?.body);
      return lb.fetch(input, init);
    });
    await client.setTarget({ roll_deg: 20, pitch_deg: 45, split: { lat_deg: 12, thor_deg: 8 } });
    expect(JSON.parse(seen!)).toEqual({
      roll_deg: 20,
      pitch_deg: 45,
      split: { lat_deg: 12, thor_deg: 8 },
    });
  });
});
