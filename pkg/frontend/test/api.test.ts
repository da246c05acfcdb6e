import { describe, expect, it } from "vitest";

import { ApiError, GatewayClient } from "../src/api";

interface Call {
  url: string;
  init?: RequestInit;
}

function clientWith(status: number, body: unknown): { client: GatewayClient; calls: Call[] } {
  const calls: Call[] = [];
  const fetchImpl = async (url: string, init?: RequestInit): Promise<Response> => {
    calls.push({ url, init });
    if (status === 204) return new Response(null, { status });
    return new Response(JSON.stringify(body), {
      status,
      headers: { "content-type": "application/json" },
    });
  };
  return { client: new GatewayClient("http://gw", fetchImpl), calls };
}

describe("gateway client", () => {
  it("lists jobs from the right path", async () => {
    const { client, calls } = clientWith(200, [{ job_id: 1 }]);
    const jobs = await client.listJobs();
    expect(jobs[0]!.job_id).toBe(1);
    expect(calls[0]!.url).toBe("http://gw/jobs");
  });

  it("returns null on 204 next-sample", async () => {
    const { client } = clientWith(204, null);
    expect(await client.nextSample(1)).toBeNull();
  });

  it("passes the session through as a query parameter", async () => {
    const { client, calls } = clientWith(200, { sample_id: 3, feature_vector: [], votes_so_far: 0 });
    await client.nextSample(2, "s9");
    expect(calls[0]!.url).toBe("http://gw/jobs/2/next-sample?session=s9");
  });

  it("surfaces contract rejections as ApiError with the reason", async () => {
    const { client } = clientWith(409, { detail: { reason: "NullifierUsed", gas_used: 1 } });
    try {
      await client.submitZk(1, {});
      expect.unreachable();
    } catch (error) {
      expect(error).toBeInstanceOf(ApiError);
      expect((error as ApiError).status).toBe(409);
      expect((error as ApiError).reason).toBe("NullifierUsed");
    }
  });

  it("posts JSON bodies", async () => {
    const { client, calls } = clientWith(200, { receipt: { status: "success" } });
    await client.submitPlain(1, "s1", 5, 0);
    const body = JSON.parse(String(calls[0]!.init?.body));
    expect(body).toEqual({ sample_id: 5, label: 0, mode: "plain", session_id: "s1" });
  });

  it("handles string detail errors", async () => {
    const { client } = clientWith(404, { detail: "unknown job 9" });
    await expect(client.jobDetail(9)).rejects.toThrow("unknown job 9");
  });
});
