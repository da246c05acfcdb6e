/**
 * Live end-to-end: spawn the real gateway (`serve` on the demo config),
 * then join the anonymous job, label through both rounds, watch truth
 * arrive, claim with a performance proof, finalize, and verify the payout.
 *
 * Needs python3 with the server package installed; skip with CONSOLE_E2E=0.
 */

import { spawn, spawnSync, ChildProcess } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { GatewayClient } from "../src/api";
import { bytesToHex } from "../src/encoding";
import { claimRewards, joinJob, openSession, previewClaim, submitLabel, WorkerContext } from "../src/flows";

const PORT = 8931;
const BASE = `http://127.0.0.1:${PORT}`;

function serverAvailable(): boolean {
  if (process.env.CONSOLE_E2E === "0") return false;
  const probe = spawnSync("python3", ["-c", "import crowdlabel"], { timeout: 20_000 });
  return probe.status === 0;
}

const enabled = serverAvailable();

describe.skipIf(!enabled)("live console flow", () => {
  let server: ChildProcess;
  let ctx: WorkerContext;

  beforeAll(async () => {
    const configPath = new URL("../../configs/serve.conf", import.meta.url).pathname;
    server = spawn(
      "python3",
      ["-m", "crowdlabel.cli", "serve", configPath, "--port", String(PORT)],
      { stdio: "ignore" },
    );
    const client = new GatewayClient(BASE);
    for (let attempt = 0; attempt < 100; attempt++) {
      try {
        await client.listJobs();
        break;
      } catch {
        await new Promise((resolve) => setTimeout(resolve, 200));
      }
    }
    ctx = await openSession(client);
  }, 30_000);

  afterAll(() => {
    server?.kill();
  });

  it("joins, labels every round, claims, and gets paid", async () => {
    const jobs = await ctx.client.listJobs();
    expect(jobs).toHaveLength(1);
    const job = jobs[0]!;
    expect(job.zk_mode).toBe(true);
    expect(job.phase).toBe("labeling");

    await joinJob(ctx, job.job_id, true);

    // serve.conf: 2 rounds x batch 2, one vote closes a sample; label with
    // a simple threshold rule on the first feature
    for (let i = 0; i < 4; i++) {
      const sample = await ctx.client.nextSample(job.job_id, ctx.sessionId);
      expect(sample).not.toBeNull();
      const label = sample!.feature_vector[0]! > 0 ? 0 : 1;
      await submitLabel(ctx, job.job_id, true, sample!.sample_id, label);
    }

    // all batches aggregated: the server closed labeling and posted truth
    const detail = await ctx.client.jobDetail(job.job_id);
    expect(detail.phase).toBe("evaluating");
    expect(detail.truth_posted).toBe(true);

    const preview = await previewClaim(ctx, job.job_id);
    expect(preview).not.toBeNull();
    expect(preview!.total).toBe(4);

    const { payoutAddress } = await claimRewards(ctx, job.job_id);
    await ctx.client.finalize(job.job_id);

    const rewards = await ctx.client.rewards(job.job_id);
    expect(rewards.truth_posted).toBe(true);
    expect(rewards.payouts).toHaveLength(1);
    expect(rewards.payouts[0]!.address).toBe(bytesToHex(payoutAddress));
    expect(rewards.payouts[0]!.amount).toBe(job.reward_pool);
    const final = await ctx.client.jobDetail(job.job_id);
    expect(final.phase).toBe("completed");
  }, 60_000);
});

describe.skipIf(enabled)("live console flow (skipped)", () => {
  it("requires python3 with the server package installed", () => {
    expect(enabled).toBe(false);
  });
});
