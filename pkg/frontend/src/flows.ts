/**
 * Worker flows: join, label, claim. Pure orchestration over the API client
 * and a keyring, so the whole anonymous protocol is testable without a DOM.
 */

import { GatewayClient } from "./api";
import { randomRoot } from "./crypto";
import { bytesToHex, hexToBytes } from "./encoding";
import { Keyring } from "./keyring";
import { MembershipPublic, Proof, proofToJson } from "./proofs";

export interface WorkerContext {
  client: GatewayClient;
  sessionId: string;
  keyrings: Map<number, Keyring>; // per-job credential chains
}

export async function openSession(client: GatewayClient): Promise<WorkerContext> {
  const session = await client.createSession();
  return { client, sessionId: session.session_id, keyrings: new Map() };
}

export async function joinJob(ctx: WorkerContext, jobId: number, zk: boolean): Promise<void> {
  if (!zk) {
    await ctx.client.join(jobId, ctx.sessionId);
    return;
  }
  const keyring = new Keyring(jobId, randomRoot());
  const joined = await ctx.client.join(jobId, ctx.sessionId, bytesToHex(keyring.joinCommitment()));
  if (joined.leaf_index === null) throw new Error("gateway returned no leaf index");
  keyring.onJoined(joined.leaf_index);
  ctx.keyrings.set(jobId, keyring);
}

function membershipJson(pub: MembershipPublic, proof: Proof, sampleId: number, label: number) {
  return {
    sample_id: sampleId,
    label,
    mode: "zk",
    zk: {
      public: {
        root: bytesToHex(pub.root),
        nullifier: bytesToHex(pub.nullifier),
        job_id: pub.jobId,
        new_commitment: bytesToHex(pub.newCommitment),
        label_commitment: bytesToHex(pub.labelCommitment),
        sample_id: pub.sampleId,
        label: pub.label,
      },
      proof: proofToJson(proof),
    },
  };
}

/**
 * Submit one label. Anonymous jobs derive nullifier + next commitment +
 * label commitment, build the proof locally, post, and rotate the keyring.
 */
export async function submitLabel(
  ctx: WorkerContext,
  jobId: number,
  zk: boolean,
  sampleId: number,
  label: number,
): Promise<void> {
  if (!zk) {
    await ctx.client.submitPlain(jobId, ctx.sessionId, sampleId, label);
    return;
  }
  const keyring = ctx.keyrings.get(jobId);
  if (!keyring || !keyring.joined) throw new Error("join the job before labeling");
  const tree = await ctx.client.tree(jobId);
  const leaves = tree.leaves.map(hexToBytes);
  const bundle = keyring.buildSubmission(leaves, tree.depth, sampleId, label);
  await ctx.client.submitZk(jobId, membershipJson(bundle.public, bundle.proof, sampleId, label));
  // our deposit is the last leaf: submissions serialize through the ledger
  const after = await ctx.client.tree(jobId);
  keyring.onSubmitted(sampleId, label, after.leaves.length - 1);
}

export interface ClaimPreview {
  correct: number;
  total: number;
  accuracy: number;
}

/** Client-side recount of claimable accuracy from the keyring vs posted truth. */
export async function previewClaim(ctx: WorkerContext, jobId: number): Promise<ClaimPreview | null> {
  const keyring = ctx.keyrings.get(jobId);
  if (!keyring || keyring.labelsSubmitted === 0) return null;
  const truth = await ctx.client.truth(jobId);
  if (!truth.posted) return null;
  const truthMap = new Map(truth.entries.map((e) => [e.sample_id, e.label]));
  const correct = keyring.correctCount(truthMap);
  const total = keyring.labelsSubmitted;
  return { correct, total, accuracy: total ? correct / total : 0 };
}

/** Build and post the performance claim to a fresh payout address. */
export async function claimRewards(
  ctx: WorkerContext,
  jobId: number,
  payoutAddress?: Uint8Array,
): Promise<{ payoutAddress: Uint8Array }> {
  const keyring = ctx.keyrings.get(jobId);
  if (!keyring) throw new Error("nothing to claim: no keyring for this job");
  const truth = await ctx.client.truth(jobId);
  if (!truth.posted) throw new Error("truth not posted yet");
  const truthMap = new Map(truth.entries.map((e) => [e.sample_id, e.label]));
  const recorded = (await ctx.client.commitments(jobId)).recorded.map(hexToBytes);
  const payout = payoutAddress ?? randomRoot();
  const { public: pub, proof } = keyring.buildClaim(truthMap, recorded, payout);
  await ctx.client.claim(jobId, {
    public: {
      job_id: pub.jobId,
      truth: pub.truth.map(([sample_id, label]) => ({ sample_id, label })),
      recorded_commitments: pub.recordedCommitments.map(bytesToHex),
      claimed_correct: pub.claimedCorrect,
      claimed_total: pub.claimedTotal,
      payout_address: bytesToHex(payout),
    },
    proof: proofToJson(proof),
  });
  return { payoutAddress: payout };
}
