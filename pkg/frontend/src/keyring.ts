/**
 * Per-job credential chain, held entirely in the browser.
 *
 * Secret 0 backs the join commitment. Submission k: prove membership of
 * commitment k, reveal nullifier k, bind the label, deposit commitment k+1.
 * History is retained so the performance claim can cover every label.
 */

import { joinCommitment, labelCommitment, nullifier, secretAt } from "./crypto";
import { bytesEqual } from "./encoding";
import { MerkleTree } from "./merkle";
import {
  MembershipPublic,
  PerformanceWitnessEntry,
  Proof,
  buildProof,
  canonicalPerformance,
  encodeMembershipWitness,
  encodePerformanceWitness,
  membershipDigest,
  performanceDigest,
  PerformancePublic,
} from "./proofs";

export interface LabelRecord {
  sampleId: number;
  label: number;
}

export class Keyring {
  readonly jobId: number;
  private readonly root: Uint8Array;
  private step = 0;
  private leafIndex: number | null = null;
  readonly history: PerformanceWitnessEntry[] = [];
  readonly spentNullifiers: Uint8Array[] = [];

  constructor(jobId: number, root: Uint8Array) {
    this.jobId = jobId;
    this.root = root;
  }

  private secret(index: number): Uint8Array {
    return secretAt(this.root, this.jobId, index);
  }

  joinCommitment(): Uint8Array {
    return joinCommitment(this.secret(this.step));
  }

  onJoined(leafIndex: number): void {
    this.leafIndex = leafIndex;
  }

  get joined(): boolean {
    return this.leafIndex !== null;
  }

  get labelsSubmitted(): number {
    return this.history.length;
  }

  /** Build the membership bundle for one label against the public leaves. */
  buildSubmission(
    leaves: Uint8Array[],
    depth: number,
    sampleId: number,
    label: number,
  ): { public: MembershipPublic; proof: Proof } {
    if (this.leafIndex === null) throw new Error("join first");
    const secret = this.secret(this.step);
    const next = this.secret(this.step + 1);
    const tree = new MerkleTree(leaves, depth);
    const path = tree.path(this.leafIndex);
    const pub: MembershipPublic = {
      root: tree.root(),
      nullifier: nullifier(secret, this.jobId),
      jobId: this.jobId,
      newCommitment: joinCommitment(next),
      labelCommitment: labelCommitment(secret, sampleId, label),
      sampleId,
      label,
    };
    const witnessBytes = encodeMembershipWitness({
      secret,
      leafIndex: path.leafIndex,
      siblings: path.siblings,
    });
    return { public: pub, proof: buildProof(membershipDigest(pub), witnessBytes) };
  }

  /** Rotate after the ledger accepted the submission. */
  onSubmitted(sampleId: number, label: number, newLeafIndex: number): void {
    const secret = this.secret(this.step);
    this.history.push({ secret, sampleId, label });
    this.spentNullifiers.push(nullifier(secret, this.jobId));
    this.step += 1;
    this.leafIndex = newLeafIndex;
  }

  /** Labels recorded locally (for the scatter view and accuracy preview). */
  labels(): LabelRecord[] {
    return this.history.map((e) => ({ sampleId: e.sampleId, label: e.label }));
  }

  correctCount(truth: Map<number, number>): number {
    return this.history.filter((e) => truth.get(e.sampleId) === e.label).length;
  }

  /** Performance claim over every label this keyring submitted. */
  buildClaim(
    truth: Map<number, number>,
    recorded: Uint8Array[],
    payoutAddress: Uint8Array,
  ): { public: PerformancePublic; proof: Proof } {
    const mine = this.history.map((e) => labelCommitment(e.secret, e.sampleId, e.label));
    for (const commitment of mine) {
      if (!recorded.some((r) => bytesEqual(r, commitment))) {
        throw new Error("a local label commitment is missing from the recorded set");
      }
    }
    const pub = canonicalPerformance(
      this.jobId,
      truth,
      recorded,
      this.correctCount(truth),
      this.history.length,
      payoutAddress,
    );
    const witnessBytes = encodePerformanceWitness(this.history);
    return { public: pub, proof: buildProof(performanceDigest(pub), witnessBytes) };
  }
}
