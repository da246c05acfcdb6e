/**
 * Statement encodings, digests, and transparent-backend proof blobs.
 * Layouts per PROTOCOL.md; the blob blinds the witness encoding with a
 * digest-derived keystream so no witness bytes appear verbatim on-chain.
 */

import {
  ascii,
  b32list,
  bytesToHex,
  compareBytes,
  concat,
  lengthPrefixed,
  pairs,
  u64,
} from "./encoding";
import { sha256 } from "./sha256";

export const BACKEND_ID = "transparent-v1";
const MEMBERSHIP_DOMAIN = ascii("crowdlabel/membership/v1");
const PERFORMANCE_DOMAIN = ascii("crowdlabel/performance/v1");
const PROOF_DOMAIN = ascii("crowdlabel/proof/v1");
const BLIND_DOMAIN = ascii("crowdlabel/proof-blind/v1");

export interface MembershipPublic {
  root: Uint8Array;
  nullifier: Uint8Array;
  jobId: number;
  newCommitment: Uint8Array;
  labelCommitment: Uint8Array;
  sampleId: number;
  label: number;
}

export function encodeMembershipPublic(pub: MembershipPublic): Uint8Array {
  return concat(
    pub.root,
    pub.nullifier,
    u64(pub.jobId),
    pub.newCommitment,
    pub.labelCommitment,
    u64(pub.sampleId),
    u64(pub.label),
  );
}

export function membershipDigest(pub: MembershipPublic): Uint8Array {
  return sha256(concat(MEMBERSHIP_DOMAIN, encodeMembershipPublic(pub)));
}

export interface MembershipWitness {
  secret: Uint8Array;
  leafIndex: number;
  siblings: Uint8Array[];
}

export function encodeMembershipWitness(witness: MembershipWitness): Uint8Array {
  return concat(
    witness.secret,
    u64(witness.leafIndex),
    u64(witness.siblings.length),
    ...witness.siblings,
  );
}

export interface PerformancePublic {
  jobId: number;
  truth: Array<[number, number]>; // sorted by sample id
  recordedCommitments: Uint8Array[]; // sorted
  claimedCorrect: number;
  claimedTotal: number;
  payoutAddress: Uint8Array;
}

/** Canonicalize (sort truth and commitments) before encoding. */
export function canonicalPerformance(
  jobId: number,
  truth: Map<number, number>,
  recorded: Uint8Array[],
  claimedCorrect: number,
  claimedTotal: number,
  payoutAddress: Uint8Array,
): PerformancePublic {
  return {
    jobId,
    truth: [...truth.entries()].sort((a, b) => a[0] - b[0]),
    recordedCommitments: recorded.slice().sort(compareBytes),
    claimedCorrect,
    claimedTotal,
    payoutAddress,
  };
}

export function encodePerformancePublic(pub: PerformancePublic): Uint8Array {
  return concat(
    u64(pub.jobId),
    pairs(pub.truth),
    b32list(pub.recordedCommitments),
    u64(pub.claimedCorrect),
    u64(pub.claimedTotal),
    pub.payoutAddress,
  );
}

export function performanceDigest(pub: PerformancePublic): Uint8Array {
  return sha256(concat(PERFORMANCE_DOMAIN, encodePerformancePublic(pub)));
}

export interface PerformanceWitnessEntry {
  secret: Uint8Array;
  sampleId: number;
  label: number;
}

export function encodePerformanceWitness(entries: PerformanceWitnessEntry[]): Uint8Array {
  return concat(
    u64(entries.length),
    ...entries.map((e) => concat(e.secret, u64(e.sampleId), u64(e.label))),
  );
}

export function keystream(digest: Uint8Array, length: number): Uint8Array {
  const out = new Uint8Array(length);
  for (let block = 0; block * 32 < length; block++) {
    const chunk = sha256(concat(BLIND_DOMAIN, digest, u64(block)));
    out.set(chunk.subarray(0, Math.min(32, length - block * 32)), block * 32);
  }
  return out;
}

function blind(digest: Uint8Array, data: Uint8Array): Uint8Array {
  const stream = keystream(digest, data.length);
  const out = new Uint8Array(data.length);
  for (let i = 0; i < data.length; i++) out[i] = data[i]! ^ stream[i]!;
  return out;
}

export interface Proof {
  backendId: string;
  statementDigest: Uint8Array;
  blob: Uint8Array;
}

export function buildProof(digest: Uint8Array, witnessBytes: Uint8Array): Proof {
  const integrity = sha256(concat(PROOF_DOMAIN, digest, witnessBytes));
  const blob = concat(
    Uint8Array.of(0x01),
    digest,
    lengthPrefixed(blind(digest, witnessBytes)),
    integrity,
  );
  return { backendId: BACKEND_ID, statementDigest: digest, blob };
}

export function proofToJson(proof: Proof): { backend_id: string; statement_digest: string; blob: string } {
  return {
    backend_id: proof.backendId,
    statement_digest: bytesToHex(proof.statementDigest),
    blob: bytesToHex(proof.blob),
  };
}

/** Full wire encoding (bytes backend_id ‖ b32 digest ‖ bytes blob), for fixtures. */
export function encodeProof(proof: Proof): Uint8Array {
  return concat(
    lengthPrefixed(ascii(proof.backendId)),
    proof.statementDigest,
    lengthPrefixed(proof.blob),
  );
}
