/** Statement digests and proof blobs must be byte-identical to the server's. */

import { describe, expect, it } from "vitest";

import vectors from "../fixtures/vectors.json";
import { bytesToHex, hexToBytes } from "../src/encoding";
import {
  buildProof,
  canonicalPerformance,
  encodeMembershipPublic,
  encodeMembershipWitness,
  encodePerformancePublic,
  encodePerformanceWitness,
  encodeProof,
  keystream,
  membershipDigest,
  performanceDigest,
} from "../src/proofs";

const m = vectors.membership;
const membershipPublic = {
  root: hexToBytes(m.public.root),
  nullifier: hexToBytes(m.public.nullifier),
  jobId: m.public.job_id,
  newCommitment: hexToBytes(m.public.new_commitment),
  labelCommitment: hexToBytes(m.public.label_commitment),
  sampleId: m.public.sample_id,
  label: m.public.label,
};

describe("membership statement", () => {
  it("public encoding and digest match", () => {
    expect(bytesToHex(encodeMembershipPublic(membershipPublic))).toBe(m.public_encoding);
    expect(bytesToHex(membershipDigest(membershipPublic))).toBe(m.digest);
  });

  it("witness encoding and full proof blob match", () => {
    const witnessBytes = hexToBytes(m.witness_encoding);
    const proof = buildProof(hexToBytes(m.digest), witnessBytes);
    expect(bytesToHex(proof.blob)).toBe(m.proof_blob);
    expect(bytesToHex(encodeProof(proof))).toBe(m.proof_encoding);
  });

  it("blob contains no witness bytes verbatim (blinding)", () => {
    const blobHex = m.proof_blob;
    // the secret is the first 32 bytes of the witness encoding
    const secretHex = m.witness_encoding.slice(0, 64);
    expect(blobHex.includes(secretHex)).toBe(false);
  });
});

describe("performance statement", () => {
  it("canonical encoding, digest, and blob match", () => {
    const p = vectors.performance;
    const truth = new Map<number, number>(p.public.truth as Array<[number, number]>);
    const pub = canonicalPerformance(
      p.public.job_id,
      truth,
      p.public.recorded_commitments.map(hexToBytes),
      p.public.claimed_correct,
      p.public.claimed_total,
      hexToBytes(p.public.payout_address),
    );
    expect(bytesToHex(encodePerformancePublic(pub))).toBe(p.public_encoding);
    expect(bytesToHex(performanceDigest(pub))).toBe(p.digest);
    const proof = buildProof(hexToBytes(p.digest), hexToBytes(p.witness_encoding));
    expect(bytesToHex(proof.blob)).toBe(p.proof_blob);
  });
});

describe("keystream", () => {
  it("matches the fixture expansion", () => {
    const k = vectors.keystream;
    expect(bytesToHex(keystream(hexToBytes(k.digest), 48))).toBe(k.first_48);
  });
});

describe("witness re-encoding", () => {
  it("rebuilding the membership witness from parts reproduces fixture bytes", () => {
    const witnessBytes = hexToBytes(m.witness_encoding);
    const secret = witnessBytes.slice(0, 32);
    const view = new DataView(witnessBytes.buffer);
    const leafIndex = view.getUint32(36, false); // low half of the u64
    const count = view.getUint32(44, false);
    const siblings = [];
    for (let i = 0; i < count; i++) {
      siblings.push(witnessBytes.slice(48 + i * 32, 80 + i * 32));
    }
    expect(
      bytesToHex(encodeMembershipWitness({ secret, leafIndex, siblings })),
    ).toBe(m.witness_encoding);
  });

  it("performance witness encoding round-trips through parts", () => {
    const p = vectors.performance;
    const chain0 = vectors.chains[0]!;
    const entries = [
      { secret: hexToBytes(chain0.secrets[0]!), sampleId: 10, label: 1 },
      { secret: hexToBytes(chain0.secrets[1]!), sampleId: 11, label: 1 },
    ];
    expect(bytesToHex(encodePerformanceWitness(entries))).toBe(p.witness_encoding);
  });
});
