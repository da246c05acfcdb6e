/** The keyring must reproduce the fixture bundles end-to-end. */

import { describe, expect, it } from "vitest";

import vectors from "../fixtures/vectors.json";
import { secretRoot } from "../src/crypto";
import { bytesToHex, hexToBytes } from "../src/encoding";
import { Keyring } from "../src/keyring";

const chain0 = vectors.chains[0]!;

function fixtureKeyring(): Keyring {
  const keyring = new Keyring(chain0.job_id, secretRoot(chain0.seed));
  keyring.onJoined(0); // fixture tree holds this chain's join commitment at leaf 0
  return keyring;
}

describe("keyring", () => {
  it("join commitment matches the chain fixture", () => {
    const keyring = new Keyring(chain0.job_id, secretRoot(chain0.seed));
    expect(bytesToHex(keyring.joinCommitment())).toBe(chain0.join_commitments[0]);
    expect(keyring.joined).toBe(false);
  });

  it("builds the exact fixture membership bundle", () => {
    const keyring = fixtureKeyring();
    const leaves = vectors.tree.leaves.map(hexToBytes);
    const bundle = keyring.buildSubmission(leaves, vectors.tree.depth, 10, 1);
    const m = vectors.membership;
    expect(bytesToHex(bundle.public.root)).toBe(m.public.root);
    expect(bytesToHex(bundle.public.nullifier)).toBe(m.public.nullifier);
    expect(bytesToHex(bundle.public.newCommitment)).toBe(m.public.new_commitment);
    expect(bytesToHex(bundle.public.labelCommitment)).toBe(m.public.label_commitment);
    expect(bytesToHex(bundle.proof.statementDigest)).toBe(m.digest);
    expect(bytesToHex(bundle.proof.blob)).toBe(m.proof_blob);
  });

  it("rotates the chain on submission and tracks nullifiers", () => {
    const keyring = fixtureKeyring();
    keyring.onSubmitted(10, 1, 3);
    expect(keyring.labelsSubmitted).toBe(1);
    expect(bytesToHex(keyring.spentNullifiers[0]!)).toBe(chain0.nullifiers[0]);
    // the next credential is secret 1's commitment
    expect(bytesToHex(keyring.joinCommitment())).toBe(chain0.join_commitments[1]);
  });

  it("builds the exact fixture performance claim after two submissions", () => {
    const keyring = fixtureKeyring();
    keyring.onSubmitted(10, 1, 3);
    keyring.onSubmitted(11, 1, 4);
    const p = vectors.performance;
    const truth = new Map<number, number>(p.public.truth as Array<[number, number]>);
    const recorded = p.public.recorded_commitments.map(hexToBytes);
    const claim = keyring.buildClaim(truth, recorded, hexToBytes(p.public.payout_address));
    expect(claim.public.claimedCorrect).toBe(p.public.claimed_correct);
    expect(claim.public.claimedTotal).toBe(p.public.claimed_total);
    expect(bytesToHex(claim.proof.statementDigest)).toBe(p.digest);
    expect(bytesToHex(claim.proof.blob)).toBe(p.proof_blob);
  });

  it("client-side recount matches the claim", () => {
    const keyring = fixtureKeyring();
    keyring.onSubmitted(10, 1, 3);
    keyring.onSubmitted(11, 1, 4);
    const truth = new Map<number, number>([[10, 1], [11, 0]]);
    expect(keyring.correctCount(truth)).toBe(1);
  });

  it("refuses a claim when a commitment is missing from the recorded set", () => {
    const keyring = fixtureKeyring();
    keyring.onSubmitted(10, 1, 3);
    const truth = new Map<number, number>([[10, 1]]);
    expect(() => keyring.buildClaim(truth, [], new Uint8Array(32))).toThrow(/recorded/);
  });
});
