/**
 * Commit-nullify primitives, byte-identical to the server stack
 * (PROTOCOL.md is the contract; fixtures/vectors.json pins outputs).
 * Everything here runs locally: the anonymity claim collapses if a server
 * ever builds these values.
 */

import { concat, u64 } from "./encoding";
import { sha256 } from "./sha256";

export const TAG_ZERO = Uint8Array.of(0x00);
export const TAG_JOIN = Uint8Array.of(0x01);
export const TAG_LABEL = Uint8Array.of(0x02);
export const TAG_NULL = Uint8Array.of(0x03);
export const TAG_SECRET = Uint8Array.of(0x04);
export const TAG_SEED = Uint8Array.of(0x05);

export function zeroLeaf(): Uint8Array {
  return sha256(concat(TAG_ZERO, u64(0)));
}

export function joinCommitment(secret: Uint8Array): Uint8Array {
  checkSecret(secret);
  return sha256(concat(TAG_JOIN, secret));
}

export function labelCommitment(secret: Uint8Array, sampleId: number, label: number): Uint8Array {
  checkSecret(secret);
  return sha256(concat(TAG_LABEL, secret, u64(sampleId), u64(label)));
}

export function nullifier(secret: Uint8Array, jobId: number): Uint8Array {
  checkSecret(secret);
  return sha256(concat(TAG_NULL, secret, u64(jobId)));
}

export function secretRoot(seed: number): Uint8Array {
  return sha256(concat(TAG_SEED, u64(seed)));
}

/** Browser-generated random chain root (never derived from a guessable seed). */
export function randomRoot(): Uint8Array {
  const out = new Uint8Array(32);
  crypto.getRandomValues(out);
  return out;
}

export function secretAt(root: Uint8Array, jobId: number, index: number): Uint8Array {
  checkSecret(root);
  return sha256(concat(TAG_SECRET, root, u64(jobId), u64(index)));
}

function checkSecret(secret: Uint8Array): void {
  if (secret.length !== 32) throw new Error(`secret must be 32 bytes, got ${secret.length}`);
}
