"""Cross-implementation test vectors.

Generates the byte-exact fixtures the browser console verifies itself
against: commitments, nullifiers, tree roots, paths, statement digests, and
full proof blobs for fixed seeds. Regenerate with:

    python -m crowdlabel.fixtures frontend/fixtures/vectors.json
"""

from __future__ import annotations

import json
import sys

from .zk.backend import TransparentBackend, _keystream
from .zk.merkle import MerkleTree, zero_levels
from .zk.primitives import (
    hash256,
    join_commitment,
    label_commitment,
    nullifier,
    secret_at,
    secret_root,
    zero_leaf,
)
from .zk.statements import (
    MembershipPublic,
    MembershipWitness,
    PerformancePublic,
    PerformanceWitness,
)

FIXTURE_SEEDS = [1, 42, 9001]
FIXTURE_JOB = 7


def generate() -> dict:
    backend = TransparentBackend()
    vectors: dict = {
        "hash": [
            {"input_utf8": s, "sha256": hash256(s.encode()).hex()}
            for s in ["", "abc", "crowdlabel"]
        ],
        "zero_leaf": zero_leaf().hex(),
        "zero_levels_depth4": [z.hex() for z in zero_levels(4)],
        "keystream": {
            "digest": hash256(b"keystream-test").hex(),
            "first_48": _keystream(hash256(b"keystream-test"), 48).hex(),
        },
    }

    chains = []
    for seed in FIXTURE_SEEDS:
        root = secret_root(seed)
        secrets = [secret_at(root, FIXTURE_JOB, k) for k in range(3)]
        chains.append(
            {
                "seed": seed,
                "job_id": FIXTURE_JOB,
                "root": root.hex(),
                "secrets": [s.hex() for s in secrets],
                "join_commitments": [join_commitment(s).hex() for s in secrets],
                "nullifiers": [nullifier(s, FIXTURE_JOB).hex() for s in secrets],
                "label_commitments": [
                    label_commitment(secrets[k], 10 + k, k % 2).hex() for k in range(3)
                ],
            }
        )
    vectors["chains"] = chains

    # small tree: the three fixture join commitments, depth 4
    leaves = [join_commitment(secret_at(secret_root(s), FIXTURE_JOB, 0)) for s in FIXTURE_SEEDS]
    tree = MerkleTree.from_leaves(leaves, depth=4)
    vectors["tree"] = {
        "depth": 4,
        "leaves": [leaf.hex() for leaf in leaves],
        "root": tree.root().hex(),
        "paths": [
            {"leaf_index": i, "siblings": [s.hex() for s in tree.path(i).siblings]}
            for i in range(len(leaves))
        ],
    }

    # full membership bundle for chain 0, sample 10, label 1
    root0 = secret_root(FIXTURE_SEEDS[0])
    secret0 = secret_at(root0, FIXTURE_JOB, 0)
    secret1 = secret_at(root0, FIXTURE_JOB, 1)
    public = MembershipPublic(
        root=tree.root(),
        nullifier=nullifier(secret0, FIXTURE_JOB),
        job_id=FIXTURE_JOB,
        new_commitment=join_commitment(secret1),
        label_commitment=label_commitment(secret0, 10, 1),
        sample_id=10,
        label=1,
    )
    witness = MembershipWitness(secret0, tree.path(0))
    proof = backend.prove_membership(public, witness)
    vectors["membership"] = {
        "public": {
            "root": public.root.hex(),
            "nullifier": public.nullifier.hex(),
            "job_id": public.job_id,
            "new_commitment": public.new_commitment.hex(),
            "label_commitment": public.label_commitment.hex(),
            "sample_id": public.sample_id,
            "label": public.label,
        },
        "public_encoding": public.encode().hex(),
        "digest": public.digest().hex(),
        "witness_encoding": witness.encode().hex(),
        "proof_blob": proof.blob.hex(),
        "proof_encoding": proof.encode().hex(),
    }

    # performance bundle: chain 0 claims two labels against a tiny truth table
    truth = {10: 1, 11: 0}
    entries = ((secret0, 10, 1), (secret1, 11, 1))
    recorded = [label_commitment(s, sid, lab) for s, sid, lab in entries]
    perf_witness = PerformanceWitness(entries)
    perf_public = PerformancePublic.canonical(
        job_id=FIXTURE_JOB,
        truth=truth,
        recorded_commitments=recorded,
        claimed_correct=1,
        claimed_total=2,
        payout_address=bytes(range(32)),
    )
    perf_proof = backend.prove_performance(perf_public, perf_witness)
    vectors["performance"] = {
        "public": {
            "job_id": perf_public.job_id,
            "truth": [[s, l] for s, l in perf_public.truth],
            "recorded_commitments": [c.hex() for c in perf_public.recorded_commitments],
            "claimed_correct": perf_public.claimed_correct,
            "claimed_total": perf_public.claimed_total,
            "payout_address": perf_public.payout_address.hex(),
        },
        "public_encoding": perf_public.encode().hex(),
        "digest": perf_public.digest().hex(),
        "witness_encoding": perf_witness.encode().hex(),
        "proof_blob": perf_proof.blob.hex(),
    }
    return vectors


def main() -> None:
    out = json.dumps(generate(), indent=2, sort_keys=True) + "\n"
    if len(sys.argv) > 1:
        with open(sys.argv[1], "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)


if __name__ == "__main__":
    main()
