"""Commit-nullify anonymity layer: commitments, Merkle accumulator, proof statements."""

from .primitives import (
    TAG_ZERO,
    TAG_JOIN,
    TAG_LABEL,
    TAG_NULL,
    TAG_SECRET,
    TAG_SEED,
    hash256,
    join_commitment,
    label_commitment,
    nullifier,
    zero_leaf,
    secret_root,
    secret_at,
)
from .merkle import MerkleTree, MerklePath, TreeFull
from .statements import MembershipPublic, MembershipWitness, PerformancePublic, PerformanceWitness
from .backend import Proof, ProofBackend, TransparentBackend, UnsatisfiedStatement, get_backend

__all__ = [
    "TAG_ZERO",
    "TAG_JOIN",
    "TAG_LABEL",
    "TAG_NULL",
    "TAG_SECRET",
    "TAG_SEED",
    "hash256",
    "join_commitment",
    "label_commitment",
    "nullifier",
    "zero_leaf",
    "secret_root",
    "secret_at",
    "MerkleTree",
    "MerklePath",
    "TreeFull",
    "MembershipPublic",
    "MembershipWitness",
    "PerformancePublic",
    "PerformanceWitness",
    "Proof",
    "ProofBackend",
    "TransparentBackend",
    "UnsatisfiedStatement",
    "get_backend",
]
