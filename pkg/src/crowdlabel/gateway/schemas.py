"""Request/response models. Field names mirror the domain types; all byte
values travel as lowercase hex strings."""

from __future__ import annotations

from pydantic import BaseModel, Field


class JobSummary(BaseModel):
    job_id: int
    phase: str
    round: int
    zk_mode: bool
    reward_pool: int
    samples_open: int


class JobDetail(JobSummary):
    dataset_ref: str
    num_classes: int
    batch_size: int
    num_rounds: int
    labels_per_sample: int
    truth_posted: bool
    distributed: bool


class SessionResponse(BaseModel):
    session_id: str
    address: str  # hex


class NextSample(BaseModel):
    sample_id: int
    feature_vector: list[float]
    votes_so_far: int


class ReceiptModel(BaseModel):
    status: str
    reason: str | None = None
    gas_used: int
    tx_hash: str


class ProofModel(BaseModel):
    backend_id: str
    statement_digest: str  # hex
    blob: str  # hex


class MembershipPublicModel(BaseModel):
    root: str
    nullifier: str
    job_id: int
    new_commitment: str
    label_commitment: str
    sample_id: int
    label: int


class ZkSubmission(BaseModel):
    public: MembershipPublicModel
    proof: ProofModel


class LabelRequest(BaseModel):
    sample_id: int
    label: int
    mode: str = Field(pattern="^(plain|zk)$")
    session_id: str | None = None  # plain mode: which session's address signs
    zk: ZkSubmission | None = None


class LabelResponse(BaseModel):
    receipt: ReceiptModel


class JoinRequest(BaseModel):
    session_id: str
    commitment: str | None = None  # zk join commitment (hex)


class JoinResponse(BaseModel):
    receipt: ReceiptModel
    leaf_index: int | None = None


class PayoutEntry(BaseModel):
    address: str
    amount: int


class RewardsResponse(BaseModel):
    truth_posted: bool
    payouts: list[PayoutEntry]
    refund: int


class TreeResponse(BaseModel):
    depth: int
    root: str
    leaves: list[str]
    recent_roots: list[str]


class TruthEntry(BaseModel):
    sample_id: int
    label: int


class TruthResponse(BaseModel):
    posted: bool
    entries: list[TruthEntry]


class PerformancePublicModel(BaseModel):
    job_id: int
    truth: list[TruthEntry]
    recorded_commitments: list[str]
    claimed_correct: int
    claimed_total: int
    payout_address: str


class ClaimRequest(BaseModel):
    public: PerformancePublicModel
    proof: ProofModel


class ClaimResponse(BaseModel):
    receipt: ReceiptModel
