"""Gateway service and FastAPI wiring.

The gateway holds no worker secrets and no session-to-submission mapping
for anonymous flows: plain sessions map to a signing address, zk bodies
arrive with client-built proof material and are relayed from single-use
addresses, so nothing persisted links a session to a nullifier, commitment,
or label.
"""

from __future__ import annotations

import threading

from fastapi import FastAPI, HTTPException, Response

from ..alserver.session import ALServer
from ..alserver.dataset import Store
from ..encoding import decode_fields
from ..ledger import named_address
from ..ledger.state import Receipt
from ..runtime import EventPump, System
from ..zk.backend import Proof
from ..zk.statements import MembershipPublic, PerformancePublic
from . import schemas

# contract revert reason -> HTTP status
CONFLICT_REASONS = {
    "DuplicateVote",
    "NullifierUsed",
    "SampleClosed",
    "WrongPhase",
    "NotJoined",
    "AlreadyJoined",
    "AlreadyClaimed",
    "ClaimWindowClosed",
    "CommitmentAlreadyClaimed",
    "TruthNotPosted",
    "AlreadyDistributed",
    "DuplicateCommitment",
    "TreeFull",
}
UNPROCESSABLE_REASONS = {"InvalidProof"}
BAD_REQUEST_REASONS = {"BadLabel", "MalformedCall", "BadBatch", "InvalidSpec"}


def _status_for(reason: str | None) -> int:
    if reason in UNPROCESSABLE_REASONS:
        return 422
    if reason in BAD_REQUEST_REASONS:
        return 400
    if reason in CONFLICT_REASONS:
        return 409
    return 409


def _receipt_model(receipt: Receipt) -> schemas.ReceiptModel:
    return schemas.ReceiptModel(
        status=receipt.status,
        reason=receipt.reason,
        gas_used=receipt.gas_used,
        tx_hash=receipt.tx_hash.hex(),
    )


def _raise_for_revert(receipt: Receipt) -> None:
    if not receipt.success:
        raise HTTPException(
            status_code=_status_for(receipt.reason),
            detail={"reason": receipt.reason, "gas_used": receipt.gas_used},
        )


class GatewayService:
    """Live system behind the HTTP surface."""

    def __init__(self, system: System | None, store: Store, server: ALServer | None = None):
        self.system = system
        self.store = store
        self.server = server
        self.pump = EventPump(system) if system else None
        if self.pump and server is not None:
            self.pump.register(server)
        self.requester = named_address("requester")
        self.sessions: dict[str, bytes] = {}  # plain-mode signing addresses only
        self._session_counter = 0
        self._lock = threading.Lock()

    # ------------------------------------------------------------- plumbing

    def _system(self) -> System:
        if self.system is None:
            raise HTTPException(status_code=503, detail="ledger unavailable")
        return self.system

    def state_dump(self) -> dict:
        """Everything the gateway itself persists (for the no-linkage scan)."""
        return {
            "sessions": {sid: addr.hex() for sid, addr in self.sessions.items()},
            "session_counter": self._session_counter,
        }

    def pump_events(self) -> None:
        if self.pump:
            self.pump.pump()

    def _job(self, job_id: int):
        system = self._system()
        handle = system.jobs.get(job_id)
        if handle is None:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id}")
        return handle

    # --------------------------------------------------------------- queries

    def list_jobs(self) -> list[schemas.JobSummary]:
        system = self._system()
        return [self._summary(job_id) for job_id in sorted(system.jobs)]

    def _open_samples(self, snapshot: dict) -> list[int]:
        round_no = snapshot.get("round", 0)
        if snapshot.get("phase") != "labeling":
            return []
        out = []
        for sid in snapshot.get(("round_samples", round_no), []):
            if ("labeled", sid) in snapshot:
                continue
            if len(snapshot[("votes", sid)]) < snapshot[("quota", sid)]:
                out.append(sid)
        return sorted(out)

    def _summary(self, job_id: int) -> schemas.JobSummary:
        system = self._system()
        handle = system.jobs[job_id]
        snapshot = system.ledger.storage_snapshot(handle.instance)
        pool = system.ledger.read_storage(handle.score, "reward_pool")
        return schemas.JobSummary(
            job_id=job_id,
            phase=snapshot["phase"],
            round=snapshot["round"],
            zk_mode=handle.zk,
            reward_pool=pool,
            samples_open=len(self._open_samples(snapshot)),
        )

    def job_detail(self, job_id: int) -> schemas.JobDetail:
        system = self._system()
        handle = self._job(job_id)
        snapshot = system.ledger.storage_snapshot(handle.instance)
        score = system.ledger.storage_snapshot(handle.score)
        return schemas.JobDetail(
            **self._summary(job_id).model_dump(),
            dataset_ref=handle.dataset_ref,
            num_classes=snapshot["num_classes"],
            batch_size=snapshot["batch_size"],
            num_rounds=snapshot["num_rounds"],
            labels_per_sample=snapshot["labels_per_sample"],
            truth_posted=bool(score["truth_posted"]),
            distributed=bool(score["distributed"]),
        )

    def next_sample(self, job_id: int, session_id: str | None) -> schemas.NextSample | None:
        system = self._system()
        handle = self._job(job_id)
        snapshot = system.ledger.storage_snapshot(handle.instance)
        open_samples = self._open_samples(snapshot)
        if not handle.zk and session_id in self.sessions:
            address = self.sessions[session_id]
            open_samples = [
                sid for sid in open_samples if ("voted", sid, address) not in snapshot
            ]
        if not open_samples:
            return None
        sid = open_samples[0]
        dataset = self.store.get_dataset(handle.dataset_ref)
        return schemas.NextSample(
            sample_id=sid,
            feature_vector=list(dataset.features[sid]),
            votes_so_far=len(snapshot[("votes", sid)]),
        )

    def rewards(self, job_id: int) -> schemas.RewardsResponse:
        system = self._system()
        handle = self._job(job_id)
        payouts, refund = system.payouts(handle)
        truth_posted = bool(system.ledger.read_storage(handle.score, "truth_posted"))
        return schemas.RewardsResponse(
            truth_posted=truth_posted,
            payouts=[schemas.PayoutEntry(address=a.hex(), amount=v) for a, v in payouts],
            refund=refund,
        )

    def tree(self, job_id: int) -> schemas.TreeResponse:
        system = self._system()
        handle = self._job(job_id)
        if not handle.zk:
            raise HTTPException(status_code=404, detail="plain jobs have no accumulator")
        snapshot = system.ledger.storage_snapshot(handle.instance)
        depth = snapshot["depth"]
        size = snapshot.get(("mt", "size"), 0)
        leaves = [snapshot[("mt", 0, i)].hex() for i in range(size)]
        return schemas.TreeResponse(
            depth=depth,
            root=snapshot[("mt", depth, 0)].hex() if size else snapshot["recent_roots"][-1].hex(),
            leaves=leaves,
            recent_roots=[r.hex() for r in snapshot["recent_roots"]],
        )

    def truth(self, job_id: int) -> schemas.TruthResponse:
        system = self._system()
        handle = self._job(job_id)
        posted = bool(system.ledger.read_storage(handle.score, "truth_posted"))
        entries = system.ledger.read_storage(handle.score, "truth_list", []) if posted else []
        return schemas.TruthResponse(
            posted=posted,
            entries=[schemas.TruthEntry(sample_id=s, label=l) for s, l in entries],
        )

    def commitments(self, job_id: int) -> dict:
        """Recorded label commitments (public accumulator state, claims need it)."""
        system = self._system()
        handle = self._job(job_id)
        if not handle.zk:
            raise HTTPException(status_code=404, detail="plain jobs record no commitments")
        recorded = system.recorded_commitments(handle)
        return {"recorded": [c.hex() for c in recorded]}

    # --------------------------------------------------------------- actions

    def create_session(self) -> schemas.SessionResponse:
        with self._lock:
            self._session_counter += 1
            session_id = f"s{self._session_counter}"
            address = self._system().fresh_address("session")
            self.sessions[session_id] = address
        return schemas.SessionResponse(session_id=session_id, address=address.hex())

    def _session_address(self, session_id: str | None) -> bytes:
        if session_id is None or session_id not in self.sessions:
            raise HTTPException(status_code=400, detail="unknown or missing session_id")
        return self.sessions[session_id]

    def join(self, job_id: int, request: schemas.JoinRequest) -> schemas.JoinResponse:
        system = self._system()
        handle = self._job(job_id)
        address = self._session_address(request.session_id)
        if handle.zk:
            if not request.commitment:
                raise HTTPException(status_code=400, detail="zk join needs a commitment")
            receipt = system.join(address, handle, bytes.fromhex(request.commitment))
        else:
            receipt = system.join(address, handle)
        _raise_for_revert(receipt)
        leaf_index = None
        for event in receipt.events:
            if event.name == "Joined":
                _, leaf_index, _ = decode_fields(("u64", "u64", "b32"), event.payload)
        self.pump_events()
        return schemas.JoinResponse(receipt=_receipt_model(receipt), leaf_index=leaf_index)

    def submit_label(self, job_id: int, request: schemas.LabelRequest) -> schemas.LabelResponse:
        system = self._system()
        handle = self._job(job_id)
        if request.mode == "zk":
            if not handle.zk:
                raise HTTPException(status_code=400, detail="job is not anonymous")
            if request.zk is None:
                raise HTTPException(status_code=400, detail="zk submission body missing")
            public_model = request.zk.public
            public = MembershipPublic(
                root=bytes.fromhex(public_model.root),
                nullifier=bytes.fromhex(public_model.nullifier),
                job_id=public_model.job_id,
                new_commitment=bytes.fromhex(public_model.new_commitment),
                label_commitment=bytes.fromhex(public_model.label_commitment),
                sample_id=public_model.sample_id,
                label=public_model.label,
            )
            proof = Proof(
                request.zk.proof.backend_id,
                bytes.fromhex(request.zk.proof.statement_digest),
                bytes.fromhex(request.zk.proof.blob),
            )
            # single-use relay: the submission comes "from any address"
            sender = system.fresh_address("relay")
            receipt = system.submit_label_zk(sender, handle, public, proof)
        else:
            if handle.zk:
                raise HTTPException(status_code=400, detail="anonymous job requires mode=zk")
            address = self._session_address(request.session_id)
            receipt = system.submit_label(address, handle, request.sample_id, request.label)
        _raise_for_revert(receipt)
        self.pump_events()
        return schemas.LabelResponse(receipt=_receipt_model(receipt))

    def claim(self, job_id: int, request: schemas.ClaimRequest) -> schemas.ClaimResponse:
        system = self._system()
        handle = self._job(job_id)
        if not handle.zk:
            raise HTTPException(status_code=400, detail="plain jobs score without proofs")
        model = request.public
        public = PerformancePublic.canonical(
            job_id=model.job_id,
            truth={e.sample_id: e.label for e in model.truth},
            recorded_commitments=[bytes.fromhex(c) for c in model.recorded_commitments],
            claimed_correct=model.claimed_correct,
            claimed_total=model.claimed_total,
            payout_address=bytes.fromhex(model.payout_address),
        )
        proof = Proof(
            request.proof.backend_id,
            bytes.fromhex(request.proof.statement_digest),
            bytes.fromhex(request.proof.blob),
        )
        receipt = system.claim_score_zk(system.fresh_address("relay"), handle, public, proof)
        _raise_for_revert(receipt)
        self.pump_events()
        return schemas.ClaimResponse(receipt=_receipt_model(receipt))

    def finalize(self, job_id: int) -> schemas.ReceiptModel:
        """Requester action: close the claim window / distribute rewards."""
        system = self._system()
        handle = self._job(job_id)
        receipt = system.distribute_rewards(self.requester, handle)
        _raise_for_revert(receipt)
        self.pump_events()
        return _receipt_model(receipt)


def create_app(service: GatewayService) -> FastAPI:
    app = FastAPI(title="crowdlabel gateway", version="0.1.0")
    app.state.service = service

    @app.get("/")
    def root() -> dict:
        return {"name": "crowdlabel gateway", "version": "0.1.0"}

    @app.get("/jobs", response_model=list[schemas.JobSummary])
    def list_jobs():
        return service.list_jobs()

    @app.get("/jobs/{job_id}", response_model=schemas.JobDetail)
    def job_detail(job_id: int):
        return service.job_detail(job_id)

    @app.get("/jobs/{job_id}/next-sample", response_model=schemas.NextSample, responses={204: {}})
    def next_sample(job_id: int, session: str | None = None):
        sample = service.next_sample(job_id, session)
        if sample is None:
            return Response(status_code=204)
        return sample

    @app.post("/sessions", response_model=schemas.SessionResponse)
    def create_session():
        return service.create_session()

    @app.post("/jobs/{job_id}/join", response_model=schemas.JoinResponse)
    def join(job_id: int, request: schemas.JoinRequest):
        return service.join(job_id, request)

    @app.post("/jobs/{job_id}/labels", response_model=schemas.LabelResponse)
    def submit_label(job_id: int, request: schemas.LabelRequest):
        return service.submit_label(job_id, request)

    @app.get("/jobs/{job_id}/rewards", response_model=schemas.RewardsResponse)
    def rewards(job_id: int):
        return service.rewards(job_id)

    @app.get("/jobs/{job_id}/tree", response_model=schemas.TreeResponse)
    def tree(job_id: int):
        return service.tree(job_id)

    @app.get("/jobs/{job_id}/truth", response_model=schemas.TruthResponse)
    def truth(job_id: int):
        return service.truth(job_id)

    @app.get("/jobs/{job_id}/commitments")
    def commitments(job_id: int):
        return service.commitments(job_id)

    @app.post("/jobs/{job_id}/claims", response_model=schemas.ClaimResponse)
    def claim(job_id: int, request: schemas.ClaimRequest):
        return service.claim(job_id, request)

    @app.post("/jobs/{job_id}/finalize", response_model=schemas.ReceiptModel)
    def finalize(job_id: int):
        return service.finalize(job_id)

    return app


def create_live_app(config) -> FastAPI:
    """Build the system from a campaign config, create its jobs, and serve.

    Rounds advance as live labels arrive; rewards wait for POST /finalize
    so human workers get a claim window.
    """
    from ..simulation.campaign import CampaignConfig  # config type, for callers

    assert isinstance(config, CampaignConfig)
    store = Store()
    store.add_dataset(config.dataset)
    system = System(config.schedule, config.merkle_depth)
    server = ALServer(
        store,
        named_address("alserver"),
        strategy=config.strategy,
        train_config=config.train,
        selection_seed=config.rng_seed,
        heldout_fraction=config.heldout_fraction,
        auto_finalize=False,
    )
    service = GatewayService(system, store, server)
    modes = ["plain", "zk"] if config.mode == "both" else [config.mode]
    for mode in modes:
        system.create_job(
            service.requester,
            config.dataset.ref,
            config.num_classes(),
            config.batch_size,
            config.num_rounds,
            config.labels_per_sample,
            config.reward_pool,
            mode == "zk",
            named_address("alserver"),
            config.volume_weighted,
        )
    service.pump_events()  # AL server opens round 1 for each job
    return create_app(service)
