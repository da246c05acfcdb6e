"""HTTP surface: endpoint contracts, error mapping, zk relaying, statelessness."""

import pytest
from fastapi.testclient import TestClient

from crowdlabel.alserver.dataset import Store, make_blobs
from crowdlabel.gateway.app import GatewayService, create_app, create_live_app
from crowdlabel.simulation import CampaignConfig
from crowdlabel.zk.client import WorkerKeyring


def live_client(**overrides) -> TestClient:
    params = dict(
        dataset=make_blobs(n_samples=40, separation=2.5, seed=11),
        mode="zk",
        batch_size=2,
        num_rounds=2,
        labels_per_sample=1,
        reward_pool=100,
        workers=[],
    )
    params.update(overrides)
    config = CampaignConfig(**params)
    return TestClient(create_live_app(config))


@pytest.fixture
def zk_client():
    return live_client()


@pytest.fixture
def plain_client():
    return live_client(mode="plain", labels_per_sample=1)


def test_ledger_unavailable_503():
    service = GatewayService(None, Store())
    client = TestClient(create_app(service))
    assert client.get("/jobs").status_code == 503


def test_list_jobs_and_detail(zk_client):
    jobs = zk_client.get("/jobs").json()
    assert len(jobs) == 1
    job = jobs[0]
    assert job["phase"] == "labeling"  # AL server already opened round 1
    assert job["zk_mode"] is True
    assert job["samples_open"] == 2
    detail = zk_client.get("/jobs/1").json()
    assert detail["num_classes"] == 2
    assert detail["truth_posted"] is False
    assert zk_client.get("/jobs/99").status_code == 404


def test_next_sample_and_204(zk_client):
    sample = zk_client.get("/jobs/1/next-sample").json()
    assert set(sample) == {"sample_id", "feature_vector", "votes_so_far"}
    assert len(sample["feature_vector"]) == 2
    assert sample["votes_so_far"] == 0
    assert zk_client.get("/jobs/99/next-sample").status_code == 404


def test_plain_label_flow(plain_client):
    client = plain_client
    session = client.post("/sessions").json()
    assert client.post("/jobs/1/join", json={"session_id": session["session_id"]}).status_code == 200
    sample = client.get(f"/jobs/1/next-sample?session={session['session_id']}").json()
    body = {
        "sample_id": sample["sample_id"],
        "label": 1,
        "mode": "plain",
        "session_id": session["session_id"],
    }
    response = client.post("/jobs/1/labels", json=body)
    assert response.status_code == 200
    receipt = response.json()["receipt"]
    assert receipt["status"] == "success"
    assert receipt["gas_used"] > 0
    # duplicate vote (sample already closed at quota 1) -> 409
    again = client.post("/jobs/1/labels", json=body)
    assert again.status_code == 409
    assert again.json()["detail"]["reason"] in ("SampleClosed", "DuplicateVote")
    # next-sample no longer offers the voted sample
    nxt = client.get(f"/jobs/1/next-sample?session={session['session_id']}").json()
    assert nxt["sample_id"] != sample["sample_id"]


def test_label_without_session_400(plain_client):
    body = {"sample_id": 0, "label": 0, "mode": "plain"}
    assert plain_client.post("/jobs/1/labels", json=body).status_code == 400


def zk_join(client, seed=77):
    keyring = WorkerKeyring.from_seed(seed, 1)
    session = client.post("/sessions").json()
    joined = client.post(
        "/jobs/1/join",
        json={"session_id": session["session_id"], "commitment": keyring.join_commitment().hex()},
    )
    assert joined.status_code == 200, joined.text
    keyring.on_joined(joined.json()["leaf_index"])
    return keyring, session


def zk_submit(client, keyring, sample_id, label):
    tree = client.get("/jobs/1/tree").json()
    leaves = [bytes.fromhex(x) for x in tree["leaves"]]
    bundle = keyring.build_submission(leaves, sample_id, label, tree["depth"])
    body = {
        "sample_id": sample_id,
        "label": label,
        "mode": "zk",
        "zk": {
            "public": {
                "root": bundle.public.root.hex(),
                "nullifier": bundle.public.nullifier.hex(),
                "job_id": bundle.public.job_id,
                "new_commitment": bundle.public.new_commitment.hex(),
                "label_commitment": bundle.public.label_commitment.hex(),
                "sample_id": bundle.public.sample_id,
                "label": bundle.public.label,
            },
            "proof": {
                "backend_id": bundle.proof.backend_id,
                "statement_digest": bundle.proof.statement_digest.hex(),
                "blob": bundle.proof.blob.hex(),
            },
        },
    }
    response = client.post("/jobs/1/labels", json=body)
    if response.status_code == 200:
        new_leaves = client.get("/jobs/1/tree").json()["leaves"]
        keyring.on_submitted(sample_id, label, len(new_leaves) - 1)
    return response, body


def claim_body(public, proof) -> dict:
    return {
        "public": {
            "job_id": public.job_id,
            "truth": [{"sample_id": s, "label": l} for s, l in public.truth],
            "recorded_commitments": [c.hex() for c in public.recorded_commitments],
            "claimed_correct": public.claimed_correct,
            "claimed_total": public.claimed_total,
            "payout_address": public.payout_address.hex(),
        },
        "proof": {
            "backend_id": proof.backend_id,
            "statement_digest": proof.statement_digest.hex(),
            "blob": proof.blob.hex(),
        },
    }


def test_zk_end_to_end_over_http(zk_client):
    client = zk_client
    keyring, _ = zk_join(client)
    # label every sample of both rounds; the AL server advances rounds live
    for _ in range(4):
        sample = client.get("/jobs/1/next-sample").json()
        response, _ = zk_submit(client, keyring, sample["sample_id"], sample["sample_id"] % 2)
        assert response.status_code == 200, response.text
    # final round done: truth posted, claim window open
    detail = client.get("/jobs/1").json()
    assert detail["phase"] == "evaluating"
    truth = client.get("/jobs/1/truth").json()
    assert truth["posted"] is True
    truth_map = {e["sample_id"]: e["label"] for e in truth["entries"]}
    rewards = client.get("/jobs/1/rewards").json()
    assert rewards["truth_posted"] is True and rewards["payouts"] == []

    payout_address = bytes(range(32))
    recorded = [bytes.fromhex(c) for c in client.get("/jobs/1/commitments").json()["recorded"]]
    public, proof = keyring.build_claim(truth_map, recorded, payout_address)
    claim = client.post("/jobs/1/claims", json=claim_body(public, proof))
    assert claim.status_code == 200, claim.text
    # replayed claim -> 409 CommitmentAlreadyClaimed
    replay = client.post("/jobs/1/claims", json=claim_body(public, proof))
    assert replay.status_code == 409
    assert replay.json()["detail"]["reason"] == "CommitmentAlreadyClaimed"

    final = zk_client.post("/jobs/1/finalize")
    assert final.status_code == 200
    rewards = client.get("/jobs/1/rewards").json()
    assert rewards["payouts"] == [{"address": payout_address.hex(), "amount": 100}]
    assert rewards["refund"] == 0
    assert client.get("/jobs/1").json()["phase"] == "completed"


def test_zk_replay_409_and_tamper_422(zk_client):
    client = zk_client
    keyring, _ = zk_join(client, seed=99)
    sample = client.get("/jobs/1/next-sample").json()
    response, body = zk_submit(client, keyring, sample["sample_id"], 1)
    assert response.status_code == 200
    # replay the same (public, proof): nullifier already spent -> 409
    replay = client.post("/jobs/1/labels", json=body)
    assert replay.status_code == 409
    assert replay.json()["detail"]["reason"] in ("NullifierUsed", "SampleClosed")

    # tampered proof blob -> 422
    sample = client.get("/jobs/1/next-sample").json()
    tree = client.get("/jobs/1/tree").json()
    leaves = [bytes.fromhex(x) for x in tree["leaves"]]
    bundle = keyring.build_submission(leaves, sample["sample_id"], 0, tree["depth"])
    blob = bytearray(bundle.proof.blob)
    blob[10] ^= 0xFF
    body = {
        "sample_id": sample["sample_id"],
        "label": 0,
        "mode": "zk",
        "zk": {
            "public": {
                "root": bundle.public.root.hex(),
                "nullifier": bundle.public.nullifier.hex(),
                "job_id": bundle.public.job_id,
                "new_commitment": bundle.public.new_commitment.hex(),
                "label_commitment": bundle.public.label_commitment.hex(),
                "sample_id": bundle.public.sample_id,
                "label": bundle.public.label,
            },
            "proof": {
                "backend_id": bundle.proof.backend_id,
                "statement_digest": bundle.proof.statement_digest.hex(),
                "blob": bytes(blob).hex(),
            },
        },
    }
    assert client.post("/jobs/1/labels", json=body).status_code == 422


def test_gateway_keeps_no_zk_associations(zk_client):
    client = zk_client
    keyring, session = zk_join(client, seed=123)
    sample = client.get("/jobs/1/next-sample").json()
    response, body = zk_submit(client, keyring, sample["sample_id"], 1)
    assert response.status_code == 200
    service = client.app.state.service
    dump = str(service.state_dump())
    assert body["zk"]["public"]["nullifier"] not in dump
    assert body["zk"]["public"]["label_commitment"] not in dump
    assert keyring.join_commitment().hex() not in dump
    # sessions map plain signing addresses only
    assert set(service.state_dump()["sessions"]) == {session["session_id"]}


def test_relay_addresses_single_use(zk_client):
    client = zk_client
    keyring, _ = zk_join(client, seed=5)
    senders = []
    for _ in range(2):
        sample = client.get("/jobs/1/next-sample").json()
        response, _ = zk_submit(client, keyring, sample["sample_id"], 1)
        assert response.status_code == 200
    system = client.app.state.service.system
    zk_senders = [
        tx.sender for tx, r in system.ledger.tx_log if tx.call_name == "submit_label_zk"
    ]
    assert len(zk_senders) == len(set(zk_senders)) == 2


def test_rewards_before_truth(plain_client):
    rewards = plain_client.get("/jobs/1/rewards").json()
    assert rewards == {"truth_posted": False, "payouts": [], "refund": 0}
    assert plain_client.get("/jobs/99/rewards").status_code == 404


def test_responses_pure_functions_of_state(zk_client):
    # identical requests against unchanged ledger state -> identical bodies
    for path in ("/jobs", "/jobs/1", "/jobs/1/tree", "/jobs/1/rewards", "/jobs/1/truth"):
        assert zk_client.get(path).content == zk_client.get(path).content
