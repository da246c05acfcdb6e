"""Dataset store and event-driven session behavior."""

import numpy as np
import pytest

from crowdlabel.alserver.dataset import Dataset, Store, UnknownDataset, make_blobs
from crowdlabel.alserver.model import TrainConfig
from crowdlabel.alserver.session import ALServer, stratified_heldout
from crowdlabel.ledger import named_address
from crowdlabel.runtime import EventPump, System
from crowdlabel.simulation import CampaignConfig, run_campaign
from crowdlabel.simulation.campaign import default_roster
from crowdlabel.simulation.workers import WorkerPool

AL = named_address("alserver")
REQ = named_address("requester")


def test_dataset_csv_roundtrip(tmp_path):
    dataset = make_blobs(n_samples=12, seed=3)
    text = dataset.to_csv()
    back = Dataset.from_csv("blobs", text)
    assert back.sample_ids == dataset.sample_ids
    assert back.hidden_labels == dataset.hidden_labels
    for sid in dataset.sample_ids:
        assert back.features[sid] == dataset.features[sid]


def test_store_append_only_and_file_backed(tmp_path):
    store = Store(tmp_path)
    dataset = make_blobs(n_samples=8, seed=1)
    store.add_dataset(dataset)
    with pytest.raises(ValueError):
        store.add_dataset(dataset)
    assert (tmp_path / "dataset-blobs.csv").exists()
    with pytest.raises(UnknownDataset):
        store.get_dataset("nope")
    # model persistence round-trips through decimal text
    weights = np.array([[0.125, -3.5, 1e-9], [2.0, 0.0, -0.25]])
    store.save_model(7, 2, weights)
    assert (store.load_model(7, 2) == weights).all()


def test_heldout_split_stratified_and_seeded():
    dataset = make_blobs(n_samples=100, seed=5)
    h1 = stratified_heldout(dataset, 0.25, seed=42)
    h2 = stratified_heldout(dataset, 0.25, seed=42)
    assert h1 == h2
    assert len(h1) == 24  # round(50 * 0.25) = 12 per class (banker's rounding)
    labels = [dataset.hidden_labels[sid] for sid in h1]
    assert 0 < sum(labels) < len(labels)  # both classes present
    assert stratified_heldout(dataset, 0.25, seed=43) != h1


def test_unknown_dataset_aborts_session_no_round_opened():
    store = Store()
    store.add_dataset(make_blobs(n_samples=20))
    system = System()
    server = ALServer(store, AL)
    pump = EventPump(system)
    pump.register(server)
    system.create_job(REQ, "missing-ref", 2, 2, 1, 1, 10, False, AL)
    pump.pump()
    assert server.sessions == {}
    assert any("missing-ref" in err for err in server.errors)
    assert not any(e.name == "RoundOpened" for e in system.ledger.events)


def test_job_created_opens_round_one():
    store = Store()
    dataset = make_blobs(n_samples=40)
    store.add_dataset(dataset)
    system = System()
    server = ALServer(store, AL)
    pump = EventPump(system)
    pump.register(server)
    handle = system.create_job(REQ, "blobs", 2, 3, 2, 1, 10, False, AL)
    pump.pump()
    assert any(e.name == "RoundOpened" for e in system.ledger.events)
    session = server.sessions[handle.job_id]
    assert session.round_no == 1
    assert len(session.pending) == 3
    # cold start: zero weights -> uniform entropy -> lowest queryable ids
    assert session.pending == set(sorted(set(dataset.sample_ids) - session.heldout)[:3])


def test_two_concurrent_jobs_independent_sessions():
    store = Store()
    store.add_dataset(make_blobs(n_samples=60))
    system = System()
    server = ALServer(store, AL)
    pump = EventPump(system)
    pump.register(server)
    j1 = system.create_job(REQ, "blobs", 2, 2, 1, 1, 10, False, AL)
    j2 = system.create_job(REQ, "blobs", 2, 3, 1, 1, 10, False, AL)
    pump.pump()
    assert set(server.sessions) == {j1.job_id, j2.job_id}
    assert len(server.sessions[j1.job_id].pending) == 2
    assert len(server.sessions[j2.job_id].pending) == 3


def test_zero_workers_violates_campaign_pre():
    config = CampaignConfig(
        dataset=make_blobs(n_samples=30),
        workers=[],
        batch_size=2,
        num_rounds=1,
        labels_per_sample=1,
        mode="plain",
    )
    with pytest.raises(Exception, match="votes per sample"):
        run_campaign(config)


def test_silent_crowd_stalls_session(monkeypatch):
    # a roster that never votes leaves the round open: SessionStalled
    from crowdlabel.alserver.session import SessionStalled
    from crowdlabel.simulation.workers import WorkerPool

    monkeypatch.setattr(WorkerPool, "_vote_to_quota", lambda *args, **kwargs: None)
    config = CampaignConfig(
        dataset=make_blobs(n_samples=30),
        batch_size=2,
        num_rounds=1,
        labels_per_sample=1,
        mode="plain",
    )
    with pytest.raises(SessionStalled):
        run_campaign(config)


def test_predict_truth_requires_training():
    from crowdlabel.alserver.model import Model, TrainConfig, UntrainedModel
    from crowdlabel.alserver.session import Session
    from crowdlabel.runtime import JobHandle

    dataset = make_blobs(n_samples=10)
    session = Session(
        job=JobHandle(1, "blobs", b"\x01" * 32, b"\x02" * 32, False),
        dataset=dataset,
        num_classes=2,
        batch_size=2,
        num_rounds=1,
        strategy="entropy",
        heldout=set(),
        model=Model.initial(2, dataset.dim, TrainConfig()),
    )
    with pytest.raises(UntrainedModel):
        session.predict_truth([0, 1])


def test_session_summary_rows_shape():
    config = CampaignConfig(
        dataset=make_blobs(n_samples=60, seed=2),
        workers=default_roster(3, 0.95),
        batch_size=3,
        num_rounds=2,
        labels_per_sample=3,
        mode="plain",
        reward_pool=100,
    )
    metrics, _ = run_campaign(config)
    job = metrics.jobs[0]
    assert [r.round_no for r in job.rounds] == [1, 2]
    assert [r.pool_size for r in job.rounds] == [3, 6]
    assert all(0.0 <= r.heldout_accuracy <= 1.0 for r in job.rounds)
    gas_values = [r.cumulative_gas for r in job.rounds]
    assert gas_values == sorted(gas_values)
