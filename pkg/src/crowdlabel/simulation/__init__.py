"""Simulated crowd workers and reproducible end-to-end campaigns."""

from .workers import WorkerProfile, WorkerPool, worker_decide
from .campaign import (
    CampaignConfig,
    CampaignMetrics,
    ConfigInvalid,
    JobMetrics,
    WorkerResult,
    run_campaign,
)
from .compare import compare_strategies, StrategyComparison

__all__ = [
    "WorkerProfile",
    "WorkerPool",
    "worker_decide",
    "CampaignConfig",
    "CampaignMetrics",
    "ConfigInvalid",
    "JobMetrics",
    "WorkerResult",
    "run_campaign",
    "compare_strategies",
    "StrategyComparison",
]
