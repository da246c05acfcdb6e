"""The six on-chain state machines: factory, job management, and the
plain/anonymous job instance and score contract pairs."""

from .base import Contract, PHASE_CREATED, PHASE_RECRUITING, PHASE_LABELING, PHASE_EVALUATING, PHASE_COMPLETED
from .payout import proportional_payouts
from .factory import ContractFactory
from .management import JobManagement
from .instance import JobInstance
from .score import JobScore
from .zk_instance import ZKJobInstance
from .zk_score import ZKJobScore

ALL_TEMPLATES = (ContractFactory, JobManagement, JobInstance, JobScore, ZKJobInstance, ZKJobScore)

__all__ = [
    "Contract",
    "PHASE_CREATED",
    "PHASE_RECRUITING",
    "PHASE_LABELING",
    "PHASE_EVALUATING",
    "PHASE_COMPLETED",
    "proportional_payouts",
    "ContractFactory",
    "JobManagement",
    "JobInstance",
    "JobScore",
    "ZKJobInstance",
    "ZKJobScore",
    "ALL_TEMPLATES",
]
