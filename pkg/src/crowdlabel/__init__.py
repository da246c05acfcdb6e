"""crowdlabel: a deterministic ledger-backed crowd-labeling stack.

A simulated single-node chain hosts job/labeling/reward contracts; an
off-chain active-learning server selects batches and trains on aggregated
labels; a commit-nullify layer lets workers label and claim rewards without
linking their identity to their labels.
"""

__version__ = "0.1.0"
