"""Accuracy-proportional reward splitting, exact on integer pools.

payout_i = floor(pool * a_i / sum(a)); the dust left by flooring goes back
to the requester as refund, so pool conservation holds exactly. A zero
accuracy sum refunds the whole pool.
"""

from __future__ import annotations

from fractions import Fraction


def accuracy_fraction(correct: int, total: int) -> Fraction:
    """Worker accuracy; zero votes cast means zero accuracy by convention."""
    if total == 0:
        return Fraction(0)
    return Fraction(correct, total)


def proportional_payouts(pool: int, accuracies: list[Fraction]) -> tuple[list[int], int]:
    if pool < 0:
        raise ValueError("pool must be non-negative")
    total = sum(accuracies, Fraction(0))
    if total == 0:
        return [0] * len(accuracies), pool
    payouts = [int(pool * a / total) for a in accuracies]  # int() floors non-negatives
    refund = pool - sum(payouts)
    return payouts, refund
