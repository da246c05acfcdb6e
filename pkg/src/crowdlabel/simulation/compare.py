"""Paired strategy comparison: entropy vs random at equal label budget."""

from __future__ import annotations

import dataclasses
import statistics
from dataclasses import dataclass

from .campaign import CampaignConfig, run_campaign


@dataclass
class StrategyComparison:
    seeds: list[int]
    entropy_acc: list[float]
    random_acc: list[float]

    @property
    def mean_entropy(self) -> float:
        return statistics.fmean(self.entropy_acc)

    @property
    def mean_random(self) -> float:
        return statistics.fmean(self.random_acc)

    @property
    def stdev_entropy(self) -> float:
        return statistics.pstdev(self.entropy_acc)

    @property
    def stdev_random(self) -> float:
        return statistics.pstdev(self.random_acc)

    @property
    def paired_diff(self) -> float:
        return self.mean_entropy - self.mean_random

    def lines(self) -> list[str]:
        return [
            "strategy,mean_final_accuracy,stddev",
            f"entropy,{self.mean_entropy:.6f},{self.stdev_entropy:.6f}",
            f"random,{self.mean_random:.6f},{self.stdev_random:.6f}",
            f"paired_difference,{self.paired_diff:.6f},",
        ]


def compare_strategies(config: CampaignConfig, seeds: list[int]) -> StrategyComparison:
    """Run both strategies per seed with identical everything else.

    Runs in plain mode: the anonymity layer cannot change aggregated labels,
    so strategy quality is mode-independent and plain runs are cheaper.
    """
    if len(seeds) < 10:
        raise ValueError("paired comparison needs at least 10 seeds")
    entropy_acc, random_acc = [], []
    for seed in seeds:
        for strategy, sink in (("entropy", entropy_acc), ("random", random_acc)):
            run_cfg = dataclasses.replace(config, rng_seed=seed, strategy=strategy, mode="plain")
            metrics, _ = run_campaign(run_cfg)
            sink.append(metrics.jobs[0].final_heldout_accuracy)
    return StrategyComparison(list(seeds), entropy_acc, random_acc)
