"""Complexity costs charged against strategies, and costed fitness.

A behavioral strategy pays per *distinct* committed action (re-using one
action across games is cheaper than tailoring per game); a rational strategy
pays a flat rationality cost eps_R plus one parameter cost eps_P for its
preference parameter, charged once regardless of how many games it spans.
A handshake pays its own signalling cost eps_H.

Actions are compared after rounding to 1e-9 absolute so that analytically
equal actions reached through different arithmetic still count once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .strategies import Environment, Strategy, StrategyKind, base_fitness

__all__ = [
    "PenaltyConfig",
    "distinct_action_count",
    "complexity_cost",
    "penalized_fitness",
]

#: actions closer than this are one action for costing purposes
ACTION_QUANTUM = 1e-9


@dataclass(frozen=True)
class PenaltyConfig:
    """Per-kind complexity cost rates; all non-negative and finite."""

    eps_r: float = 0.0
    eps_p: float = 0.0
    eps_h: float = 0.0

    def __post_init__(self):
        for name in ("eps_r", "eps_p", "eps_h"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0.0:
                raise ValueError(f"{name} must be finite and non-negative, got {v}")


def _quantize(a: float) -> int:
    # round-half-even, matching the compiled kernel's llrint
    return round(a * 1e9)


def distinct_action_count(strategy: Strategy) -> int:
    """Number of distinct committed actions (after 1e-9 quantization).

    Zero for strategies that carry no committed actions.
    """
    if strategy.kind is not StrategyKind.BEHAVIORAL:
        return 0
    return len({_quantize(a) for a in strategy.actions})  # type: ignore[union-attr]


def complexity_cost(strategy: Strategy, pc: PenaltyConfig) -> float:
    """Cost charged once per strategy, independent of the opponent."""
    if strategy.kind is StrategyKind.BEHAVIORAL:
        return pc.eps_p * distinct_action_count(strategy)
    if strategy.kind is StrategyKind.RATIONAL:
        return pc.eps_r + pc.eps_p
    return pc.eps_h


def penalized_fitness(
    own: Strategy, other: Strategy, env: Environment, pc: PenaltyConfig
) -> float:
    """base_fitness minus the focal player's own complexity cost."""
    return base_fitness(own, other, env) - complexity_cost(own, pc)
