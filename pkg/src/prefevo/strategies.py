"""Strategy space: behavioral rules, rational preferences, secret handshakes.

A *behavioral* strategy commits to one fixed action per game. A *rational*
strategy carries a single preference parameter alpha and plays the subjective
best response in whatever game it meets: against a fixed action that is the
closed-form best response; against another rational player both land on the
preference equilibrium. A *handshake* strategy is indifferent over outcomes
(constant utility) and so can select any equilibrium: it matches what its
opponent's strategy would produce against itself (leaving the opponent's
fitness unchanged) but plays the jointly efficient action against a fellow
handshaker.

Fitness throughout is the material payoff of the focal player, averaged over
the games of an Environment with its mixture proportions. Complexity costs
live in a separate module and are subtracted downstream.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Optional

from .game import GameParams, best_response, efficient_action, nash_equilibrium, payoff

__all__ = [
    "StrategyKind",
    "Strategy",
    "Environment",
    "resolve_action",
    "base_fitness",
]


class StrategyKind(enum.Enum):
    BEHAVIORAL = "behavioral"
    RATIONAL = "rational"
    HANDSHAKE = "handshake"


@dataclass(frozen=True)
class Strategy:
    """One strategy; exactly the fields of its kind are populated.

    Construct through the classmethods rather than directly:
    ``Strategy.behavioral(a1, ..., aK)``, ``Strategy.rational(alpha)``,
    ``Strategy.handshake()``. A handshake may optionally pin its self-play
    actions; by default it plays each game's efficient action against itself.
    """

    kind: StrategyKind
    actions: Optional[tuple[float, ...]] = None
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.kind is StrategyKind.BEHAVIORAL:
            if not self.actions or self.alpha is not None:
                raise ValueError("behavioral strategy needs actions and no alpha")
            if not all(math.isfinite(a) for a in self.actions):
                raise ValueError("behavioral actions must be finite")
        elif self.kind is StrategyKind.RATIONAL:
            if self.actions is not None or self.alpha is None:
                raise ValueError("rational strategy needs alpha and no actions")
            if not math.isfinite(self.alpha):
                raise ValueError("alpha must be finite")
        else:
            if self.alpha is not None:
                raise ValueError("handshake strategy carries no alpha")
            if self.actions is not None and not all(math.isfinite(a) for a in self.actions):
                raise ValueError("handshake self-play actions must be finite")

    @classmethod
    def behavioral(cls, *actions: float) -> "Strategy":
        return cls(StrategyKind.BEHAVIORAL, actions=tuple(float(a) for a in actions))

    @classmethod
    def rational(cls, alpha: float) -> "Strategy":
        return cls(StrategyKind.RATIONAL, alpha=float(alpha))

    @classmethod
    def handshake(cls, actions: Optional[tuple[float, ...]] = None) -> "Strategy":
        if actions is not None:
            actions = tuple(float(a) for a in actions)
        return cls(StrategyKind.HANDSHAKE, actions=actions)


@dataclass(frozen=True)
class Environment:
    """A finite mixture of externality games met with fixed proportions."""

    games: tuple[GameParams, ...]
    proportions: tuple[float, ...]

    def __post_init__(self):
        if len(self.games) == 0:
            raise ValueError("environment needs at least one game")
        if len(self.games) != len(self.proportions):
            raise ValueError("one proportion per game required")
        if any(p < 0.0 for p in self.proportions):
            raise ValueError("proportions must be non-negative")
        if abs(sum(self.proportions) - 1.0) > 1e-12:
            raise ValueError("proportions must sum to 1")

    @classmethod
    def single(cls, g: GameParams) -> "Environment":
        return cls(games=(g,), proportions=(1.0,))

    @classmethod
    def pair(cls, g1: GameParams, g2: GameParams, p: float) -> "Environment":
        """Two games, the first met with proportion p."""
        return cls(games=(g1, g2), proportions=(float(p), 1.0 - float(p)))

    def __len__(self) -> int:
        return len(self.games)


def _behavioral_action(s: Strategy, game_index: int) -> float:
    try:
        return s.actions[game_index]  # type: ignore[index]
    except IndexError:
        raise ValueError(
            f"behavioral strategy has {len(s.actions)} action(s), "  # type: ignore[arg-type]
            f"game index {game_index} out of range"
        ) from None


def resolve_action(
    own: Strategy, other: Strategy, g: GameParams, game_index: int = 0
) -> float:
    """Action ``own`` ends up playing against ``other`` in game ``g``.

    Behavioral: the committed action for that game, opponent-independent.
    Rational(alpha): best response to the opponent's resolved action; that
    is the closed-form reply to a committed action, the
    preference-equilibrium component against another rational player, and
    the own self-play equilibrium action against a handshake (which
    mirrors it back).
    Handshake: mirrors the opponent (a committed action is matched, a
    rational opponent is met at its self-play equilibrium action) and
    plays the efficient action against a fellow handshake.
    """
    if own.kind is StrategyKind.BEHAVIORAL:
        return _behavioral_action(own, game_index)

    if own.kind is StrategyKind.RATIONAL:
        if other.kind is StrategyKind.BEHAVIORAL:
            return best_response(g, _behavioral_action(other, game_index), own.alpha)
        if other.kind is StrategyKind.RATIONAL:
            return nash_equilibrium(g, own.alpha, other.alpha).a_i
        # handshake mirrors: outcome is own self-play equilibrium
        return nash_equilibrium(g, own.alpha, own.alpha).a_i

    # handshake
    if other.kind is StrategyKind.BEHAVIORAL:
        return _behavioral_action(other, game_index)
    if other.kind is StrategyKind.RATIONAL:
        return nash_equilibrium(g, other.alpha, other.alpha).a_i
    if own.actions is not None:
        return _behavioral_action(own, game_index)
    return efficient_action(g)


def base_fitness(own: Strategy, other: Strategy, env: Environment) -> float:
    """Proportion-weighted material payoff of ``own`` against ``other``.

    No complexity costs; see penalties.penalized_fitness for the costed
    variant used by the stability and learning layers.
    """
    if len(env) > 1 and StrategyKind.HANDSHAKE in (own.kind, other.kind):
        warnings.warn(
            "handshake strategies in multi-game environments are experimental "
            "(per-game mimicry)",
            UserWarning,
            stacklevel=2,
        )
    total = 0.0
    for k, (g, w) in enumerate(zip(env.games, env.proportions)):
        a_own = resolve_action(own, other, g, k)
        a_other = resolve_action(other, own, g, k)
        total += w * payoff(g, a_own, a_other)
    return total
