"""Two-player externality game and its closed-form equilibria.

The stage game: each player picks a real-valued action ``a_i`` and receives

    u_i(a_i, a_j) = a_i * (kappa * a_j + m - a_i)

with intensity ``m > 0`` and externality ``kappa`` in [-2, 0) or (0, 1).
Positive kappa makes actions complements, negative kappa substitutes.

Players may *evaluate* outcomes through an other-regarding lens: a player with
preference parameter ``alpha`` maximises the subjective utility

    V_i = u_i + alpha * u_j

(alpha = 0 egoistic, alpha > 0 altruistic, alpha < 0 spiteful) while fitness is
always the material payoff ``u_i``. Because V_i is a strictly concave quadratic
in own action, best responses and the two-player preference equilibrium have
closed forms; these are the primitives everything else in the package builds
on. All of them are cross-checked against brute-force oracles in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

__all__ = [
    "GameParams",
    "ActionPair",
    "SingularEquilibrium",
    "payoff",
    "subjective_utility",
    "best_response",
    "nash_equilibrium",
    "ess_alpha",
    "efficient_action",
    "stackelberg_action",
]

#: relative (in m^2) tolerance below which an equilibrium denominator counts
#: as vanished
SINGULARITY_TOL = 1e-8


class SingularEquilibrium(ValueError):
    """The preference pair puts the equilibrium denominator at (near) zero."""


@dataclass(frozen=True)
class GameParams:
    """Externality game parameters.

    kappa must lie in [-2, 0) or (0, 1); m must be positive and finite.
    kappa = 0 is excluded (no strategic interaction, equilibria degenerate).
    """

    kappa: float
    m: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.kappa) or not math.isfinite(self.m):
            raise ValueError("game parameters must be finite")
        if self.m <= 0.0:
            raise ValueError(f"m must be positive, got {self.m}")
        if not (-2.0 <= self.kappa < 1.0) or self.kappa == 0.0:
            raise ValueError(f"kappa must be in [-2, 0) or (0, 1), got {self.kappa}")


class ActionPair(NamedTuple):
    """Equilibrium action profile (first mover's action first)."""

    a_i: float
    a_j: float


def payoff(g: GameParams, own: float, other: float) -> float:
    """Material payoff ``own * (kappa * other + m - own)``."""
    return own * (g.kappa * other + g.m - own)


def subjective_utility(g: GameParams, alpha: float, own: float, other: float) -> float:
    """Other-regarding evaluation ``u_own + alpha * u_other``."""
    return payoff(g, own, other) + alpha * payoff(g, other, own)


def best_response(g: GameParams, opponent_action: float, alpha: float = 0.0) -> float:
    """Unique maximiser of the subjective utility against a fixed action.

    V is concave quadratic in own action with vertex

        a* = (m + kappa * (1 + alpha) * opponent_action) / 2.

    The alpha term enters because the opponent's payoff depends on own action
    only through the externality kappa * a_own * a_other.
    """
    return 0.5 * (g.m + g.kappa * (1.0 + alpha) * opponent_action)


def nash_equilibrium(g: GameParams, alpha_i: float, alpha_j: float) -> ActionPair:
    """Intersection of the two subjective best responses.

    Solving a_i = BR(a_j; alpha_i), a_j = BR(a_i; alpha_j) gives

        a_i = m * (2 + kappa * (1 + alpha_i)) / D,
        D   = 4 - kappa^2 * (1 + alpha_i) * (1 + alpha_j)

    and symmetrically for a_j. Raises SingularEquilibrium when |D| falls
    below SINGULARITY_TOL * m^2 (the best-response lines are parallel).
    """
    if not (math.isfinite(alpha_i) and math.isfinite(alpha_j)):
        raise ValueError("preference parameters must be finite")
    x = 1.0 + alpha_i
    y = 1.0 + alpha_j
    den = 4.0 - g.kappa * g.kappa * x * y
    if abs(den) < SINGULARITY_TOL * g.m * g.m:
        raise SingularEquilibrium(
            f"equilibrium denominator {den:.3e} vanishes for "
            f"alpha_i={alpha_i}, alpha_j={alpha_j}, kappa={g.kappa}"
        )
    a_i = g.m * (2.0 + g.kappa * x) / den
    a_j = g.m * (2.0 + g.kappa * y) / den
    return ActionPair(a_i, a_j)


def ess_alpha(g: GameParams) -> float:
    """Evolutionarily stable preference ``kappa / (2 - kappa)``.

    The unique stationary point of invasion fitness
    f(alpha' | alpha) = u_i(NE(alpha', alpha)) over the rational family:
    positive (altruistic) under complements, negative (spiteful) under
    substitutes.
    """
    return g.kappa / (2.0 - g.kappa)


def efficient_action(g: GameParams) -> float:
    """Symmetric action maximising joint payoff: ``m / (2 * (1 - kappa))``.

    Coincides with the symmetric equilibrium of fully other-regarding players
    (alpha = 1).
    """
    return g.m / (2.0 * (1.0 - g.kappa))


def stackelberg_action(g: GameParams, alpha: float) -> float:
    """Best committed action against a responder with preference ``alpha``.

    Maximises u(a, BR(a; alpha)) over a. The objective is quadratic with
    second-order coefficient kappa^2 (1 + alpha)/2 - 1; it is concave (and the
    maximiser finite) only while kappa^2 (1 + alpha) < 2:

        a* = m * (2 + kappa) / (2 * (2 - kappa^2 * (1 + alpha))).

    Raises SingularEquilibrium on the non-concave half-line, where no finite
    best commitment exists.
    """
    den = 2.0 - g.kappa * g.kappa * (1.0 + alpha)
    if den < SINGULARITY_TOL * g.m * g.m:
        raise SingularEquilibrium(
            f"commitment objective non-concave for kappa={g.kappa}, alpha={alpha}"
        )
    return g.m * (2.0 + g.kappa) / (2.0 * den)
