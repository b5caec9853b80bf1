"""Adaptive learning dynamic over behavioral and rational strategies.

A population of N agents plays a mixture of externality games for a fixed
number of rounds. Each round, synchronously, every agent either mutates (with
a probability that decays as 1/t and is frozen to zero late in the run) or
samples one opponent from the rest of the population and replaces its own
strategy with the better penalized reply to that opponent: the closed-form
best behavioral commitment or the gradient-ascent best rational preference.
Ties within 1e-12 go to the behavioral reply (flat preferences are the
tiebreak loser because they cost eps_R more at equal payoff).

Agents are encoded as (alpha, a1, a2, n) with n = 0 rational / n = 1
behavioral; the fields not selected by n are dormant, carried along unchanged
and never read by fitness or summaries.

Randomness layout (one numpy Generator seeded from SimConfig.seed): the
initial population draws alpha, a1, a2 ~ N(0,1) and n ~ Bernoulli(1/2) as
four vectorized arrays; every round then draws, in order, mutation uniforms,
three mutation normals, mutation kinds, and opponent offsets, always all of
them, whether used or not, so the stream is consumption-stable and identical
across backends. All kernel arithmetic is RNG-free.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import backend
from .game import SINGULARITY_TOL, GameParams, SingularEquilibrium
from .penalties import PenaltyConfig
from .strategies import Environment, Strategy, StrategyKind

__all__ = [
    "AgentParams",
    "Population",
    "SimConfig",
    "Trajectory",
    "RoundSummary",
    "NoAscentProgress",
    "mutation_prob",
    "init_population",
    "best_response_behavioral",
    "best_response_rational",
    "step",
    "run",
]


class NoAscentProgress(RuntimeError):
    """Every ascent start was rejected; no rational reply exists here."""


@dataclass(frozen=True)
class AgentParams:
    """One agent's heritable parameters; n = 0 rational, n = 1 behavioral."""

    alpha: float
    a1: float
    a2: float
    n: int

    def __post_init__(self):
        if self.n not in (0, 1):
            raise ValueError(f"n must be 0 or 1, got {self.n}")
        for v in (self.alpha, self.a1, self.a2):
            if not math.isfinite(v):
                raise ValueError("agent parameters must be finite")


@dataclass(frozen=True)
class Population:
    agents: tuple[AgentParams, ...]
    round: int = 0


@dataclass(frozen=True)
class SimConfig:
    """Everything a run depends on; two equal configs give equal trajectories."""

    env: Environment
    pc: PenaltyConfig = field(default_factory=PenaltyConfig)
    population_size: int = 10
    rounds: int = 30
    seed: int = 0
    q1: float = 0.01
    q_freeze_round: int = 20
    ascent_step: float = 0.05
    ascent_max_iter: int = 500
    ascent_grad_tol: float = 1e-8
    fd_step: float = 1e-6
    behavioral_enabled: bool = True
    rational_enabled: bool = True

    def __post_init__(self):
        if len(self.env) > 2:
            raise ValueError("the learning kernel supports at most two games")
        if len(self.env) == 2 and self.env.games[0].m != self.env.games[1].m:
            raise ValueError("games in a learning environment must share m")
        if self.population_size < 2:
            raise ValueError("population needs at least two agents")
        if self.rounds < 1:
            raise ValueError("need at least one round")
        if not 0.0 <= self.q1 <= 1.0:
            raise ValueError("q1 must be a probability")
        if self.q_freeze_round < 0:
            raise ValueError("q_freeze_round must be non-negative")
        for name in ("ascent_step", "ascent_grad_tol", "fd_step"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive")
        if self.ascent_max_iter < 1:
            raise ValueError("ascent_max_iter must be at least 1")
        if not (self.behavioral_enabled or self.rational_enabled):
            raise ValueError("at least one strategy kind must be enabled")


def mutation_prob(t: int, cfg: SimConfig) -> float:
    """Resampling probability in round t: q1/t up to the freeze, then zero.

    The recurrence q_{t+1} = q_t * t/(t+1) (applied while t <= freeze round)
    has the closed form q1/t, which is what we compute; past the freeze the
    probability is exactly 0.
    """
    if t < 1:
        raise ValueError("rounds are 1-indexed")
    if t > cfg.q_freeze_round + 1:
        return 0.0
    return cfg.q1 / t


# --- kernel marshalling -----------------------------------------------------


def _env_scalars(env: Environment) -> tuple[int, float, float, float, float, float]:
    """(K, kappa0, kappa1, p0, m, pole_tol) for the kernel."""
    nk = len(env)
    if nk > 2:
        raise ValueError("the learning kernel supports at most two games")
    g0 = env.games[0]
    k1 = env.games[1].kappa if nk == 2 else 0.0
    if nk == 2 and env.games[1].m != g0.m:
        raise ValueError("games in a learning environment must share m")
    pole_tol = SINGULARITY_TOL * g0.m * g0.m
    return nk, g0.kappa, k1, env.proportions[0], g0.m, pole_tol


def _opponent_scalars(opponent: Strategy, nk: int) -> tuple[int, float, float, float]:
    """(okind, oalpha, ob0, ob1) for the kernel."""
    if opponent.kind is StrategyKind.BEHAVIORAL:
        acts = opponent.actions or ()
        if len(acts) != nk:
            raise ValueError(
                f"opponent has {len(acts)} action(s) for a {nk}-game environment"
            )
        return 1, 0.0, acts[0], acts[1] if nk == 2 else 0.0
    if opponent.kind is StrategyKind.RATIONAL:
        return 0, float(opponent.alpha), 0.0, 0.0
    raise ValueError("the learning dynamic has no handshake strategies")


def best_response_behavioral(
    opponent: Strategy, env: Environment, pc: PenaltyConfig
) -> Strategy:
    """Best behavioral commitment against ``opponent``, penalties included.

    Considers per-game-optimal actions and the best single shared action and
    keeps the variant with the higher penalized fitness. Raises
    SingularEquilibrium when no finite commitment exists (non-concave leader
    objective against an extreme rational preference).
    """
    nk, k0, k1, p0, m, pole_tol = _env_scalars(env)
    okind, oalpha, ob0, ob1 = _opponent_scalars(opponent, nk)
    kern = backend.active()
    status, a0, a1, _ = kern.br_behavioral(
        okind, oalpha, ob0, ob1, nk, k0, k1, p0, m, pc.eps_p, pole_tol
    )
    if status != kern.OK:
        raise SingularEquilibrium(
            "no finite behavioral reply (non-concave leader objective)"
        )
    if nk == 1:
        return Strategy.behavioral(a0)
    return Strategy.behavioral(a0, a1)


def best_response_rational(
    opponent: Strategy, env: Environment, pc: PenaltyConfig, cfg: SimConfig
) -> Strategy:
    """Best rational preference against ``opponent`` via gradient ascent.

    Multi-start ascent on the penalized fitness of Rational(alpha); cfg
    supplies the ascent hyperparameters. Raises NoAscentProgress if every
    start is rejected (only reachable in singular corners).
    """
    nk, k0, k1, p0, m, pole_tol = _env_scalars(env)
    okind, oalpha, ob0, ob1 = _opponent_scalars(opponent, nk)
    kern = backend.active()
    extra = 1 if okind == 0 else 0
    status, alpha, _ = kern.br_rational(
        okind, oalpha, ob0, ob1, nk, k0, k1, p0, m, pc.eps_r, pc.eps_p,
        pole_tol, cfg.ascent_step, cfg.fd_step, cfg.ascent_grad_tol,
        cfg.ascent_max_iter, extra, oalpha,
    )
    if status != kern.OK:
        raise NoAscentProgress("all ascent starts rejected")
    return Strategy.rational(alpha)


# --- population plumbing ----------------------------------------------------


def _pop_to_arrays(pop: Population):
    alpha = np.array([a.alpha for a in pop.agents], dtype=np.float64)
    a0 = np.array([a.a1 for a in pop.agents], dtype=np.float64)
    a1 = np.array([a.a2 for a in pop.agents], dtype=np.float64)
    kind = np.array([a.n for a in pop.agents], dtype=np.int64)
    return alpha, a0, a1, kind


def _arrays_to_pop(alpha, a0, a1, kind, round_no: int) -> Population:
    agents = tuple(
        AgentParams(float(alpha[i]), float(a0[i]), float(a1[i]), int(kind[i]))
        for i in range(len(kind))
    )
    return Population(agents=agents, round=round_no)


def _draw_init(rng: np.random.Generator, cfg: SimConfig):
    n = cfg.population_size
    alpha = rng.standard_normal(n)
    a0 = rng.standard_normal(n)
    a1 = rng.standard_normal(n)
    kind = rng.integers(0, 2, n, dtype=np.int64)
    if not cfg.behavioral_enabled:
        kind[:] = 0
    if not cfg.rational_enabled:
        kind[:] = 1
    return alpha, a0, a1, kind


def _draw_round(rng: np.random.Generator, n: int):
    mut_u = rng.random(n)
    mut_alpha = rng.standard_normal(n)
    mut_a0 = rng.standard_normal(n)
    mut_a1 = rng.standard_normal(n)
    mut_n = rng.integers(0, 2, n, dtype=np.int64)
    opp = rng.integers(0, n - 1, n, dtype=np.int64)
    return mut_u, mut_alpha, mut_a0, mut_a1, mut_n, opp


def init_population(cfg: SimConfig, rng: Optional[np.random.Generator] = None) -> Population:
    """Round-0 population: alpha, a1, a2 ~ N(0,1) i.i.d., kind fair-coin.

    Disabled kinds are overridden after the draw so the stream layout never
    depends on configuration flags.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    alpha, a0, a1, kind = _draw_init(rng, cfg)
    return _arrays_to_pop(alpha, a0, a1, kind, 0)


def _step_arrays(alpha, a0, a1, kind, draws, q_t, cfg: SimConfig):
    nk, k0, k1, p0, m, pole_tol = _env_scalars(cfg.env)
    mut_u, mut_alpha, mut_a0, mut_a1, mut_n, opp = draws
    n = len(kind)
    alpha_out = np.empty(n, dtype=np.float64)
    a0_out = np.empty(n, dtype=np.float64)
    a1_out = np.empty(n, dtype=np.float64)
    kind_out = np.empty(n, dtype=np.int64)
    kern = backend.active()
    kern.step_round(
        alpha, a0, a1, kind,
        alpha_out, a0_out, a1_out, kind_out,
        mut_u, mut_alpha, mut_a0, mut_a1, mut_n, opp,
        q_t, nk, k0, k1, p0, m, cfg.pc.eps_r, cfg.pc.eps_p, pole_tol,
        cfg.ascent_step, cfg.fd_step, cfg.ascent_grad_tol, cfg.ascent_max_iter,
        1 if cfg.behavioral_enabled else 0, 1 if cfg.rational_enabled else 0,
    )
    return alpha_out, a0_out, a1_out, kind_out


def step(
    pop: Population, cfg: SimConfig, t: int,
    rng: Optional[np.random.Generator] = None,
) -> Population:
    """One synchronous round; t is the 1-indexed round number.

    When no generator is passed, one is derived from (cfg.seed, t); run()
    instead threads a single sequential stream through all rounds.
    """
    if rng is None:
        rng = np.random.default_rng((cfg.seed, t))
    if len(pop.agents) != cfg.population_size:
        raise ValueError("population size does not match config")
    arrays = _pop_to_arrays(pop)
    draws = _draw_round(rng, cfg.population_size)
    out = _step_arrays(*arrays, draws, mutation_prob(t, cfg), cfg)
    return _arrays_to_pop(*out, t)


# --- trajectories -----------------------------------------------------------


@dataclass(frozen=True)
class RoundSummary:
    round: int
    n_behavioral: int
    n_rational: int
    mean_alpha_rational: float  # nan when no rational agents
    distinct_actions_modal: int  # 0 when no behavioral agents


@dataclass(frozen=True)
class Trajectory:
    """Full record of one run plus the summary statistics exports consume."""

    cfg: SimConfig
    populations: tuple[Population, ...]  # index = round number, 0 = initial
    summaries: tuple[RoundSummary, ...]
    final_kind: str  # behavioral | rational | mixed
    final_mean_alpha: float  # nan when no rational agents in the final round
    final_distinct_actions: int
    welfare_last_two: float
    converged: bool
    oscillating: bool


def _quant(x: float) -> int:
    # Composition granularity for the converged/oscillating flags only; the
    # penalty layer's distinct-action quantum stays at 1e-9. Rational alphas
    # keep drifting by ~1e-8 per round long after the population has settled
    # in any behavioral sense, so the fingerprint rounds at 1e-6.
    return round(x * 1e6)


def _quant_action(x: float) -> int:
    # Matches the kernels' distinct-action quantization exactly.
    return round(x * 1e9)


def _signature(alpha, a0, a1, kind, nk: int):
    """Composition fingerprint: sorted active (non-dormant) parameters."""
    sig = []
    for i in range(len(kind)):
        if kind[i] == 0:
            sig.append((0, _quant(float(alpha[i]))))
        elif nk == 1:
            sig.append((1, _quant(float(a0[i]))))
        else:
            sig.append((1, _quant(float(a0[i])), _quant(float(a1[i]))))
    return tuple(sorted(sig))


def _summary(round_no: int, alpha, a0, a1, kind, nk: int) -> RoundSummary:
    n_b = int(np.sum(kind == 1))
    n_r = len(kind) - n_b
    if n_r > 0:
        mean_alpha = float(np.mean(alpha[kind == 0]))
    else:
        mean_alpha = float("nan")
    distinct = 0
    if n_b > 0:
        tuples = []
        for i in range(len(kind)):
            if kind[i] == 1:
                tup = (_quant_action(float(a0[i])),) if nk == 1 else (
                    _quant_action(float(a0[i])), _quant_action(float(a1[i])))
                tuples.append(tup)
        modal, _ = Counter(tuples).most_common(1)[0]
        distinct = len(set(modal))
    return RoundSummary(round_no, n_b, n_r, mean_alpha, distinct)


def _pair_welfare(alpha, a0, a1, kind, cfg: SimConfig) -> float:
    """Mean over unordered agent pairs of the two members' base payoffs."""
    nk, k0, k1, p0, m, pole_tol = _env_scalars(cfg.env)
    kern = backend.active()
    n = len(kind)
    total = 0.0
    pairs = 0
    for i in range(n):
        for j in range(i + 1, n):
            fij = kern.pair_fitness(
                int(kind[i]), float(alpha[i]), float(a0[i]), float(a1[i]),
                int(kind[j]), float(alpha[j]), float(a0[j]), float(a1[j]),
                nk, k0, k1, p0, m, 0.0, 0.0, pole_tol,
            )
            fji = kern.pair_fitness(
                int(kind[j]), float(alpha[j]), float(a0[j]), float(a1[j]),
                int(kind[i]), float(alpha[i]), float(a0[i]), float(a1[i]),
                nk, k0, k1, p0, m, 0.0, 0.0, pole_tol,
            )
            if math.isnan(fij) or math.isnan(fji):
                raise SingularEquilibrium(
                    "singular pairing while scoring population welfare"
                )
            total += fij + fji
            pairs += 1
    return total / pairs


def run(cfg: SimConfig) -> Trajectory:
    """Run the full dynamic; a pure function of cfg (bit-reproducible)."""
    rng = np.random.default_rng(cfg.seed)
    nk = len(cfg.env)
    alpha, a0, a1, kind = _draw_init(rng, cfg)

    snaps = [(alpha.copy(), a0.copy(), a1.copy(), kind.copy())]
    for t in range(1, cfg.rounds + 1):
        draws = _draw_round(rng, cfg.population_size)
        alpha, a0, a1, kind = _step_arrays(
            alpha, a0, a1, kind, draws, mutation_prob(t, cfg), cfg
        )
        snaps.append((alpha, a0, a1, kind))

    populations = tuple(
        _arrays_to_pop(*arrs, t) for t, arrs in enumerate(snaps)
    )
    summaries = tuple(
        _summary(t, *arrs, nk) for t, arrs in enumerate(snaps)
    )

    sigs = [_signature(*arrs, nk) for arrs in snaps]
    converged = len(sigs) >= 5 and len(set(sigs[-5:])) == 1
    oscillating = False
    if len(sigs) >= 6:
        s = sigs[-6:]
        oscillating = (
            s[0] == s[2] == s[4] and s[1] == s[3] == s[5] and s[0] != s[1]
        )

    w_prev = _pair_welfare(*snaps[-2], cfg)
    w_final = _pair_welfare(*snaps[-1], cfg)
    welfare = 0.5 * (w_prev + w_final)

    last = summaries[-1]
    if last.n_behavioral == cfg.population_size:
        final_kind = "behavioral"
    elif last.n_rational == cfg.population_size:
        final_kind = "rational"
    else:
        final_kind = "mixed"

    return Trajectory(
        cfg=cfg,
        populations=populations,
        summaries=summaries,
        final_kind=final_kind,
        final_mean_alpha=last.mean_alpha_rational,
        final_distinct_actions=last.distinct_actions_modal,
        welfare_last_two=welfare,
        converged=converged,
        oscillating=oscillating,
    )
