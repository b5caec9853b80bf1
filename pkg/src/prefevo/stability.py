"""Numerical Nash/NSS/ESS classification by deviation search.

classify() tests a candidate strategy against grids of deviators (behavioral
actions, rational preferences, optionally handshakes), locally refines every
promising grid maximizer by ternary search, and applies the three-tier
stability definition with explicit tolerances:

    Nash  : no deviator y has f(y, x) > f(x, x) + tol_eq
    NSS   : Nash, and every near-tie y (f(y, x) >= f(x, x) - tol_eq)
            satisfies f(x, y) >= f(y, y) - tol_eq
    ESS   : Nash, and every near-tie satisfies f(x, y) >= f(y, y) + tol_strict

where f is penalized fitness. Tolerances scale with m^2, the natural payoff
unit. The near-tie set consists of refined local maximizers of the invasion
fitness, with the candidate itself excluded; a continuum of interior
deviators sitting strictly below the candidate never enters it, which keeps
the strict ESS test meaningful on a discretized search.

Everything here goes through the object-level strategy API, not the
simulation kernels, so the two layers check each other.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .game import (
    GameParams,
    SingularEquilibrium,
    efficient_action,
    ess_alpha,
    nash_equilibrium,
)
from .penalties import PenaltyConfig, penalized_fitness
from .strategies import Environment, Strategy, StrategyKind

__all__ = [
    "StrategySpace",
    "DeviationSearchConfig",
    "StabilityVerdict",
    "CandidateResult",
    "StabilityReport",
    "SearchBudgetExceeded",
    "classify",
    "verify_unpenalized_stability",
    "verify_penalized_stability",
    "verify_handshake_exclusion",
]

_IDENT_TOL = 1e-7


class SearchBudgetExceeded(RuntimeError):
    """Local refinement ended on a non-finite fitness value."""


class StrategySpace(enum.Enum):
    """Deviator space searched by classify (and candidate membership check)."""

    BEHAVIORAL = "B"
    RATIONAL = "R"
    COMBINED = "S"
    COMBINED_WITH_HANDSHAKE = "S+H"


@dataclass(frozen=True)
class DeviationSearchConfig:
    """Grid ranges, steps and tolerances for the deviation search.

    Action bounds and step are in units of m; tolerances in units of m^2.
    refine_margin controls which grid-local maxima get ternary refinement on
    top of the always-refined top_refine best ones: anything whose grid value
    comes within refine_margin of the candidate's self-fitness. With grid
    steps of 0.01 and payoff curvatures of order one, refinement can recover
    at most ~2.5e-5 m^2 over the grid value, so the default margin has a
    factor of forty in hand.
    """

    alpha_lo: float = -2.0
    alpha_hi: float = 2.0
    alpha_step: float = 0.01
    action_lo: float = -2.0
    action_hi: float = 4.0
    action_step: float = 0.01
    refine_iters: int = 50
    tol_eq: float = 1e-7
    tol_strict: float = 1e-6
    refine_margin: float = 1e-3
    top_refine: int = 6

    def __post_init__(self):
        if not (0.0 < self.tol_eq < self.tol_strict):
            raise ValueError("need 0 < tol_eq < tol_strict")
        if self.alpha_step <= 0 or self.action_step <= 0:
            raise ValueError("grid steps must be positive")
        if self.alpha_lo >= self.alpha_hi or self.action_lo >= self.action_hi:
            raise ValueError("grid ranges must be non-empty")
        if self.refine_iters < 1 or self.top_refine < 1:
            raise ValueError("refinement budget must be positive")


@dataclass(frozen=True)
class StabilityVerdict:
    """Outcome of one classification.

    margin is the binding gap of the first failed condition: the best
    deviator's advantage when Nash fails, the worst second-condition gap
    f(x,y) - f(y,y) when a near-tie breaks NSS or ESS, and otherwise the
    slack by which the strictest passed condition holds.
    """

    is_nash: bool
    is_nss: bool
    is_ess: bool
    witness: Optional[Strategy]
    margin: float
    near_ties: tuple[Strategy, ...] = ()

    def __post_init__(self):
        if self.is_ess and not self.is_nss:
            raise ValueError("ESS without NSS violates the nesting")
        if self.is_nss and not self.is_nash:
            raise ValueError("NSS without Nash violates the nesting")
        if not (self.is_nash and self.is_nss and self.is_ess):
            if self.witness is None:
                raise ValueError("failed verdicts must carry a witness")


@dataclass(frozen=True)
class CandidateResult:
    candidate: Strategy
    verdict: StabilityVerdict


@dataclass(frozen=True)
class StabilityReport:
    passed: bool
    lines: tuple[str, ...]
    results: tuple[CandidateResult, ...]
    counterexamples: tuple[CandidateResult, ...]
    handshake_margin: Optional[float] = None

    def __str__(self) -> str:
        return "\n".join(self.lines)


# --- search machinery --------------------------------------------------------


def _grid(lo: float, hi: float, step: float) -> list[float]:
    n = int(round((hi - lo) / step)) + 1
    return [float(v) for v in np.linspace(lo, hi, n)]


def _local_max_indices(vals: list[float]) -> list[int]:
    out = []
    n = len(vals)
    for i in range(n):
        v = vals[i]
        if not math.isfinite(v):
            continue
        left = vals[i - 1] if i > 0 else -math.inf
        right = vals[i + 1] if i < n - 1 else -math.inf
        if v >= left and v >= right:
            out.append(i)
    return out


def _ternary_max(fn: Callable[[float], float], lo: float, hi: float,
                 iters: int) -> tuple[float, float]:
    """Refine a bracketed maximum; the bracket's center survives every cut."""
    for _ in range(iters):
        third = (hi - lo) / 3.0
        m1 = lo + third
        m2 = hi - third
        if fn(m1) < fn(m2):
            lo = m1
        else:
            hi = m2
    x = 0.5 * (lo + hi)
    v = fn(x)
    if not math.isfinite(v):
        raise SearchBudgetExceeded(
            f"refinement converged to non-finite fitness at {x!r}"
        )
    return x, v


@dataclass(frozen=True)
class _Family:
    """One-parameter slice of the deviator space."""

    name: str
    grid: tuple[float, ...]
    value: Callable[[float], float]
    build: Callable[[float], Strategy]


def _refine_family(fam: _Family, f_xx: float, cfg: DeviationSearchConfig,
                   scale: float) -> list[tuple[Strategy, float]]:
    vals = [fam.value(p) for p in fam.grid]
    locs = _local_max_indices(vals)
    if not locs:
        return []
    by_value = sorted(locs, key=lambda i: vals[i], reverse=True)
    threshold = f_xx - cfg.refine_margin * scale
    chosen = set(by_value[: cfg.top_refine])
    chosen.update(i for i in locs if vals[i] >= threshold)

    refined: dict[int, tuple[Strategy, float]] = {}
    n = len(fam.grid)
    for i in sorted(chosen):
        lo = fam.grid[i - 1] if i > 0 else fam.grid[i]
        hi = fam.grid[i + 1] if i < n - 1 else fam.grid[i]
        if lo == hi:
            x, v = fam.grid[i], vals[i]
        else:
            x, v = _ternary_max(fam.value, lo, hi, cfg.refine_iters)
        key = round(x * 1e6)  # two maxima closer than 1e-6 are one maximum
        if key not in refined or refined[key][1] < v:
            refined[key] = (fam.build(x), v)
    return list(refined.values())


def _handshake_self_actions(s: Strategy, env: Environment) -> tuple[float, ...]:
    if s.actions is not None:
        return s.actions
    return tuple(efficient_action(g) for g in env.games)


def _is_identity(y: Strategy, x: Strategy, env: Environment,
                 action_tol: float) -> bool:
    if y.kind is not x.kind:
        return False
    if x.kind is StrategyKind.RATIONAL:
        return abs(y.alpha - x.alpha) <= _IDENT_TOL
    if x.kind is StrategyKind.BEHAVIORAL:
        return all(
            abs(a - b) <= action_tol for a, b in zip(y.actions, x.actions)
        )
    ya = _handshake_self_actions(y, env)
    xa = _handshake_self_actions(x, env)
    return all(abs(a - b) <= action_tol for a, b in zip(ya, xa))


def _space_members(space: StrategySpace) -> frozenset[StrategyKind]:
    if space is StrategySpace.BEHAVIORAL:
        return frozenset({StrategyKind.BEHAVIORAL})
    if space is StrategySpace.RATIONAL:
        return frozenset({StrategyKind.RATIONAL})
    if space is StrategySpace.COMBINED:
        return frozenset({StrategyKind.BEHAVIORAL, StrategyKind.RATIONAL})
    return frozenset(
        {StrategyKind.BEHAVIORAL, StrategyKind.RATIONAL, StrategyKind.HANDSHAKE}
    )


def _deviator_candidates(
    x: Strategy, space: StrategySpace, env: Environment, pc: PenaltyConfig,
    cfg: DeviationSearchConfig, f_xx: float,
) -> list[tuple[Strategy, float]]:
    m_max = max(g.m for g in env.games)
    scale = m_max * m_max
    kinds = _space_members(space)

    def pf(y: Strategy) -> float:
        try:
            return penalized_fitness(y, x, env, pc)
        except SingularEquilibrium:
            return -math.inf

    agrid = tuple(_grid(cfg.action_lo * m_max, cfg.action_hi * m_max,
                        cfg.action_step * m_max))
    bgrid = tuple(_grid(cfg.alpha_lo, cfg.alpha_hi, cfg.alpha_step))
    out: list[tuple[Strategy, float]] = []

    if StrategyKind.BEHAVIORAL in kinds:
        if len(env) == 1:
            fam = _Family("behavioral", agrid,
                          lambda a: pf(Strategy.behavioral(a)),
                          lambda a: Strategy.behavioral(a))
            out.extend(_refine_family(fam, f_xx, cfg, scale))
        else:
            # Per-game payoffs separate, so scan one slot at a time (the
            # other pinned), then the shared-action diagonal. Near-tie
            # coverage for two-game candidates is therefore coarser than in
            # the single-game case: slot maxima are reported with the other
            # slot at its refined best.
            pin_fam = _Family(
                "behavioral-slot0-seed", agrid,
                lambda a: pf(Strategy.behavioral(a, agrid[0])),
                lambda a: Strategy.behavioral(a, agrid[0]))
            seeded = _refine_family(pin_fam, f_xx, cfg, scale)
            a0_hat = max(seeded, key=lambda d: d[1])[0].actions[0]
            fam1 = _Family("behavioral-slot1", agrid,
                           lambda b: pf(Strategy.behavioral(a0_hat, b)),
                           lambda b: Strategy.behavioral(a0_hat, b))
            slot1 = _refine_family(fam1, f_xx, cfg, scale)
            a1_hat = max(slot1, key=lambda d: d[1])[0].actions[1]
            fam0 = _Family("behavioral-slot0", agrid,
                           lambda a: pf(Strategy.behavioral(a, a1_hat)),
                           lambda a: Strategy.behavioral(a, a1_hat))
            shared = _Family("behavioral-shared", agrid,
                             lambda s: pf(Strategy.behavioral(s, s)),
                             lambda s: Strategy.behavioral(s, s))
            out.extend(slot1)
            out.extend(_refine_family(fam0, f_xx, cfg, scale))
            out.extend(_refine_family(shared, f_xx, cfg, scale))

    if StrategyKind.RATIONAL in kinds:
        fam = _Family("rational", bgrid,
                      lambda b: pf(Strategy.rational(b)),
                      lambda b: Strategy.rational(b))
        out.extend(_refine_family(fam, f_xx, cfg, scale))

    if StrategyKind.HANDSHAKE in kinds:
        if x.kind is StrategyKind.HANDSHAKE:
            nk = len(env)
            fam = _Family(
                "handshake", agrid,
                lambda h: pf(Strategy.handshake(actions=(h,) * nk)),
                lambda h: Strategy.handshake(actions=(h,) * nk))
            out.extend(_refine_family(fam, f_xx, cfg, scale))
        else:
            # Against a non-handshake incumbent every handshake earns the
            # same mimicry payoff, so one representative suffices.
            h = Strategy.handshake()
            out.append((h, pf(h)))

    return out


def _flanking_deviators(
    x: Strategy, env: Environment, pc: PenaltyConfig,
    cfg: DeviationSearchConfig, m_max: float,
) -> list[tuple[Strategy, float]]:
    """One-grid-step perturbations of the incumbent itself.

    Needed when classifying an optimum inside its own family (e.g. the
    stable rational preference in the rational-only space): every refined
    local maximum then coincides with the incumbent and is excluded as the
    identity, yet strictness still has to be certified against someone.
    """

    def pf(y: Strategy) -> float:
        try:
            return penalized_fitness(y, x, env, pc)
        except SingularEquilibrium:
            return -math.inf

    out: list[tuple[Strategy, float]] = []
    if x.kind is StrategyKind.RATIONAL:
        for da in (-cfg.alpha_step, cfg.alpha_step):
            b = min(max(x.alpha + da, cfg.alpha_lo), cfg.alpha_hi)
            y = Strategy.rational(b)
            out.append((y, pf(y)))
    elif x.kind is StrategyKind.BEHAVIORAL:
        step = cfg.action_step * m_max
        for slot in range(len(x.actions)):
            for da in (-step, step):
                acts = list(x.actions)
                acts[slot] += da
                y = Strategy.behavioral(*acts)
                out.append((y, pf(y)))
    else:
        step = cfg.action_step * m_max
        base = _handshake_self_actions(x, env)
        for slot in range(len(base)):
            for da in (-step, step):
                acts = list(base)
                acts[slot] += da
                y = Strategy.handshake(actions=tuple(acts))
                out.append((y, pf(y)))
    return out


def classify(
    candidate: Strategy,
    space: StrategySpace,
    env: Environment,
    pc: Optional[PenaltyConfig] = None,
    cfg: Optional[DeviationSearchConfig] = None,
) -> StabilityVerdict:
    """Classify candidate as Nash / NSS / ESS against the given space.

    Deterministic: the search has no random element. Raises ValueError when
    the candidate lies outside the declared space.
    """
    pc = pc if pc is not None else PenaltyConfig()
    cfg = cfg if cfg is not None else DeviationSearchConfig()
    if candidate.kind not in _space_members(space):
        raise ValueError(
            f"candidate kind {candidate.kind.name} not in space {space.value}"
        )

    m_max = max(g.m for g in env.games)
    scale = m_max * m_max
    tol_eq = cfg.tol_eq * scale
    tol_strict = cfg.tol_strict * scale
    action_tol = _IDENT_TOL * max(1.0, m_max)

    f_xx = penalized_fitness(candidate, candidate, env, pc)
    devs = [
        (y, v)
        for (y, v) in _deviator_candidates(candidate, space, env, pc, cfg, f_xx)
        if not _is_identity(y, candidate, env, action_tol)
    ]
    if not devs:
        devs = [
            (y, v)
            for (y, v) in _flanking_deviators(candidate, env, pc, cfg, m_max)
            if not _is_identity(y, candidate, env, action_tol)
        ]
    if not devs:
        raise SearchBudgetExceeded("deviator search produced no candidates")

    best_y, best_v = max(devs, key=lambda d: d[1])
    best_gap = best_v - f_xx
    if best_gap > tol_eq:
        return StabilityVerdict(
            is_nash=False, is_nss=False, is_ess=False,
            witness=best_y, margin=best_gap, near_ties=(),
        )

    near = [(y, v) for (y, v) in devs if v >= f_xx - tol_eq]

    def second_margin(y: Strategy) -> float:
        # f(x, y) - f(y, y); a mutant that cannot even play itself loses.
        try:
            f_yy = penalized_fitness(y, y, env, pc)
        except SingularEquilibrium:
            return math.inf
        try:
            f_xy = penalized_fitness(candidate, y, env, pc)
        except SingularEquilibrium:
            return -math.inf
        return f_xy - f_yy

    margins = [(y, second_margin(y)) for (y, _) in near]
    near_ties = tuple(y for (y, _) in margins)

    if margins:
        worst_y, worst = min(margins, key=lambda d: d[1])
    else:
        worst_y, worst = None, math.inf

    if worst < -tol_eq:
        return StabilityVerdict(
            is_nash=True, is_nss=False, is_ess=False,
            witness=worst_y, margin=worst, near_ties=near_ties,
        )
    if worst < tol_strict:
        return StabilityVerdict(
            is_nash=True, is_nss=True, is_ess=False,
            witness=worst_y, margin=worst, near_ties=near_ties,
        )
    margin = worst if margins else (f_xx - best_v)
    return StabilityVerdict(
        is_nash=True, is_nss=True, is_ess=True,
        witness=None, margin=margin, near_ties=near_ties,
    )


# --- verification reports ----------------------------------------------------


def _describe(s: Strategy) -> str:
    if s.kind is StrategyKind.RATIONAL:
        return f"R({s.alpha:.6f})"
    if s.kind is StrategyKind.BEHAVIORAL:
        return "B(" + ", ".join(f"{a:.6f}" for a in s.actions) + ")"
    if s.actions is None:
        return "H()"
    return "H(" + ", ".join(f"{a:.6f}" for a in s.actions) + ")"


def _result_line(cr: CandidateResult) -> str:
    v = cr.verdict
    wit = f" witness={_describe(v.witness)}" if v.witness is not None else ""
    return (
        f"{_describe(cr.candidate)}: nash={v.is_nash} nss={v.is_nss} "
        f"ess={v.is_ess} margin={v.margin:.3g}{wit}"
    )


def _candidate_grids(g: GameParams, alpha_step: float, action_step: float):
    alphas = _grid(-2.0, 2.0, alpha_step)
    actions = _grid(-2.0 * g.m, 4.0 * g.m, action_step * g.m)
    return alphas, actions


def verify_unpenalized_stability(
    g: GameParams,
    cfg: Optional[DeviationSearchConfig] = None,
    candidate_alpha_step: float = 0.1,
    candidate_action_step: float = 0.1,
) -> StabilityReport:
    """Sweep candidate strategies with zero penalties and check the picture.

    Expected outcome in the combined space: the base-game equilibrium
    commitment B(a_N) and the stable preference R(kappa/(2-kappa)) are both
    neutrally but not evolutionarily stable, every other behavioral
    commitment fails Nash, and nothing at all is an ESS. Rational candidates
    other than the stable preference that survive the deviation grid are
    recorded rather than treated as failures.
    """
    cfg = cfg if cfg is not None else DeviationSearchConfig()
    env = Environment.single(g)
    pc = PenaltyConfig()
    a_n = nash_equilibrium(g, 0.0, 0.0).a_i
    a_star = ess_alpha(g)
    ident = 1e-6 * max(1.0, g.m)

    lines = [f"unpenalized stability sweep: kappa={g.kappa} m={g.m}"]
    results: list[CandidateResult] = []
    bad: list[CandidateResult] = []
    extra_rational_nash: list[CandidateResult] = []
    ess_found: list[CandidateResult] = []

    def record(s: Strategy) -> StabilityVerdict:
        verdict = classify(s, StrategySpace.COMBINED, env, pc, cfg)
        cr = CandidateResult(s, verdict)
        results.append(cr)
        if verdict.is_ess:
            ess_found.append(cr)
        return verdict

    v_b = record(Strategy.behavioral(a_n))
    ok_b = v_b.is_nss and not v_b.is_ess
    lines.append(_result_line(results[-1]) + ("" if ok_b else "  <- UNEXPECTED"))
    if not ok_b:
        bad.append(results[-1])

    v_r = record(Strategy.rational(a_star))
    ok_r = v_r.is_nss and not v_r.is_ess
    lines.append(_result_line(results[-1]) + ("" if ok_r else "  <- UNEXPECTED"))
    if not ok_r:
        bad.append(results[-1])

    alphas, actions = _candidate_grids(g, candidate_alpha_step,
                                       candidate_action_step)
    for a in actions:
        if abs(a - a_n) <= ident:
            continue  # covered by the exact candidate above
        verdict = record(Strategy.behavioral(a))
        if verdict.is_nash:
            cr = results[-1]
            bad.append(cr)
            lines.append(_result_line(cr) + "  <- UNEXPECTED Nash")
    for b in alphas:
        if abs(b - a_star) <= 1e-6:
            continue
        verdict = record(Strategy.rational(b))
        if verdict.is_nash:
            extra_rational_nash.append(results[-1])

    for cr in extra_rational_nash:
        lines.append("recorded rational Nash survivor: " + _result_line(cr))
    for cr in ess_found:
        lines.append("ESS found (none expected): " + _result_line(cr))
        if cr not in bad:
            bad.append(cr)

    passed = ok_b and ok_r and not ess_found and not any(
        cr.verdict.is_nash and cr.candidate.kind is StrategyKind.BEHAVIORAL
        and abs(cr.candidate.actions[0] - a_n) > ident
        for cr in results
    )
    lines.append(f"result: {'pass' if passed else 'FAIL'} "
                 f"({len(results)} candidates)")
    return StabilityReport(passed, tuple(lines), tuple(results), tuple(bad))


def verify_penalized_stability(
    g: GameParams,
    pc: PenaltyConfig,
    cfg: Optional[DeviationSearchConfig] = None,
    candidate_alpha_step: float = 0.1,
    candidate_action_step: float = 0.1,
) -> StabilityReport:
    """Check that a rationality cost collapses the equilibrium set.

    With eps_R > 0 the commitment B(a_N) should be the unique Nash candidate
    in the combined space, and an ESS; every rational candidate must lose to
    a behavioral deviator (the committed copy of its own equilibrium action
    earns the same base payoff and skips the rationality cost, so the margin
    is at least eps_R).
    """
    if pc.eps_r <= 0.0:
        raise ValueError("penalized verification needs eps_R > 0")
    cfg = cfg if cfg is not None else DeviationSearchConfig()
    env = Environment.single(g)
    a_n = nash_equilibrium(g, 0.0, 0.0).a_i
    a_star = ess_alpha(g)
    ident = 1e-6 * max(1.0, g.m)

    lines = [
        f"penalized stability sweep: kappa={g.kappa} m={g.m} "
        f"eps_R={pc.eps_r} eps_P={pc.eps_p}"
    ]
    results: list[CandidateResult] = []
    bad: list[CandidateResult] = []

    v_b = classify(Strategy.behavioral(a_n), StrategySpace.COMBINED, env, pc, cfg)
    cr_b = CandidateResult(Strategy.behavioral(a_n), v_b)
    results.append(cr_b)
    lines.append(_result_line(cr_b) + ("" if v_b.is_ess else "  <- expected ESS"))
    if not v_b.is_ess:
        bad.append(cr_b)

    alphas, actions = _candidate_grids(g, candidate_alpha_step,
                                       candidate_action_step)
    rational_candidates = list(alphas)
    if all(abs(b - a_star) > 1e-9 for b in rational_candidates):
        rational_candidates.append(a_star)
    for b in rational_candidates:
        verdict = classify(Strategy.rational(b), StrategySpace.COMBINED, env,
                           pc, cfg)
        cr = CandidateResult(Strategy.rational(b), verdict)
        results.append(cr)
        if verdict.is_nash:
            bad.append(cr)
            lines.append(_result_line(cr) + "  <- UNEXPECTED Nash")
    for a in actions:
        if abs(a - a_n) <= ident:
            continue
        verdict = classify(Strategy.behavioral(a), StrategySpace.COMBINED, env,
                           pc, cfg)
        cr = CandidateResult(Strategy.behavioral(a), verdict)
        results.append(cr)
        if verdict.is_nash:
            bad.append(cr)
            lines.append(_result_line(cr) + "  <- UNEXPECTED Nash")

    passed = not bad
    lines.append(f"result: {'pass' if passed else 'FAIL'} "
                 f"({len(results)} candidates)")
    return StabilityReport(passed, tuple(lines), tuple(results), tuple(bad))


def verify_handshake_exclusion(
    g: GameParams,
    pc: PenaltyConfig,
    cfg: Optional[DeviationSearchConfig] = None,
) -> StabilityReport:
    """Check whether the handshake cost keeps mimics out of B(a_N).

    A handshake deviator matches the incumbent commitment exactly, so its
    entry gap against B(a_N) is its cost disadvantage. The report's
    handshake_margin is f(B,B) - max over handshakes of f(H, B); with
    eps_H > eps_P that margin is positive and B(a_N) stays an ESS in the
    space with handshakes admitted. At eps_H = 0 the mimic enters neutrally
    and wins on self-play, so the report fails with H as witness. eps_R must
    be positive, otherwise flat rational preferences already tie.
    """
    if pc.eps_r <= 0.0:
        raise ValueError("handshake exclusion needs eps_R > 0")
    cfg = cfg if cfg is not None else DeviationSearchConfig()
    env = Environment.single(g)
    a_n = nash_equilibrium(g, 0.0, 0.0).a_i
    x = Strategy.behavioral(a_n)

    f_xx = penalized_fitness(x, x, env, pc)
    f_hx = penalized_fitness(Strategy.handshake(), x, env, pc)
    margin = f_xx - f_hx

    verdict = classify(x, StrategySpace.COMBINED_WITH_HANDSHAKE, env, pc, cfg)
    cr = CandidateResult(x, verdict)
    lines = [
        f"handshake exclusion: kappa={g.kappa} m={g.m} "
        f"eps_H={pc.eps_h} eps_R={pc.eps_r} eps_P={pc.eps_p}",
        f"handshake entry margin f(B,B) - f(H,B) = {margin:.6g}",
        _result_line(cr),
    ]
    passed = verdict.is_ess
    lines.append(f"result: {'pass (handshake blocked)' if passed else 'FAIL (handshake invades)'}")
    bad = () if passed else (cr,)
    return StabilityReport(passed, tuple(lines), (cr,), bad,
                           handshake_margin=margin)
