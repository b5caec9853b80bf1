"""Closed-form layer against the brute-force oracles.

Expected literals below were frozen from tests/oracles.py runs; the oracle
calls are kept in the tests (on a reduced draw count) so a regression in
either side surfaces as a disagreement, not a silently stale constant.
"""

import math

import numpy as np
import pytest

from prefevo import (
    GameParams,
    SingularEquilibrium,
    best_response,
    efficient_action,
    ess_alpha,
    nash_equilibrium,
    payoff,
    stackelberg_action,
    subjective_utility,
)

import oracles

G_POS = GameParams(kappa=0.5)
G_NEG = GameParams(kappa=-0.5)


def random_draws(n, seed=7):
    """Valid (kappa, m, alpha_i, alpha_j) tuples away from singularities."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        kappa = rng.uniform(-2.0, 1.0)
        if abs(kappa) < 0.02 or kappa >= 0.99:
            continue
        m = rng.uniform(0.2, 2.0)
        ai = rng.uniform(-1.5, 1.5)
        aj = rng.uniform(-1.5, 1.5)
        if abs(4.0 - kappa * kappa * (1.0 + ai) * (1.0 + aj)) < 0.05:
            continue
        out.append((kappa, m, ai, aj))
    return out


class TestGameParams:
    def test_valid_range(self):
        GameParams(kappa=-2.0)
        GameParams(kappa=0.999)
        GameParams(kappa=-0.5, m=3.0)

    @pytest.mark.parametrize("kappa", [0.0, 1.0, 1.5, -2.5])
    def test_invalid_kappa(self, kappa):
        with pytest.raises(ValueError):
            GameParams(kappa=kappa)

    def test_invalid_m(self):
        with pytest.raises(ValueError):
            GameParams(kappa=0.5, m=0.0)
        with pytest.raises(ValueError):
            GameParams(kappa=0.5, m=-1.0)


class TestPayoff:
    def test_direct_arithmetic(self):
        assert payoff(G_POS, 0.75, 0.5) == pytest.approx(0.375, abs=1e-12)
        assert payoff(G_POS, 0.5, 0.75) == pytest.approx(0.4375, abs=1e-12)

    def test_matches_oracle_on_draws(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            kappa = rng.uniform(-2.0, 0.99)
            if abs(kappa) < 1e-3:
                continue
            m = rng.uniform(0.2, 2.0)
            a, b = rng.uniform(-2, 3, size=2)
            g = GameParams(kappa=kappa, m=m)
            assert payoff(g, a, b) == pytest.approx(
                oracles.payoff_direct(kappa, m, a, b), abs=1e-12)

    def test_value_at_base_equilibrium(self):
        # u_N = m^2 / (2 - kappa)^2 on the diagonal
        a = nash_equilibrium(G_POS, 0.0, 0.0).a_i
        assert payoff(G_POS, a, a) == pytest.approx(4.0 / 9.0, abs=1e-12)
        b = nash_equilibrium(G_NEG, 0.0, 0.0).a_i
        assert payoff(G_NEG, b, b) == pytest.approx(0.16, abs=1e-12)


class TestSubjectiveUtility:
    def test_worked_example(self):
        # V = u(0.75, 0.5) - 0.2 * u(0.5, 0.75) = 0.375 - 0.2 * 0.4375
        val = subjective_utility(G_POS, -0.2, 0.75, 0.5)
        assert val == pytest.approx(0.2875, abs=1e-12)
        assert val == pytest.approx(
            oracles.subjective_direct(0.5, 1.0, -0.2, 0.75, 0.5), abs=1e-12)

    def test_alpha_zero_reduces_to_payoff(self):
        assert subjective_utility(G_NEG, 0.0, 0.3, 0.8) == pytest.approx(
            payoff(G_NEG, 0.3, 0.8), abs=1e-15)


class TestBestResponse:
    def test_frozen_points(self):
        assert best_response(G_POS, 1.0, 0.0) == pytest.approx(0.75, abs=1e-12)
        assert best_response(G_NEG, 1.0, -0.2) == pytest.approx(0.3, abs=1e-12)

    def test_matches_grid_oracle(self):
        for kappa, m, alpha, _ in random_draws(25, seed=11):
            b = float(np.random.default_rng(1).uniform(-1, 2))
            g = GameParams(kappa=kappa, m=m)
            got = best_response(g, b, alpha)
            want = oracles.best_response_oracle(kappa, m, alpha, b)
            assert got == pytest.approx(want, abs=1e-3)

    def test_is_a_maximizer(self):
        g = GameParams(kappa=-0.8, m=1.3)
        a_star = best_response(g, 0.6, 0.4)
        base = subjective_utility(g, 0.4, a_star, 0.6)
        for da in (-1e-3, 1e-3, -0.1, 0.1):
            assert subjective_utility(g, 0.4, a_star + da, 0.6) <= base + 1e-12


class TestNashEquilibrium:
    def test_symmetric_base(self):
        ne = nash_equilibrium(G_POS, 0.0, 0.0)
        assert ne.a_i == pytest.approx(2.0 / 3.0, abs=1e-12)
        assert ne.a_j == pytest.approx(2.0 / 3.0, abs=1e-12)

    def test_symmetric_at_ess_alpha(self):
        a = ess_alpha(G_POS)
        ne = nash_equilibrium(G_POS, a, a)
        assert ne.a_i == pytest.approx(0.75, abs=1e-12)

    def test_asymmetric_frozen(self):
        ne = nash_equilibrium(G_NEG, -0.2, 0.0)
        assert ne.a_i == pytest.approx(0.4210526315789474, abs=1e-9)
        assert ne.a_j == pytest.approx(0.39473684210526316, abs=1e-9)

    def test_matches_fixed_point_oracle(self):
        for kappa, m, ai, aj in random_draws(20, seed=5):
            g = GameParams(kappa=kappa, m=m)
            got = nash_equilibrium(g, ai, aj)
            want = oracles.nash_oracle(kappa, m, ai, aj)
            assert got.a_i == pytest.approx(want[0], abs=1e-9)
            assert got.a_j == pytest.approx(want[1], abs=1e-9)

    def test_mutual_best_response_property(self):
        for kappa, m, ai, aj in random_draws(20, seed=9):
            g = GameParams(kappa=kappa, m=m)
            ne = nash_equilibrium(g, ai, aj)
            assert ne.a_i == pytest.approx(
                best_response(g, ne.a_j, ai), abs=1e-9)
            assert ne.a_j == pytest.approx(
                best_response(g, ne.a_i, aj), abs=1e-9)

    def test_exploitation_ordering(self):
        # The spiteful party gains at the co-player's expense relative to
        # the base equilibrium: u_i(NE(-0.2, 0)) > u_N > u_j(NE(-0.2, 0)).
        ne = nash_equilibrium(G_NEG, -0.2, 0.0)
        u_i = payoff(G_NEG, ne.a_i, ne.a_j)
        u_j = payoff(G_NEG, ne.a_j, ne.a_i)
        assert u_i == pytest.approx(0.16066481994459834, abs=1e-9)
        assert u_j == pytest.approx(0.15581717451523547, abs=1e-9)
        assert u_i > 0.16 > u_j

    def test_singularity_raises(self):
        g = GameParams(kappa=0.9)
        alpha = 2.0 / 0.9 - 1.0  # drives 4 - kappa^2 (1+a)^2 to zero
        with pytest.raises(SingularEquilibrium):
            nash_equilibrium(g, alpha, alpha)


class TestDerivedQuantities:
    def test_ess_alpha_values(self):
        assert ess_alpha(G_POS) == pytest.approx(1.0 / 3.0, abs=1e-12)
        assert ess_alpha(G_NEG) == pytest.approx(-0.2, abs=1e-12)
        assert ess_alpha(GameParams(kappa=0.9)) == pytest.approx(
            0.9 / 1.1, abs=1e-12)

    def test_ess_sign_matches_externality(self):
        for kappa in (-1.5, -0.7, -0.1, 0.1, 0.6, 0.95):
            g = GameParams(kappa=kappa)
            assert math.copysign(1.0, ess_alpha(g)) == math.copysign(1.0, kappa)

    def test_efficient_action(self):
        assert efficient_action(G_POS) == pytest.approx(1.0, abs=1e-12)
        assert efficient_action(G_NEG) == pytest.approx(1.0 / 3.0, abs=1e-12)
        assert efficient_action(G_POS) == pytest.approx(
            oracles.efficient_action_oracle(0.5, 1.0), abs=1e-3)

    def test_equilibrium_is_inefficient(self):
        for g in (G_POS, G_NEG):
            a_n = nash_equilibrium(g, 0.0, 0.0).a_i
            a_e = efficient_action(g)
            w_n = oracles.welfare_direct(g.kappa, g.m, a_n, a_n)
            w_e = oracles.welfare_direct(g.kappa, g.m, a_e, a_e)
            assert w_e > w_n + 1e-6

    def test_stackelberg_action(self):
        assert stackelberg_action(G_POS, 0.0) == pytest.approx(
            5.0 / 7.0, abs=1e-12)
        assert stackelberg_action(G_POS, 0.0) == pytest.approx(
            oracles.stackelberg_oracle(0.5, 1.0, 0.0), abs=1e-3)

    def test_stackelberg_fixed_point_at_ess(self):
        # Against a follower holding the stable preference, commitment buys
        # nothing: the leader action coincides with the equilibrium action.
        a = ess_alpha(G_POS)
        assert stackelberg_action(G_POS, a) == pytest.approx(
            nash_equilibrium(G_POS, a, a).a_i, abs=1e-12)
