"""Strategy resolution and base fitness against hand-computed values."""

import warnings

import pytest

from prefevo import (
    Environment,
    GameParams,
    Strategy,
    StrategyKind,
    base_fitness,
    best_response,
    efficient_action,
    nash_equilibrium,
    resolve_action,
)

G_POS = GameParams(kappa=0.5)
G_NEG = GameParams(kappa=-0.5)
ENV_POS = Environment.single(G_POS)
ENV_BOTH = Environment.pair(G_NEG, G_POS, p=0.5)


class TestConstructors:
    def test_kinds(self):
        assert Strategy.behavioral(0.4).kind is StrategyKind.BEHAVIORAL
        assert Strategy.rational(0.1).kind is StrategyKind.RATIONAL
        assert Strategy.handshake().kind is StrategyKind.HANDSHAKE

    def test_behavioral_needs_finite_actions(self):
        with pytest.raises(ValueError):
            Strategy.behavioral()
        with pytest.raises(ValueError):
            Strategy.behavioral(float("nan"))

    def test_rational_needs_finite_alpha(self):
        with pytest.raises(ValueError):
            Strategy.rational(float("inf"))

    def test_frozen(self):
        s = Strategy.rational(0.2)
        with pytest.raises(AttributeError):
            s.alpha = 0.3

    def test_environment_validation(self):
        with pytest.raises(ValueError):
            Environment(games=(), proportions=())
        with pytest.raises(ValueError):
            Environment(games=(G_POS,), proportions=(0.4,))
        with pytest.raises(ValueError):
            Environment(games=(G_POS, G_NEG), proportions=(0.7, 0.4))
        assert len(ENV_BOTH) == 2
        assert len(ENV_POS) == 1


class TestResolveAction:
    def test_behavioral_ignores_opponent(self):
        b = Strategy.behavioral(0.42)
        for other in (Strategy.behavioral(1.0), Strategy.rational(-0.5),
                      Strategy.handshake()):
            assert resolve_action(b, other, G_POS) == pytest.approx(0.42)

    def test_behavioral_uses_per_game_slot(self):
        b = Strategy.behavioral(0.1, 0.9)
        r = Strategy.rational(0.0)
        assert resolve_action(b, r, G_NEG, game_index=0) == pytest.approx(0.1)
        assert resolve_action(b, r, G_POS, game_index=1) == pytest.approx(0.9)

    def test_rational_vs_behavioral_is_best_response(self):
        r = Strategy.rational(-0.2)
        b = Strategy.behavioral(1.0)
        assert resolve_action(r, b, G_NEG) == pytest.approx(
            best_response(G_NEG, 1.0, -0.2), abs=1e-12)

    def test_rational_vs_rational_is_equilibrium(self):
        ri = Strategy.rational(-0.2)
        rj = Strategy.rational(0.0)
        ne = nash_equilibrium(G_NEG, -0.2, 0.0)
        assert resolve_action(ri, rj, G_NEG) == pytest.approx(ne.a_i, abs=1e-12)
        assert resolve_action(rj, ri, G_NEG) == pytest.approx(ne.a_j, abs=1e-12)

    def test_handshake_mimics_behavioral(self):
        h = Strategy.handshake()
        b = Strategy.behavioral(0.37)
        assert resolve_action(h, b, G_POS) == pytest.approx(0.37)

    def test_handshake_meets_rational_at_their_equilibrium(self):
        h = Strategy.handshake()
        r = Strategy.rational(1.0 / 3.0)
        want = nash_equilibrium(G_POS, 1.0 / 3.0, 1.0 / 3.0).a_i
        assert resolve_action(h, r, G_POS) == pytest.approx(want, abs=1e-12)
        assert want == pytest.approx(0.75, abs=1e-12)

    def test_handshake_pair_plays_efficiently(self):
        h = Strategy.handshake()
        assert resolve_action(h, h, G_POS) == pytest.approx(
            efficient_action(G_POS), abs=1e-12)

    def test_handshake_stored_actions_override(self):
        h = Strategy.handshake(actions=(0.9,))
        assert resolve_action(h, h, G_POS) == pytest.approx(0.9)


class TestBaseFitness:
    def test_single_game_behavioral_pair(self):
        b = Strategy.behavioral(2.0 / 3.0)
        assert base_fitness(b, b, ENV_POS) == pytest.approx(
            4.0 / 9.0, abs=1e-12)

    def test_single_game_rational_pair(self):
        r = Strategy.rational(0.0)
        assert base_fitness(r, r, ENV_POS) == pytest.approx(
            4.0 / 9.0, abs=1e-12)

    def test_two_game_mixture(self):
        b = Strategy.behavioral(0.4, 2.0 / 3.0)
        want = 0.5 * 0.16 + 0.5 * (4.0 / 9.0)
        got = base_fitness(b, b, ENV_BOTH)
        assert got == pytest.approx(want, abs=1e-12)
        assert got == pytest.approx(0.3022222222222222, abs=1e-12)

    def test_mixture_weights_respected(self):
        b = Strategy.behavioral(0.4, 2.0 / 3.0)
        env = Environment.pair(G_NEG, G_POS, p=0.25)
        assert base_fitness(b, b, env) == pytest.approx(
            0.25 * 0.16 + 0.75 * (4.0 / 9.0), abs=1e-12)

    def test_handshake_in_pair_environment_warns(self):
        h = Strategy.handshake()
        b = Strategy.behavioral(0.4, 0.4)
        with pytest.warns(UserWarning):
            base_fitness(h, b, ENV_BOTH)

    def test_handshake_single_game_no_warning(self):
        h = Strategy.handshake()
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            val = base_fitness(h, h, ENV_POS)
        # the pair coordinates on the efficient action: u(1, 1) = 0.5
        assert val == pytest.approx(0.5, abs=1e-12)
