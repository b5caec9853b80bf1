"""Complexity-cost accounting: distinct-action counting and penalty totals."""

import pytest

from prefevo import (
    Environment,
    GameParams,
    PenaltyConfig,
    Strategy,
    complexity_cost,
    distinct_action_count,
    penalized_fitness,
)

ENV_POS = Environment.single(GameParams(kappa=0.5))
ENV_BOTH = Environment.pair(GameParams(kappa=-0.5), GameParams(kappa=0.5),
                            p=0.5)


class TestDistinctActionCount:
    def test_single_action(self):
        assert distinct_action_count(Strategy.behavioral(0.4)) == 1

    def test_two_distinct(self):
        assert distinct_action_count(Strategy.behavioral(0.4, 0.5)) == 2

    def test_duplicates_collapse(self):
        assert distinct_action_count(Strategy.behavioral(0.4, 0.4)) == 1

    def test_sub_quantum_difference_collapses(self):
        # the count is taken on a 1e-9 lattice, so noise below it is free
        assert distinct_action_count(
            Strategy.behavioral(0.4, 0.4 + 4e-10)) == 1

    def test_above_quantum_difference_counts(self):
        assert distinct_action_count(
            Strategy.behavioral(0.4, 0.4 + 2e-9)) == 2

    def test_non_behavioral_kinds(self):
        assert distinct_action_count(Strategy.rational(0.3)) == 0
        assert distinct_action_count(Strategy.handshake()) == 0


class TestComplexityCost:
    def test_behavioral_pays_per_action(self):
        pc = PenaltyConfig(eps_r=1e-5, eps_p=0.002)
        assert complexity_cost(Strategy.behavioral(0.4), pc) == pytest.approx(
            0.002, abs=1e-15)
        assert complexity_cost(Strategy.behavioral(0.4, 0.6),
                               pc) == pytest.approx(0.004, abs=1e-15)

    def test_rational_pays_flat(self):
        pc = PenaltyConfig(eps_r=1e-5, eps_p=0.002)
        assert complexity_cost(Strategy.rational(0.0), pc) == pytest.approx(
            0.00201, abs=1e-15)

    def test_handshake_pays_its_own(self):
        pc = PenaltyConfig(eps_r=1e-5, eps_p=0.002, eps_h=1e-4)
        assert complexity_cost(Strategy.handshake(), pc) == pytest.approx(
            1e-4, abs=1e-15)

    def test_zero_config_is_free(self):
        pc = PenaltyConfig()
        for s in (Strategy.behavioral(0.1, 0.2), Strategy.rational(1.0),
                  Strategy.handshake()):
            assert complexity_cost(s, pc) == 0.0

    def test_negative_penalty_rejected(self):
        with pytest.raises(ValueError):
            PenaltyConfig(eps_p=-0.001)


class TestPenalizedFitness:
    def test_rational_pair_single_game(self):
        pc = PenaltyConfig(eps_r=1e-5)
        r = Strategy.rational(0.0)
        assert penalized_fitness(r, r, ENV_POS, pc) == pytest.approx(
            4.0 / 9.0 - 1e-5, abs=1e-12)

    def test_rational_pair_two_games(self):
        pc = PenaltyConfig(eps_r=1e-5, eps_p=0.002)
        r = Strategy.rational(0.0)
        want = 0.5 * 0.16 + 0.5 * (4.0 / 9.0) - 0.00201
        got = penalized_fitness(r, r, ENV_BOTH, pc)
        assert got == pytest.approx(want, abs=1e-12)
        assert got == pytest.approx(0.3002122222222222, abs=1e-12)

    def test_behavioral_pays_for_distinct_slots_only(self):
        pc = PenaltyConfig(eps_p=0.002)
        shared = Strategy.behavioral(0.5, 0.5)
        split = Strategy.behavioral(0.4, 2.0 / 3.0)
        gap_shared = (penalized_fitness(shared, shared, ENV_BOTH,
                                        PenaltyConfig())
                      - penalized_fitness(shared, shared, ENV_BOTH, pc))
        gap_split = (penalized_fitness(split, split, ENV_BOTH,
                                       PenaltyConfig())
                     - penalized_fitness(split, split, ENV_BOTH, pc))
        assert gap_shared == pytest.approx(0.002, abs=1e-15)
        assert gap_split == pytest.approx(0.004, abs=1e-15)

    def test_penalty_applies_to_own_side_only(self):
        pc = PenaltyConfig(eps_r=1e-5, eps_p=0.002)
        b = Strategy.behavioral(2.0 / 3.0)
        r = Strategy.rational(0.0)
        # both strategies play 2/3 against each other, so the base payoffs
        # tie and the fitness difference is exactly the cost difference
        fb = penalized_fitness(b, r, ENV_POS, pc)
        fr = penalized_fitness(r, b, ENV_POS, pc)
        assert fb - fr == pytest.approx(0.00201 - 0.002, abs=1e-12)
