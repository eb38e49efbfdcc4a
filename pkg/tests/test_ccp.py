import itertools

import numpy as np
import pytest

from bellccp import (
    CcpGame,
    catalog,
    born_behavior,
    build_game,
    entangled_value,
    entangled_value_general,
    evaluate_bell,
    f_eval,
    linear_messaging_table,
    uniform_behavior,
)
from bellccp.errors import DimensionMismatchError
from bellccp.functional import Behavior

CHSH_QUANTUM = (2.0 + np.sqrt(2.0)) / 4.0


@pytest.fixture(scope="module")
def chsh_optimal_behavior(chsh):
    rho, A, B = catalog.chsh_optimal_strategy()
    return born_behavior(rho, A, B, scenario=chsh.scenario)


def test_build_game_targets_shift_with_the_secret(chsh_game):
    for x0, x, y in itertools.product(range(2), repeat=3):
        assert f_eval(chsh_game, 1, 0, x0, x, y) == (x0 + x * y) % 2


def test_f_eval_examples(chsh_game, cglmp3_game):
    assert f_eval(chsh_game, 1, 0, 1, 1, 1) == 0
    assert f_eval(chsh_game, 1, 0, 0, 1, 1) == 1  # x0 = 0 returns the residue itself
    # block 2 at settings (0, 0) carries residue 2 for cglmp(3)
    assert f_eval(cglmp3_game, 2, 0, 2, 0, 0) == (2 + 2) % 3


def test_f_eval_undefined_term(chsh_game):
    with pytest.raises(ValueError):
        f_eval(chsh_game, 2, 0, 0, 0, 0)


def test_game_construction_checks_prior(chsh):
    with pytest.raises(ValueError):
        CcpGame(chsh, np.array([0.7, 0.7]))
    with pytest.raises(ValueError):
        CcpGame(chsh, np.array([1.0]))


def test_entangled_value_equals_bell_value_on_random_behaviors():
    rng = np.random.default_rng(41)
    for d in (2, 3, 4):
        f = catalog.random_functional(d, d, 2, 2, N=1, K=0)
        game = build_game(f)
        for _ in range(40):
            beh = catalog.random_behavior(f.scenario, rng)
            assert abs(entangled_value(game, beh) - evaluate_bell(f, beh)) < 1e-12


def test_entangled_value_examples(chsh_game, chsh_optimal_behavior):
    P = np.zeros((2, 2, 2, 2))
    for x in range(2):
        for y in range(2):
            for a in range(2):
                P[a, (x * y - a) % 2, x, y] = 0.5
    pr = Behavior(chsh_game.scenario, P)
    assert entangled_value(chsh_game, pr) == pytest.approx(1.0, abs=1e-14)
    assert entangled_value(chsh_game, uniform_behavior(chsh_game.scenario)) == pytest.approx(
        0.5, abs=1e-14
    )
    assert entangled_value(chsh_game, chsh_optimal_behavior) == pytest.approx(
        CHSH_QUANTUM, abs=1e-12
    )


def test_general_messaging_reduces_to_linear(chsh_game, cglmp3_game):
    rng = np.random.default_rng(13)
    for game in (chsh_game, cglmp3_game):
        for _ in range(10):
            beh = catalog.random_behavior(game.scenario, rng)
            linear = linear_messaging_table(game)
            assert abs(
                entangled_value_general(game, beh, linear) - entangled_value(game, beh)
            ) < 1e-14


def test_constant_messaging_erases_the_secret(chsh_game, chsh_optimal_behavior):
    m = np.zeros((2, 2, 2), dtype=int)
    assert entangled_value_general(chsh_game, chsh_optimal_behavior, m) == pytest.approx(
        0.5, abs=1e-14
    )


def test_random_messagings_never_beat_linear_on_the_optimum(chsh_game, chsh_optimal_behavior):
    rng = np.random.default_rng(101)
    best = entangled_value(chsh_game, chsh_optimal_behavior)
    for _ in range(200):
        m = rng.integers(0, 2, size=(2, 2, 2))
        assert entangled_value_general(chsh_game, chsh_optimal_behavior, m) <= best + 1e-9


def test_general_messaging_bounded_by_outcome_relabelings():
    # every messaging payoff is a mixture over rules m = x0 + nu(x, a), so
    # the maximum over those relabeling rules dominates all messagings
    rng = np.random.default_rng(59)
    for d in (2, 3):
        f = catalog.random_functional(d + 70, d, 2, 2, N=1, K=0)
        game = build_game(f)
        for _ in range(3):
            beh = catalog.random_behavior(f.scenario, rng)
            x0 = np.arange(d)[:, None, None]
            a = np.arange(d)[None, None, :]
            bound = -np.inf
            for flat in itertools.product(range(d), repeat=2 * d):
                nu = np.asarray(flat).reshape(2, d)  # (x, a)
                m = (x0 + nu[None, :, :]) % d
                bound = max(bound, entangled_value_general(game, beh, m))
            for _ in range(25):
                m = rng.integers(0, d, size=(d, 2, d))
                assert entangled_value_general(game, beh, m) <= bound + 1e-12


def test_payoff_affine_in_behavior(cglmp3_game):
    rng = np.random.default_rng(3)
    b1 = catalog.random_behavior(cglmp3_game.scenario, rng)
    b2 = catalog.random_behavior(cglmp3_game.scenario, rng)
    mix = Behavior(cglmp3_game.scenario, 0.5 * (b1.P + b2.P))
    v1 = entangled_value(cglmp3_game, b1)
    v2 = entangled_value(cglmp3_game, b2)
    assert abs(entangled_value(cglmp3_game, mix) - 0.5 * (v1 + v2)) < 1e-12


def test_messaging_table_validation(chsh_game):
    beh = uniform_behavior(chsh_game.scenario)
    with pytest.raises(DimensionMismatchError):
        entangled_value_general(chsh_game, beh, np.zeros((2, 2), dtype=int))
    with pytest.raises(ValueError):
        entangled_value_general(chsh_game, beh, np.full((2, 2, 2), 5))


def test_behavior_scenario_mismatch(chsh_game, cglmp3_game):
    beh = uniform_behavior(cglmp3_game.scenario)
    with pytest.raises(DimensionMismatchError):
        entangled_value(chsh_game, beh)
