import itertools

import numpy as np
import pytest

from bellccp import (
    BellFunctional,
    DeterministicBellStrategy,
    MessagingStrategy,
    Scenario,
    Term,
    bell_bound,
    bob_best_response,
    build_game,
    catalog,
    ccp_bound_free_decoding,
    ccp_bound_general,
    ccp_value_linear,
    deterministic_behavior,
    evaluate_bell,
    messaging_payoff_additive,
)
from bellccp.errors import EnumerationCapError
from bellccp.fourier import OmegaFunction, convex_weights


def brute_bell_bound(f):
    """Oracle: plain loops over every deterministic assignment pair."""
    s = f.scenario
    best = -np.inf
    for aOf in itertools.product(range(s.d), repeat=s.mA):
        for bOf in itertools.product(range(s.d), repeat=s.mB):
            value = sum(
                s.p[t.x, t.y] * t.c
                for t in f.terms
                if (aOf[t.x] + bOf[t.y]) % s.d == t.F
            )
            best = max(best, value)
    return best


def brute_ccp_bound(game):
    """Oracle: every messaging rule x additive decoder, plain loops."""
    s = game.scenario
    d = game.d
    cells = list(itertools.product(range(d), range(s.mA)))
    best = -np.inf
    for values in itertools.product(range(d), repeat=len(cells)):
        m = dict(zip(cells, values))
        for bOf in itertools.product(range(d), repeat=s.mB):
            total = 0.0
            for t in game.functional.terms:
                for x0 in range(d):
                    if (m[(x0, t.x)] + bOf[t.y]) % d == (x0 + t.F) % d:
                        total += game.x0_prior[x0] * s.p[t.x, t.y] * t.c
            best = max(best, total)
    return best


def single_term_functional():
    return BellFunctional(Scenario(2, 1, 1, np.array([[1.0]])), (Term(0, 0, 1, 0, 0, 1.0),))


def test_chsh_bell_bound_matches_brute_force(chsh):
    B, strat = bell_bound(chsh)
    assert B == pytest.approx(brute_bell_bound(chsh), abs=1e-15)
    assert B == pytest.approx(0.75, abs=1e-15)
    assert strat == DeterministicBellStrategy((0, 0), (0, 0))  # lexicographic winner


def test_cglmp3_bell_bound_matches_brute_force(cglmp3):
    B, _ = bell_bound(cglmp3)
    assert B == pytest.approx(brute_bell_bound(cglmp3), abs=1e-13)
    assert B == pytest.approx(0.5, abs=1e-13)


def test_single_term_bound():
    B, strat = bell_bound(single_term_functional())
    assert B == pytest.approx(1.0, abs=1e-15)
    assert strat.aOf == (0,) and strat.bOf == (0,)


def test_bell_bound_matches_brute_force_on_random_instances():
    for seed in range(8):
        f = catalog.random_functional(seed, 3, 2, 2, N=1, K=1)
        assert bell_bound(f)[0] == pytest.approx(brute_bell_bound(f), abs=1e-13)


def test_bell_bound_cap():
    f = catalog.random_functional(0, 3, 2, 2, N=1, K=0)
    with pytest.raises(EnumerationCapError):
        bell_bound(f, cap=10)


def test_linear_value_examples(chsh_game):
    assert ccp_value_linear(chsh_game, DeterministicBellStrategy((0, 0), (0, 0))) == pytest.approx(
        0.75, abs=1e-15
    )
    # direct evaluation over the 16 input tuples: with a = 0 the strategy
    # wins exactly when b(y) = x*y, i.e. at (0,0), (1,0), (1,1)
    assert ccp_value_linear(chsh_game, DeterministicBellStrategy((0, 0), (0, 1))) == pytest.approx(
        0.75, abs=1e-15
    )
    # parity forces an odd number of misses: every deterministic value is 1/4 or 3/4
    values = {
        ccp_value_linear(chsh_game, DeterministicBellStrategy(a, b))
        for a in itertools.product(range(2), repeat=2)
        for b in itertools.product(range(2), repeat=2)
    }
    assert values == {0.25, 0.75}


def test_linear_value_equals_bell_value_of_assignments(cglmp3_game):
    rng = np.random.default_rng(17)
    f = cglmp3_game.functional
    for _ in range(20):
        aOf = tuple(int(v) for v in rng.integers(0, 3, size=2))
        bOf = tuple(int(v) for v in rng.integers(0, 3, size=2))
        strat = DeterministicBellStrategy(aOf, bOf)
        beh = deterministic_behavior(f.scenario, aOf, bOf)
        assert abs(ccp_value_linear(cglmp3_game, strat) - evaluate_bell(f, beh)) < 1e-12


def test_bob_best_response_linear_messaging(chsh_game):
    # m = x0 + a(x) with a = 0: optimal decoding recovers the Bell optimum,
    # and some additive decoder g = m + b*(y) attains the same value (the
    # argmax table itself may break ties non-additively)
    m = MessagingStrategy(np.arange(2)[:, None] + np.zeros((1, 2), dtype=int))
    _, value = bob_best_response(chsh_game, m)
    assert value == pytest.approx(0.75, abs=1e-15)
    best_additive = max(
        sum(messaging_payoff_additive(chsh_game, m, bOf))
        for bOf in itertools.product(range(2), repeat=2)
    )
    assert value == pytest.approx(best_additive, abs=1e-15)


def test_bob_best_response_constant_messaging(chsh_game):
    m = MessagingStrategy(np.zeros((2, 2), dtype=int))
    _, value = bob_best_response(chsh_game, m)
    # the secret never reaches Bob, so every guess wins half the weight
    assert value == pytest.approx(0.5, abs=1e-15)


def test_bob_best_response_revealing_messaging():
    game = build_game(single_term_functional())
    m = MessagingStrategy(np.array([[0], [1]]))  # message = x0
    _, value = bob_best_response(game, m)
    assert value == pytest.approx(1.0, abs=1e-15)


def test_bob_best_response_beats_explicit_decoders(cglmp3_game):
    rng = np.random.default_rng(23)
    d = 3
    for _ in range(10):
        m = MessagingStrategy(rng.integers(0, d, size=(d, 2)))
        _, best = bob_best_response(cglmp3_game, m)
        for _ in range(10):
            g = rng.integers(0, d, size=(2, d))
            value = 0.0
            for t in cglmp3_game.functional.terms:
                for x0 in range(d):
                    if g[t.y, m.m[x0, t.x]] == (x0 + t.F) % d:
                        value += cglmp3_game.x0_prior[x0] * cglmp3_game.scenario.p[t.x, t.y] * t.c
            assert best >= value - 1e-12


def test_ccp_bound_examples(chsh_game, cglmp3_game):
    assert ccp_bound_general(chsh_game)[0] == pytest.approx(0.75, abs=1e-13)
    assert ccp_bound_general(cglmp3_game)[0] == pytest.approx(0.5, abs=1e-13)
    trivial = build_game(single_term_functional())
    assert ccp_bound_general(trivial)[0] == pytest.approx(1.0, abs=1e-15)


def test_ccp_bound_matches_brute_force_on_random_instances():
    for seed in (3, 4, 5):
        f = catalog.random_functional(seed, 2, 2, 2, N=2, K=0)
        game = build_game(f)
        assert ccp_bound_general(game)[0] == pytest.approx(brute_ccp_bound(game), abs=1e-13)


def test_game_bound_equals_bell_bound(chsh, cglmp3):
    for f in (chsh, cglmp3):
        assert abs(bell_bound(f)[0] - ccp_bound_general(build_game(f))[0]) < 1e-12
    for seed in range(10):
        f = catalog.random_functional(seed, 2 + seed % 2, 2, 2, N=1, K=0)
        assert abs(bell_bound(f)[0] - ccp_bound_general(build_game(f))[0]) < 1e-12


def test_free_decoding_can_exceed_the_bound(chsh_game, cglmp3_game):
    # unrestricted decoders tie the additive optimum for the all-positive
    # game but genuinely beat it (and the Bell bound) on the mixed-sign one;
    # 2/3 frozen from an exhaustive scan over all 729 x decoder tables
    assert ccp_bound_free_decoding(chsh_game)[0] == pytest.approx(0.75, abs=1e-13)
    free = ccp_bound_free_decoding(cglmp3_game)[0]
    assert free == pytest.approx(2.0 / 3.0, abs=1e-13)
    assert free > ccp_bound_general(cglmp3_game)[0] + 0.1


def test_ccp_bound_cap(cglmp3_game):
    with pytest.raises(EnumerationCapError):
        ccp_bound_general(cglmp3_game, cap=100)


def test_nonlinear_payoff_is_mixture_of_offset_payoffs():
    # per-x contribution of any messaging under a fixed additive decoder
    # decomposes by the convex weights of x0 -> m(x0, x)
    rng = np.random.default_rng(31)
    for seed in range(6):
        d = 2 + seed % 2
        f = catalog.random_functional(40 + seed, d, 2, 2, N=1, K=0)
        game = build_game(f)
        m = MessagingStrategy(rng.integers(0, d, size=(d, 2)))
        bOf = tuple(int(v) for v in rng.integers(0, d, size=2))
        per_x = messaging_payoff_additive(game, m, bOf)
        for x in range(2):
            lam = convex_weights(OmegaFunction(d, tuple(int(v) for v in m.m[:, x])))
            mix = 0.0
            for nu in range(d):
                offsets = np.zeros(2, dtype=int)
                offsets[x] = nu
                linear = MessagingStrategy((np.arange(d)[:, None] + offsets[None, :]) % d)
                mix += lam[nu] * messaging_payoff_additive(game, linear, bOf)[x]
            assert abs(mix - per_x[x]) < 1e-12
