import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from obg import (InputFormatError, OracleInfeasibleError,
                 PureMemorylessStrategy, decide_parity_threshold, dual_game,
                 induce_chain, make_game, parity_measure, reach_probability,
                 solve_parity, solve_parity_oracle)
from obg.budgets import Budgets
from obg.generators import random_parity_game
from obg.model import ONE, ZERO, ObligationGame, Owner
from obg.obligations import build_gamma_game
import obg.parity as parity_mod

from conftest import load_game

HALF = F(1, 2)


def strip_obligations(game: ObligationGame) -> ObligationGame:
    return ObligationGame(names=game.names, owners=game.owners, succ=game.succ,
                          kernel=game.kernel, priority=game.priority,
                          obligation=tuple(None for _ in game.names))


def sigma(mapping):
    return PureMemorylessStrategy.from_dict(0, mapping)


def pi(mapping):
    return PureMemorylessStrategy.from_dict(1, mapping)


def test_induce_chain_on_pure_kernel():
    game = load_game("fig6.game.json")
    chain = induce_chain(strip_obligations(game), sigma({}), pi({}))
    assert chain.succ == game.kernel


def test_induce_chain_rejects_domain_mismatch(fig5):
    with pytest.raises(InputFormatError):
        induce_chain(strip_obligations(fig5), sigma({}), pi({}))


def test_fig5_described_strategy_gives_three_quarters(fig5):
    # "go from v4 to v5, then to v7" is memoryful in the raw game; its
    # measure lives in the monitor game of v5, where the second visit to
    # v5 freezes: choosing v7 at the monitored v4 yields exactly 3/4.
    v5 = fig5.index("v5")
    gamma, root = build_gamma_game(fig5, v5, {(v5, 0)})
    choice = {v: next(u for u in gamma.succ[v] if gamma.names[u].startswith("v7"))
              for v in range(len(gamma))
              if gamma.owners[v] is Owner.PLAYER0 and gamma.names[v].startswith("v4")}
    chain = induce_chain(gamma, sigma(choice), pi({}))
    assert parity_measure(chain, gamma.priority)[root] == F(3, 4)


def test_oracle_on_pure_chain_equals_parity_measure():
    game = strip_obligations(load_game("fig6.game.json"))
    from obg.model import chain_view
    expect = parity_measure(chain_view(game), game.priority)
    assert list(solve_parity_oracle(game).values) == expect


def test_player0_picks_even_sink():
    game = make_game(
        configs=[("c", Owner.PLAYER0, 1, None),
                 ("even", Owner.PROBABILISTIC, 0, None),
                 ("odd", Owner.PROBABILISTIC, 1, None)],
        edges=[("c", "even"), ("c", "odd"), ("even", "even"), ("odd", "odd")],
        kernel={"even": {"even": ONE}, "odd": {"odd": ONE}})
    solved = solve_parity_oracle(game)
    assert solved.values[0] == ONE
    assert solved.sigma.as_dict() == {0: 1}


def test_oracle_budget_error():
    game = random_parity_game(random.Random(3), max_configs=6)
    with pytest.raises(OracleInfeasibleError):
        solve_parity_oracle(game, budgets=Budgets(max_strategy_pairs=1))


@given(st.integers(0, 10**6))
@settings(max_examples=60)
def test_fast_solver_is_bit_identical_to_oracle(seed):
    game = random_parity_game(random.Random(seed))
    assert solve_parity(game) == solve_parity_oracle(game)


@given(st.integers(0, 10**6))
@settings(max_examples=40)
def test_determinacy_for_parity_games(seed):
    game = random_parity_game(random.Random(seed))
    direct = solve_parity(game, witnesses=False).values
    swapped = solve_parity(dual_game(game), witnesses=False).values
    assert all(a + b == ONE for a, b in zip(direct, swapped))


@given(st.integers(0, 10**6))
@settings(max_examples=25)
def test_witnesses_achieve_the_values(seed):
    game = random_parity_game(random.Random(seed * 2 + 1))
    solved = solve_parity(game)
    import itertools
    v1 = [v for v in range(len(game)) if game.owners[v] is Owner.PLAYER1]
    for combo in itertools.product(*(game.succ[v] for v in v1)):
        chain = induce_chain(game, solved.sigma, pi(dict(zip(v1, combo))))
        measured = parity_measure(chain, game.priority)
        assert all(m >= v for m, v in zip(measured, solved.values))
    v0 = [v for v in range(len(game)) if game.owners[v] is Owner.PLAYER0]
    for combo in itertools.product(*(game.succ[v] for v in v0)):
        chain = induce_chain(game, sigma(dict(zip(v0, combo))), solved.pi)
        measured = parity_measure(chain, game.priority)
        assert all(m <= v for m, v in zip(measured, solved.values))


def test_losing_sink_priority_class_invariance():
    def game_with(priority):
        return make_game(
            configs=[("c", Owner.PROBABILISTIC, 0, None),
                     ("sink", Owner.PROBABILISTIC, priority, None)],
            edges=[("c", "sink"), ("c", "c"), ("sink", "sink")],
            kernel={"c": {"c": HALF, "sink": HALF}, "sink": {"sink": ONE}})
    assert solve_parity(game_with(1), witnesses=False).values == \
        solve_parity(game_with(3), witnesses=False).values


def test_reachability_shaped_game_matches_reach_probability():
    rng = random.Random(11)
    for _ in range(20):
        game = random_parity_game(rng)
        # reshape: absorbing targets at priority 0, everything else 1
        n = len(game)
        targets = {v for v in range(n) if v % 3 == 0}
        succ = list(game.succ)
        kernel = list(game.kernel)
        owners = list(game.owners)
        for t in targets:
            succ[t] = (t,)
            kernel[t] = ((t, ONE),)
            owners[t] = Owner.PROBABILISTIC
        reshaped = ObligationGame(
            names=game.names, owners=tuple(owners), succ=tuple(succ),
            kernel=tuple(kernel),
            priority=tuple(0 if v in targets else 1 for v in range(n)),
            obligation=tuple(None for _ in range(n)))
        solved = solve_parity(reshaped)
        chain = induce_chain(reshaped, solved.sigma, solved.pi)
        assert list(solved.values) == reach_probability(chain, targets)
        assert solved == solve_parity_oracle(reshaped)


def test_decide_threshold_strict_vs_nonstrict():
    game = make_game(
        configs=[("c", Owner.PROBABILISTIC, 1, None),
                 ("w", Owner.PROBABILISTIC, 0, None),
                 ("l", Owner.PROBABILISTIC, 1, None)],
        edges=[("c", "w"), ("c", "l"), ("w", "w"), ("l", "l")],
        kernel={"c": {"w": HALF, "l": HALF}, "w": {"w": ONE}, "l": {"l": ONE}})
    assert decide_parity_threshold(game, 0, ">=", HALF).verdict
    assert not decide_parity_threshold(game, 0, ">", HALF).verdict
    assert decide_parity_threshold(game, 0, ">=", ZERO).verdict


def test_decide_threshold_on_fig6_gamma_game(fig6):
    s1 = fig6.index("s1")
    gamma, root = build_gamma_game(fig6, s1, {(s1, 0), (s1, 2)})
    decision = decide_parity_threshold(gamma, root, ">=", F(3, 4))
    assert decision.verdict and decision.value == F(3, 4)
    assert decision.certificate_player == 0


def test_enumeration_fallback_stays_exact(monkeypatch):
    # force the climb to return a useless bound so the exhaustive
    # fallback must reconstruct the values on its own
    monkeypatch.setattr(parity_mod, "_climb",
                        lambda game: tuple(ZERO for _ in game.names))
    parity_mod._value_cache.clear()
    rng = random.Random(21)
    try:
        for _ in range(10):
            game = random_parity_game(rng)
            if game.is_chain():
                continue
            assert solve_parity(game, witnesses=False).values == \
                solve_parity_oracle(game, witnesses=False).values
    finally:
        parity_mod._value_cache.clear()
