from fractions import Fraction as F

import pytest

from obg import (InputFormatError, Obligation, Owner, dual_game,
                 embed_chain_as_game, format_rational, make_chain, make_game,
                 parse_rational, solve_parity, validate)
from obg.model import ONE

from conftest import load_game


def test_parse_and_format_rational_round_trip():
    for text in ["0", "1", "1/2", "3/4", "-2/7"]:
        assert format_rational(parse_rational(text)) == text
    assert format_rational(parse_rational("2/4")) == "1/2"


def test_bare_numbers_are_rejected():
    with pytest.raises(InputFormatError):
        parse_rational(0.5)  # type: ignore[arg-type]
    with pytest.raises(InputFormatError):
        parse_rational(1)  # type: ignore[arg-type]


def test_obligation_dual_flips_strictness():
    assert Obligation(">=", F(1, 2)).dual() == Obligation(">", F(1, 2))
    assert Obligation(">", F(1, 3)).dual() == Obligation(">=", F(2, 3))


def test_obligation_threshold_must_be_probability():
    with pytest.raises(InputFormatError):
        Obligation(">=", F(3, 2))


def two_config_game():
    return make_game(
        configs=[("a", Owner.PROBABILISTIC, 0, None),
                 ("b", Owner.PROBABILISTIC, 1, None)],
        edges=[("a", "b"), ("b", "b")],
        kernel={"a": {"b": ONE}, "b": {"b": ONE}})


def test_validate_accepts_well_formed_game():
    assert validate(two_config_game()) == []


def test_validate_reports_row_sum_violation():
    game = make_game(
        configs=[("v", Owner.PROBABILISTIC, 0, None)],
        edges=[("v", "v")],
        kernel={"v": {"v": F(3, 4)}})
    problems = validate(game)
    assert any("sums to 3/4" in p for p in problems)


def test_validate_reports_kernel_edge_mismatch():
    game = make_game(
        configs=[("v", Owner.PROBABILISTIC, 0, None),
                 ("w", Owner.PROBABILISTIC, 0, None)],
        edges=[("v", "v"), ("w", "w")],
        kernel={"v": {"v": F(1, 2), "w": F(1, 2)}, "w": {"w": ONE}})
    problems = validate(game)
    assert any("does not match its edges" in p for p in problems)


def test_validate_rejects_dead_configuration():
    game = make_game(
        configs=[("v", Owner.PLAYER0, 0, None)],
        edges=[],
        kernel={})
    assert any("no outgoing edge" in p for p in validate(game))


def test_dual_obligation_examples(fig6):
    dual = dual_game(fig6)
    s1 = fig6.index("s1")
    assert fig6.obligation[s1] == Obligation(">=", F(3, 4))
    assert dual.obligation[s1] == Obligation(">", F(1, 4))
    assert dual.obligation[fig6.index("s2")] is None


def test_dual_is_involution_up_to_parity_class(fig6):
    twice = dual_game(dual_game(fig6))
    assert twice.owners == fig6.owners
    assert twice.obligation == fig6.obligation
    assert twice.succ == fig6.succ
    assert all((a - b) % 2 == 0 for a, b in zip(twice.priority, fig6.priority))
    assert solve_parity(strip(fig6), witnesses=False).values == \
        solve_parity(strip(twice), witnesses=False).values


def strip(game):
    from obg.model import ObligationGame
    return ObligationGame(names=game.names, owners=game.owners, succ=game.succ,
                          kernel=game.kernel, priority=game.priority,
                          obligation=tuple(None for _ in game.names))


def test_embed_chain_preserves_structure():
    chain = make_chain(["x", "y"], {"x": {"y": ONE}, "y": {"y": ONE}}, initial="x")
    game = embed_chain_as_game(chain, {"x": 1, "y": 0})
    assert len(game) == 2
    assert all(o is Owner.PROBABILISTIC for o in game.owners)
    assert game.kernel_row(0) == ((1, ONE),)
    assert validate(game) == []


def test_embed_requires_total_priority():
    chain = make_chain(["x", "y"], {"x": {"y": ONE}, "y": {"y": ONE}}, initial="x")
    with pytest.raises(InputFormatError):
        embed_chain_as_game(chain, {"x": 1})


def test_single_location_even_self_loop_has_value_one():
    chain = make_chain(["s"], {"s": {"s": ONE}}, initial="s")
    game = embed_chain_as_game(chain, {"s": 0})
    assert solve_parity(game, witnesses=False).values == (ONE,)


def test_fixture_games_validate():
    for name in ["fig5.game.json", "fig6.game.json", "fig6_s4_geq.game.json",
                 "fig6_s4_gt.game.json", "parity_demo.game.json"]:
        assert validate(load_game(name)) == [], name
