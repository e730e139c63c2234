"""Regenerate the bundled fixture files in canonical serialized form.

Each fixture carries a provenance block separating externally stated
values (constraints the reconstruction was built to satisfy) from
values derived by this repository's own solvers.
"""

from __future__ import annotations

import sys
from fractions import Fraction as F
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from obg import Obligation, Owner, make_chain, make_game  # noqa: E402
from obg.io_formats import (ChainDocument, GameDocument, dumps,  # noqa: E402
                            serialize_automaton_document,
                            serialize_chain_document, serialize_game_document)
from obg.pautomata import FF, Or, PAutomaton, StateAtom, Term  # noqa: E402

HALF = F(1, 2)
ONE = F(1)

OUT = Path(__file__).resolve().parents[1] / "fixtures"


def write(name: str, text: str) -> None:
    (OUT / name).write_text(text, encoding="utf-8")
    print("wrote", name)


def fig1() -> None:
    chain = make_chain(
        ["s1", "s2", "s3", "s4"],
        {"s1": {"s2": HALF, "s3": HALF}, "s2": {"s4": ONE},
         "s3": {"s4": ONE}, "s4": {"s2": HALF, "s3": HALF}},
        initial="s1")
    doc = ChainDocument(
        chain=chain,
        priority=(3, 1, 2, 3),
        obligations=(None, Obligation(">", F(2, 3)), Obligation(">=", HALF), None),
        provenance={
            "source": "reconstruction",
            "constraints": [
                "every run visiting s2 infinitely often has odd liminf priority",
                "a run visiting s4 infinitely often has even liminf priority only if it also visits s3 infinitely often",
                "the measure of returning to s3 while avoiding s2 is exactly 1/2",
                "every path set from s2 of measure above 2/3 contains a return to s2",
            ],
            "stated_values": {"s2": "0", "s3": "1", "s3 return measure": "1/2"},
            "derived_values": {"s1": "1/2", "s4": "1/2"},
        })
    write("fig1.chain.json", serialize_chain_document(doc))


def fig2() -> None:
    chain = make_chain(
        ["s1", "s2", "s3"],
        {"s1": {"s2": HALF, "s3": HALF}, "s2": {"s1": ONE}, "s3": {"s3": ONE}},
        initial="s1")
    base_constraints = [
        "the alternating run (s1 s2)^w is the unique run never reaching s3 and has measure zero",
        "every path set from s2 of measure above 1/2 contains a return to s2",
    ]
    doc = ChainDocument(
        chain=chain, priority=(0, 0, 0),
        obligations=(None, Obligation(">", HALF), None),
        provenance={
            "source": "reconstruction",
            "constraints": base_constraints + ["every run is accepting"],
            "stated_values": {"s1": "1"},
            "derived_values": {"s2": "1", "s3": "1"},
        })
    write("fig2_all_winning.chain.json", serialize_chain_document(doc))
    doc = ChainDocument(
        chain=chain, priority=(1, 1, 0),
        obligations=(None, Obligation(">", HALF), None),
        provenance={
            "source": "reconstruction",
            "constraints": base_constraints + [
                "every run is accepting except the measure-zero run (s1 s2)^w"],
            "stated_values": {"s1": "1/2", "s2": "0"},
            "derived_values": {"s3": "1"},
        })
    write("fig2_losing_path.chain.json", serialize_chain_document(doc))


def fig4() -> None:
    chain = make_chain(
        ["s1", "s2"],
        {"s1": {"s1": F(1, 3), "s2": F(2, 3)}, "s2": {"s2": ONE}},
        initial="s1")
    doc = ChainDocument(
        chain=chain, priority=(1, 0),
        obligations=(Obligation(">", F(1, 3)), None),
        provenance={
            "source": "reconstruction",
            "constraints": [
                "the run staying in s1 forever is rejecting",
                "leaving s1 once and never meeting another obligation wins with measure 2/3, above the 1/3 bound",
            ],
            "stated_values": {"s1 pre-value": "1", "s1 one-step measure": "2/3"},
            "derived_values": {"s1": "1", "s2": "1"},
        })
    write("fig4.chain.json", serialize_chain_document(doc))


def fig5() -> None:
    game = make_game(
        configs=[
            ("v1", Owner.PLAYER0, 1, Obligation(">", HALF)),
            ("v2", Owner.PROBABILISTIC, 1, None),
            ("v3", Owner.PLAYER0, 1, None),
            ("v4", Owner.PLAYER0, 1, None),
            ("v5", Owner.PROBABILISTIC, 1, Obligation(">=", F(3, 4))),
            ("v6", Owner.PROBABILISTIC, 0, None),
            ("v7", Owner.PROBABILISTIC, 1, None),
            ("v8", Owner.PROBABILISTIC, 0, None),
        ],
        edges=[("v1", "v2"), ("v2", "v3"), ("v2", "v4"), ("v3", "v1"),
               ("v3", "v2"), ("v3", "v3"), ("v4", "v5"), ("v4", "v7"),
               ("v5", "v4"), ("v5", "v6"), ("v6", "v5"), ("v7", "v1"),
               ("v7", "v8"), ("v8", "v8")],
        kernel={"v2": {"v3": HALF, "v4": HALF}, "v5": {"v4": HALF, "v6": HALF},
                "v6": {"v5": ONE}, "v7": {"v1": HALF, "v8": HALF},
                "v8": {"v8": ONE}})
    doc = GameDocument(
        game=game,
        provenance={
            "source": "constrained reconstruction; transition probabilities are only partially determined by the available description",
            "constraints": [
                "only v6 and v8 have priority 0",
                "the loop from v5 through v6 back to v5 is winning",
                "the pre-value of v5 is 3/4: returning to itself with probability 1/2 plus reaching v8 with probability 1/4",
                "a certificate exists with v1 relying on reaching v5 at minimal priority 1 and v5 relying on itself at minimal priority 0",
            ],
            "stated_values": {"v5 pre-value": "3/4", "v1..v6": "1"},
            "derived_values": {"v7": "1", "v8": "1"},
        })
    write("fig5.game.json", serialize_game_document(doc))


def fig6_game(s4_obligation):
    return make_game(
        configs=[
            ("s1", Owner.PROBABILISTIC, 3, Obligation(">=", F(3, 4))),
            ("s2", Owner.PROBABILISTIC, 2, None),
            ("s3", Owner.PROBABILISTIC, 0, None),
            ("s4", Owner.PROBABILISTIC, 4, s4_obligation),
            ("s5", Owner.PROBABILISTIC, 3, None),
            ("s6", Owner.PROBABILISTIC, 1, None),
        ],
        edges=[("s1", "s2"), ("s1", "s3"), ("s2", "s2"), ("s2", "s4"),
               ("s3", "s3"), ("s3", "s4"), ("s4", "s5"), ("s4", "s6"),
               ("s5", "s1"), ("s6", "s1")],
        kernel={"s1": {"s2": HALF, "s3": HALF}, "s2": {"s2": HALF, "s4": HALF},
                "s3": {"s3": HALF, "s4": HALF}, "s4": {"s5": HALF, "s6": HALF},
                "s5": {"s1": ONE}, "s6": {"s1": ONE}})


def fig6() -> None:
    constraints = [
        "s1 returns to itself with probability 1",
        "runs of shape (s1 s2+ s4 s6)^w have minimal priority 1 and are losing",
        "the probability of returning to s1 with minimal priority 0 (through s3) is 1/2",
        "the probability of returning to s1 with minimal priority 2 (through s2 and s5) is 1/4",
        "priorities lie in 0..4",
    ]
    doc = GameDocument(
        game=fig6_game(None),
        provenance={
            "source": "reconstruction",
            "constraints": constraints,
            "stated_values": {"all configurations": "1", "s1 certificate measure": "3/4"},
            "derived_values": {},
        })
    write("fig6.game.json", serialize_game_document(doc))
    doc = GameDocument(
        game=fig6_game(Obligation(">=", HALF)),
        provenance={
            "source": "reconstruction",
            "constraints": constraints + [
                "with the weak bound at s4, a certificate has s1 relying on s4 at priorities 0 and 2 and s4 relying on s1 at priority 3"],
            "stated_values": {},
            "derived_values": {"all configurations": "1"},
        })
    write("fig6_s4_geq.game.json", serialize_game_document(doc))
    doc = GameDocument(
        game=fig6_game(Obligation(">", HALF)),
        provenance={
            "source": "reconstruction",
            "constraints": constraints + [
                "with the strict bound at s4 no good certificate exists"],
            "stated_values": {},
            "derived_values": {"all configurations": "0"},
        })
    write("fig6_s4_gt.game.json", serialize_game_document(doc))
    dep_doc = {
        "format": "obg-v1",
        "kind": "dependency",
        "dependencies": {"s1": [["s1", 0], ["s1", 2]]},
    }
    write("fig6.dependency.json", dumps(dep_doc))


def parity_demo() -> None:
    game = make_game(
        configs=[
            ("pick", Owner.PLAYER0, 1, None),
            ("spoil", Owner.PLAYER1, 1, None),
            ("coin", Owner.PROBABILISTIC, 1, None),
            ("even", Owner.PROBABILISTIC, 0, None),
            ("odd", Owner.PROBABILISTIC, 1, None),
        ],
        edges=[("pick", "spoil"), ("pick", "coin"), ("spoil", "pick"),
               ("spoil", "odd"), ("coin", "even"), ("coin", "odd"),
               ("even", "even"), ("odd", "odd")],
        kernel={"coin": {"even": F(2, 3), "odd": F(1, 3)},
                "even": {"even": ONE}, "odd": {"odd": ONE}})
    doc = GameDocument(
        game=game,
        provenance={"source": "hand-built demonstration input for the oracle command",
                    "derived_values": {"pick": "2/3", "spoil": "0",
                                       "coin": "2/3", "even": "1", "odd": "0"}})
    write("parity_demo.game.json", serialize_game_document(doc))


def automaton() -> None:
    half_term = Term("q2", ">=", HALF)
    aut = PAutomaton(
        propositions=("a", "b"),
        states=("q1", "q2"),
        priority={"q1": 1, "q2": 0},
        cases={
            "q1": {frozenset({"a"}): Or(StateAtom("q1"), half_term),
                   frozenset({"a", "b"}): Or(StateAtom("q1"), half_term)},
            "q2": {frozenset({"b"}): half_term,
                   frozenset({"a", "b"}): half_term},
        },
        default={"q1": FF, "q2": FF},
        initial=Term("q1", ">=", HALF))
    write("until.paut.json", serialize_automaton_document(aut, provenance={
        "source": "reconstruction of a worked example",
        "constraints": [
            "q2 models: b holds now and the property holds next with probability at least 1/2",
            "q1 models: a term state is reachable along locations satisfying a",
            "the automaton is uniform",
        ],
        "derived_values": {"acceptance verdicts": "checked against an independent until-probability computation"},
    }))
    chain1 = make_chain(["sa", "sb"],
                        {"sa": {"sa": HALF, "sb": HALF}, "sb": {"sb": ONE}},
                        labels={"sa": ["a"], "sb": ["b"]}, initial="sa")
    write("two_location.chain.json", serialize_chain_document(ChainDocument(
        chain=chain1, priority=None, obligations=(None, None),
        provenance={"source": "hand-built acceptance example",
                    "derived_values": {"accepted by until.paut.json": "true"}})))
    chain2 = make_chain(["sa", "sb", "sc"],
                        {"sa": {"sb": F(1, 4), "sc": F(3, 4)},
                         "sb": {"sb": ONE}, "sc": {"sc": ONE}},
                        labels={"sa": ["a"], "sb": ["b"], "sc": []}, initial="sa")
    write("three_location.chain.json", serialize_chain_document(ChainDocument(
        chain=chain2, priority=None, obligations=(None, None, None),
        provenance={"source": "hand-built rejection example",
                    "derived_values": {"accepted by until.paut.json": "false"}})))


def main() -> None:
    OUT.mkdir(exist_ok=True)
    fig1()
    fig2()
    fig4()
    fig5()
    fig6()
    parity_demo()
    automaton()


if __name__ == "__main__":
    main()
