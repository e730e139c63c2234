"""p-automata: positive Boolean transitions over states and
probability-bounded terms, read against finite Markov chains.

Acceptance is decided through a product obligation game: disjunctions
become Player-0 configurations, conjunctions Player-1 configurations,
state and term configurations are probabilistic and move with the
chain's kernel; a term configuration carries the term's bound as its
obligation.  The chain is accepted iff the product value at the pair
(initial condition, initial location) is one.

``tt``/``ff`` in transitions become absorbing configurations of even /
odd priority; all configurations that are not state or term pairs take
the automaton's maximal priority, which never matters because formula
decomposition is acyclic.

Besides the general solve, ``accepts_layered`` solves the product one
strongly connected class of the automaton graph at a time (bottom-up,
exits replaced by exactly-weighted win/lose lotteries); it must agree
with the general solver and serves as a cross-check for uniform
automata.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

from .budgets import DEFAULT_BUDGETS, Budgets
from .errors import InputFormatError
from .graphs import condensation_topo_order
from .model import (ONE, ZERO, LabeledMarkovChain, Obligation,
                    ObligationGame, Owner, format_rational, is_probability)
from .obligations import ObligationValueReport, find_best_dependency

# --------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class Tt:
    pass


@dataclass(frozen=True)
class Ff:
    pass


@dataclass(frozen=True)
class StateAtom:
    state: str


@dataclass(frozen=True)
class Term:
    """A probability-bounded term: the state's path set has measure cmp bound."""
    state: str
    cmp: str
    bound: Fraction

    def obligation(self) -> Obligation:
        return Obligation(self.cmp, self.bound)


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


Formula = Union[Tt, Ff, StateAtom, Term, And, Or]

TT = Tt()
FF = Ff()


def format_formula(f: Formula) -> str:
    if isinstance(f, Tt):
        return "tt"
    if isinstance(f, Ff):
        return "ff"
    if isinstance(f, StateAtom):
        return f.state
    if isinstance(f, Term):
        symbol = "≥" if f.cmp == ">=" else ">"
        return f"[{f.state}{symbol}{format_rational(f.bound)}]"
    op = "&" if isinstance(f, And) else "|"
    return f"({format_formula(f.left)}{op}{format_formula(f.right)})"


def closure(formula: Formula) -> frozenset[Formula]:
    """All subformulas of a formula, including itself; idempotent."""
    out: set[Formula] = set()
    stack = [formula]
    while stack:
        f = stack.pop()
        if f in out:
            continue
        out.add(f)
        if isinstance(f, (And, Or)):
            stack.append(f.left)
            stack.append(f.right)
    return frozenset(out)


def closure_of_set(formulas: Iterable[Formula]) -> frozenset[Formula]:
    out: frozenset[Formula] = frozenset()
    for f in formulas:
        out |= closure(f)
    return out


# --------------------------------------------------------------------------
# Automata


@dataclass
class PAutomaton:
    """Alphabet = subsets of ``propositions``; ``cases`` holds the sparse
    transition table and ``default`` the per-state fallback (ff unless
    declared otherwise in the input file).  Treated as immutable.
    """

    propositions: tuple[str, ...]
    states: tuple[str, ...]
    priority: Mapping[str, int]
    cases: Mapping[str, Mapping[frozenset[str], Formula]]
    default: Mapping[str, Formula]
    initial: Formula

    def transition(self, state: str, letter: frozenset[str]) -> Formula:
        return self.cases.get(state, {}).get(letter, self.default[state])

    def letters(self) -> list[frozenset[str]]:
        props = self.propositions
        out = []
        for mask in range(1 << len(props)):
            out.append(frozenset(p for i, p in enumerate(props) if mask >> i & 1))
        return out

    def max_priority(self) -> int:
        return max(self.priority.values())


def validate_automaton(aut: PAutomaton) -> list[str]:
    problems = []
    if not aut.states:
        problems.append("automaton needs at least one state")
    if len(aut.propositions) > 12:
        problems.append("more than 12 atomic propositions; the alphabet would be huge")
    known = set(aut.states)
    for q in aut.states:
        if q not in aut.priority:
            problems.append(f"state {q} has no priority")
        if q not in aut.default:
            problems.append(f"state {q} has no default transition")
    for q, table in aut.cases.items():
        if q not in known:
            problems.append(f"transition table mentions unknown state {q}")
        for letter, formula in table.items():
            if not letter <= set(aut.propositions):
                problems.append(f"transition of {q} keyed by unknown propositions {sorted(letter)}")
            problems.extend(_check_formula(formula, known))
    problems.extend(_check_formula(aut.initial, known))
    for f in closure(aut.initial):
        if isinstance(f, StateAtom):
            problems.append("initial condition must not contain bare state atoms")
            break
    return problems


def _check_formula(formula: Formula, states: set[str]) -> list[str]:
    problems = []
    for f in closure(formula):
        if isinstance(f, (StateAtom, Term)) and f.state not in states:
            problems.append(f"formula mentions unknown state {f.state}")
        if isinstance(f, Term) and not is_probability(f.bound):
            problems.append(f"term bound {format_rational(f.bound)} outside [0,1]")
    return problems


# --------------------------------------------------------------------------
# The automaton graph and uniformity


@dataclass(frozen=True)
class AutomatonGraph:
    """Directed graph on states and transition subformulas.

    ``simple`` edges are formula decompositions to non-state children
    plus the transition edges; ``bounded`` edges go from a term to its
    state, ``unbounded`` from a conjunction/disjunction directly to a
    state child.  The three sets are pairwise disjoint.
    """

    nodes: tuple[Formula, ...]
    simple: frozenset[tuple[Formula, Formula]]
    bounded: frozenset[tuple[Formula, Formula]]
    unbounded: frozenset[tuple[Formula, Formula]]

    def all_edges(self) -> frozenset[tuple[Formula, Formula]]:
        return self.simple | self.bounded | self.unbounded


def build_automaton_graph(aut: PAutomaton) -> AutomatonGraph:
    letters = aut.letters()
    transition_targets = [aut.transition(q, letter) for q in aut.states for letter in letters]
    nodes: set[Formula] = {StateAtom(q) for q in aut.states}
    nodes |= closure_of_set(transition_targets)
    simple: set[tuple[Formula, Formula]] = set()
    bounded: set[tuple[Formula, Formula]] = set()
    unbounded: set[tuple[Formula, Formula]] = set()
    for q in aut.states:
        for letter in letters:
            simple.add((StateAtom(q), aut.transition(q, letter)))
    for f in nodes:
        if isinstance(f, (And, Or)):
            for child in (f.left, f.right):
                if isinstance(child, StateAtom):
                    unbounded.add((f, child))
                else:
                    simple.add((f, child))
        elif isinstance(f, Term):
            bounded.add((f, StateAtom(f.state)))
    ordered = tuple(sorted(nodes, key=format_formula))
    return AutomatonGraph(nodes=ordered, simple=frozenset(simple),
                          bounded=frozenset(bounded), unbounded=frozenset(unbounded))


def is_uniform(aut: PAutomaton) -> tuple[bool, Optional[tuple[Formula, ...]]]:
    """Every cycle uses only bounded or only unbounded non-simple edges.

    Equivalently no strongly connected component of the automaton graph
    contains both kinds; the witness on failure is such a component.
    """
    graph = build_automaton_graph(aut)
    index = {f: i for i, f in enumerate(graph.nodes)}
    adj: list[list[int]] = [[] for _ in graph.nodes]
    for a, b in graph.all_edges():
        adj[index[a]].append(index[b])
    comps, comp_of = condensation_topo_order(len(graph.nodes), lambda v: adj[v])
    bounded_in = set()
    unbounded_in = set()
    for a, b in graph.bounded:
        if comp_of[index[a]] == comp_of[index[b]]:
            bounded_in.add(comp_of[index[a]])
    for a, b in graph.unbounded:
        if comp_of[index[a]] == comp_of[index[b]]:
            unbounded_in.add(comp_of[index[a]])
    mixed = sorted(bounded_in & unbounded_in)
    if not mixed:
        return True, None
    witness = tuple(graph.nodes[v] for v in sorted(comps[mixed[0]]))
    return False, witness


# --------------------------------------------------------------------------
# Product game and acceptance


def build_product_game(aut: PAutomaton, mc: LabeledMarkovChain
                       ) -> tuple[ObligationGame, int]:
    """The obligation game deciding acceptance of ``mc`` by ``aut``.

    Configurations are (location, formula) pairs reachable from the
    initial pair.  Returns the game and the index of the initial pair.
    """
    game, root, _ = _build_product(aut, mc)
    return game, root


def _build_product(aut: PAutomaton, mc: LabeledMarkovChain
                   ) -> tuple[ObligationGame, int, list[tuple[int, Formula]]]:
    problems = validate_automaton(aut)
    if problems:
        raise InputFormatError("; ".join(problems))
    ap = frozenset(aut.propositions)
    filler = aut.max_priority()

    names: list[str] = []
    owners: list[Owner] = []
    succ: list[tuple[int, ...]] = []
    kernel: list[Optional[tuple[tuple[int, Fraction], ...]]] = []
    priority: list[int] = []
    obligation: list[Optional[Obligation]] = []
    node_of: dict[tuple[int, Formula], int] = {}
    pending: list[tuple[int, Formula]] = []
    assignment: list[tuple[int, Formula]] = []

    def add(loc: int, formula: Formula) -> int:
        key = (loc, formula)
        if key in node_of:
            return node_of[key]
        node = len(names)
        node_of[key] = node
        assignment.append(key)
        names.append(f"{mc.names[loc]}|{format_formula(formula)}")
        if isinstance(formula, Or):
            owners.append(Owner.PLAYER0)
            priority.append(filler)
            obligation.append(None)
        elif isinstance(formula, And):
            owners.append(Owner.PLAYER1)
            priority.append(filler)
            obligation.append(None)
        elif isinstance(formula, StateAtom):
            owners.append(Owner.PROBABILISTIC)
            priority.append(aut.priority[formula.state])
            obligation.append(None)
        elif isinstance(formula, Term):
            owners.append(Owner.PROBABILISTIC)
            priority.append(aut.priority[formula.state])
            obligation.append(formula.obligation())
        elif isinstance(formula, Tt):
            owners.append(Owner.PROBABILISTIC)
            priority.append(0)
            obligation.append(None)
        else:  # Ff
            owners.append(Owner.PROBABILISTIC)
            priority.append(1)
            obligation.append(None)
        succ.append(())
        kernel.append(None)
        pending.append(key)
        return node

    root = add(mc.initial, aut.initial)
    while pending:
        loc, formula = key = pending.pop()
        node = node_of[key]
        if isinstance(formula, (Tt, Ff)):
            succ[node] = (node,)
            kernel[node] = ((node, ONE),)
        elif isinstance(formula, (And, Or)):
            targets = sorted({add(loc, formula.left), add(loc, formula.right)})
            succ[node] = tuple(targets)
        else:  # StateAtom or Term: move with the chain
            state = formula.state
            next_formula = aut.transition(state, mc.labels[loc] & ap)
            row: dict[int, Fraction] = {}
            for t, p in mc.succ[loc]:
                tn = add(t, next_formula)
                row[tn] = row.get(tn, ZERO) + p
            succ[node] = tuple(sorted(row))
            kernel[node] = tuple(sorted(row.items()))
    game = ObligationGame(
        names=tuple(names), owners=tuple(owners), succ=tuple(succ),
        kernel=tuple(kernel), priority=tuple(priority),
        obligation=tuple(obligation))
    return game, root, assignment


@dataclass(frozen=True)
class AcceptanceResult:
    accepted: bool
    root: int
    product: ObligationGame
    report: ObligationValueReport


def accepts(aut: PAutomaton, mc: LabeledMarkovChain, *,
            budgets: Budgets = DEFAULT_BUDGETS,
            witnesses: bool = False) -> AcceptanceResult:
    """Acceptance via the product obligation game (general algorithm)."""
    product, root = build_product_game(aut, mc)
    _, report = find_best_dependency(product, budgets=budgets, witnesses=witnesses)
    return AcceptanceResult(accepted=report.values[root] == ONE, root=root,
                            product=product, report=report)


# --------------------------------------------------------------------------
# Layered solve over the automaton-graph condensation


def accepts_layered(aut: PAutomaton, mc: LabeledMarkovChain, *,
                    budgets: Budgets = DEFAULT_BUDGETS
                    ) -> tuple[bool, dict[int, Fraction]]:
    """Solve the product one automaton class at a time, bottom-up.

    Exits into already-solved classes are replaced by win/lose lotteries
    weighted with the solved value, which is exact because a play
    descending into a lower class never returns and its continuation
    value is precisely the reduced-game value there.  Returns the
    verdict and the per-product-configuration values for cross-checks.
    """
    product, root, assignment = _build_product(aut, mc)

    # Classes of the automaton graph, extended with the initial condition's
    # decomposition (which can sit outside the transition closure).
    graph = build_automaton_graph(aut)
    nodes = set(graph.nodes) | closure(aut.initial)
    edges: set[tuple[Formula, Formula]] = set(graph.all_edges())
    for f in closure(aut.initial):
        if isinstance(f, (And, Or)):
            for child in (f.left, f.right):
                edges.add((f, child))
        elif isinstance(f, Term):
            edges.add((f, StateAtom(f.state)))
    ordered = sorted(nodes, key=format_formula)
    index = {f: i for i, f in enumerate(ordered)}
    adj: list[list[int]] = [[] for _ in ordered]
    for a, b in edges:
        adj[index[a]].append(index[b])
    comps, comp_of = condensation_topo_order(len(ordered), lambda v: adj[v])

    class_of_config = {node: comp_of[index[formula]]
                       for node, (_, formula) in enumerate(assignment)}
    values: dict[int, Fraction] = {}
    for ci in range(len(comps) - 1, -1, -1):
        members = sorted(v for v, c in class_of_config.items() if c == ci)
        if not members:
            continue
        values.update(_solve_class(product, members, values, budgets))
    return values[root] == ONE, values


def _solve_class(product: ObligationGame, members: list[int],
                 solved: Mapping[int, Fraction], budgets: Budgets
                 ) -> dict[int, Fraction]:
    """Solve the subgame induced by one class with weighted exit sinks."""
    inside = {v: i for i, v in enumerate(members)}
    names = [product.names[v] for v in members]
    owners = [product.owners[v] for v in members]
    priority = [product.priority[v] for v in members]
    obligation = [product.obligation[v] for v in members]
    succ: list[tuple[int, ...]] = []
    kernel: list[Optional[tuple[tuple[int, Fraction], ...]]] = []
    win = len(members)
    lose = len(members) + 1
    extra_named: dict[Fraction, int] = {}
    extra_rows: list[tuple[str, tuple[tuple[int, Fraction], ...]]] = []

    def lottery(value: Fraction) -> int:
        # An owned exit to a solved configuration becomes a lottery node.
        if value == ONE:
            return win
        if value == ZERO:
            return lose
        if value in extra_named:
            return extra_named[value]
        node = len(members) + 2 + len(extra_rows)
        extra_named[value] = node
        extra_rows.append((f"exit~{format_rational(value)}",
                           ((win, value), (lose, ONE - value))))
        return node

    for v in members:
        if product.owners[v] is Owner.PROBABILISTIC:
            row: dict[int, Fraction] = {}
            for t, p in product.kernel_row(v):
                if t in inside:
                    row[inside[t]] = row.get(inside[t], ZERO) + p
                else:
                    value = solved[t]
                    row[win] = row.get(win, ZERO) + p * value
                    if value != ONE:
                        row[lose] = row.get(lose, ZERO) + p * (ONE - value)
            row = {t: p for t, p in row.items() if p > ZERO}
            succ.append(tuple(sorted(row)))
            kernel.append(tuple(sorted(row.items())))
        else:
            targets = set()
            for t in product.succ[v]:
                if t in inside:
                    targets.add(inside[t])
                else:
                    targets.add(lottery(solved[t]))
            succ.append(tuple(sorted(targets)))
            kernel.append(None)
    names += ["WIN", "LOSE"] + [name for name, _ in extra_rows]
    owners += [Owner.PROBABILISTIC] * (2 + len(extra_rows))
    priority += [0, 1] + [1] * len(extra_rows)
    obligation += [None] * (2 + len(extra_rows))
    succ.append((win,))
    kernel.append(((win, ONE),))
    succ.append((lose,))
    kernel.append(((lose, ONE),))
    for _, row in extra_rows:
        succ.append(tuple(sorted(t for t, _ in row)))
        kernel.append(row)
    sub = ObligationGame(names=tuple(names), owners=tuple(owners),
                         succ=tuple(succ), kernel=tuple(kernel),
                         priority=tuple(priority), obligation=tuple(obligation))
    _, report = find_best_dependency(sub, budgets=budgets, witnesses=False)
    return {v: report.values[inside[v]] for v in members}
