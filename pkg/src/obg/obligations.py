"""Solver for finite turn-based stochastic parity games with obligations.

An obligation configuration contributes value only through a
*dependency certificate*: per obligation configuration v, either
undefined (bottom) or a finite set C_v of (target obligation, minimal
priority en route) pairs.  Undefined and the empty set are distinct
states: the empty set means the obligation is met without relying on
reaching further obligations.  A game dependency is good when

1. every referenced target has a defined (possibly empty) set,
2. no cycle of the labelled reference graph has an odd minimal label,
3. for every defined v, the value of its auxiliary monitor game
   (reach a chosen pair, or stay obligation-free and win the parity
   objective) meets v's own threshold.

Values then read off a single reduced game in which met obligations are
absorbing wins, unmet ones absorbing losses, and everything else keeps
its structure.

``find_best_dependency`` realizes the nondeterministic choice of a
certificate deterministically: a greatest-fixpoint pass evicts
obligations that fail even with every reachable pair available, then
candidate met-sets are enumerated largest-first; for a fixed met-set,
feasibility is decided by enumerating the maximal odd-cycle-free
subgraphs of the reachable reference graph (every good certificate
extends to one, and monitor values are monotone in the pair sets, so
the enumeration is complete).  Candidate certificates are evaluated
independently; results are deterministic and scheduling-independent,
the reported certificate being the lexicographically first maximal one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .budgets import DEFAULT_BUDGETS, Budgets
from .chains import MonitorProduct, min_priority_monitor_product
from .errors import (BudgetExceededError, InputFormatError,
                     InternalInvariantError)
from .graphs import tarjan_scc
from .model import (ONE, ZERO, LabeledMarkovChain, Obligation,
                    ObligationGame, Owner, dual_game, embed_chain_as_game,
                    format_rational)
from .parity import ValueVector, solve_parity, solve_values

Pair = tuple[int, int]  # (target obligation configuration, priority label)


@dataclass(frozen=True)
class Dependency:
    """Per-obligation certificate: bottom or a finite set of pairs.

    ``entries`` holds one row per obligation configuration, sorted by
    configuration index; ``None`` is bottom and distinct from the empty
    tuple, which means "met without relying on further obligations".
    """

    entries: tuple[tuple[int, Optional[tuple[Pair, ...]]], ...]

    @staticmethod
    def from_mapping(game: ObligationGame,
                     mapping: Mapping[int, Optional[Iterable[Pair]]]) -> "Dependency":
        obligations = game.obligation_indices()
        unknown = set(mapping) - set(obligations)
        if unknown:
            names = ", ".join(game.names[v] for v in sorted(unknown))
            raise InputFormatError(f"dependency defined at non-obligation configurations: {names}")
        rows = []
        for v in obligations:
            row = mapping.get(v)
            rows.append((v, None if row is None else tuple(sorted(set(row)))))
        return Dependency(tuple(rows))

    def get(self, v: int) -> Optional[frozenset[Pair]]:
        for config, row in self.entries:
            if config == v:
                return None if row is None else frozenset(row)
        raise KeyError(v)

    def defined(self) -> frozenset[int]:
        return frozenset(v for v, row in self.entries if row is not None)

    def edges(self) -> list[tuple[int, int, int]]:
        """Labelled reference edges (source, target, priority)."""
        out = []
        for v, row in self.entries:
            if row:
                for u, i in row:
                    out.append((v, u, i))
        return out


@dataclass(frozen=True)
class GoodnessReport:
    """Verdict of the three goodness conditions with counterexample data.

    ``condition2``/``condition3`` are None when an earlier condition
    already failed.  ``gamma_values`` holds the exact monitor-game value
    for every defined obligation that was checked.
    """

    good: bool
    condition1: bool
    dangling: Optional[tuple[int, int]]
    condition2: Optional[bool]
    odd_cycle: Optional[tuple[tuple[int, int, int], ...]]
    condition3: Optional[bool]
    failing: Optional[tuple[int, Fraction]]
    gamma_values: tuple[tuple[int, Fraction], ...]


@dataclass(frozen=True)
class ObligationValueReport:
    """Values, pre-values and the certifying dependency of one solve.

    Obligation configurations have value 0 or 1; all other values lie
    in [0, 1] and equal their pre-value.  ``pre_values`` at obligation
    configurations is the certificate measure before the threshold is
    applied: for configurations met by the search it is the best
    monitor value over all passing maximal certificates, for unmet ones
    the best measure of reaching any met obligation or winning
    obligation-free.  Applying a configuration's own threshold to its
    pre-value always reproduces its 0/1 value; note the reported number
    can undercut the theoretical supremum over nested commitments (a
    configuration may lean on finitely many returns to itself, which a
    flat per-configuration certificate cannot express), without ever
    affecting a verdict.  ``reduced_solution`` carries the values and
    witness strategies of the reduced (win/lose-sink) game.
    """

    game: ObligationGame
    dependency: Dependency
    values: tuple[Fraction, ...]
    pre_values: tuple[Fraction, ...]
    fulfilled: frozenset[int]
    reduced_game: ObligationGame
    reduced_solution: ValueVector

    def value_of(self, name: str) -> Fraction:
        return self.values[self.game.index(name)]


# ---------------------------------------------------------------------------
# Monitor (gamma) games

_product_cache: dict[tuple[ObligationGame, int], MonitorProduct] = {}


def _monitor(game: ObligationGame, start: int) -> MonitorProduct:
    key = (game, start)
    product = _product_cache.get(key)
    if product is None:
        if len(_product_cache) > 4096:
            _product_cache.clear()
        product = min_priority_monitor_product(game, start)
        _product_cache[key] = product
    return product


def reachable_pairs(game: ObligationGame, start: int) -> frozenset[Pair]:
    """Frozen (obligation, minimal priority) pairs reachable from ``start``."""
    return frozenset((c, m) for _, c, m in _monitor(game, start).frozen)


def build_gamma_game(game: ObligationGame, start: int,
                     pairs: Iterable[Pair]) -> tuple[ObligationGame, int]:
    """The obligation-free monitor game checking ``start`` against ``pairs``.

    Reaching an obligation u with frozen minimum m moves to an absorbing
    win sink (priority 0) iff (u, m) is among the pairs, else to an
    absorbing lose sink (priority 1); plays that stay obligation-free
    keep their original priorities.  Size is at most |V|*(k+1) + 2.
    """
    chosen = frozenset(pairs)
    product = _monitor(game, start)
    base = product.product
    n = len(base)
    win, lose = n, n + 1
    redirect: dict[int, int] = {}
    for node, config, m in product.frozen:
        redirect[node] = win if (config, m) in chosen else lose
    names = list(base.names) + ["WIN", "LOSE"]
    owners = list(base.owners) + [Owner.PROBABILISTIC, Owner.PROBABILISTIC]
    priority = list(base.priority) + [0, 1]
    succ: list[tuple[int, ...]] = []
    kernel: list[Optional[tuple[tuple[int, Fraction], ...]]] = []
    for v in range(n):
        if v in redirect:
            sink = redirect[v]
            succ.append((sink,))
            kernel.append(((sink, ONE),))
            continue
        row = tuple(sorted({redirect.get(t, t) for t in base.succ[v]}))
        succ.append(row)
        if base.owners[v] is Owner.PROBABILISTIC:
            merged: dict[int, Fraction] = {}
            for t, p in base.kernel_row(v):
                t = redirect.get(t, t)
                merged[t] = merged.get(t, ZERO) + p
            kernel.append(tuple(sorted(merged.items())))
        else:
            kernel.append(None)
    succ.extend([(win,), (lose,)])
    kernel.extend([((win, ONE),), ((lose, ONE),)])
    gamma = ObligationGame(
        names=tuple(names), owners=tuple(owners), succ=tuple(succ),
        kernel=tuple(kernel), priority=tuple(priority),
        obligation=tuple(None for _ in names))
    return gamma, product.start


_gamma_cache: dict[tuple[ObligationGame, int, frozenset[Pair]], Fraction] = {}


def gamma_value(game: ObligationGame, start: int, pairs: Iterable[Pair]) -> Fraction:
    """Exact value of the monitor game at its start configuration."""
    key = (game, start, frozenset(pairs))
    cached = _gamma_cache.get(key)
    if cached is None:
        if len(_gamma_cache) > 65536:
            _gamma_cache.clear()
        gamma, root = build_gamma_game(game, start, key[2])
        cached = solve_values(gamma)[root]
        _gamma_cache[key] = cached
    return cached


# ---------------------------------------------------------------------------
# Goodness conditions


def _well_typed(game: ObligationGame, dep: Dependency) -> None:
    obligations = set(game.obligation_indices())
    if {v for v, _ in dep.entries} != obligations:
        raise InputFormatError("dependency must have one entry per obligation configuration")
    k = game.max_priority()
    for v, row in dep.entries:
        for u, i in row or ():
            if u not in obligations:
                raise InputFormatError(
                    f"dependency of {game.names[v]} targets non-obligation "
                    f"configuration {game.names[u]}")
            if not (0 <= i <= k):
                raise InputFormatError(
                    f"dependency of {game.names[v]} uses priority {i} outside 0..{k}")


def check_condition1(game: ObligationGame, dep: Dependency) -> tuple[bool, Optional[tuple[int, int]]]:
    """Every referenced target has a defined (possibly empty) set."""
    _well_typed(game, dep)
    defined = dep.defined()
    for v, row in dep.entries:
        for u, _ in row or ():
            if u not in defined:
                return False, (v, u)
    return True, None


def find_odd_cycle(edges: Sequence[tuple[int, int, int]]) -> Optional[tuple[tuple[int, int, int], ...]]:
    """A cycle whose minimal label is odd, or None.

    For each odd label i, restrict to edges labelled >= i and look for
    an i-labelled edge inside a strongly connected component; such an
    edge closes a cycle with minimum exactly i.
    """
    labels = sorted({i for _, _, i in edges if i % 2 == 1})
    nodes = sorted({v for v, _, _ in edges} | {u for _, u, _ in edges})
    pos = {v: i for i, v in enumerate(nodes)}
    for i in labels:
        sub = [e for e in edges if e[2] >= i]
        adj: dict[int, list[tuple[int, int, int]]] = {v: [] for v in nodes}
        for e in sub:
            adj[e[0]].append(e)
        comps = tarjan_scc(len(nodes), lambda x: (pos[e[1]] for e in adj[nodes[x]]))
        comp_of = {}
        for ci, comp in enumerate(comps):
            for x in comp:
                comp_of[nodes[x]] = ci
        for e in sorted(sub):
            v, u, lab = e
            if lab == i and comp_of[v] == comp_of[u]:
                if u == v:
                    return (e,)
                # close the cycle with a path u -> v inside the component
                parent: dict[int, tuple[int, int, int]] = {}
                frontier = [u]
                seen = {u}
                while frontier:
                    x = frontier.pop(0)
                    if x == v:
                        break
                    for e2 in adj[x]:
                        y = e2[1]
                        if comp_of.get(y) == comp_of[v] and y not in seen:
                            seen.add(y)
                            parent[y] = e2
                            frontier.append(y)
                path = []
                x = v
                while x != u:
                    e2 = parent[x]
                    path.append(e2)
                    x = e2[0]
                path.reverse()
                return (e, *path)
    return None


def check_condition2(game: ObligationGame, dep: Dependency
                     ) -> tuple[bool, Optional[tuple[tuple[int, int, int], ...]]]:
    """No cycle of the labelled reference graph has an odd minimal label."""
    cycle = find_odd_cycle(dep.edges())
    return (cycle is None), cycle


def check_condition3(game: ObligationGame, dep: Dependency
                     ) -> tuple[bool, Optional[tuple[int, Fraction]], tuple[tuple[int, Fraction], ...]]:
    """Every defined obligation meets its own threshold in its monitor game."""
    gammas = []
    failing = None
    for v, row in dep.entries:
        if row is None:
            continue
        value = gamma_value(game, v, row)
        gammas.append((v, value))
        ob = game.obligation[v]
        assert ob is not None
        if failing is None and not ob.holds(value):
            failing = (v, value)
    return failing is None, failing, tuple(gammas)


def verify_dependency(game: ObligationGame, dep: Dependency) -> GoodnessReport:
    """Check the certificate; polynomial apart from the parity solves."""
    ok1, dangling = check_condition1(game, dep)
    if not ok1:
        return GoodnessReport(False, False, dangling, None, None, None, None, ())
    ok2, cycle = check_condition2(game, dep)
    if not ok2:
        return GoodnessReport(False, True, None, False, cycle, None, None, ())
    ok3, failing, gammas = check_condition3(game, dep)
    return GoodnessReport(ok3, True, None, True, None, ok3, failing, gammas)


# ---------------------------------------------------------------------------
# Values from a certificate


def _reduced_game(game: ObligationGame, fulfilled: frozenset[int]) -> ObligationGame:
    """Met obligations become absorbing wins, unmet ones absorbing losses."""
    names = game.names
    owners = list(game.owners)
    succ = list(game.succ)
    kernel = list(game.kernel)
    priority = list(game.priority)
    for v in game.obligation_indices():
        owners[v] = Owner.PROBABILISTIC
        succ[v] = (v,)
        kernel[v] = ((v, ONE),)
        priority[v] = 0 if v in fulfilled else 1
    return ObligationGame(names=names, owners=tuple(owners), succ=tuple(succ),
                          kernel=tuple(kernel), priority=tuple(priority),
                          obligation=tuple(None for _ in names))


def values_given_dependency(game: ObligationGame, dep: Dependency, *,
                            witnesses: bool = True,
                            _pre_values: Optional[Mapping[int, Fraction]] = None
                            ) -> ObligationValueReport:
    """Exact values of the game under a good dependency certificate.

    Pre-values at obligation configurations default to the certificate's
    own monitor values (met) or the best measure of reaching any met
    obligation (unmet); ``find_best_dependency`` overrides the met ones
    with the maximum over all passing maximal certificates.
    """
    report = verify_dependency(game, dep)
    if not report.good:
        raise InputFormatError("dependency is not good; verify it for a counterexample")
    fulfilled = dep.defined()
    reduced = _reduced_game(game, fulfilled)
    solution = solve_parity(reduced, witnesses=witnesses)
    gammas = dict(report.gamma_values)
    values = list(solution.values)
    pre = list(solution.values)
    for v in game.obligation_indices():
        values[v] = ONE if v in fulfilled else ZERO
        if _pre_values is not None and v in _pre_values:
            pre[v] = _pre_values[v]
        elif v in fulfilled:
            pre[v] = gammas[v]
        else:
            pre[v] = gamma_value(game, v, _pair_universe(game, v, fulfilled))
    return ObligationValueReport(
        game=game, dependency=dep, values=tuple(values), pre_values=tuple(pre),
        fulfilled=fulfilled, reduced_game=reduced, reduced_solution=solution)


def _pair_universe(game: ObligationGame, v: int, met: frozenset[int]) -> frozenset[Pair]:
    """Reachable pairs of v that target met obligations, minus odd self-loops."""
    return frozenset((u, m) for (u, m) in reachable_pairs(game, v)
                     if u in met and not (u == v and m % 2 == 1))


# ---------------------------------------------------------------------------
# Searching for the best dependency


def _rows_of(met: Iterable[int], edge_set: frozenset[tuple[int, int, int]]
             ) -> dict[int, frozenset[Pair]]:
    rows: dict[int, frozenset[Pair]] = {v: frozenset() for v in met}
    grouped: dict[int, set[Pair]] = {v: set() for v in met}
    for v, u, i in edge_set:
        grouped[v].add((u, i))
    for v in grouped:
        rows[v] = frozenset(grouped[v])
    return rows


def _feasible_assignment(game: ObligationGame, met: frozenset[int],
                         budget: Budgets
                         ) -> Optional[tuple[dict[int, frozenset[Pair]], dict[int, Fraction]]]:
    """Lexicographically first passing maximal certificate for a met-set.

    Branch-and-bound over odd-cycle-free subsets of the reachable
    reference graph: branching on the edges of some odd-minimal cycle
    covers every odd-cycle-free subset, and since monitor values are
    monotone in the edge set, a branch whose current rows already miss
    some threshold cannot contain a passing certificate and is pruned.
    Returns (rows, best monitor value per met configuration over all
    passing maximal certificates), or None when the met-set admits no
    good certificate.
    """
    universe = tuple(sorted(
        (v, u, i)
        for v in met
        for (u, i) in _pair_universe(game, v, met)))
    order = sorted(met)
    terminals: list[frozenset] = []
    explored = 0

    def bounds_pass(edge_set: frozenset) -> bool:
        rows = _rows_of(met, edge_set)
        for v in order:
            ob = game.obligation[v]
            assert ob is not None
            if not ob.holds(gamma_value(game, v, rows[v])):
                return False
        return True

    def explore(current: frozenset, kept: frozenset) -> None:
        # Enumerates the odd-cycle-free subsets of `current` containing
        # `kept`: branch i of a cycle removes its i-th removable edge and
        # pins the earlier ones, so the subtrees partition the space.
        nonlocal explored
        explored += 1
        if explored > budget.max_dependency_nodes:
            raise BudgetExceededError(
                f"dependency search explored more than "
                f"{budget.max_dependency_nodes} edge sets")
        if not bounds_pass(current):
            return
        cycle = find_odd_cycle(sorted(current))
        if cycle is None:
            terminals.append(current)
            return
        removable = [e for e in cycle if e not in kept]
        pinned = set(kept)
        for e in removable:
            explore(current - {e}, frozenset(pinned))
            pinned.add(e)

    explore(frozenset(universe), frozenset())
    if not terminals:
        return None
    maximal = [t for t in terminals if not any(t < other for other in terminals)]
    best: dict[int, Fraction] = {}
    for edge_set in maximal:
        rows = _rows_of(met, edge_set)
        for v in met:
            value = gamma_value(game, v, rows[v])
            if v not in best or value > best[v]:
                best[v] = value
    chosen = min(maximal, key=lambda t: tuple(sorted(t)))
    return _rows_of(met, chosen), best


def find_best_dependency(game: ObligationGame, *,
                         budgets: Budgets = DEFAULT_BUDGETS,
                         witnesses: bool = True
                         ) -> tuple[Dependency, ObligationValueReport]:
    """Deterministic search for a good dependency with a maximal met-set.

    The met-sets of good certificates are closed under union, so the
    inclusion-maximal one is unique and dominates every other
    certificate's values pointwise; per-configuration values under it
    are therefore the per-configuration maxima over all good
    certificates.
    """
    obligations = game.obligation_indices()
    if len(obligations) > budgets.max_obligations:
        raise BudgetExceededError(
            f"{len(obligations)} obligation configurations exceed the budget "
            f"of {budgets.max_obligations}")
    if game.max_priority() > budgets.max_priority:
        raise BudgetExceededError(
            f"maximal priority {game.max_priority()} exceeds the budget "
            f"of {budgets.max_priority}")
    if not obligations:
        dep = Dependency(())
        return dep, values_given_dependency(game, dep, witnesses=witnesses)

    # Greatest-fixpoint pass: evict every obligation that fails even with
    # all reachable pairs into the current candidate set available.  Good
    # certificates only shrink monitor values relative to that bound, so
    # no member of a good met-set is ever evicted.
    candidates = set(obligations)
    changed = True
    while changed:
        changed = False
        for v in sorted(candidates):
            ob = game.obligation[v]
            assert ob is not None
            bound = gamma_value(game, v, _pair_universe(game, v, frozenset(candidates)))
            if not ob.holds(bound):
                candidates.discard(v)
                changed = True

    chosen_rows: dict[int, frozenset[Pair]] = {}
    best_gammas: dict[int, Fraction] = {}
    met: frozenset[int] = frozenset()
    found = False
    order = sorted(candidates)
    for size in range(len(order), -1, -1):
        for combo in itertools.combinations(order, size):
            attempt = _feasible_assignment(game, frozenset(combo), budgets)
            if attempt is not None:
                chosen_rows, best_gammas = attempt
                met = frozenset(combo)
                found = True
                break
        if found:
            break
    dep = Dependency.from_mapping(game, {
        v: (sorted(chosen_rows[v]) if v in met else None) for v in obligations})
    report = values_given_dependency(game, dep, witnesses=witnesses,
                                     _pre_values=best_gammas)
    return dep, report


# ---------------------------------------------------------------------------
# Decision procedure and the Markov chain special case


@dataclass(frozen=True)
class ValueDecision:
    verdict: bool
    value: Fraction
    primal: tuple[Dependency, ObligationValueReport]
    dual: tuple[Dependency, ObligationValueReport]


def decide_value(game: ObligationGame, config: int, cmp: str, threshold: Fraction,
                 *, budgets: Budgets = DEFAULT_BUDGETS) -> ValueDecision:
    """Decide value(config) cmp threshold with a two-sided certificate.

    The dual game is solved as the co-certificate and the answer is
    refused (InternalInvariantError) unless the two value vectors sum to
    one at every configuration.
    """
    if not (ZERO <= threshold <= ONE):
        raise InputFormatError("threshold must lie in [0,1]")
    ob = Obligation(cmp, threshold)  # reuse comparator validation
    dep0, rep0 = find_best_dependency(game, budgets=budgets, witnesses=False)
    dual = dual_game(game)
    # the dual's priority shift is our construction, not the user's input
    dual_budgets = budgets.override(max_priority=budgets.max_priority + 1)
    dep1, rep1 = find_best_dependency(dual, budgets=dual_budgets, witnesses=False)
    for v in range(len(game)):
        if rep0.values[v] + rep1.values[v] != ONE:
            raise InternalInvariantError(
                f"determinacy identity failed at {game.names[v]}: "
                f"{format_rational(rep0.values[v])} + "
                f"{format_rational(rep1.values[v])} != 1")
    value = rep0.values[config]
    return ValueDecision(verdict=ob.holds(value), value=value,
                         primal=(dep0, rep0), dual=(dep1, rep1))


def solve_chain_obligations(mc: LabeledMarkovChain,
                            priority: Mapping[str, int] | Sequence[int],
                            obligations: Mapping[str, Obligation] | None = None,
                            *, budgets: Budgets = DEFAULT_BUDGETS,
                            witnesses: bool = True
                            ) -> tuple[Dependency, ObligationValueReport]:
    """Solve a Markov chain with obligations by embedding it as a game."""
    game = embed_chain_as_game(mc, priority, obligations)
    return find_best_dependency(game, budgets=budgets, witnesses=witnesses)


def value_of_prefix(report: ObligationValueReport, prefix: Sequence[str]) -> Fraction:
    """Value of a finite prefix: the value at its last configuration.

    Monitor and reduced objectives are positional, so a prefix's value
    depends only on where it ends; the prefix is still validated to be a
    path of the game.
    """
    if not prefix:
        raise InputFormatError("prefix must be non-empty")
    game = report.game
    indices = [game.index(name) for name in prefix]
    for a, b in zip(indices, indices[1:]):
        if b not in game.succ[a]:
            raise InputFormatError(
                f"prefix step {game.names[a]} -> {game.names[b]} is not an edge")
    return report.values[indices[-1]]
