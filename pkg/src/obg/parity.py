"""Exact values and optimal pure memoryless strategies for finite
turn-based stochastic parity games (no obligations).

Two solvers share one contract and must agree bit-for-bit wherever both
run:

* ``solve_parity_oracle`` is the normative semantics: enumerate every
  pure memoryless strategy pair, reduce each pair to a Markov chain,
  take the exact parity measure, and fold max over Player 0 / min over
  Player 1.  Sound by positional determinacy; feasible only at desk
  scale, guarded by a strategy-pair budget.

* ``solve_parity`` rests on an exact single-player (MDP) parity solver:
  the maximal probability of a parity objective in an MDP equals the
  maximal probability of reaching the union of end components whose
  minimal priority is even (end components found by the standard
  maximal-end-component refinement, reachability by policy iteration
  with exact rational policy evaluation after graph-based zero-set
  elimination).  The best response to a fixed positional strategy is
  such an MDP solve, so every candidate Player-0 strategy yields a
  certified lower bound on the value vector, and symmetrically on the
  dual game (players swapped, priorities shifted by one) for Player 1.
  A strategy-improvement climb is run on both sides; if the two bounds
  sum to one at every configuration, they provably *are* the values.
  Any remaining gap is closed by enumerating the positional strategies
  of whichever player has fewer (exact by positional determinacy),
  within a budget.

Reported witness strategies are canonical so both solvers return the
same object: the lexicographically first optimal strategy (by
configuration index, then successor index), obtained by fixing one
choice at a time and re-solving, keeping a choice iff the value vector
is unchanged.  Enumeration in the oracle may be parallelized over
Player-0 strategies as long as this deterministic reduction is kept.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Optional

from .budgets import DEFAULT_BUDGETS, Budgets
from .chains import parity_measure, reach_probability
from .errors import (BudgetExceededError, InputFormatError,
                     InternalInvariantError, OracleInfeasibleError)
from .graphs import tarjan_scc
from .model import (GE, GT, ONE, ZERO, LabeledMarkovChain, ObligationGame,
                    Owner, PureMemorylessStrategy, chain_view, dual_game,
                    restrict_choice)

Values = tuple[Fraction, ...]


@dataclass(frozen=True)
class ValueVector:
    """Per-configuration values with optional optimal witness strategies.

    Values lie in [0, 1].  When present, ``sigma`` guarantees Player 0
    at least the values against every opponent strategy and ``pi``
    bounds Player 0 from above symmetrically; both are checkable with
    induce_chain + parity_measure.
    """

    values: Values
    sigma: Optional[PureMemorylessStrategy]
    pi: Optional[PureMemorylessStrategy]


def induce_chain(game: ObligationGame,
                 sigma: PureMemorylessStrategy,
                 pi: PureMemorylessStrategy,
                 initial: int = 0) -> LabeledMarkovChain:
    """The Markov chain obtained by fixing both players' strategies."""
    smap, pmap = sigma.as_dict(), pi.as_dict()
    v0 = {i for i, o in enumerate(game.owners) if o is Owner.PLAYER0}
    v1 = {i for i, o in enumerate(game.owners) if o is Owner.PLAYER1}
    if set(smap) != v0 or set(pmap) != v1:
        raise InputFormatError("strategy domain does not match the owned configurations")
    rows = []
    for i, owner in enumerate(game.owners):
        if owner is Owner.PROBABILISTIC:
            rows.append(game.kernel_row(i))
        else:
            choice = smap[i] if owner is Owner.PLAYER0 else pmap[i]
            if choice not in game.succ[i]:
                raise InputFormatError(
                    f"strategy chooses a non-edge at {game.names[i]}")
            rows.append(((choice, ONE),))
    return LabeledMarkovChain(names=game.names, succ=tuple(rows),
                              labels=tuple(frozenset() for _ in game.names),
                              initial=initial)


def _require_parity_game(game: ObligationGame) -> None:
    if any(o is not None for o in game.obligation):
        raise InputFormatError("the parity solver requires an obligation-free game")


# ---------------------------------------------------------------------------
# Qualitative analysis: positive attractors, sure safety, almost-sure region.
#
# All fixpoints are computed inside a sub-arena `sub`; edges leaving `sub`
# are ignored.  The recursion only ever descends into sub-arenas arising as
# complements of positive attractors, which are closed for the probabilistic
# configurations, so kernel rows stay meaningful.


def _pos_attr(game: ObligationGame, player: int, targets: Iterable[int],
              sub: frozenset[int]) -> frozenset[int]:
    """States where `player` forces reaching `targets` with positive probability."""
    mine = Owner.PLAYER0 if player == 0 else Owner.PLAYER1
    inside = set(targets) & sub
    changed = True
    while changed:
        changed = False
        for v in sub:
            if v in inside:
                continue
            succ = [u for u in game.succ[v] if u in sub]
            assert succ, "sub-arena contains a dead configuration"
            owner = game.owners[v]
            if owner is mine or owner is Owner.PROBABILISTIC:
                hit = any(u in inside for u in succ)
            else:
                hit = all(u in inside for u in succ)
            if hit:
                inside.add(v)
                changed = True
    return frozenset(inside)


def _sure_safe(game: ObligationGame, player: int, allowed: frozenset[int],
               sub: frozenset[int]) -> frozenset[int]:
    """Greatest set inside `allowed` that `player` can surely never leave."""
    mine = Owner.PLAYER0 if player == 0 else Owner.PLAYER1
    safe = set(allowed & sub)
    changed = True
    while changed:
        changed = False
        for v in list(safe):
            succ = [u for u in game.succ[v] if u in sub]
            if game.owners[v] is mine:
                ok = any(u in safe for u in succ)
            else:
                ok = bool(succ) and all(u in safe for u in succ)
            if not ok:
                safe.discard(v)
                changed = True
    return frozenset(safe)


def _as_attr(game: ObligationGame, player: int, targets: frozenset[int],
             sub: frozenset[int]) -> frozenset[int]:
    """States where `player` forces reaching `targets` with probability one.

    The opponent prevents almost-sure reachability exactly when it can,
    with positive probability, reach the region it can surely confine
    away from the targets.
    """
    opponent = 1 - player
    refuge = _sure_safe(game, opponent, sub - targets, sub)
    return sub - _pos_attr(game, opponent, refuge, sub)


def _as_region(game: ObligationGame, sub: frozenset[int]) -> frozenset[int]:
    """Configurations from which Player 0 wins the parity objective almost surely."""
    if not sub:
        return frozenset()
    d = min(game.priority[v] for v in sub)
    dset = frozenset(v for v in sub if game.priority[v] == d)
    if d % 2 == 0:
        # Player 0 is happy revisiting priority d.  Carve out the part of
        # the remainder the opponent can spoil and recurse without it.
        rest = sub - _pos_attr(game, 0, dset, sub)
        spoil = rest - _as_region(game, rest)
        if not spoil:
            return sub
        return _as_region(game, sub - _pos_attr(game, 1, spoil, sub))
    # Priority d is bad for Player 0: winning requires almost surely
    # reaching the winning region of the arena without the opponent's
    # positive attractor of d.
    rest = sub - _pos_attr(game, 1, dset, sub)
    core = _as_region(game, rest)
    reach = _as_attr(game, 0, core, sub)
    if reach == sub:
        return sub
    return _as_region(game, reach)


# ---------------------------------------------------------------------------
# Exact single-player (MDP) analysis.  In every MDP here exactly one
# player -- the "controller" -- has free choices; the other player's
# configurations have been restricted to a single successor and behave
# like pure transitions.


def _max_end_components(game: ObligationGame, controller: Owner,
                        sub: frozenset[int]) -> list[frozenset[int]]:
    """Maximal end components of the sub-MDP induced by ``sub``.

    An end component is a set of states in which the controller can stay
    forever with probability one: controller states keep at least one
    edge inside, all other states keep all their branches inside, and
    the set is strongly connected under the kept edges.
    """
    alive = set(sub)
    while True:
        changed = True
        while changed:
            changed = False
            for v in list(alive):
                if game.owners[v] is controller:
                    ok = any(u in alive for u in game.succ[v])
                else:
                    ok = all(u in alive for u in game.succ[v])
                if not ok:
                    alive.discard(v)
                    changed = True
        if not alive:
            return []
        order = sorted(alive)
        pos = {v: i for i, v in enumerate(order)}
        comps = tarjan_scc(len(order),
                           lambda i: (pos[u] for u in game.succ[order[i]] if u in alive))
        comp_of = {}
        for ci, comp in enumerate(comps):
            for i in comp:
                comp_of[order[i]] = ci
        removed = False
        for v in list(alive):
            if game.owners[v] is controller:
                if not any(u in alive and comp_of[u] == comp_of[v] for u in game.succ[v]):
                    alive.discard(v)
                    removed = True
            else:
                if any(comp_of.get(u) != comp_of[v] for u in game.succ[v]):
                    alive.discard(v)
                    removed = True
        if not removed:
            grouped: dict[int, set[int]] = {}
            for v in alive:
                grouped.setdefault(comp_of[v], set()).add(v)
            return [frozenset(c) for c in grouped.values()]


def _mdp_max_reach(game: ObligationGame, controller: Owner,
                   targets: frozenset[int]) -> Values:
    """Max probability for the controller of reaching ``targets``.

    Policy iteration with exact chain evaluation; evaluations are true
    reachability probabilities (zero sets eliminated on the graph), so
    the terminal Bellman-stable policy attains the least fixpoint,
    which is the optimum.
    """
    n = len(game)
    # graph-reachable backward closure; everything else has value 0
    preds: list[list[int]] = [[] for _ in range(n)]
    for v in range(n):
        for u in game.succ[v]:
            preds[u].append(v)
    can = set(targets)
    frontier = list(targets)
    while frontier:
        v = frontier.pop()
        for p in preds[v]:
            if p not in can:
                can.add(p)
                frontier.append(p)
    values = [ZERO] * n
    for t in targets:
        values[t] = ONE
    policy = {v: game.succ[v][0] for v in range(n)
              if game.owners[v] is controller and v not in targets}

    def evaluate() -> list[Fraction]:
        rows = []
        for v in range(n):
            if v in targets:
                rows.append(((v, ONE),))
            elif game.owners[v] is Owner.PROBABILISTIC:
                rows.append(game.kernel_row(v))
            elif game.owners[v] is controller:
                rows.append(((policy[v], ONE),))
            else:
                rows.append(((game.succ[v][0], ONE),))
        chain = LabeledMarkovChain(names=game.names, succ=tuple(rows),
                                   labels=tuple(frozenset() for _ in range(n)),
                                   initial=0)
        return reach_probability(chain, targets)

    rounds = 0
    while True:
        rounds += 1
        if rounds > 10000:
            raise InternalInvariantError("reachability policy iteration did not terminate")
        x = evaluate()
        improved = False
        for v, current in policy.items():
            if v not in can:
                continue
            best_u, best = current, x[current]
            for u in game.succ[v]:
                if x[u] > best:
                    best, best_u = x[u], u
            if best_u != current:
                policy[v] = best_u
                improved = True
        if not improved:
            return tuple(x)


def _mdp_max_parity(game: ObligationGame, controller: Owner) -> Values:
    """Max probability for the controller of the min-even parity objective.

    Equals the max probability of reaching the union of end components
    whose minimal priority is even: almost every play eventually stays
    inside some end component, where the controller can realise exactly
    its minimal priority as the liminf.
    """
    n = len(game)
    other = Owner.PLAYER1 if controller is Owner.PLAYER0 else Owner.PLAYER0
    for v in range(n):
        if game.owners[v] is other and len(game.succ[v]) != 1:
            raise InternalInvariantError(
                "MDP analysis requires the passive player to be fully restricted")
    winning: set[int] = set()
    for e in sorted({p for p in game.priority if p % 2 == 0}):
        sub = frozenset(v for v in range(n) if game.priority[v] >= e)
        for component in _max_end_components(game, controller, sub):
            if any(game.priority[v] == e for v in component):
                winning |= component
    return _mdp_max_reach(game, controller, frozenset(winning))


def _with_priorities(game: ObligationGame, priority: tuple[int, ...]) -> ObligationGame:
    return ObligationGame(names=game.names, owners=game.owners, succ=game.succ,
                          kernel=game.kernel, priority=priority,
                          obligation=game.obligation)


def _restrict_player(game: ObligationGame, player: Owner,
                     strategy: dict[int, int]) -> ObligationGame:
    succ = list(game.succ)
    for v, u in strategy.items():
        assert game.owners[v] is player and u in game.succ[v]
        succ[v] = (u,)
    return ObligationGame(names=game.names, owners=game.owners, succ=tuple(succ),
                          kernel=game.kernel, priority=game.priority,
                          obligation=game.obligation)


def _best_response_values(game: ObligationGame, sigma: dict[int, int]) -> Values:
    """Exact value of fixing Player 0 to ``sigma``: Player 1 minimises.

    The minimum of the parity probability is one minus the maximum of
    the complemented (priority + 1) objective in the resulting MDP.
    """
    restricted = _restrict_player(game, Owner.PLAYER0, sigma)
    complemented = _with_priorities(restricted, tuple(p + 1 for p in game.priority))
    mx = _mdp_max_parity(complemented, Owner.PLAYER1)
    return tuple(ONE - x for x in mx)


# ---------------------------------------------------------------------------
# Two-player solve: climb on both sides, certify by determinacy, close
# any remaining gap by enumerating the smaller strategy space.

_ENUM_CAP = 4096
_CLIMB_EXTRA_ROUNDS = 10


def _player_states(game: ObligationGame, player: Owner) -> list[int]:
    return [v for v in range(len(game)) if game.owners[v] is player]


def _initial_sigma(game: ObligationGame) -> dict[int, int]:
    """Start the climb from choices that realise the almost-sure region.

    Within the region where Player 0 wins almost surely, fix one edge at
    a time, keeping only choices under which the region is preserved;
    this avoids the classic plateau trap of value-based switching
    (stalling on an odd self-loop of value zero).
    """
    full = frozenset(range(len(game)))
    region = _as_region(game, full)
    sigma: dict[int, int] = {}
    current = game
    for v in _player_states(game, Owner.PLAYER0):
        if v not in region:
            sigma[v] = game.succ[v][0]
            continue
        for u in current.succ[v]:
            trial = restrict_choice(current, v, u)
            if region <= _as_region(trial, full):
                current = trial
                sigma[v] = u
                break
        else:
            raise InternalInvariantError(
                f"no almost-sure choice at {game.names[v]} preserves the region")
    return sigma


def _climb(game: ObligationGame) -> Values:
    """Greatest best-response vector found by value-switch improvement.

    Every vector returned by a best response is a certified lower bound
    of the true values, hence so is their pointwise maximum; the climb
    is a heuristic to make the bound tight, never a soundness argument.
    """
    sigma = _initial_sigma(game)
    x = _best_response_values(game, sigma)
    best = list(x)
    v0 = _player_states(game, Owner.PLAYER0)
    for _ in range(3 * max(1, len(v0)) + _CLIMB_EXTRA_ROUNDS):
        switched = False
        for v in v0:
            best_u, val = sigma[v], x[sigma[v]]
            for u in game.succ[v]:
                if x[u] > val:
                    val, best_u = x[u], u
            if best_u != sigma[v]:
                sigma[v] = best_u
                switched = True
        if not switched:
            break
        x = _best_response_values(game, sigma)
        for v in range(len(game)):
            if x[v] > best[v]:
                best[v] = x[v]
    return tuple(best)


def _enumerate_side(game: ObligationGame) -> Values:
    """Pointwise max of all Player-0 best-response vectors (exact values)."""
    v0 = _player_states(game, Owner.PLAYER0)
    best: Optional[list[Fraction]] = None
    for combo in itertools.product(*(game.succ[v] for v in v0)):
        x = _best_response_values(game, dict(zip(v0, combo)))
        if best is None:
            best = list(x)
        else:
            for v in range(len(game)):
                if x[v] > best[v]:
                    best[v] = x[v]
    assert best is not None
    return tuple(best)


def _strategy_count(game: ObligationGame, player: Owner) -> int:
    count = 1
    for v in _player_states(game, player):
        count *= len(game.succ[v])
    return count


_value_cache: dict[ObligationGame, Values] = {}


def solve_values(game: ObligationGame) -> Values:
    """Exact Player-0 values of an obligation-free stochastic parity game.

    Answers are only returned once proven: either the chain / MDP
    special cases (exact by construction), or two-sided bounds that sum
    to one (determinacy), or an exhaustive positional enumeration of one
    player.  A bound gap that enumeration cannot close within the cap
    raises BudgetExceededError; nothing unproven is ever returned.
    """
    cached = _value_cache.get(game)
    if cached is not None:
        return cached
    _require_parity_game(game)
    if game.is_chain():
        vals = tuple(parity_measure(chain_view(game), game.priority))
    elif not _player_states(game, Owner.PLAYER1):
        vals = _mdp_max_parity(game, Owner.PLAYER0)
    elif not _player_states(game, Owner.PLAYER0):
        vals = _best_response_values(game, {})
    else:
        lower = _climb(game)
        counter = _climb(dual_game(game))
        if all(lower[v] + counter[v] == ONE for v in range(len(game))):
            vals = lower
        else:
            count0 = _strategy_count(game, Owner.PLAYER0)
            count1 = _strategy_count(game, Owner.PLAYER1)
            if min(count0, count1) > _ENUM_CAP:
                raise BudgetExceededError(
                    f"two-player solve needs enumeration of "
                    f"{min(count0, count1)} strategies (cap {_ENUM_CAP})")
            if count0 <= count1:
                vals = _enumerate_side(game)
            else:
                vals = tuple(ONE - x for x in _enumerate_side(dual_game(game)))
            if any(vals[v] < lower[v] for v in range(len(game))) or \
               any(ONE - vals[v] < counter[v] for v in range(len(game))):
                raise InternalInvariantError("enumeration fell below a certified bound")
    if len(_value_cache) > 65536:
        _value_cache.clear()
    _value_cache[game] = vals
    return vals


def _canonical_strategy(game: ObligationGame, values: Values, player: int,
                        solver: Callable[[ObligationGame], Values]) -> PureMemorylessStrategy:
    """Lexicographically first optimal strategy for `player`.

    Fixes one owned configuration at a time to its smallest successor
    that leaves the value vector unchanged; the result equals the first
    optimal strategy in the enumeration order used by the oracle.
    """
    mine = Owner.PLAYER0 if player == 0 else Owner.PLAYER1
    current = game
    choices: dict[int, int] = {}
    for v in range(len(game)):
        if game.owners[v] is not mine:
            continue
        for u in current.succ[v]:
            trial = restrict_choice(current, v, u)
            if solver(trial) == values:
                current = trial
                choices[v] = u
                break
        else:
            raise InternalInvariantError(
                f"no optimal choice at {game.names[v]} preserves the values")
    return PureMemorylessStrategy.from_dict(player, choices)


def solve_parity(game: ObligationGame, *, witnesses: bool = True) -> ValueVector:
    """Fast exact solver; bit-identical to the oracle wherever both run."""
    values = solve_values(game)
    sigma = pi = None
    if witnesses:
        sigma = _canonical_strategy(game, values, 0, solve_values)
        pi = _canonical_strategy(game, values, 1, solve_values)
    return ValueVector(values=values, sigma=sigma, pi=pi)


# ---------------------------------------------------------------------------
# Brute-force oracle


def _strategy_space(game: ObligationGame, owner: Owner) -> tuple[list[int], list[tuple[int, ...]]]:
    configs = [v for v in range(len(game)) if game.owners[v] is owner]
    return configs, [game.succ[v] for v in configs]


def oracle_pair_count(game: ObligationGame) -> int:
    count = 1
    for v in range(len(game)):
        if game.owners[v] is not Owner.PROBABILISTIC:
            count *= len(game.succ[v])
    return count


def solve_parity_oracle(game: ObligationGame, *,
                        budgets: Budgets = DEFAULT_BUDGETS,
                        witnesses: bool = True) -> ValueVector:
    """Normative brute-force semantics: full strategy-pair enumeration.

    value(v) = max over pure memoryless sigma of min over pure
    memoryless pi of the parity measure of the induced chain at v.
    Witnesses are the lexicographically first strategies achieving the
    value vector.  Raises OracleInfeasibleError beyond the pair budget.
    """
    _require_parity_game(game)
    pairs = oracle_pair_count(game)
    if pairs > budgets.max_strategy_pairs:
        raise OracleInfeasibleError(
            f"oracle infeasible at this size: {pairs} strategy pairs "
            f"exceed the budget of {budgets.max_strategy_pairs}")
    n = len(game)
    v0, s0 = _strategy_space(game, Owner.PLAYER0)
    v1, s1 = _strategy_space(game, Owner.PLAYER1)
    sigmas = [PureMemorylessStrategy.from_dict(0, dict(zip(v0, combo)))
              for combo in itertools.product(*s0)]
    pis = [PureMemorylessStrategy.from_dict(1, dict(zip(v1, combo)))
           for combo in itertools.product(*s1)]
    table: list[list[Values]] = []
    for sg in sigmas:
        row = []
        for pg in pis:
            chain = induce_chain(game, sg, pg)
            row.append(tuple(parity_measure(chain, game.priority)))
        table.append(row)
    response = [tuple(min(row[j][v] for j in range(len(pis))) for v in range(n))
                for row in table]
    values = tuple(max(response[i][v] for i in range(len(sigmas))) for v in range(n))
    sigma = pi = None
    if witnesses:
        sigma = next(sg for i, sg in enumerate(sigmas) if response[i] == values)
        counter = [tuple(max(table[i][j][v] for i in range(len(sigmas))) for v in range(n))
                   for j in range(len(pis))]
        pi = next(pg for j, pg in enumerate(pis) if counter[j] == values)
    return ValueVector(values=values, sigma=sigma, pi=pi)


# ---------------------------------------------------------------------------
# Threshold decisions


@dataclass(frozen=True)
class ThresholdDecision:
    verdict: bool
    value: Fraction
    certificate: PureMemorylessStrategy
    certificate_player: int


def decide_parity_threshold(game: ObligationGame, config: int, cmp: str,
                            threshold: Fraction, *,
                            budgets: Budgets = DEFAULT_BUDGETS) -> ThresholdDecision:
    """Decide value(config) cmp threshold on exact rationals.

    The certificate is the optimal strategy of whichever player the
    verdict favours; it is re-verified through induce_chain +
    parity_measure (against every opposing strategy when enumeration
    fits the budget, else against the canonical opponent witness).
    """
    if cmp not in (GE, GT):
        raise InputFormatError("comparator must be '>=' or '>'")
    if not (ZERO <= threshold <= ONE):
        raise InputFormatError("threshold must lie in [0,1]")
    solved = solve_parity(game, witnesses=True)
    value = solved.values[config]
    verdict = value >= threshold if cmp == GE else value > threshold
    assert solved.sigma is not None and solved.pi is not None
    certificate = solved.sigma if verdict else solved.pi
    player = 0 if verdict else 1

    def measure_against(opponent: PureMemorylessStrategy) -> Fraction:
        if player == 0:
            chain = induce_chain(game, certificate, opponent)
        else:
            chain = induce_chain(game, opponent, certificate)
        return parity_measure(chain, game.priority)[config]

    opposing_owner = Owner.PLAYER1 if player == 0 else Owner.PLAYER0
    vs, ss = _strategy_space(game, opposing_owner)
    count = 1
    for options in ss:
        count *= len(options)
    if count <= budgets.max_strategy_pairs:
        opponents = [PureMemorylessStrategy.from_dict(1 - player, dict(zip(vs, combo)))
                     for combo in itertools.product(*ss)]
    else:
        opponents = [solved.pi if player == 0 else solved.sigma]  # type: ignore[list-item]
    for opponent in opponents:
        achieved = measure_against(opponent)
        sound = achieved >= value if player == 0 else achieved <= value
        if not sound:
            raise InternalInvariantError(
                f"witness strategy fails re-verification at {game.names[config]}")
    return ThresholdDecision(verdict=verdict, value=value,
                             certificate=certificate, certificate_player=player)
