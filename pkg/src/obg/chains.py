"""Exact quantitative analysis of finite Markov chains.

Reachability probabilities are computed by identifying the sure-zero
set graph-theoretically (backward reachability) and solving the
remaining linear system over exact rationals; the zero-set elimination
guarantees a nonsingular system.  The parity measure is the probability
of reaching the union of accepting bottom SCCs (minimal priority even).

The min-priority monitor tracks the minimal priority seen along a path
*after leaving the start configuration*: the start's own priority is
excluded, the endpoint's included.  Entering any obligation
configuration freezes the (configuration, minimum) pair for
classification by the caller.  See README, "Monitor semantics".

Monte-Carlo estimation is a statistical cross-check only and never
feeds solver decisions; it is the one place floats are allowed.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from . import linalg
from .errors import InputFormatError
from .graphs import tarjan_scc
from .model import ONE, ZERO, LabeledMarkovChain, ObligationGame, Owner

# z for a two-sided 99% Wilson interval
Z99 = 2.5758293035489004


@dataclass(frozen=True)
class BsccDecomposition:
    """Bottom SCCs, the transient remainder, and (optionally) acceptance.

    ``accepting[i]`` is True iff the minimal priority inside
    ``components[i]`` is even; it is None when no priority map was given.
    """

    components: tuple[frozenset[int], ...]
    transient: frozenset[int]
    accepting: Optional[tuple[bool, ...]]


def bscc_decompose(mc: LabeledMarkovChain,
                   priority: Optional[Sequence[int]] = None) -> BsccDecomposition:
    """Exact SCC condensation; a component is bottom iff no edge leaves it."""
    n = len(mc)
    comps = tarjan_scc(n, lambda v: (t for t, _ in mc.succ[v]))
    bsccs = []
    for comp in comps:
        members = frozenset(comp)
        bottom = all(t in members for v in comp for t, _ in mc.succ[v])
        if bottom:
            bsccs.append(members)
    bsccs.sort(key=min)
    covered = frozenset().union(*bsccs) if bsccs else frozenset()
    transient = frozenset(range(n)) - covered
    accepting = None
    if priority is not None:
        accepting = tuple(min(priority[v] for v in comp) % 2 == 0 for comp in bsccs)
    return BsccDecomposition(tuple(bsccs), transient, accepting)


def reach_probability(mc: LabeledMarkovChain,
                      target: frozenset[int] | set[int],
                      avoid: frozenset[int] | set[int] = frozenset()) -> list[Fraction]:
    """Probability, from each location, of reaching target before touching avoid."""
    target = frozenset(target)
    avoid = frozenset(avoid)
    if target & avoid:
        raise InputFormatError("target and avoid sets must be disjoint")
    n = len(mc)
    # Backward reachability through non-avoid locations: everything else is sure-zero.
    preds: list[list[int]] = [[] for _ in range(n)]
    for v in range(n):
        for t, _ in mc.succ[v]:
            preds[t].append(v)
    can_reach = set(target)
    frontier = list(target)
    while frontier:
        v = frontier.pop()
        for p in preds[v]:
            if p not in can_reach and p not in avoid:
                can_reach.add(p)
                frontier.append(p)
    values = [ZERO] * n
    for t in target:
        values[t] = ONE
    unknown = sorted(can_reach - target)
    if not unknown:
        return values
    pos = {v: i for i, v in enumerate(unknown)}
    m = len(unknown)
    matrix = [[ZERO] * m for _ in range(m)]
    rhs = [ZERO] * m
    for v in unknown:
        i = pos[v]
        matrix[i][i] = ONE
        for t, p in mc.succ[v]:
            if t in pos:
                matrix[i][pos[t]] -= p
            elif t in target:
                rhs[i] += p
            # avoid / sure-zero successors contribute nothing
    solution = linalg.solve_linear_system(matrix, rhs)
    for v, x in zip(unknown, solution):
        values[v] = x
    return values


def parity_measure(mc: LabeledMarkovChain, priority: Sequence[int]) -> list[Fraction]:
    """Measure of the min-even parity objective from each location."""
    if len(priority) != len(mc):
        raise InputFormatError("priority map must cover every location")
    dec = bscc_decompose(mc, priority)
    assert dec.accepting is not None
    target: set[int] = set()
    for comp, acc in zip(dec.components, dec.accepting):
        if acc:
            target |= comp
    return reach_probability(mc, frozenset(target))


# ---------------------------------------------------------------------------
# Min-priority monitor product


@dataclass(frozen=True)
class MonitorProduct:
    """Product of a game with the running minimum of priorities.

    Nodes are either the root (the start configuration, no minimum yet),
    a live pair ``(configuration, m)`` for a non-obligation
    configuration, or a frozen absorbing pair for an obligation
    configuration.  The running minimum is non-increasing along any
    path.  Size is at most |V| * (k+1) + number of frozen pairs.
    """

    product: ObligationGame
    start: int                                  # root node index
    live: tuple[tuple[int, int, int], ...]      # (node, configuration, m)
    frozen: tuple[tuple[int, int, int], ...]    # (node, configuration, m), absorbing

    def frozen_node(self, config: int, m: int) -> Optional[int]:
        for node, c, mm in self.frozen:
            if c == config and mm == m:
                return node
        return None


def min_priority_monitor_product(game: ObligationGame, start: int) -> MonitorProduct:
    """Annotate reachable states of ``game`` with the minimal priority since ``start``.

    The minimum excludes the start's own priority and includes the
    current configuration's.  The first visit to an obligation
    configuration freezes its pair, which becomes absorbing.
    """
    assert game.succ[start], "start configuration must have a successor"
    names: list[str] = []
    owners: list[Owner] = []
    succ: list[tuple[int, ...]] = []
    kernel: list[Optional[tuple[tuple[int, Fraction], ...]]] = []
    priority: list[int] = []
    node_of: dict[tuple[str, int, int], int] = {}
    live: list[tuple[int, int, int]] = []
    frozen: list[tuple[int, int, int]] = []
    pending: list[tuple[str, int, int]] = []

    def add_node(kind: str, config: int, m: int) -> int:
        key = (kind, config, m)
        if key in node_of:
            return node_of[key]
        node = len(names)
        node_of[key] = node
        if kind == "root":
            names.append(f"{game.names[config]}@start")
        elif kind == "live":
            names.append(f"{game.names[config]}@{m}")
            live.append((node, config, m))
        else:
            names.append(f"{game.names[config]}!{m}")
            frozen.append((node, config, m))
        owners.append(Owner.PROBABILISTIC if kind == "frozen" else game.owners[config])
        priority.append(game.priority[config])
        succ.append(())
        kernel.append(None)
        pending.append(key)
        return node

    def step(m_before: Optional[int], target: int) -> int:
        m = game.priority[target] if m_before is None else min(m_before, game.priority[target])
        kind = "frozen" if game.obligation[target] is not None else "live"
        return add_node(kind, target, m)

    root = add_node("root", start, -1)
    while pending:
        kind, config, m = key = pending.pop()
        node = node_of[key]
        if kind == "frozen":
            succ[node] = (node,)
            kernel[node] = ((node, ONE),)
            continue
        m_before = None if kind == "root" else m
        edge_nodes = set()
        for t in game.succ[config]:
            edge_nodes.add(step(m_before, t))
        succ[node] = tuple(sorted(edge_nodes))
        if game.owners[config] is Owner.PROBABILISTIC:
            row: dict[int, Fraction] = {}
            for t, p in game.kernel_row(config):
                tn = step(m_before, t)
                row[tn] = row.get(tn, ZERO) + p
            kernel[node] = tuple(sorted(row.items()))
    product = ObligationGame(
        names=tuple(names),
        owners=tuple(owners),
        succ=tuple(succ),
        kernel=tuple(kernel),
        priority=tuple(priority),
        obligation=tuple(None for _ in names),
    )
    return MonitorProduct(product=product, start=root,
                          live=tuple(live), frozen=tuple(frozen))


# ---------------------------------------------------------------------------
# Monte-Carlo cross-check


@dataclass(frozen=True)
class ReachObjective:
    target: frozenset[int]
    avoid: frozenset[int] = frozenset()


@dataclass(frozen=True)
class ParityObjective:
    priority: tuple[int, ...]


@dataclass(frozen=True)
class McEstimate:
    successes: int
    samples: int
    estimate: float
    wilson_low: float
    wilson_high: float
    seed: int

    def contains(self, exact: Fraction) -> bool:
        return self.wilson_low <= float(exact) <= self.wilson_high


def wilson_interval(successes: int, samples: int, z: float = Z99) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if samples <= 0:
        raise InputFormatError("samples must be positive")
    p_hat = successes / samples
    z2 = z * z
    denom = 1.0 + z2 / samples
    centre = (p_hat + z2 / (2 * samples)) / denom
    half = z * math.sqrt(p_hat * (1 - p_hat) / samples + z2 / (4 * samples * samples)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def monte_carlo_estimate(mc: LabeledMarkovChain,
                         objective: Union[ReachObjective, ParityObjective],
                         samples: int,
                         horizon: int = 10000,
                         seed: int = 0,
                         start: Optional[int] = None) -> McEstimate:
    """Seeded simulation estimate with a 99% Wilson interval.

    Parity runs are classified as soon as the walk enters a bottom SCC
    (entering one decides the parity class almost surely); runs still
    outside every bottom SCC at the horizon count as failures.  Never
    used inside solver decisions.
    """
    if samples < 1:
        raise InputFormatError("samples must be >= 1")
    rng = random.Random(seed)
    start_loc = mc.initial if start is None else start
    cumulative = []
    for row in mc.succ:
        acc = 0.0
        thresholds = []
        for t, p in row:
            acc += float(p)
            thresholds.append((acc, t))
        cumulative.append(thresholds)

    if isinstance(objective, ParityObjective):
        dec = bscc_decompose(mc, objective.priority)
        assert dec.accepting is not None
        verdict_of: dict[int, bool] = {}
        for comp, acc in zip(dec.components, dec.accepting):
            for v in comp:
                verdict_of[v] = acc

        def run() -> bool:
            v = start_loc
            for _ in range(horizon):
                if v in verdict_of:
                    return verdict_of[v]
                v = _sample(cumulative[v], rng)
            return False
    else:
        target, avoid = objective.target, objective.avoid

        def run() -> bool:
            v = start_loc
            for _ in range(horizon):
                if v in target:
                    return True
                if v in avoid:
                    return False
                if not cumulative[v]:
                    return False
                v = _sample(cumulative[v], rng)
            return False

    successes = sum(1 for _ in range(samples) if run())
    low, high = wilson_interval(successes, samples)
    return McEstimate(successes=successes, samples=samples,
                      estimate=successes / samples,
                      wilson_low=low, wilson_high=high, seed=seed)


def _sample(thresholds: list[tuple[float, int]], rng: random.Random) -> int:
    x = rng.random()
    for acc, t in thresholds:
        if x < acc:
            return t
    return thresholds[-1][1]
