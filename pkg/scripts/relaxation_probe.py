"""Exploratory probe: does relaxing obligations ever lower a value?

Whether values are monotone under pointwise relaxation of obligations
(lowering a threshold, or weakening > to >=) is plausible but has no
proof we rely on, so this check is intentionally NOT part of the test
suite; it only reports what it finds.

    python3 scripts/relaxation_probe.py --games 300 --seed 0
"""

from __future__ import annotations

import argparse
import random
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from obg import Obligation, find_best_dependency  # noqa: E402
from obg.generators import random_game  # noqa: E402
from obg.model import GE, ObligationGame  # noqa: E402


def relax(game: ObligationGame, rng: random.Random) -> ObligationGame | None:
    candidates = [v for v in game.obligation_indices()]
    if not candidates:
        return None
    v = rng.choice(candidates)
    ob = game.obligation[v]
    assert ob is not None
    if ob.cmp == GE and ob.threshold == 0:
        return None
    if ob.cmp == GE:
        relaxed = Obligation(GE, ob.threshold * Fraction(1, 2))
    else:
        relaxed = Obligation(GE, ob.threshold)
    obligations = list(game.obligation)
    obligations[v] = relaxed
    return ObligationGame(names=game.names, owners=game.owners, succ=game.succ,
                          kernel=game.kernel, priority=game.priority,
                          obligation=tuple(obligations))


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--games", type=int, default=300)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    compared = 0
    violations = 0
    for _ in range(args.games):
        game = random_game(rng)
        relaxed = relax(game, rng)
        if relaxed is None:
            continue
        _, before = find_best_dependency(game, witnesses=False)
        _, after = find_best_dependency(relaxed, witnesses=False)
        compared += 1
        drops = [(game.names[v], before.values[v], after.values[v])
                 for v in range(len(game)) if after.values[v] < before.values[v]]
        if drops:
            violations += 1
            print("value dropped under relaxation:", drops)
    print(f"compared {compared} relaxations, {violations} monotonicity violations "
          "(informational only)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
