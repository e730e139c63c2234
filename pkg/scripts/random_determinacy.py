"""Randomized determinacy experiment.

Solves random obligation games together with their duals and checks
val(G, v) + val(dual G, v) = 1 exactly at every configuration.

    python3 scripts/random_determinacy.py --games 200 --seed 0
"""

from __future__ import annotations

import argparse
import random
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from obg import dual_game, find_best_dependency  # noqa: E402
from obg.generators import random_game  # noqa: E402
from obg.model import ONE  # noqa: E402


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--games", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-configs", type=int, default=6)
    parser.add_argument("--max-obligations", type=int, default=3)
    parser.add_argument("--max-priority", type=int, default=3)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    started = time.time()
    failures = 0
    for index in range(args.games):
        game = random_game(rng, max_configs=args.max_configs,
                           max_obligations=args.max_obligations,
                           max_priority=args.max_priority)
        _, primal = find_best_dependency(game, witnesses=False)
        _, counter = find_best_dependency(dual_game(game), witnesses=False)
        if any(a + b != ONE for a, b in zip(primal.values, counter.values)):
            failures += 1
            print(f"FAIL at game {index}")
    elapsed = time.time() - started
    print(f"{args.games} games, {failures} determinacy failures, {elapsed:.1f}s")
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
