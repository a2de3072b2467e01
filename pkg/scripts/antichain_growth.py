"""Width of (A^{<=L}, ≤_A) and greedy antichain sizes as L grows.

The exact width comes from Dilworth's theorem via bipartite matching; the
greedy column shows what random insertion order reaches.
"""
import argparse
import random
from dataclasses import dataclass

from ucaw.words import is_antichain, lea, max_antichain_size, words_up_to


@dataclass
class Config:
    t: int = 2
    max_len: int = 6
    trials: int = 20
    seed: int = 0


def greedy_antichain(words, rng):
    chosen = []
    for w in rng.sample(words, len(words)):
        if all(not lea(w, v) and not lea(v, w) for v in chosen):
            chosen.append(w)
    return chosen


def main(cfg: Config):
    rng = random.Random(cfg.seed)
    print(f"t={cfg.t}")
    print(f"{'L':>3} {'words':>7} {'width':>7} {'greedy max':>11}")
    for L in range(1, cfg.max_len + 1):
        words = list(words_up_to(cfg.t, L))
        width = max_antichain_size(words)
        best = 0
        for _ in range(cfg.trials):
            ac = greedy_antichain(words, rng)
            assert is_antichain(ac) and len(ac) <= width
            best = max(best, len(ac))
        print(f"{L:>3} {len(words):>7} {width:>7} {best:>11}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--t", type=int, default=Config.t)
    p.add_argument("--max-len", type=int, default=Config.max_len)
    p.add_argument("--trials", type=int, default=Config.trials)
    p.add_argument("--seed", type=int, default=Config.seed)
    a = p.parse_args()
    main(Config(a.t, a.max_len, a.trials, a.seed))
