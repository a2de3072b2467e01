"""Descending chains of clonoids into the Z2 group, observed at growing bounds.

A chain is built by generating from a random seed list and dropping one seed
at a time.  For each member the script records layer sizes and whether the
bounded fingerprint (low layer plus Ψ sets) separates it from its successor.
Also grows up-sets of words by random insertion and records when the basis
stops changing.  Everything here is truncated, so it illustrates the
stabilization rather than proving it.
"""
import argparse
import itertools
import random
from dataclasses import dataclass

from ucaw.clonoid import clonoid_key, generate_clonoid
from ucaw.words import UpSet, upset_insert
from ucaw.zoo import cyclic_group


@dataclass
class Config:
    chains: int = 5
    seeds_per_chain: int = 4
    bound: int = 3
    word_len: int = 3
    upset_steps: int = 400
    seed: int = 1


def seed_pool():
    pool = [(1, t) for t in itertools.product((0, 1), repeat=2)]
    pool += [(2, t) for t in itertools.product((0, 1), repeat=4)]
    return pool


def clonoid_chains(cfg: Config, rng):
    B = cyclic_group(2)
    pool = seed_pool()
    for c in range(cfg.chains):
        seeds = rng.sample(pool, cfg.seeds_per_chain)
        print(f"chain {c}: seeds {[''.join(map(str, s[1])) for s in seeds]}")
        prev_key = None
        for i in range(len(seeds), -1, -1):
            C = generate_clonoid(B, 2, seeds[:i], cfg.bound)
            key = clonoid_key(C, 2, cfg.word_len)
            tag = "" if prev_key is None else ("  same fingerprint" if key == prev_key else "  separated")
            print(f"  {i} seeds  layers {C.layer_sizes()}{tag}")
            prev_key = key


def upset_chain(cfg: Config, rng):
    U = UpSet(2)
    last_change = 0
    for step in range(1, cfg.upset_steps + 1):
        n = rng.randint(1, 8)
        w = tuple(rng.randrange(2) for _ in range(n))
        V = upset_insert(U, w)
        if V != U:
            last_change = step
        U = V
    print(f"up-set after {cfg.upset_steps} random insertions: basis size {len(U.basis)}, "
          f"last change at step {last_change}")
    print("basis:", [" ".join(map(str, g)) for g in U.basis])


def main(cfg: Config):
    rng = random.Random(cfg.seed)
    clonoid_chains(cfg, rng)
    upset_chain(cfg, rng)


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    for f, v in Config().__dict__.items():
        p.add_argument("--" + f.replace("_", "-"), type=int, default=v)
    a = p.parse_args()
    main(Config(**vars(a)))
