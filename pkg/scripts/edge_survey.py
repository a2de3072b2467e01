"""Survey of edge, Mal'cev and majority terms over small algebras.

Covers the bundled zoo plus every 2-element algebra with a single binary
operation, and prints one row per algebra.
"""
import argparse
import itertools
from dataclasses import dataclass

from ucaw.algebra import FiniteAlgebra
from ucaw.maltsev import has_malcev_term, has_nu_term, min_edge_arity
from ucaw.variety import canonical_form
from ucaw.zoo import bare_set, chain_semilattice, cyclic_group, klein_group, lattice2


@dataclass
class Config:
    kmax: int = 4
    binary: bool = True


def algebras(cfg: Config):
    yield from [cyclic_group(2), cyclic_group(3), cyclic_group(4), klein_group(), lattice2(),
                chain_semilattice(3), bare_set(2)]
    if cfg.binary:
        seen = set()
        for tab in itertools.product((0, 1), repeat=4):
            a = FiniteAlgebra.from_tables(2, {"f": (2, tab)}, name="f=" + "".join(map(str, tab)))
            form = canonical_form(a)
            if form not in seen:
                seen.add(form)
                yield a


def main(cfg: Config):
    print(f"{'algebra':<12} {'min edge k':>10} {'malcev':>7} {'majority':>9}")
    for a in algebras(cfg):
        k = min_edge_arity(a, cfg.kmax)
        row = (a.name, "-" if k is None else str(k), "yes" if has_malcev_term(a) else "no",
               "yes" if has_nu_term(a, 3) else "no")
        print(f"{row[0]:<12} {row[1]:>10} {row[2]:>7} {row[3]:>9}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--kmax", type=int, default=Config.kmax)
    p.add_argument("--no-binary", action="store_true")
    a = p.parse_args()
    main(Config(kmax=a.kmax, binary=not a.no_binary))
