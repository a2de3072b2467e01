"""Small named algebras used by tests, scripts and the bundled data files."""
from __future__ import annotations

from .algebra import FiniteAlgebra, direct_product

GROUP_SIGNATURE = (("mul", 2), ("inv", 1), ("e", 0))


def cyclic_group(n: int) -> FiniteAlgebra:
    return FiniteAlgebra.from_functions(
        n,
        [("mul", 2, lambda x, y: (x + y) % n), ("inv", 1, lambda x: (-x) % n), ("e", 0, lambda: 0)],
        name=f"Z{n}",
    )


def trivial_group() -> FiniteAlgebra:
    g = cyclic_group(1)
    return FiniteAlgebra(1, g.operations, "trivial")


def klein_group() -> FiniteAlgebra:
    return direct_product(cyclic_group(2), cyclic_group(2), name="Z2xZ2")


def lattice2() -> FiniteAlgebra:
    return FiniteAlgebra.from_functions(
        2, [("meet", 2, min), ("join", 2, max)], name="L2")


def chain_semilattice(n: int) -> FiniteAlgebra:
    return FiniteAlgebra.from_functions(n, [("meet", 2, min)], name=f"S{n}")


def bare_set(n: int) -> FiniteAlgebra:
    """n-element algebra with empty signature; its clone is the projections."""
    return FiniteAlgebra(n, (), name=f"set{n}")


def unary_algebra(table, name=None) -> FiniteAlgebra:
    return FiniteAlgebra.from_tables(len(table), {"f": (1, list(table))}, name=name)
