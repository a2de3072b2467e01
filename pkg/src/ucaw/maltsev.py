"""Edge, Mal'cev and near-unanimity terms via generated subpowers.

A term with prescribed identities exists iff the "all x" target vector lies in
the subpower generated by the variable vectors, where columns run over pairs
(x, y) in rank order and then over the identity patterns.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AlgebraError, Budget, FiniteAlgebra, Var, substitute, term_columns
from .subpower import sg


@dataclass(frozen=True)
class EdgeInstance:
    size: int
    nvars: int
    patterns: tuple  # each a function (x, y) -> tuple of length nvars
    generators: tuple
    target: tuple

    @property
    def columns(self) -> int:
        return self.size * self.size * len(self.patterns)


def _edge_patterns(k: int):
    pats = [lambda x, y: (y, y) + (x,) * (k - 1),
            lambda x, y: (y, x, y) + (x,) * (k - 2)]
    for i in range(4, k + 2):
        pats.append(lambda x, y, i=i: tuple(y if pos == i else x for pos in range(1, k + 2)))
    return pats


def _nu_patterns(k: int):
    return [lambda x, y, i=i: tuple(y if pos == i else x for pos in range(1, k + 1))
            for i in range(1, k + 1)]


def _instance(size: int, nvars: int, patterns) -> EdgeInstance:
    cols = []  # (x, y, pattern) in rank order of (x, y), then pattern index
    for x in range(size):
        for y in range(size):
            for pat in patterns:
                cols.append(pat(x, y))
    gens = tuple(tuple(c[j] for c in cols) for j in range(nvars))
    target = tuple(x for x in range(size) for _ in range(size) for _ in patterns)
    return EdgeInstance(size, nvars, tuple(patterns), gens, target)


def edge_instance(size: int, k: int) -> EdgeInstance:
    if k < 2:
        raise AlgebraError("edge arity k must be at least 2")
    return _instance(size, k + 1, _edge_patterns(k))


def nu_instance(size: int, k: int) -> EdgeInstance:
    if k < 3:
        raise AlgebraError("near-unanimity arity must be at least 3")
    return _instance(size, k, _nu_patterns(k))


def satisfies_patterns(alg: FiniteAlgebra, term, inst: EdgeInstance) -> bool:
    """Direct check of the identities by evaluating ``term`` at every column."""
    cols = [np.array(g, dtype=np.int64) for g in inst.generators]
    return bool(np.array_equal(term_columns(alg, term, cols), np.array(inst.target)))


def _search(alg: FiniteAlgebra, inst: EdgeInstance, budget: Budget | None):
    F = sg(alg, inst.columns, inst.generators, with_provenance=True, budget=budget)
    if inst.target not in F:
        return None
    t = F.term(inst.target)
    if not satisfies_patterns(alg, t, inst):
        raise AssertionError("witness term failed re-verification")
    return t


def has_edge_term(alg: FiniteAlgebra, k: int, budget: Budget | None = None):
    """A (k+1)-variable term satisfying the k-edge identities, or None."""
    return _search(alg, edge_instance(alg.size, k), budget)


def is_edge_term(alg: FiniteAlgebra, term, k: int) -> bool:
    return satisfies_patterns(alg, term, edge_instance(alg.size, k))


def has_nu_term(alg: FiniteAlgebra, k: int, budget: Budget | None = None):
    return _search(alg, nu_instance(alg.size, k), budget)


def is_nu_term(alg: FiniteAlgebra, term, k: int) -> bool:
    return satisfies_patterns(alg, term, nu_instance(alg.size, k))


def is_malcev_term(alg: FiniteAlgebra, term) -> bool:
    n = alg.size
    xs = np.repeat(np.arange(n), n)
    ys = np.tile(np.arange(n), n)
    return bool(np.array_equal(term_columns(alg, term, [xs, xs, ys]), ys)
                and np.array_equal(term_columns(alg, term, [ys, xs, xs]), ys))


def has_malcev_term(alg: FiniteAlgebra, budget: Budget | None = None):
    """d(x,y,z) := t(y,x,z) for a 2-edge term t."""
    t = has_edge_term(alg, 2, budget)
    if t is None:
        return None
    d = substitute(t, {1: Var(2), 2: Var(1)})
    if not is_malcev_term(alg, d):
        raise AssertionError("Mal'cev witness failed re-verification")
    return d


def min_edge_arity(alg: FiniteAlgebra, k_max: int, budget: Budget | None = None):
    if k_max < 2:
        raise AlgebraError("k_max must be at least 2")
    for k in range(2, k_max + 1):
        if has_edge_term(alg, k, budget) is not None:
            return k
    return None
