"""Clonoids with source set {0..t-1} and a finite target algebra B.

A function A^n -> B is its value table in rank order of the argument tuples
(length t^n).  Layers are materialized up to an arity bound N; every verdict
that quantifies over all words or arities says whether it was truncated.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .algebra import AlgebraError, Budget, FiniteAlgebra, all_tuples, direct_product, rank
from .subpower import _keys, _member, sg, sg_pairs
from .words import lea, words_up_to

EXACT = "exact"
UP_TO_BOUND = "up-to-bound"


def minor(f: Sequence[int], k: int, sigma: Sequence[int], n: int, t: int) -> tuple[int, ...]:
    """(f∘σ)(a_1..a_n) = f(a_σ(1), ..., a_σ(k)) for σ: {1..k} -> {1..n} (1-based)."""
    return tuple(int(v) for v in _minor_rows(np.asarray([f]), k, sigma, n, t)[0])


def _minor_rows(rows: np.ndarray, k: int, sigma: Sequence[int], n: int, t: int) -> np.ndarray:
    if len(sigma) != k:
        raise AlgebraError(f"reindexing map must have {k} entries")
    if any(not 1 <= s <= n for s in sigma):
        raise AlgebraError(f"reindexing map {tuple(sigma)} leaves 1..{n}")
    if rows.shape[1] != t**k:
        raise AlgebraError(f"table length {rows.shape[1]} does not match arity {k}")
    grid = all_tuples(t, n)
    idx = np.zeros(len(grid), dtype=np.int64)
    for s in sigma:
        idx = idx * t + grid[:, s - 1]
    return rows[:, idx]


@dataclass(frozen=True)
class Seed:
    arity: int
    table: tuple[int, ...]


class Clonoid:
    """Layers C^[1..N] as rank-ordered arrays of function tables."""

    def __init__(self, target: FiniteAlgebra, t: int, bound: int, layers: dict[int, np.ndarray],
                 seeds: Sequence[Seed] | None = None):
        self.target = target
        self.t = t
        self.bound = bound
        self.seeds = tuple(seeds) if seeds is not None else None
        self._rows = {}
        self._keys = {}
        self._forks: dict[tuple[int, ...], frozenset] = {}
        for n in range(1, bound + 1):
            rows = np.asarray(layers.get(n, np.zeros((0, t**n))), dtype=np.uint8).reshape(-1, t**n)
            keys = _keys(rows, target.size)
            order = np.argsort(keys, kind="stable")
            keys = keys[order]
            rows = rows[order]
            if len(keys) > 1:
                keep = np.concatenate([[True], keys[1:] != keys[:-1]])
                rows, keys = rows[keep], keys[keep]
            self._rows[n] = rows
            self._keys[n] = keys

    @classmethod
    def from_layers(cls, target: FiniteAlgebra, t: int, layers: dict[int, Iterable[Sequence[int]]]):
        bound = max(layers) if layers else 0
        arrs = {n: np.array([tuple(f) for f in fs], dtype=np.uint8).reshape(-1, t**n) for n, fs in layers.items()}
        return cls(target, t, bound, arrs)

    def rows(self, n: int) -> np.ndarray:
        if not 1 <= n <= self.bound:
            raise AlgebraError(f"arity {n} outside materialized range 1..{self.bound}")
        return self._rows[n]

    def layer(self, n: int) -> frozenset:
        return frozenset(tuple(int(v) for v in r) for r in self.rows(n))

    def contains_rows(self, n: int, rows: np.ndarray) -> np.ndarray:
        return _member(self._keys[n], _keys(rows, self.target.size))

    def layer_sizes(self) -> list[int]:
        return [len(self._rows[n]) for n in range(1, self.bound + 1)]

    @property
    def empty_layers(self) -> list[int]:
        return [n for n in range(1, self.bound + 1) if len(self._rows[n]) == 0]

    def layer_subset(self, other: "Clonoid", n: int) -> bool:
        return bool(np.all(other.contains_rows(n, self.rows(n))))

    def __repr__(self):
        return f"<Clonoid {self.t} -> {self.target.name or 'B'}, layers {self.layer_sizes()}>"


def generate_clonoid(B: FiniteAlgebra, t: int, seeds: Iterable, N: int = 3,
                     budget: Budget | None = None) -> Clonoid:
    """Smallest clonoid containing ``seeds`` (pairs (arity, table) or Seed), up to arity N.

    Minors commute with pointwise operations, so layer n is the subuniverse of
    B^(A^n) generated by all minors of the seeds into arity n.
    """
    seeds = [s if isinstance(s, Seed) else Seed(int(s[0]), tuple(int(v) for v in s[1])) for s in seeds]
    for s in seeds:
        if s.arity < 1:
            raise AlgebraError("seed arity must be at least 1")
        if s.arity > N:
            raise AlgebraError(f"seed arity {s.arity} exceeds bound {N}")
        if len(s.table) != t**s.arity:
            raise AlgebraError(f"seed table length {len(s.table)} does not match {t}^{s.arity}")
        if any(not 0 <= v < B.size for v in s.table):
            raise AlgebraError("seed value outside the target universe")
    layers = {}
    for n in range(1, N + 1):
        gens = []
        for s in seeds:
            row = np.asarray([s.table], dtype=np.uint8)
            for sigma in itertools.product(range(1, n + 1), repeat=s.arity):
                gens.append(_minor_rows(row, s.arity, sigma, n, t)[0])
        F = sg(B, t**n, gens, budget=budget)
        layers[n] = F.rows
    return Clonoid(B, t, N, layers, seeds)


def is_clonoid(C: Clonoid) -> bool:
    """Both closure conditions, checked exhaustively up to the arity bound."""
    t = C.t
    for n in range(1, C.bound + 1):
        rows = C.rows(n)
        closure = sg(C.target, t**n, [tuple(r) for r in rows]) if len(rows) or C.target.constants else None
        if closure is not None and len(closure) != len(rows):
            return False
    for k in range(1, C.bound + 1):
        rows = C.rows(k)
        if len(rows) == 0:
            continue
        for n in range(1, C.bound + 1):
            for sigma in itertools.product(range(1, n + 1), repeat=k):
                if not np.all(C.contains_rows(n, _minor_rows(rows, k, sigma, n, t))):
                    return False
    return True


# ---------------------------------------------------------------- forks

@dataclass(frozen=True)
class ForkSet:
    word: tuple[int, ...]
    pairs: frozenset


def phi_forks(C: Clonoid, a: Sequence[int]) -> ForkSet:
    """Pairs (f(a), g(a)) for f, g in C^[n] agreeing on every c <lex a."""
    a = tuple(int(x) for x in a)
    n = len(a)
    if n > C.bound:
        raise AlgebraError(f"word length {n} exceeds arity bound {C.bound}")
    if a in C._forks:
        return ForkSet(a, C._forks[a])
    rows = C.rows(n)
    r = rank(a, C.t)
    if len(rows) == 0:
        return ForkSet(a, frozenset())
    # columns are in rank order, so "all c <lex a" is the prefix rows[:, :r]
    if r == 0:
        groups = np.zeros(len(rows), dtype=np.int64)
    else:
        _, groups = np.unique(_keys(rows[:, :r], C.target.size), return_inverse=True)
    vals = rows[:, r].astype(np.int64)
    buckets: dict[int, set[int]] = {}
    for g, v in set(zip(groups.ravel().tolist(), vals.tolist())):
        buckets.setdefault(g, set()).add(v)
    pairs = set()
    for vs in buckets.values():
        pairs.update(itertools.product(vs, repeat=2))
    C._forks[a] = frozenset(pairs)
    return ForkSet(a, C._forks[a])


def fork_table(C: Clonoid, L: int) -> dict[tuple[int, ...], frozenset]:
    return {w: phi_forks(C, w).pairs for w in words_up_to(C.t, L)}


def psi(C: Clonoid, alpha: Iterable[tuple[int, int]], L: int) -> frozenset:
    """Words of length <= L whose fork set lies inside alpha."""
    if L > C.bound:
        raise AlgebraError(f"length bound {L} exceeds arity bound {C.bound}")
    alpha = frozenset(alpha)
    return frozenset(w for w in words_up_to(C.t, L) if phi_forks(C, w).pairs <= alpha)


def all_relations(size: int):
    """Every binary relation on {0..size-1}, indexed by bitmask over pairs in rank order."""
    pairs = list(itertools.product(range(size), repeat=2))
    for mask in range(1 << len(pairs)):
        yield frozenset(p for i, p in enumerate(pairs) if mask >> i & 1)


# ---------------------------------------------------------------- comparison

@dataclass(frozen=True)
class CriterionVerdict:
    status: str  # "holds", "fails", "holds-up-to-bound"
    witness: tuple | None = None
    marker: str = EXACT

    @property
    def holds(self) -> bool:
        return self.status != "fails"


def _check_bounds(C: Clonoid, D: Clonoid, k: int, L: int):
    if C.t != D.t or C.target != D.target:
        raise AlgebraError("clonoids differ in source set or target algebra")
    if k < 2:
        raise AlgebraError("edge arity must be at least 2")
    low = C.t ** (k - 1)
    if min(C.bound, D.bound) < low:
        raise AlgebraError(f"arity bound must reach t^(k-1) = {low}")
    if L > min(C.bound, D.bound):
        raise AlgebraError(f"word length bound {L} exceeds arity bound")
    return low


def _low_layer_witness(C: Clonoid, D: Clonoid, low: int):
    rows = C.rows(low)
    inside = D.contains_rows(low, rows)
    if not np.all(inside):
        f = tuple(int(v) for v in rows[int(np.argmin(inside))])
        return ("layer", low, f)
    return None


def _seeds_inside(C: Clonoid, D: Clonoid) -> bool:
    if C.seeds is None:
        return False
    for s in C.seeds:
        if s.arity > D.bound:
            return False
        if not D.contains_rows(s.arity, np.asarray([s.table], dtype=np.uint8))[0]:
            return False
    return True


def clonoid_leq_criterion(C: Clonoid, D: Clonoid, k: int, L: int) -> CriterionVerdict:
    """Low layer inclusion at arity t^(k-1) and per-word fork inclusion up to length L.

    Per-word inclusion ΦX(C,a) ⊆ ΦX(D,a) for every a is equivalent to
    Ψ(D,α) ⊆ Ψ(C,α) for every α: take α = ΦX(D,a) in one direction; in the other,
    ΦX(D,a) ⊆ α forces ΦX(C,a) ⊆ α.
    """
    low = _check_bounds(C, D, k, L)
    w = _low_layer_witness(C, D, low)
    if w is not None:
        return CriterionVerdict("fails", w)
    for a in words_up_to(C.t, L):
        fc, fd = phi_forks(C, a).pairs, phi_forks(D, a).pairs
        if not fc <= fd:
            return CriterionVerdict("fails", ("word", a, min(fc - fd)))
    if _seeds_inside(C, D):
        # every seed of C lies in D, so C ⊆ D and the criterion holds for all words
        return CriterionVerdict("holds")
    return CriterionVerdict("holds-up-to-bound", marker=UP_TO_BOUND)


def clonoid_leq_criterion_all_alpha(C: Clonoid, D: Clonoid, k: int, L: int) -> bool:
    """Same criterion with the quantifier over all relations α spelled out."""
    low = _check_bounds(C, D, k, L)
    if _low_layer_witness(C, D, low) is not None:
        return False
    fc = fork_table(C, L)
    fd = fork_table(D, L)
    for alpha in all_relations(C.target.size):
        psi_d = {w for w, p in fd.items() if p <= alpha}
        psi_c = {w for w, p in fc.items() if p <= alpha}
        if not psi_d <= psi_c:
            return False
    return True


@dataclass(frozen=True)
class ClonoidKey:
    low_layer: frozenset
    psi_sets: tuple


def clonoid_key(C: Clonoid, k: int, L: int) -> ClonoidKey:
    """Low layer plus Ψ(C, α) for every α, truncated at word length L."""
    low = C.t ** (k - 1)
    forks = fork_table(C, L)
    psis = tuple(frozenset(w for w, p in forks.items() if p <= alpha)
                 for alpha in all_relations(C.target.size))
    return ClonoidKey(C.layer(low), psis)


# ---------------------------------------------------------------- equational theories

def _paired_projections(a: FiniteAlgebra, b: FiniteAlgebra, n: int):
    ga, gb = all_tuples(a.size, n), all_tuples(b.size, n)
    return [(tuple(int(v) for v in ga[:, i]), tuple(int(v) for v in gb[:, i])) for i in range(n)]


def th_clonoid(a: FiniteAlgebra, b: FiniteAlgebra, n: int, budget: Budget | None = None) -> frozenset:
    """Pairs (s^A, t^A) of n-ary term functions of a with b ⊨ s ≈ t.

    Each pair of value tables stands for the function A^n -> A x A,
    x ↦ (s^A(x), t^A(x)).
    """
    if a.signature != b.signature:
        raise AlgebraError("signature mismatch")
    if n < 1:
        raise AlgebraError("arity must be at least 1")
    G = sg_pairs(a, a.size**n, b, b.size**n, _paired_projections(a, b, n), budget=budget)
    fibers: dict[bytes, set[tuple]] = {}
    for left, right in zip(G.left_rows, G.right_rows):
        fibers.setdefault(right.astype(np.uint8).tobytes(), set()).add(tuple(int(v) for v in left))
    out = set()
    for fib in fibers.values():
        out.update(itertools.product(fib, repeat=2))
    return frozenset(out)


def th_as_clonoid(a: FiniteAlgebra, b: FiniteAlgebra, N: int, budget: Budget | None = None) -> Clonoid:
    """Th_A(Var(b)) up to arity N as a clonoid with target A x A."""
    target = direct_product(a, a)
    layers = {}
    for n in range(1, N + 1):
        layers[n] = [tuple(x * a.size + y for x, y in zip(u, v)) for u, v in th_clonoid(a, b, n, budget)]
    return Clonoid.from_layers(target, a.size, layers)


@dataclass(frozen=True)
class GaloisVerdict:
    status: str  # "agreement", "consistent up to bound", "discrepancy"
    member: bool
    inclusions: tuple
    witness: tuple | None = None
    marker: str = EXACT


def galois_check(a: FiniteAlgebra, b1: FiniteAlgebra, b2: FiniteAlgebra, n_max: int = 2,
                 budget: Budget | None = None) -> GaloisVerdict:
    """Compare Var(b1) ⊆ Var(b2) with Th(Var(b2)) ⊆ Th(Var(b1)) at arities <= n_max."""
    from .variety import var_member

    for b in (b1, b2):
        if not var_member(b, a, budget):
            raise AlgebraError(f"{b.name or 'algebra'} is not in Var({a.name or 'A'})")
    member = var_member(b1, b2, budget)
    inclusions = []
    witness = None
    for n in range(1, n_max + 1):
        th1, th2 = th_clonoid(a, b1, n, budget), th_clonoid(a, b2, n, budget)
        inc = th2 <= th1
        inclusions.append(inc)
        if not inc and witness is None:
            witness = (n, min(th2 - th1))
    if member:
        status = "agreement" if all(inclusions) else "discrepancy"
        return GaloisVerdict(status, True, tuple(inclusions), witness)
    if witness is not None:
        return GaloisVerdict("agreement", False, tuple(inclusions), witness)
    return GaloisVerdict("consistent up to bound", False, tuple(inclusions), None, UP_TO_BOUND)
