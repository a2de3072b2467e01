"""Subuniverses of finite powers A^m: generation, forks, projections.

Tuples are kept as uint8 rows.  Sorting and searching use a key per row that
orders exactly like its rank: the row packed into a uint64 when it fits,
otherwise the raw bytes.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .algebra import (
    AlgebraError,
    App,
    Budget,
    BudgetExceeded,
    FiniteAlgebra,
    Var,
    all_tuples,
    rank,
    tagged_union,
)

_CHUNK_CELLS = 1 << 21


def _keys(rows: np.ndarray, base: int = 256) -> np.ndarray:
    """Rank-ordered keys; callers comparing keys must pass the same base."""
    rows = np.ascontiguousarray(rows, dtype=np.uint8)
    width = rows.shape[1]
    if width == 0:
        return np.zeros(len(rows), dtype="V1")
    bits = max(1, (base - 1).bit_length())
    if bits * width <= 64:
        key = np.zeros(len(rows), dtype=np.uint64)
        shift = np.uint64(bits)
        for j in range(width):
            key <<= shift
            key |= rows[:, j]
        return key
    return rows.view(np.dtype((np.void, width))).ravel()


def _member(sorted_keys: np.ndarray, keys: np.ndarray) -> np.ndarray:
    if len(sorted_keys) == 0:
        return np.zeros(len(keys), dtype=bool)
    pos = np.searchsorted(sorted_keys, keys)
    pos[pos == len(sorted_keys)] = 0
    return sorted_keys[pos] == keys


@dataclass(frozen=True)
class ForkRelation:
    place: int
    pairs: frozenset

    def __contains__(self, pair):
        return pair in self.pairs

    def __len__(self):
        return len(self.pairs)


class Subpower:
    """A generated subuniverse of base^width.

    ``rows`` holds the tuples in rank order.  When generated with provenance,
    ``term(t)`` returns the first-found witness term over x1..x_g, g = number of
    generators, that produces ``t`` coordinatewise.
    """

    def __init__(self, base: FiniteAlgebra, width: int, disc_rows: np.ndarray,
                 generators: Sequence[tuple], provenance=None, empty: bool = False):
        self.base = base
        self.width = width
        self.generators = tuple(tuple(int(v) for v in g) for g in generators)
        self.empty = empty
        self._disc_rows = disc_rows
        keys = _keys(disc_rows, base.size)
        order = np.argsort(keys, kind="stable")
        self.rows = disc_rows[order]
        self._keys = keys[order]
        self._rank_to_disc = order
        self._provenance = provenance
        self._terms = None

    # -- set interface
    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.tuples)

    def __contains__(self, tup) -> bool:
        return bool(self.contains_rows(np.asarray([tup]))[0])

    def contains_rows(self, rows: np.ndarray) -> np.ndarray:
        rows = np.asarray(rows)
        if rows.ndim != 2 or rows.shape[1] != self.width:
            raise AlgebraError("row width mismatch")
        if rows.size and (rows.min() < 0 or rows.max() >= 256):
            return np.zeros(len(rows), dtype=bool)
        return _member(self._keys, _keys(rows, self.base.size))

    def index(self, tup) -> int:
        """Position of ``tup`` in rank order."""
        key = _keys(np.asarray([tup]), self.base.size)
        pos = int(np.searchsorted(self._keys, key)[0])
        if pos >= len(self._keys) or self._keys[pos] != key[0]:
            raise KeyError(tup)
        return pos

    def index_rows(self, rows: np.ndarray) -> np.ndarray:
        keys = _keys(rows, self.base.size)
        pos = np.searchsorted(self._keys, keys)
        pos[pos == len(self._keys)] = 0
        if not np.all(self._keys[pos] == keys):
            raise KeyError("row not in subpower")
        return pos

    @property
    def tuples(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(int(v) for v in r) for r in self.rows)

    def as_set(self) -> frozenset:
        return frozenset(self.tuples)

    def ranks(self) -> list[int]:
        return [rank(t, self.base.size) for t in self.tuples]

    def issubset(self, other: "Subpower") -> bool:
        return len(self) <= len(other) and bool(np.all(other.contains_rows(self.rows)))

    def __eq__(self, other):
        if not isinstance(other, Subpower):
            return NotImplemented
        return self.width == other.width and len(self) == len(other) and bool(np.all(self._keys == other._keys))

    def __hash__(self):
        return hash((self.width, self._keys.tobytes()))

    def __repr__(self):
        return f"<Subpower of {self.base.name or 'algebra'}^{self.width}: {len(self)} tuples>"

    # -- provenance
    @property
    def has_provenance(self) -> bool:
        return self._provenance is not None

    def _build_terms(self):
        if self._provenance is None:
            raise AlgebraError("subpower was generated without provenance")
        if self._terms is None:
            sig = self.base.signature.symbols
            terms = []
            for entry in self._provenance:
                kind = entry[0]
                if kind == "gen":
                    terms.append(Var(entry[1] + 1))
                elif kind == "const":
                    terms.append(App(sig[entry[1]][0], ()))
                else:
                    _, si, args = entry
                    terms.append(App(sig[si][0], tuple(terms[a] for a in args)))
            self._terms = terms
        return self._terms

    def term(self, tup):
        pos = self.index(tup)
        return self._build_terms()[int(self._rank_to_disc[pos])]

    def term_at(self, pos: int):
        """Witness term of the tuple at rank position ``pos``."""
        return self._build_terms()[int(self._rank_to_disc[pos])]

    def terms(self) -> list:
        built = self._build_terms()
        return [built[int(d)] for d in self._rank_to_disc]


# ---------------------------------------------------------------- closure

def _close(alg: FiniteAlgebra, start_rows: np.ndarray, start_prov: list, with_provenance: bool,
           budget: Budget | None):
    """FIFO worklist closure: each round applies every operation to all argument
    combinations with at least one argument from the previous round."""
    n = alg.size
    if n > 256:
        raise AlgebraError("closure engine supports algebras of size <= 256")
    m = start_rows.shape[1]
    rows = np.ascontiguousarray(start_rows, dtype=np.uint8)
    prov = list(start_prov) if with_provenance else None
    known = np.sort(_keys(rows, n))
    ops = [(si, op.arity) for si, op in enumerate(alg.operations) if op.arity > 0]
    tables = alg.arrays
    old, cur = 0, len(rows)
    while cur > old:
        big = rows.astype(np.int32)
        scaled = {}
        for _, r in ops:
            if r not in scaled:
                scaled[r] = [big * n ** (r - 1 - j) for j in range(r)]
        pend_keys, pend_rows, pend_args = [], [], []
        for si, r in ops:
            table = tables[si]
            for p in range(r):
                sizes = [old] * p + [cur - old] + [cur] * (r - p - 1)
                starts = [0] * p + [old] + [0] * (r - p - 1)
                total = int(np.prod(sizes, dtype=object))
                if total == 0:
                    continue
                if budget is not None:
                    budget.charge(total)
                step = max(1, _CHUNK_CELLS // max(1, m * r))
                for lo in range(0, total, step):
                    q = np.arange(lo, min(total, lo + step), dtype=np.int64)
                    args = np.empty((len(q), r), dtype=np.int64)
                    rem = q
                    for j in range(r - 1, -1, -1):
                        rem, d = np.divmod(rem, sizes[j])
                        args[:, j] = d + starts[j]
                    sc = scaled[r]
                    idx = sc[0][args[:, 0]]
                    for j in range(1, r):
                        idx += sc[j][args[:, j]]
                    res = np.ascontiguousarray(table[idx], dtype=np.uint8)
                    keys = _keys(res, n)
                    uniq, first = np.unique(keys, return_index=True)
                    fresh = ~_member(known, uniq)
                    if not fresh.any():
                        continue
                    first = np.sort(first[fresh])
                    pend_keys.append(keys[first])
                    pend_rows.append(res[first])
                    if with_provenance:
                        pend_args.append((si, args[first]))
        if not pend_keys:
            break
        all_keys = np.concatenate(pend_keys)
        uniq, first = np.unique(all_keys, return_index=True)
        new_rows = np.concatenate(pend_rows)[first]
        if with_provenance:
            flat = []
            for si, a in pend_args:
                flat.extend((si, tuple(int(v) for v in row)) for row in a)
            for f in first:
                si, a = flat[int(f)]
                prov.append(("op", si, a))
        rows = np.concatenate([rows, new_rows])
        known = np.sort(np.concatenate([known, uniq]))
        old, cur = cur, len(rows)
    return rows, prov


def _start(gens_rows: np.ndarray, const_rows: list[tuple[int, np.ndarray]]):
    rows, prov, seen = [], [], set()
    for j, g in enumerate(gens_rows):
        key = g.tobytes()
        if key in seen:
            continue
        seen.add(key)
        rows.append(g)
        prov.append(("gen", j))
    for si, c in const_rows:
        key = c.tobytes()
        if key in seen:
            continue
        seen.add(key)
        rows.append(c)
        prov.append(("const", si))
    return rows, prov


def sg(alg: FiniteAlgebra, m: int, gens: Iterable[Sequence[int]], with_provenance: bool = False,
       budget: Budget | None = None) -> Subpower:
    """Subuniverse of alg^m generated by ``gens``."""
    if m < 1:
        raise AlgebraError("width must be at least 1")
    gens = [tuple(int(v) for v in g) for g in gens]
    for g in gens:
        if len(g) != m:
            raise AlgebraError(f"generator {g} does not have width {m}")
        if any(not 0 <= v < alg.size for v in g):
            raise AlgebraError(f"generator {g} has entries outside 0..{alg.size - 1}")
    gens_rows = np.array(gens, dtype=np.uint8).reshape(len(gens), m)
    consts = [(si, np.full(m, op.table[0], dtype=np.uint8))
              for si, op in enumerate(alg.operations) if op.arity == 0]
    return _generate(alg, m, gens, gens_rows, consts, with_provenance, budget)


def _generate(alg, m, gens, gens_rows, consts, with_provenance, budget):
    rows, prov = _start(gens_rows, consts)
    if not rows:
        return Subpower(alg, m, np.zeros((0, m), dtype=np.uint8), gens,
                        [] if with_provenance else None, empty=True)
    rows, prov = _close(alg, np.array(rows, dtype=np.uint8), prov, with_provenance, budget)
    return Subpower(alg, m, rows, gens, prov)


def sg_pairs(left: FiniteAlgebra, p: int, right: FiniteAlgebra, q: int,
             gens: Iterable[tuple[Sequence[int], Sequence[int]]], with_provenance: bool = False,
             budget: Budget | None = None) -> "PairedSubpower":
    """Subuniverse of left^p x right^q generated by pairs ``(u, v)``."""
    if left.signature != right.signature:
        raise AlgebraError("signature mismatch")
    union = tagged_union(left, right)
    gens = [(tuple(u), tuple(v)) for u, v in gens]
    flat = [tuple(u) + tuple(x + left.size for x in v) for u, v in gens]
    gens_rows = np.array(flat, dtype=np.uint8).reshape(len(flat), p + q)
    consts = []
    for si, op in enumerate(left.operations):
        if op.arity == 0:
            c = np.array([op.table[0]] * p + [right.operations[si].table[0] + left.size] * q, dtype=np.uint8)
            consts.append((si, c))
    sub = _generate(union, p + q, flat, gens_rows, consts, with_provenance, budget)
    return PairedSubpower(sub, left, p, right, q)


class PairedSubpower:
    """View of a subuniverse of A^p x B^q with the two components split apart."""

    def __init__(self, sub: Subpower, left: FiniteAlgebra, p: int, right: FiniteAlgebra, q: int):
        self.sub = sub
        self.left, self.p, self.right, self.q = left, p, right, q
        rows = sub.rows.astype(np.int64)
        self.left_rows = rows[:, :p]
        self.right_rows = rows[:, p:] - left.size

    def __len__(self):
        return len(self.sub)

    def term_at(self, pos: int):
        return self.sub.term_at(pos)


# ---------------------------------------------------------------- invariants

def fork(F: Subpower, i: int) -> ForkRelation:
    if not 1 <= i <= F.width:
        raise AlgebraError(f"place {i} out of range 1..{F.width}")
    groups: dict[bytes, set[int]] = {}
    for row in F.rows:
        groups.setdefault(row[: i - 1].tobytes(), set()).add(int(row[i - 1]))
    pairs = set()
    for vals in groups.values():
        pairs.update(itertools.product(vals, repeat=2))
    return ForkRelation(i, frozenset(pairs))


def proj(F: Subpower, T: Iterable[int]) -> frozenset:
    T = sorted(set(T))
    if not T:
        raise AlgebraError("projection needs a nonempty index set")
    if T[0] < 1 or T[-1] > F.width:
        raise AlgebraError(f"index set {T} out of range 1..{F.width}")
    cols = [t - 1 for t in T]
    return frozenset(tuple(int(v) for v in r) for r in F.rows[:, cols])


def fg_equal(F: Subpower, G: Subpower, k: int) -> bool:
    """Compare forks at every place and projections onto fewer than k coordinates.

    For F ⊆ G over an algebra with a k-edge term, equal invariants force F = G.
    """
    if F.width != G.width:
        raise AlgebraError("width mismatch")
    if F.base != G.base:
        raise AlgebraError("subpowers over different algebras")
    if not F.issubset(G):
        raise AlgebraError("first subpower is not contained in the second")
    if (len(F) == 0) != (len(G) == 0):
        return False
    for i in range(1, F.width + 1):
        if fork(F, i) != fork(G, i):
            return False
    for size in range(1, min(k - 1, F.width) + 1):
        for T in itertools.combinations(range(1, F.width + 1), size):
            if proj(F, T) != proj(G, T):
                return False
    return True


def is_closed(alg: FiniteAlgebra, m: int, tuples: Iterable[Sequence[int]]) -> bool:
    """One closure pass: every operation applied to members lands in the set."""
    rows = np.array([tuple(t) for t in tuples], dtype=np.int64).reshape(-1, m)
    keys = np.sort(_keys(rows.astype(np.uint8))) if len(rows) else np.zeros(0, dtype="V1")
    for si, op in enumerate(alg.operations):
        if op.arity == 0:
            c = np.full((1, m), op.table[0], dtype=np.uint8)
            if not _member(keys, _keys(c))[0]:
                return False
            continue
        if len(rows) == 0:
            continue
        for combo in itertools.product(range(len(rows)), repeat=op.arity):
            res = alg.apply(si, [rows[c] for c in combo]).astype(np.uint8)[None, :]
            if not _member(keys, _keys(res))[0]:
                return False
    return True


def enumerate_subpowers(alg: FiniteAlgebra, m: int, limit: int = 1 << 16) -> list[frozenset]:
    """Every subuniverse of alg^m, by filtering all subsets (brute force)."""
    universe = [tuple(int(v) for v in r) for r in all_tuples(alg.size, m)]
    count = 1 << len(universe)
    if count > limit:
        raise BudgetExceeded(f"{count} subsets exceed the limit of {limit}")
    pos = {t: i for i, t in enumerate(universe)}
    # result index of every operation application, by argument positions
    apps = []
    grid = np.array(universe, dtype=np.int64)
    for si, op in enumerate(alg.operations):
        if op.arity == 0:
            apps.append((0, pos[(op.table[0],) * m], None))
            continue
        combos = list(itertools.product(range(len(universe)), repeat=op.arity))
        res = alg.apply(si, [grid[[c[j] for c in combos]] for j in range(op.arity)])
        targets = [pos[tuple(int(v) for v in r)] for r in res]
        apps.append((op.arity, combos, targets))
    out = []
    for mask in range(count):
        ok = True
        for arity, combos, targets in apps:
            if arity == 0:
                if not mask >> combos & 1:
                    ok = False
                    break
                continue
            for c, t in zip(combos, targets):
                if all(mask >> a & 1 for a in c) and not mask >> t & 1:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(frozenset(universe[i] for i in range(len(universe)) if mask >> i & 1))
    return out


def subpower_algebra(F: Subpower, name: str | None = None) -> FiniteAlgebra:
    """F as an algebra on 0..|F|-1 (elements numbered in rank order)."""
    from .algebra import Operation

    N = len(F)
    if N == 0:
        raise AlgebraError("empty subpower has no algebra structure")
    big = F.rows.astype(np.int64)
    ops = []
    for si, op in enumerate(F.base.operations):
        if op.arity == 0:
            c = np.full((1, F.width), op.table[0], dtype=np.uint8)
            ops.append(Operation(op.symbol, 0, (int(F.index_rows(c)[0]),)))
            continue
        r = op.arity
        total = N**r
        out = np.empty(total, dtype=np.int64)
        step = max(1, _CHUNK_CELLS // max(1, F.width * r))
        for lo in range(0, total, step):
            q = np.arange(lo, min(total, lo + step), dtype=np.int64)
            idx = np.zeros((len(q), F.width), dtype=np.int64)
            rem = q
            digits = []
            for _ in range(r):
                rem, d = np.divmod(rem, N)
                digits.append(d)
            for d in reversed(digits):
                idx = idx * F.base.size + big[d]
            res = F.base.arrays[si][idx]
            out[lo:lo + len(q)] = F.index_rows(res)
        ops.append(Operation(op.symbol, r, tuple(int(v) for v in out)))
    return FiniteAlgebra(N, tuple(ops), name)
