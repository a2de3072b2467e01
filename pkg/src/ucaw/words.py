"""Words over a finite alphabet: lexicographic order, the first-occurrence
embedding order ≤_A, Tab maps, and finitely generated up-sets.

Positions are 1-based throughout; a first-occurrence index of 0 means absent.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

from .algebra import AlgebraError


@dataclass(frozen=True)
class Word:
    t: int
    letters: tuple[int, ...]

    def __post_init__(self):
        if not self.letters:
            raise AlgebraError("words are nonempty")
        for a in self.letters:
            if not 0 <= a < self.t:
                raise AlgebraError(f"letter {a} outside alphabet 0..{self.t - 1}")

    @classmethod
    def of(cls, letters: Iterable[int], t: int) -> "Word":
        return cls(t, tuple(int(a) for a in letters))

    @classmethod
    def parse(cls, text: str, t: int) -> "Word":
        return cls.of(text.split(), t)

    def __len__(self):
        return len(self.letters)

    def __getitem__(self, i):
        return self.letters[i]

    def __str__(self):
        return " ".join(map(str, self.letters))


def _letters(w) -> tuple[int, ...]:
    return w.letters if isinstance(w, Word) else tuple(w)


def lex_lt(a, b) -> bool:
    a, b = _letters(a), _letters(b)
    if len(a) != len(b):
        raise AlgebraError("lexicographic comparison needs equal lengths")
    for x, y in zip(a, b):
        if x != y:
            return x < y
    return False


def fo(a, letter: int) -> int:
    for i, x in enumerate(_letters(a), start=1):
        if x == letter:
            return i
    return 0


@dataclass(frozen=True)
class Witness:
    h: tuple[int, ...]  # h[i-1] = image of position i


def _check_alphabets(a, b):
    if isinstance(a, Word) and isinstance(b, Word) and a.t != b.t:
        raise AlgebraError("alphabet mismatch")


def is_witness(a, b, h: Sequence[int]) -> bool:
    """The three conditions on h for a ≤_A b, checked literally."""
    a, b = _letters(a), _letters(b)
    m, n = len(a), len(b)
    if len(h) != m or any(not 1 <= x <= n for x in h):
        return False
    if any(h[i] >= h[i + 1] for i in range(m - 1)):
        return False
    if any(a[i] != b[h[i] - 1] for i in range(m)):
        return False
    if set(a) != set(b):
        return False
    return all(h[fo(a, c) - 1] == fo(b, c) for c in set(a))


def lea_witness(a, b) -> Witness | None:
    """Witness for a ≤_A b, or None.

    First occurrences are forced anchors; other positions take the leftmost
    matching letter after the previous image.  Such a position repeats an
    earlier letter, so its matches in b are never first occurrences and the
    greedy choice cannot steal an anchor.
    """
    _check_alphabets(a, b)
    a, b = _letters(a), _letters(b)
    if set(a) != set(b) or len(a) > len(b):
        return None
    first_b = {c: fo(b, c) for c in set(b)}
    h = []
    prev = 0
    seen = set()
    for x in a:
        if x not in seen:
            seen.add(x)
            j = first_b[x]
            if j <= prev:
                return None
        else:
            j = prev + 1
            while j <= len(b) and b[j - 1] != x:
                j += 1
            if j > len(b):
                return None
        h.append(j)
        prev = j
    return Witness(tuple(h))


def lea(a, b) -> bool:
    return lea_witness(a, b) is not None


def brute_force_witnesses(a, b) -> list[Witness]:
    """Every map satisfying the definition, by enumerating increasing injections."""
    a, b = _letters(a), _letters(b)
    return [Witness(tuple(h)) for h in itertools.combinations(range(1, len(b) + 1), len(a))
            if is_witness(a, b, h)]


def tab(a, b, w: Witness) -> tuple[int, ...]:
    """Tab: {1..n} -> {1..m}; inverse of h on its range, else the least i with a_i = b_j."""
    a, b = _letters(a), _letters(b)
    if not is_witness(a, b, w.h):
        raise AlgebraError("h does not witness a ≤_A b")
    inverse = {j: i for i, j in enumerate(w.h, start=1)}
    return tuple(inverse[j] if j in inverse else fo(a, b[j - 1]) for j in range(1, len(b) + 1))


def tab_apply(x: Sequence[int], tabmap: Sequence[int], m: int | None = None) -> tuple[int, ...]:
    x = _letters(x)
    if m is not None and len(x) != m:
        raise AlgebraError(f"expected a sequence of length {m}")
    if any(not 1 <= j <= len(x) for j in tabmap):
        raise AlgebraError("Tab refers past the end of the sequence")
    return tuple(x[j - 1] for j in tabmap)


def words_up_to(t: int, max_len: int, min_len: int = 1):
    for n in range(min_len, max_len + 1):
        for w in itertools.product(range(t), repeat=n):
            yield w


# ---------------------------------------------------------------- up-sets

def is_antichain(words) -> bool:
    ws = [_letters(w) for w in words]
    for u, v in itertools.permutations(range(len(ws)), 2):
        if ws[u] != ws[v] and lea(ws[u], ws[v]):
            return False
    return True


@dataclass(frozen=True)
class UpSet:
    t: int
    basis: tuple[tuple[int, ...], ...] = ()

    def __contains__(self, w) -> bool:
        return upset_contains(self, w)


def upset_contains(U: UpSet, w) -> bool:
    if isinstance(w, Word) and w.t != U.t:
        raise AlgebraError("alphabet mismatch")
    w = _letters(w)
    return any(lea(g, w) for g in U.basis)


def upset_insert(U: UpSet, w) -> UpSet:
    if isinstance(w, Word) and w.t != U.t:
        raise AlgebraError("alphabet mismatch")
    w = _letters(w)
    if any(x >= U.t for x in w):
        raise AlgebraError("letter outside alphabet")
    if upset_contains(U, w):
        return U
    kept = tuple(g for g in U.basis if not lea(w, g))
    return UpSet(U.t, tuple(sorted(kept + (w,), key=lambda g: (len(g), g))))


def max_antichain_size(words) -> int:
    """Width of the finite poset (words, ≤_A), via Dilworth and bipartite matching."""
    import networkx as nx

    ws = [_letters(w) for w in words]
    g = nx.DiGraph()
    left = [("L", i) for i in range(len(ws))]
    g.add_nodes_from(left)
    g.add_nodes_from(("R", i) for i in range(len(ws)))
    for i, j in itertools.permutations(range(len(ws)), 2):
        if lea(ws[i], ws[j]):
            g.add_edge(("L", i), ("R", j))
    matching = nx.bipartite.hopcroft_karp_matching(g.to_undirected(), top_nodes=left)
    return len(ws) - len(matching) // 2
