import itertools
import random

import pytest
from hypothesis import given, strategies as st

from ucaw.algebra import AlgebraError
from ucaw.words import (
    UpSet,
    Word,
    brute_force_witnesses,
    fo,
    is_antichain,
    is_witness,
    lea,
    lea_witness,
    lex_lt,
    max_antichain_size,
    tab,
    tab_apply,
    upset_contains,
    upset_insert,
    words_up_to,
)


def test_lex_examples():
    assert lex_lt((0, 0, 1), (0, 1, 0))
    assert not lex_lt((1, 0), (1, 0))
    assert not lex_lt((1, 0), (0, 1))
    with pytest.raises(AlgebraError):
        lex_lt((0,), (0, 1))


def test_fo_examples():
    assert fo((1, 0, 1), 0) == 2
    assert fo((1, 1), 0) == 0
    assert fo((0, 1), 0) == 1


def test_word_validation():
    with pytest.raises(AlgebraError):
        Word.of([0, 2], 2)
    with pytest.raises(AlgebraError):
        Word.of([], 2)
    assert Word.parse("0 1 1", 2).letters == (0, 1, 1)


def test_lea_examples():
    assert lea_witness((0, 1), (0, 0, 1)).h == (1, 3)
    assert lea_witness((0, 1), (1, 0, 1)) is None
    assert lea_witness((1, 0, 1), (1, 0, 1)).h == (1, 2, 3)
    with pytest.raises(AlgebraError):
        lea(Word.of([0], 2), Word.of([0], 3))


def test_tab_examples():
    assert tab((0, 1), (0, 1, 1), lea_witness((0, 1), (0, 1, 1))) == (1, 2, 2)
    w = lea_witness((0, 1), (0, 0, 1))
    assert tab((0, 1), (0, 0, 1), w) == (1, 1, 2)
    assert tab((2, 0), (2, 0), lea_witness((2, 0), (2, 0))) == (1, 2)
    with pytest.raises(AlgebraError):
        tab((0, 1), (0, 0, 1), type(w)((2, 3)))


def test_tab_apply_examples():
    assert tab_apply((0, 1), (1, 2, 2)) == (0, 1, 1)
    assert tab_apply((0, 0), (1, 2, 2)) == (0, 0, 0)
    assert tab_apply((1, 1), (1, 2, 2, 1)) == (1, 1, 1, 1)
    with pytest.raises(AlgebraError):
        tab_apply((0,), (1, 2), m=2)


def test_lea_agrees_with_bruteforce_short():
    ws = list(words_up_to(2, 5))
    for a, b in itertools.product(ws, repeat=2):
        w = lea_witness(a, b)
        oracle = brute_force_witnesses(a, b)
        assert (w is not None) == bool(oracle)
        if w is not None:
            assert w in oracle


@given(st.lists(st.integers(0, 2), min_size=1, max_size=8),
       st.lists(st.integers(0, 2), min_size=1, max_size=8),
       st.lists(st.integers(0, 2), min_size=1, max_size=8))
def test_partial_order_axioms(a, b, c):
    a, b, c = tuple(a), tuple(b), tuple(c)
    assert lea(a, a)
    if lea(a, b) and lea(b, a):
        assert a == b
    if lea(a, b) and lea(b, c):
        assert lea(a, c)


@given(st.lists(st.integers(0, 2), min_size=1, max_size=7), st.data())
def test_tab_pullback(b, data):
    b = tuple(b)
    # any subsequence keeping all first occurrences is below b
    firsts = {fo(b, x) for x in set(b)}
    keep = sorted(firsts | set(data.draw(st.sets(st.integers(1, len(b))))))
    a = tuple(b[j - 1] for j in keep)
    w = lea_witness(a, b)
    assert w is not None and is_witness(a, b, w.h)
    tb = tab(a, b, w)
    assert tab_apply(a, tb) == b
    c = tuple(data.draw(st.lists(st.integers(0, 2), min_size=len(a), max_size=len(a))))
    if lex_lt(c, a):
        assert lex_lt(tab_apply(c, tb), b)


def test_antichain_examples():
    assert is_antichain([(0, 1), (1, 0)])
    U = upset_insert(upset_insert(UpSet(2), (0, 1)), (0, 0, 1))
    assert U.basis == ((0, 1),)
    assert not upset_contains(U, (1, 0))
    assert (0, 1, 1) in U


def test_upset_insert_minimalizes():
    U = upset_insert(UpSet(2), (0, 0, 1))
    U = upset_insert(U, (0, 1))
    assert U.basis == ((0, 1),)
    with pytest.raises(AlgebraError):
        upset_insert(U, (2,))


@given(st.lists(st.lists(st.integers(0, 1), min_size=1, max_size=5), max_size=8),
       st.lists(st.integers(0, 1), min_size=1, max_size=6))
def test_upset_membership_is_basis_generated(ws, probe):
    U = UpSet(2)
    for w in ws:
        U = upset_insert(U, tuple(w))
    assert is_antichain(U.basis)
    assert upset_contains(U, tuple(probe)) == any(lea(tuple(w), tuple(probe)) for w in ws)


# width of (words of length <= L, ≤_A) for t = 2, computed once by the matching oracle
WIDTHS = {1: 2, 2: 4, 3: 8, 4: 16}


def test_width_small_frozen():
    for L, wdt in WIDTHS.items():
        assert max_antichain_size(list(words_up_to(2, L))) == wdt


def test_random_antichains_bounded_by_width():
    universe = list(words_up_to(2, 6))
    width = max_antichain_size(universe)
    assert width == 64
    rng = random.Random(7)
    for _ in range(50):
        chosen = []
        for w in rng.sample(universe, len(universe)):
            if all(not lea(w, v) and not lea(v, w) for v in chosen):
                chosen.append(w)
        assert is_antichain(chosen) and len(chosen) <= width
