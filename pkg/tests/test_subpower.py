import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ucaw.algebra import AlgebraError, Budget, BudgetExceeded, eval_term
from ucaw.subpower import enumerate_subpowers, fg_equal, fork, is_closed, proj, sg, sg_pairs
from ucaw.zoo import bare_set, cyclic_group, lattice2, trivial_group


def naive_closure(alg, m, gens):
    """Fixed-point iteration over Python sets; the reference for sg."""
    S = {tuple(g) for g in gens}
    S |= {(c,) * m for c in alg.constants}
    while True:
        new = set()
        for op in alg.operations:
            if op.arity == 0:
                continue
            for args in itertools.product(sorted(S), repeat=op.arity):
                new.add(tuple(alg.value(op.symbol, *(a[j] for a in args)) for j in range(m)))
        if new <= S:
            return S
        S |= new


def test_sg_examples(z2):
    assert sg(z2, 2, [(0, 1)]).as_set() == {(0, 0), (0, 1)}
    assert len(sg(z2, 2, [(0, 1), (1, 0)])) == 4
    full = list(itertools.product(range(2), repeat=2))
    assert sg(lattice2(), 2, full).as_set() == set(full)


def test_sg_empty_without_constants():
    F = sg(lattice2(), 2, [])
    assert F.empty and len(F) == 0


def test_sg_empty_gens_with_constants(z4):
    F = sg(z4, 3, [])
    assert not F.empty and F.as_set() == {(0, 0, 0)}


def test_sg_errors(z2):
    with pytest.raises(AlgebraError):
        sg(z2, 0, [])
    with pytest.raises(AlgebraError):
        sg(z2, 2, [(0, 2)])


def test_budget_exceeded(z4):
    with pytest.raises(BudgetExceeded):
        sg(z4, 4, [(0, 1, 2, 3), (1, 1, 0, 2)], budget=Budget(max_tuples=5))


@st.composite
def instances(draw):
    alg = draw(st.sampled_from([cyclic_group(2), cyclic_group(3), cyclic_group(4), lattice2(), bare_set(3)]))
    m = draw(st.integers(1, 3))
    gens = draw(st.lists(st.tuples(*[st.integers(0, alg.size - 1)] * m), max_size=3))
    return alg, m, gens


@given(instances())
def test_sg_matches_naive_closure(inst):
    alg, m, gens = inst
    F = sg(alg, m, gens)
    assert F.as_set() == naive_closure(alg, m, gens)
    assert is_closed(alg, m, F.tuples)
    assert list(F.ranks()) == sorted(F.ranks())


@given(instances())
def test_provenance_reproduces_tuples(inst):
    alg, m, gens = inst
    F = sg(alg, m, gens, with_provenance=True)
    g = F.generators
    for tup, term in zip(F.tuples, F.terms()):
        assert tuple(eval_term(alg, term, [x[j] for x in g]) for j in range(m)) == tup


@given(instances(), st.data())
def test_sg_idempotent_and_monotone(inst, data):
    alg, m, gens = inst
    F = sg(alg, m, gens)
    assert sg(alg, m, F.tuples) == F
    extra = data.draw(st.lists(st.tuples(*[st.integers(0, alg.size - 1)] * m), max_size=2))
    G = sg(alg, m, gens + extra)
    assert F.issubset(G)
    for i in range(1, m + 1):
        assert fork(F, i).pairs <= fork(G, i).pairs


def test_fork_examples(z2):
    F = sg(z2, 2, [(1, 1)])
    assert F.as_set() == {(0, 0), (1, 1)}
    assert fork(F, 1).pairs == set(itertools.product(range(2), repeat=2))
    assert fork(F, 2).pairs == {(0, 0), (1, 1)}
    single = sg(z2, 2, [])
    assert all(fork(single, i).pairs == {(0, 0)} for i in (1, 2))
    with pytest.raises(AlgebraError):
        fork(F, 3)


def brute_fork(S, i):
    return {(a[i - 1], b[i - 1]) for a in S for b in S if a[: i - 1] == b[: i - 1]}


@given(instances())
def test_fork_matches_definition(inst):
    alg, m, gens = inst
    F = sg(alg, m, gens)
    for i in range(1, m + 1):
        assert fork(F, i).pairs == brute_fork(F.as_set(), i)


def test_proj_examples(z2):
    diag = sg(z2, 2, [(1, 1)])
    assert proj(diag, [1]) == {(0,), (1,)}
    assert proj(sg(z2, 2, [(0, 1)]), [1]) == {(0,)}
    full = sg(z2, 2, [(0, 1), (1, 0)])
    assert proj(full, [1, 2]) == full.as_set()
    with pytest.raises(AlgebraError):
        proj(full, [3])


def test_fg_equal_examples(z2):
    diag = sg(z2, 2, [(1, 1)])
    full = sg(z2, 2, [(0, 1), (1, 0)])
    assert not fg_equal(diag, full, 2)
    assert fg_equal(full, full, 2)
    with pytest.raises(AlgebraError):
        fg_equal(full, diag, 2)


def test_enumerate_subpowers_examples(z2):
    assert sorted(map(sorted, enumerate_subpowers(z2, 1))) == [[(0,)], [(0,), (1,)]]
    # frozen from the exhaustive filter: {00}, {00,01}, {00,10}, {00,11}, all four
    subs = enumerate_subpowers(z2, 2)
    assert len(subs) == 5
    assert frozenset({(0, 0), (1, 1)}) in subs
    assert len(enumerate_subpowers(trivial_group(), 3)) == 1
    with pytest.raises(BudgetExceeded):
        enumerate_subpowers(cyclic_group(4), 3, limit=1000)


def test_enumerate_subpowers_complete(z3):
    subs = set(enumerate_subpowers(z3, 2))
    for gens in itertools.combinations(itertools.product(range(3), repeat=2), 2):
        assert sg(z3, 2, gens).as_set() in subs
    assert all(is_closed(z3, 2, s) for s in subs)


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3), st.integers(0, 1)), min_size=1, max_size=3))
def test_fg_oracle_z4(gens):
    z4 = cyclic_group(4)
    G = sg(z4, 3, [g[:2] + (g[0],) for g in gens] + [(1, 0, 1)])
    F = sg(z4, 3, [g[:2] + (g[0],) for g in gens[:1]])
    assert fg_equal(F, G, 2) == (F == G)


def test_sg_pairs_is_tagged_closure(z2, z4):
    P = sg_pairs(z4, 1, z2, 1, [((1,), (1,))], with_provenance=True)
    assert len(P) == 4
    left = P.left_rows[:, 0].tolist()
    right = P.right_rows[:, 0].tolist()
    assert all(r == l % 2 for l, r in zip(left, right))
    assert str(P.term_at(0)) == "e"
