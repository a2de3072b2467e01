import itertools

import pytest

from ucaw.algebra import AlgebraError, FiniteAlgebra, Var, parse_term, term_table
from ucaw.maltsev import (
    edge_instance,
    has_edge_term,
    has_malcev_term,
    has_nu_term,
    is_edge_term,
    is_malcev_term,
    is_nu_term,
    min_edge_arity,
    nu_instance,
)
from ucaw.variety import free_algebra
from ucaw.zoo import bare_set, chain_semilattice, cyclic_group, lattice2, unary_algebra


def edge_by_identities(alg, table, k):
    """k-edge identities for an explicit (k+1)-ary table."""
    n = alg.size

    def f(*args):
        r = 0
        for a in args:
            r = r * n + a
        return table[r]

    for x, y in itertools.product(range(n), repeat=2):
        rows = [(y, y) + (x,) * (k - 1), (y, x, y) + (x,) * (k - 2)]
        rows += [tuple(y if p == i else x for p in range(1, k + 2)) for i in range(4, k + 2)]
        if any(f(*r) != x for r in rows):
            return False
    return True


def test_instance_shape():
    inst = edge_instance(3, 4)
    assert len(inst.generators) == 5
    assert all(len(g) == inst.columns == 9 * 4 for g in inst.generators)
    with pytest.raises(AlgebraError):
        edge_instance(2, 1)
    with pytest.raises(AlgebraError):
        nu_instance(2, 2)


def test_z2_two_edge(z2):
    t = has_edge_term(z2, 2)
    assert t is not None and is_edge_term(z2, t, 2)
    assert edge_by_identities(z2, term_table(z2, t, 3), 2)


def test_lattice_edge_terms(lat):
    assert has_edge_term(lat, 2) is None
    t = has_edge_term(lat, 3)
    assert t is not None and edge_by_identities(lat, term_table(lat, t, 4), 3)


def test_empty_signature_has_no_edge_term(set2):
    for k in (2, 3, 4):
        assert has_edge_term(set2, k) is None
    assert has_nu_term(set2, 3) is None
    assert min_edge_arity(set2, 4) is None


def test_malcev(z4, lat):
    d = has_malcev_term(z4)
    assert d is not None and is_malcev_term(z4, d)
    assert has_malcev_term(lat) is None
    singleton = bare_set(1)
    d1 = has_malcev_term(singleton)
    assert d1 is not None and is_malcev_term(singleton, d1)


def test_group_malcev_formula_is_recognized(z4):
    assert is_malcev_term(z4, parse_term("mul(mul(x1,inv(x2)),x3)"))
    assert not is_malcev_term(z4, Var(1))


def test_majority(lat, z2):
    m = has_nu_term(lat, 3)
    assert m is not None and is_nu_term(lat, m, 3)
    maj = parse_term("join(join(meet(x1,x2),meet(x1,x3)),meet(x2,x3))")
    assert is_nu_term(lat, maj, 3)
    # affine Boolean algebras have no majority term; the search confirms it
    assert has_nu_term(z2, 3) is None


def test_min_edge_arity(z2, lat):
    assert min_edge_arity(z2, 4) == 2
    assert min_edge_arity(lat, 4) == 3
    with pytest.raises(AlgebraError):
        min_edge_arity(z2, 1)


def _small_algebras():
    yield cyclic_group(2)
    yield cyclic_group(3)
    yield lattice2()
    yield chain_semilattice(3)
    yield bare_set(2)
    yield unary_algebra((1, 0))
    yield FiniteAlgebra.from_tables(3, {"m": (2, [0, 2, 1, 2, 1, 0, 1, 0, 2])}, name="quasigroup3")
    yield FiniteAlgebra.from_tables(2, {"nand": (2, [1, 1, 1, 0])}, name="nand")


@pytest.mark.parametrize("alg", list(_small_algebras()), ids=lambda a: a.name)
def test_two_edge_verdict_matches_ternary_clone(alg):
    clone3 = free_algebra(alg, 3).carrier
    expected = any(edge_by_identities(alg, row.tolist(), 2) for row in clone3.rows)
    assert (has_edge_term(alg, 2) is not None) == expected


@pytest.mark.parametrize("alg", [cyclic_group(2), lattice2(), chain_semilattice(2)], ids=lambda a: a.name)
def test_padding_preserves_edge(alg):
    for k in (2, 3):
        t = has_edge_term(alg, k)
        if t is not None:
            # t ignores the extra last variable
            assert is_edge_term(alg, t, k + 1)
            assert has_edge_term(alg, k + 1) is not None
