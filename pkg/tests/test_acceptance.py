"""Acceptance criteria 1-9, each timed against its limit.

Run with pytest (lines appear in the terminal summary) or directly as a script.
"""
import itertools
import random
import subprocess
import sys
import time
from contextlib import contextmanager
from pathlib import Path

from ucaw.algebra import term_table
from ucaw.clonoid import clonoid_leq_criterion, galois_check, generate_clonoid, phi_forks, psi, all_relations
from ucaw.maltsev import has_edge_term
from ucaw.subpower import fg_equal, sg
from ucaw.variety import is_cardinality_critical, regenerated_by_criticals, subcovers, var_member
from ucaw.words import is_witness, lea, lea_witness, lex_lt, tab, tab_apply, words_up_to
from ucaw.zoo import bare_set, cyclic_group, klein_group, lattice2, trivial_group

from test_maltsev import edge_by_identities

DATA = Path(__file__).resolve().parent.parent / "data"
RESULTS: dict[int, tuple[bool, float, float, str]] = {}
Z2, Z4 = cyclic_group(2), cyclic_group(4)


@contextmanager
def criterion(num: int, limit: float, title: str):
    t0 = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        dt = time.perf_counter() - t0
        RESULTS[num] = (ok and dt < limit, dt, limit, title)
    assert dt < limit, f"criterion {num} took {dt:.1f}s, limit {limit}s"


def report_lines() -> list[str]:
    return [f"ACCEPTANCE {n}: {'PASS' if ok else 'FAIL'}  {title}  ({dt:.2f}s, limit {lim:g}s)"
            for n, (ok, dt, lim, title) in sorted(RESULTS.items())]


# 1 ----------------------------------------------------------------

def test_edge_term_detection():
    with criterion(1, 5, "edge-term detection"):
        t = has_edge_term(Z2, 2)
        assert t is not None and edge_by_identities(Z2, term_table(Z2, t, 3), 2)
        lat = lattice2()
        assert has_edge_term(lat, 2) is None
        t3 = has_edge_term(lat, 3)
        assert t3 is not None and edge_by_identities(lat, term_table(lat, t3, 4), 3)
        s2 = bare_set(2)
        assert all(has_edge_term(s2, k) is None for k in (2, 3, 4))


# 2 ----------------------------------------------------------------

def test_fg_oracle():
    with criterion(2, 30, "fork criterion oracle, 1000 nested pairs"):
        rng = random.Random(20240501)
        violations = equal = 0
        for _ in range(1000):
            alg = rng.choice([Z2, Z4])
            m = rng.randint(1, 4)
            rand = lambda: tuple(rng.randrange(alg.size) for _ in range(m))
            G = sg(alg, m, [rand() for _ in range(rng.randint(1, 3))])
            sample = rng.sample(G.tuples, min(len(G), rng.randint(0, 3)))
            F = sg(alg, m, sample)
            assert F.issubset(G)
            equal += F == G
            if fg_equal(F, G, 2) != (F == G):
                violations += 1
        assert violations == 0
        assert 0 < equal < 1000


# 3 ----------------------------------------------------------------

def _exists_witness(a, b):
    return any(is_witness(a, b, h) for h in itertools.combinations(range(1, len(b) + 1), len(a)))


def test_lea_correctness():
    with criterion(3, 60, "≤_A: exhaustive oracle agreement and order axioms"):
        words = list(words_up_to(2, 7))
        for a in words:
            for b in words:
                w = lea_witness(a, b)
                if w is None:
                    assert not _exists_witness(a, b)
                else:
                    assert is_witness(a, b, w.h)
        rng = random.Random(3)
        rw = lambda: tuple(rng.randrange(3) for _ in range(rng.randint(1, 8)))
        related = 0
        for i in range(10_000):
            if i % 2:
                a, b, c = rw(), rw(), rw()
            else:
                c = rw()
                b = _random_below(rng, c)
                a = _random_below(rng, b)
            assert lea(a, a)
            ab, bc, ba = lea(a, b), lea(b, c), lea(b, a)
            assert ab == _exists_witness(a, b)
            if ab and ba:
                assert a == b
            if ab and bc:
                related += 1
                assert lea(a, c)
        assert related > 1000


def _random_below(rng, b):
    """Random subsequence of b keeping every first occurrence; returns the word."""
    return tuple(b[j - 1] for j in _random_positions(rng, b))


def _random_positions(rng, b):
    firsts = {b.index(x) + 1 for x in set(b)}
    return sorted(firsts | {j for j in range(1, len(b) + 1) if rng.random() < 0.5})


# 4 ----------------------------------------------------------------

def test_tab_pullback():
    with criterion(4, 10, "Tab pullback, 10^4 instances"):
        rng = random.Random(4)
        done = 0
        while done < 10_000:
            b = tuple(rng.randrange(3) for _ in range(rng.randint(1, 8)))
            h = _random_positions(rng, b)
            a = tuple(b[j - 1] for j in h)
            if all(x == 0 for x in a):
                continue
            assert is_witness(a, b, h)
            i = rng.choice([p for p, x in enumerate(a) if x > 0])
            c = a[:i] + (rng.randrange(a[i]),) + tuple(rng.randrange(3) for _ in a[i + 1:])
            assert lex_lt(c, a)
            tb = tab(a, b, type(lea_witness(a, a))(tuple(h)))
            assert tab_apply(a, tb) == b
            assert lex_lt(tab_apply(c, tb), b)
            done += 1


# 5 ----------------------------------------------------------------

def _check_fork_order(C, L):
    words = list(words_up_to(2, L))
    forks = {w: phi_forks(C, w).pairs for w in words}
    above = {a: [b for b in words if lea(a, b)] for a in words}
    for a in words:
        for b in above[a]:
            assert forks[b] <= forks[a], (a, b)
    for alpha in all_relations(2):
        P = {w for w in words if forks[w] <= alpha}
        assert P == psi(C, alpha, L)
        for a in P:
            assert all(b in P for b in above[a])


def test_fork_order():
    with criterion(5, 60, "fork antitonicity and upward-closed Ψ"):
        unary = [(1, t) for t in itertools.product((0, 1), repeat=2)]
        binary = [(2, t) for t in itertools.product((0, 1), repeat=4)]
        ternary = [(3, t) for t in itertools.product((0, 1), repeat=8)]
        # bound 3, every single seed of arity <= 3
        for s in unary + binary + ternary:
            _check_fork_order(generate_clonoid(Z2, 2, [s], 3), 3)
        # words of length 4 need layer 4; seeds of arity <= 2 keep it small
        low = unary + binary
        seed_sets = [[s] for s in low] + [list(p) for p in itertools.combinations(low, 2)][::7]
        for seeds in seed_sets:
            _check_fork_order(generate_clonoid(Z2, 2, seeds, 4), 4)


# 6 ----------------------------------------------------------------

def _layer_included(C, D):
    return all(C.layer_subset(D, n) for n in range(1, C.bound + 1))


def _witness_valid(C, D, w):
    if w[0] == "layer":
        return w[2] in C.layer(w[1]) and w[2] not in D.layer(w[1])
    _, a, pair = w
    return pair in phi_forks(C, a).pairs and pair not in phi_forks(D, a).pairs


def test_cd_criterion():
    with criterion(6, 120, "clonoid comparison criterion"):
        rng = random.Random(6)
        pool = ([(1, t) for t in itertools.product((0, 1), repeat=2)]
                + [(2, t) for t in itertools.product((0, 1), repeat=4)])
        cache = {}

        def gen(seeds):
            key = tuple(sorted(seeds))
            if key not in cache:
                cache[key] = generate_clonoid(Z2, 2, list(key), 3)
            return cache[key]

        nested = 0
        while nested < 100:
            big = rng.sample(pool, rng.randint(1, 2))
            small = rng.sample(big, rng.randint(0, len(big)))
            C, D = gen(small), gen(big)
            assert clonoid_leq_criterion(C, D, 2, 3).status == "holds"
            v = clonoid_leq_criterion(D, C, 2, 3)
            # bounded converse: a non-failing verdict must come with inclusion
            assert v.holds == _layer_included(D, C)
            nested += 1
        incomparable = 0
        while incomparable < 100:
            s1 = rng.sample(pool, rng.randint(1, 2))
            s2 = rng.sample(pool, rng.randint(1, 2))
            C, D = gen(s1), gen(s2)
            if _layer_included(C, D) or _layer_included(D, C):
                continue
            for X, Y in ((C, D), (D, C)):
                v = clonoid_leq_criterion(X, Y, 2, 3)
                assert v.status == "fails" and _witness_valid(X, Y, v.witness)
            incomparable += 1


# 7 ----------------------------------------------------------------

def test_variety_pipeline():
    with criterion(7, 60, "variety membership, subcovers, criticality"):
        triv = trivial_group()
        assert var_member(triv, Z2) and var_member(Z2, Z4)
        assert not var_member(Z2, triv) and not var_member(Z4, Z2)
        (c,) = subcovers(Z4)
        assert c.quotient_sizes[0] == 2
        assert is_cardinality_critical(Z4)
        assert not is_cardinality_critical(klein_group())
        ok, _ = regenerated_by_criticals(Z4)
        assert ok


# 8 ----------------------------------------------------------------

def test_galois():
    with criterion(8, 30, "Th-inclusion agrees with membership"):
        algs = [trivial_group(), Z2, Z4]
        for b1, b2 in itertools.product(algs, repeat=2):
            v = galois_check(Z4, b1, b2, 2)
            assert v.status == "agreement", (b1.name, b2.name, v)


# 9 ----------------------------------------------------------------

CLI_COMMANDS = [
    ["edge-term", "z2group.alg", "--k", "2"],
    ["edge-term", "lattice2.alg", "--min", "--kmax", "4"],
    ["member", "z3.alg", "--in", "z4.alg"],
    ["wpo", "lea", "0 1", "1 0 1", "--t", "2"],
    ["wpo", "tab", "0 1", "0 0 1", "--t", "2", "--apply", "0 0"],
    ["forks", "z2.alg", "--power", "2", "--gens", "1 1"],
    ["free", "z4.alg", "--gens", "2", "--list"],
    ["subcovers", "z4.alg", "--bound", "2"],
    ["critical", "z2xz2.alg"],
    ["clonoid", "gen", "seeds/affine_z2.json", "--bound", "3"],
    ["clonoid", "forks", "seeds/affine_z2.json", "--word", "0 1"],
    ["clonoid", "leq", "seeds/affine_z2.json", "seeds/constants_z2.json", "--k", "2", "--len", "3"],
    ["clonoid", "th", "z4.alg", "z2.alg", "--arity", "1"],
    ["clonoid", "galois", "z4.alg", "z4.alg", "z2.alg", "--arity", "2"],
]


def test_cli_determinism():
    with criterion(9, 120, "CLI output is byte-identical across runs"):
        for argv in CLI_COMMANDS:
            outs = [subprocess.run([sys.executable, "-m", "ucaw.cli", *argv], cwd=DATA,
                                   capture_output=True, check=True).stdout for _ in range(2)]
            assert outs[0] and outs[0] == outs[1], argv


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            try:
                fn()
            except AssertionError:
                pass
    print("\n".join(report_lines()))
