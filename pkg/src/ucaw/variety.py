"""Identities, free algebras and membership in finitely generated varieties.

Free algebras are realized inside A^(A^k): element = k-ary term function,
stored as its value table in rank order of the argument tuples.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .algebra import (
    AlgebraError,
    Budget,
    BudgetExceeded,
    FiniteAlgebra,
    Operation,
    all_tuples,
    direct_product,
    term_table,
    term_variables,
)
from .subpower import Subpower, sg, sg_pairs, subpower_algebra

MAX_FREE_WIDTH = 1 << 12


@dataclass(frozen=True)
class Identity:
    lhs: object
    rhs: object
    nvars: int

    def __post_init__(self):
        used = term_variables(self.lhs) | term_variables(self.rhs)
        if used and max(used) > self.nvars:
            raise AlgebraError(f"identity uses x{max(used)} but declares {self.nvars} variables")

    def __str__(self):
        return f"{self.lhs} ≈ {self.rhs}"


def satisfies(alg: FiniteAlgebra, ident: Identity) -> bool:
    return term_table(alg, ident.lhs, ident.nvars) == term_table(alg, ident.rhs, ident.nvars)


# ---------------------------------------------------------------- free algebras

def projection_vectors(size: int, k: int) -> list[tuple[int, ...]]:
    grid = all_tuples(size, k)
    return [tuple(int(v) for v in grid[:, i]) for i in range(k)]


@dataclass
class FreeAlgebra:
    base: FiniteAlgebra
    k: int
    carrier: Subpower

    def __len__(self):
        return len(self.carrier)

    @property
    def terms(self) -> list:
        return self.carrier.terms()

    @property
    def generator_indices(self) -> list[int]:
        return [self.carrier.index(p) for p in projection_vectors(self.base.size, self.k)]

    def algebra(self) -> FiniteAlgebra:
        if not hasattr(self, "_alg"):
            self._alg = subpower_algebra(self.carrier, name=f"F({self.base.name or 'A'},{self.k})")
        return self._alg


def free_algebra(alg: FiniteAlgebra, k: int, budget: Budget | None = None,
                 max_width: int = MAX_FREE_WIDTH) -> FreeAlgebra:
    width = alg.size**k
    if width > max_width:
        raise BudgetExceeded(f"free algebra on {k} generators needs width {width} > {max_width}")
    gens = projection_vectors(alg.size, k)
    carrier = sg(alg, width, gens, with_provenance=True, budget=budget)
    return FreeAlgebra(alg, k, carrier)


def clone_size(alg: FiniteAlgebra, arity: int, budget: Budget | None = None) -> int:
    return len(free_algebra(alg, arity, budget))


# ---------------------------------------------------------------- generators

def generating_set(alg: FiniteAlgebra, budget: Budget | None = None) -> tuple[int, ...]:
    """A smallest generating subset (first in lexicographic order of subsets)."""
    for k in range(0, alg.size + 1):
        for combo in itertools.combinations(range(alg.size), k):
            S = sg(alg, 1, [(c,) for c in combo], budget=budget)
            if len(S) == alg.size:
                return combo
    raise AssertionError("the whole universe always generates")


def min_generators(alg: FiniteAlgebra, budget: Budget | None = None) -> int:
    return len(generating_set(alg, budget))


# ---------------------------------------------------------------- membership

@dataclass(frozen=True)
class MembershipResult:
    member: bool
    k: int
    generators: tuple
    identity: Identity | None = None
    subalgebra_size: int = 0


def var_member_witness(b: FiniteAlgebra, a: FiniteAlgebra, budget: Budget | None = None,
                       max_width: int = MAX_FREE_WIDTH) -> MembershipResult:
    """Decide b ∈ Var(a) with a failing identity as witness when not.

    With b generated by b_1..b_k, the subuniverse of A^(A^k) x B generated by
    (x_i, b_i) is the graph of a map F(k) -> B iff b lies in Var(a).
    """
    if a.signature != b.signature:
        raise AlgebraError("signature mismatch")
    gens = generating_set(b, budget)
    k = len(gens)
    width = a.size**k
    if width > max_width:
        raise BudgetExceeded(f"membership test needs width {width} > {max_width}")
    proj = projection_vectors(a.size, k)
    G = sg_pairs(a, width, b, 1, [(proj[i], (gens[i],)) for i in range(k)],
                 with_provenance=True, budget=budget)
    left = G.left_rows
    right = G.right_rows[:, 0]
    # rows are in rank order, so equal left parts are adjacent
    same = np.all(left[1:] == left[:-1], axis=1) & (right[1:] != right[:-1])
    if same.any():
        i = int(np.argmax(same))
        ident = Identity(G.term_at(i), G.term_at(i + 1), k)
        return MembershipResult(False, k, gens, ident, len(G))
    return MembershipResult(True, k, gens, None, len(G))


def var_member(b: FiniteAlgebra, a: FiniteAlgebra, budget: Budget | None = None) -> bool:
    """True iff b lies in the variety generated by a."""
    return var_member_witness(b, a, budget).member


# ---------------------------------------------------------------- congruences

@dataclass(frozen=True)
class CongruencePartition:
    labels: tuple[int, ...]  # block index per element; blocks numbered by first element

    @property
    def nblocks(self) -> int:
        return max(self.labels) + 1 if self.labels else 0

    @property
    def blocks(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.nblocks)]
        for x, b in enumerate(self.labels):
            out[b].append(x)
        return out

    def related(self, x: int, y: int) -> bool:
        return self.labels[x] == self.labels[y]

    def refines(self, other: "CongruencePartition") -> bool:
        """self ⊆ other as equivalence relations."""
        image: dict[int, int] = {}
        for a, b in zip(self.labels, other.labels):
            if image.setdefault(a, b) != b:
                return False
        return True


def _canonical_labels(parent: list[int]) -> tuple[int, ...]:
    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    seen: dict[int, int] = {}
    out = []
    for x in range(len(parent)):
        out.append(seen.setdefault(find(x), len(seen)))
    return tuple(out)


def is_compatible(alg: FiniteAlgebra, labels) -> bool:
    lab = np.asarray(labels, dtype=np.int64)
    nb = int(lab.max()) + 1 if len(lab) else 0
    for si, op in enumerate(alg.operations):
        if op.arity == 0:
            continue
        grid = all_tuples(alg.size, op.arity)
        res = lab[alg.arrays[si]]
        key = np.zeros(len(grid), dtype=np.int64)
        for p in range(op.arity):
            key = key * nb + lab[grid[:, p]]
        order = np.argsort(key, kind="stable")
        k, r = key[order], res[order]
        if np.any((k[1:] == k[:-1]) & (r[1:] != r[:-1])):
            return False
    return True


def congruence_generate(alg: FiniteAlgebra, pairs) -> CongruencePartition:
    """Smallest congruence containing ``pairs`` (union-find plus translation closure)."""
    n = alg.size
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    queue = []

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)
            queue.append((x, y))

    for x, y in pairs:
        union(int(x), int(y))
    tables = [(si, op.arity, alg.arrays[si].reshape((n,) * op.arity))
              for si, op in enumerate(alg.operations) if op.arity > 0]
    while queue:
        x, y = queue.pop()
        for si, r, tab in tables:
            for p in range(r):
                ux = np.take(tab, x, axis=p).ravel()
                uy = np.take(tab, y, axis=p).ravel()
                for u, v in set(zip(ux.tolist(), uy.tolist())):
                    if u != v:
                        union(u, v)
    part = CongruencePartition(_canonical_labels(parent))
    if not is_compatible(alg, part.labels):
        raise AssertionError("generated partition is not a congruence")
    return part


def quotient(alg: FiniteAlgebra, theta: CongruencePartition, name: str | None = None) -> FiniteAlgebra:
    lab = theta.labels
    reps = [blk[0] for blk in theta.blocks]
    ops = []
    for op in alg.operations:
        if op.arity == 0:
            ops.append(Operation(op.symbol, 0, (lab[op.table[0]],)))
            continue
        tab = []
        for args in itertools.product(reps, repeat=op.arity):
            r = 0
            for a in args:
                r = r * alg.size + a
            tab.append(lab[op.table[r]])
        ops.append(Operation(op.symbol, op.arity, tuple(tab)))
    return FiniteAlgebra(theta.nblocks, tuple(ops), name)


def rel_free_congruence(a: FiniteAlgebra, m: int, identities, budget: Budget | None = None,
                        free: FreeAlgebra | None = None):
    """Free algebra F(m) of Var(a) and the congruence generated by all substitution
    instances of ``identities``."""
    F = free if free is not None else free_algebra(a, m, budget)
    FA = F.algebra()
    pairs = set()
    for ident in identities:
        lt = term_table(FA, ident.lhs, ident.nvars)
        rt = term_table(FA, ident.rhs, ident.nvars)
        pairs.update((x, y) for x, y in zip(lt, rt) if x != y)
    return F, congruence_generate(FA, sorted(pairs))


def rel_free_quotient(a: FiniteAlgebra, m: int, identities, budget: Budget | None = None) -> FiniteAlgebra:
    F, theta = rel_free_congruence(a, m, identities, budget)
    return quotient(F.algebra(), theta)


# ---------------------------------------------------------------- subcovers

@dataclass
class SubcoverClass:
    identity: Identity
    identities: list = field(default_factory=list)
    quotient_sizes: tuple = ()
    bound: int = 0
    marker: str = "maximal up to bound"


def subcovers(a: FiniteAlgebra, m_bound: int = 2, budget: Budget | None = None) -> list[SubcoverClass]:
    """Candidate subcovers Var(a) ∩ Mod(s ≈ t), s, t distinct k-ary term functions,
    grouped and ordered by their relatively free algebras on up to m_bound generators."""
    k = min_generators(a, budget)
    Fk = free_algebra(a, k, budget)
    R = Fk.terms
    frees = {m: free_algebra(a, m, budget) for m in range(1, m_bound + 1)}
    classes: dict[tuple, SubcoverClass] = {}
    thetas: dict[tuple, list] = {}
    for i, j in itertools.combinations(range(len(R)), 2):
        ident = Identity(R[i], R[j], k)
        prints = []
        for m in range(1, m_bound + 1):
            _, theta = rel_free_congruence(a, m, [ident], budget, free=frees[m])
            prints.append(theta)
        key = tuple(t.labels for t in prints)
        if key not in classes:
            classes[key] = SubcoverClass(ident, [], tuple(t.nblocks for t in prints), m_bound)
            thetas[key] = prints
        classes[key].identities.append(ident)

    def below(k1, k2):
        # W(k1) ⊆ W(k2): every congruence of k2 refines the one of k1
        return all(t2.refines(t1) for t1, t2 in zip(thetas[k1], thetas[k2]))

    keys = list(classes)
    return [classes[c] for c in keys
            if not any(d != c and below(c, d) for d in keys)]


# ---------------------------------------------------------------- members & criticality

def canonical_form(alg: FiniteAlgebra) -> tuple:
    """Lexicographically least table sequence over all relabelings of the universe."""
    n = alg.size
    best = None
    grids = {op.arity: all_tuples(n, op.arity) for op in alg.operations}
    for perm in itertools.permutations(range(n)):
        p = np.array(perm, dtype=np.int64)
        inv = np.argsort(p)
        cand = []
        for si, op in enumerate(alg.operations):
            if op.arity == 0:
                cand.append((int(p[op.table[0]]),))
                continue
            # new table at args g is p(old table at p^-1(g))
            g = grids[op.arity]
            old_idx = np.zeros(len(g), dtype=np.int64)
            for j in range(op.arity):
                old_idx = old_idx * n + inv[g[:, j]]
            cand.append(tuple(int(v) for v in p[alg.arrays[si][old_idx]]))
        cand = tuple(cand)
        if best is None or cand < best:
            best = cand
    return best


def algebra_from_canonical(signature, size: int, form: tuple, name=None) -> FiniteAlgebra:
    ops = tuple(Operation(sym, r, tuple(tab)) for (sym, r), tab in zip(signature.symbols, form))
    return FiniteAlgebra(size, ops, name)


def _labeled_members(a: FiniteAlgebra, s: int, budget: Budget | None):
    """All algebras B on {0..s-1} in Var(a), each found once as the image of
    F(s) under x_i -> i.  Backtracks over table entries of B; compatibility with
    the operations of F(s) propagates forced values."""
    F = free_algebra(a, s, budget)
    FA = F.algebra()
    N = len(F)
    gens = F.generator_indices
    if len(set(gens)) < s:
        return [] if s > 1 else [tuple((0,) for _ in a.operations)]
    disc = F.carrier._rank_to_disc
    rank_of_disc = np.empty(N, dtype=np.int64)
    rank_of_disc[disc] = np.arange(N)
    prov = F.carrier._provenance
    apps = []
    for si, op in enumerate(FA.operations):
        r = op.arity
        if r == 0:
            apps.append((si, 0, None, np.array([op.table[0]]), None))
            continue
        grid = all_tuples(N, r)
        weights = np.array([s ** (r - 1 - j) for j in range(r)], dtype=np.int64)
        apps.append((si, r, grid, FA.arrays[si], weights))

    phi0 = np.full(N, -1, dtype=np.int64)
    for i, g in enumerate(gens):
        phi0[g] = i
    tabs0 = [np.full(s**op.arity, -1, dtype=np.int64) for op in FA.operations]
    order = [int(rank_of_disc[d]) for d in range(N)]  # discovery order as rank positions

    def propagate(phi, tabs) -> bool:
        changed = True
        while changed:
            changed = False
            for si, r, grid, res, weights in apps:
                tab = tabs[si]
                if r == 0:
                    w = int(res[0])
                    tv, wv = tab[0], phi[w]
                    if tv < 0 and wv >= 0:
                        tab[0] = wv
                        changed = True
                    elif tv >= 0 and wv < 0:
                        phi[w] = tv
                        changed = True
                    elif tv >= 0 and tv != wv:
                        return False
                    continue
                P = phi[grid]
                ok = np.all(P >= 0, axis=1)
                if not ok.any():
                    continue
                keys = P[ok] @ weights
                w = res[ok]
                tv = tab[keys]
                wv = phi[w]
                if np.any((tv >= 0) & (wv >= 0) & (tv != wv)):
                    return False
                m1 = (tv >= 0) & (wv < 0)
                if m1.any():
                    phi[w[m1]] = tv[m1]
                    changed = True
                m2 = (tv < 0) & (wv >= 0)
                if m2.any():
                    tab[keys[m2]] = wv[m2]
                    changed = True
        return True

    found = []
    stack = [(phi0, tabs0)]
    while stack:
        phi, tabs = stack.pop()
        if budget is not None:
            budget.charge(N)
        if not propagate(phi, tabs):
            continue
        undefined = np.flatnonzero(phi < 0)
        if len(undefined) == 0:
            if any(np.any(t < 0) for t in tabs):
                raise AssertionError("surjective image left a table entry undefined")
            found.append(tuple(tuple(int(v) for v in t) for t in tabs))
            continue
        und = set(undefined.tolist())
        pos = next(p for p in order if p in und)
        entry = prov[int(disc[pos])]
        if entry[0] == "const":
            si, key = entry[1], 0
        else:
            _, si, args = entry
            key = 0
            for d in args:
                key = key * s + int(phi[rank_of_disc[d]])
        for v in range(s - 1, -1, -1):
            nphi = phi.copy()
            ntabs = [t.copy() for t in tabs]
            ntabs[si][key] = v
            stack.append((nphi, ntabs))
    return found


def enumerate_members(a: FiniteAlgebra, s: int, budget: Budget | None = None) -> list[FiniteAlgebra]:
    """All s-element algebras in Var(a), one per isomorphism class (canonical tables)."""
    if s < 1:
        raise AlgebraError("size must be positive")
    forms = set()
    for tables in _labeled_members(a, s, budget):
        alg = FiniteAlgebra(s, tuple(Operation(op.symbol, op.arity, t)
                                     for op, t in zip(a.operations, tables)))
        forms.add(canonical_form(alg))
    base = a.name or "A"
    return [algebra_from_canonical(a.signature, s, f, name=f"{base}:member{s}.{i}")
            for i, f in enumerate(sorted(forms))]


def enumerate_members_bruteforce(a: FiniteAlgebra, s: int, max_tables: int = 10**5) -> list[FiniteAlgebra]:
    """Oracle: filter every s-element algebra of a's signature through var_member."""
    choices = [list(itertools.product(range(s), repeat=s**op.arity)) for op in a.operations]
    total = 1
    for c in choices:
        total *= len(c)
    if total > max_tables:
        raise BudgetExceeded(f"{total} candidate algebras exceed {max_tables}")
    forms = set()
    for tabs in itertools.product(*choices):
        alg = FiniteAlgebra(s, tuple(Operation(op.symbol, op.arity, t)
                                     for op, t in zip(a.operations, tabs)))
        form = canonical_form(alg)
        if form in forms:
            continue
        if var_member(alg, a):
            forms.add(form)
    return [algebra_from_canonical(a.signature, s, f) for f in sorted(forms)]


@dataclass(frozen=True)
class CriticalityReport:
    critical: bool
    smaller_members: tuple = ()
    generators_used: tuple = ()
    product_size: int = 0
    identity: Identity | None = None
    convention: bool = False


def cardinality_criticality(b: FiniteAlgebra, budget: Budget | None = None) -> CriticalityReport:
    if b.size == 1:
        return CriticalityReport(True, convention=True)
    members = []
    for s in range(1, b.size):
        members.extend(enumerate_members(b, s, budget))
    # drop members whose variety is already covered by another member
    keep = []
    for i, c in enumerate(members):
        if any(j != i and (d.size > c.size or (d.size == c.size and j < i)) and var_member(c, d, budget)
               for j, d in enumerate(members)):
            continue
        keep.append(c)
    prod = direct_product(*keep)
    res = var_member_witness(b, prod, budget)
    return CriticalityReport(not res.member, tuple(members), tuple(keep), prod.size, res.identity)


def is_cardinality_critical(b: FiniteAlgebra, budget: Budget | None = None) -> bool:
    return cardinality_criticality(b, budget).critical


def critical_members(a: FiniteAlgebra, max_size: int | None = None,
                     budget: Budget | None = None) -> list[FiniteAlgebra]:
    """Cardinality critical members of Var(a) up to ``max_size`` (default |a|), one per isomorphism type."""
    max_size = a.size if max_size is None else max_size
    out = []
    for s in range(1, max_size + 1):
        out.extend(m for m in enumerate_members(a, s, budget) if is_cardinality_critical(m, budget))
    return out


def regenerated_by_criticals(a: FiniteAlgebra, budget: Budget | None = None) -> tuple[bool, list[FiniteAlgebra]]:
    """Whether Var(a) equals the variety of the product of its critical members of size <= |a|."""
    crit = critical_members(a, budget=budget)
    prod = direct_product(*crit)
    return var_member(a, prod, budget) and var_member(prod, a, budget), crit
