"""Finite algebras as operation tables, terms, and the tuple-ranking convention.

Elements of an n-element algebra are 0..n-1.  Tuples of width m are ranked
in mixed radix with coordinate 1 most significant, so rank order is exactly
lexicographic order.  Variables are 1-based (x1, x2, ...).
"""
from __future__ import annotations

import itertools
import json
import re
import time
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np


class AlgebraError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


class Budget:
    """Deterministic work counter shared by the closure engines.

    ``max_tuples`` bounds the number of candidate tuples produced; ``max_seconds``
    is an optional wall-clock limit checked cooperatively.
    """

    def __init__(self, max_tuples: int | None = 10**7, max_seconds: float | None = None):
        self.max_tuples = max_tuples
        self.max_seconds = max_seconds
        self.tuples = 0
        self._start = None

    def charge(self, count: int) -> None:
        if self._start is None:
            self._start = time.monotonic()
        self.tuples += int(count)
        if self.max_tuples is not None and self.tuples > self.max_tuples:
            raise BudgetExceeded(f"tuple budget of {self.max_tuples} exceeded")
        if self.max_seconds is not None and time.monotonic() - self._start > self.max_seconds:
            raise BudgetExceeded(f"time budget of {self.max_seconds}s exceeded")


# ---------------------------------------------------------------- ranking

def rank(tup: Sequence[int], base: int) -> int:
    r = 0
    for a in tup:
        if not 0 <= a < base:
            raise AlgebraError(f"entry {a} out of range for base {base}")
        r = r * base + int(a)
    return r


def unrank(r: int, base: int, width: int) -> tuple[int, ...]:
    if not 0 <= r < base**width:
        raise AlgebraError(f"rank {r} out of range for base {base}, width {width}")
    out = [0] * width
    for i in range(width - 1, -1, -1):
        r, out[i] = divmod(r, base)
    return tuple(out)


def all_tuples(base: int, width: int) -> np.ndarray:
    """All tuples of {0..base-1}^width in rank order, as a (base**width, width) array."""
    if width == 0:
        return np.zeros((1, 0), dtype=np.int64)
    grids = np.indices((base,) * width).reshape(width, -1).T
    return np.ascontiguousarray(grids, dtype=np.int64)


# ---------------------------------------------------------------- signature / algebra

@dataclass(frozen=True)
class Signature:
    symbols: tuple[tuple[str, int], ...]

    def __post_init__(self):
        names = [s for s, _ in self.symbols]
        if any(not s for s in names):
            raise AlgebraError("operation symbols must be non-empty")
        if len(set(names)) != len(names):
            dup = next(s for s in names if names.count(s) > 1)
            raise AlgebraError(f"duplicate symbol name {dup!r}")
        for s, r in self.symbols:
            if r < 0:
                raise AlgebraError(f"negative arity for symbol {s!r}")

    def arity(self, symbol: str) -> int:
        for s, r in self.symbols:
            if s == symbol:
                return r
        raise AlgebraError(f"symbol {symbol!r} not in signature")

    def index(self, symbol: str) -> int:
        for i, (s, _) in enumerate(self.symbols):
            if s == symbol:
                return i
        raise AlgebraError(f"symbol {symbol!r} not in signature")

    def __contains__(self, symbol: str) -> bool:
        return any(s == symbol for s, _ in self.symbols)

    def __len__(self):
        return len(self.symbols)


@dataclass(frozen=True)
class Operation:
    symbol: str
    arity: int
    table: tuple[int, ...]  # flat, rank-indexed


@dataclass(frozen=True)
class FiniteAlgebra:
    size: int
    operations: tuple[Operation, ...]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.size < 1:
            raise AlgebraError("algebra size must be at least 1")
        Signature(tuple((op.symbol, op.arity) for op in self.operations))
        for op in self.operations:
            want = self.size**op.arity
            if len(op.table) != want:
                raise AlgebraError(
                    f"table of {op.symbol!r} has length {len(op.table)}, expected {want}")
            for pos, v in enumerate(op.table):
                if not 0 <= v < self.size:
                    where = unrank(pos, self.size, op.arity) if op.arity else ()
                    raise AlgebraError(
                        f"entry {v} of {op.symbol!r} at argument {where} out of range 0..{self.size - 1}")

    @classmethod
    def from_tables(cls, size: int, tables: dict[str, tuple[int, Sequence[int] | int]], name=None):
        """Build from ``{symbol: (arity, table)}``; tables may be flat or nested."""
        ops = []
        for sym, (arity, tab) in tables.items():
            flat = _flatten(tab, arity, sym)
            ops.append(Operation(sym, arity, tuple(int(v) for v in flat)))
        return cls(size, tuple(ops), name)

    @classmethod
    def from_functions(cls, size: int, funcs: Iterable[tuple[str, int, object]], name=None):
        ops = []
        for sym, arity, fn in funcs:
            tab = tuple(int(fn(*args)) for args in itertools.product(range(size), repeat=arity))
            ops.append(Operation(sym, arity, tab))
        return cls(size, tuple(ops), name)

    @cached_property
    def signature(self) -> Signature:
        return Signature(tuple((op.symbol, op.arity) for op in self.operations))

    def op(self, symbol: str) -> Operation:
        return self.operations[self.signature.index(symbol)]

    def value(self, symbol: str, *args: int) -> int:
        op = self.op(symbol)
        if len(args) != op.arity:
            raise AlgebraError(f"symbol {symbol!r} has arity {op.arity}")
        return op.table[rank(args, self.size)] if args else op.table[0]

    @cached_property
    def arrays(self) -> tuple[np.ndarray, ...]:
        """Flat int64 copies of the tables, for vectorized lookups."""
        return tuple(np.asarray(op.table, dtype=np.int64) for op in self.operations)

    def apply(self, symbol_index: int, args: Sequence[np.ndarray]) -> np.ndarray:
        """Apply an operation coordinatewise to equally shaped argument arrays."""
        op = self.operations[symbol_index]
        if op.arity == 0:
            raise AlgebraError("apply() needs arguments; use constants directly")
        idx = np.zeros_like(np.asarray(args[0]), dtype=np.int64)
        for a in args:
            idx = idx * self.size + a
        return self.arrays[symbol_index][idx]

    @property
    def constants(self) -> list[int]:
        return [op.table[0] for op in self.operations if op.arity == 0]

    def __repr__(self):
        label = self.name or "algebra"
        sig = ", ".join(f"{s}/{r}" for s, r in self.signature.symbols)
        return f"<{label}: size {self.size}; {sig}>"


def _flatten(tab, arity: int, sym: str) -> list[int]:
    if arity == 0:
        if isinstance(tab, (list, tuple)):
            if len(tab) != 1:
                raise AlgebraError(f"constant {sym!r} needs exactly one value")
            return [tab[0]]
        return [tab]
    if isinstance(tab, (list, tuple)) and tab and isinstance(tab[0], (list, tuple)):
        out: list[int] = []
        for row in tab:
            out.extend(_flatten(row, arity - 1, sym))
        return out
    return list(tab)


# ---------------------------------------------------------------- file format

def _nest(flat: Sequence[int], size: int, arity: int):
    if arity == 0:
        return flat[0]
    if arity == 1:
        return list(flat)
    step = size ** (arity - 1)
    return [_nest(flat[i * step:(i + 1) * step], size, arity - 1) for i in range(size)]


def _check_nested(tab, size: int, arity: int, sym: str, path=()):
    if arity == 0:
        if isinstance(tab, bool) or not isinstance(tab, int):
            raise AlgebraError(f"symbol {sym!r}: constant must be a bare integer")
        return [tab]
    if not isinstance(tab, list):
        raise AlgebraError(f"symbol {sym!r}: expected a list at position {list(path)}")
    if len(tab) != size:
        raise AlgebraError(
            f"symbol {sym!r}: table length mismatch at position {list(path)}: "
            f"got {len(tab)}, expected {size}")
    out = []
    for i, sub in enumerate(tab):
        if arity == 1:
            if isinstance(sub, bool) or not isinstance(sub, int):
                raise AlgebraError(f"symbol {sym!r}: non-integer entry at position {list(path + (i,))}")
            if not 0 <= sub < size:
                raise AlgebraError(
                    f"symbol {sym!r}: entry {sub} out of range at position {list(path + (i,))}")
            out.append(sub)
        else:
            out.extend(_check_nested(sub, size, arity - 1, sym, path + (i,)))
    return out


def algebra_from_dict(obj: dict) -> FiniteAlgebra:
    if not isinstance(obj, dict):
        raise AlgebraError("algebra must be a JSON object")
    size = obj.get("size")
    if isinstance(size, bool) or not isinstance(size, int) or size < 1:
        raise AlgebraError("field 'size' must be an integer >= 1")
    opers = obj.get("operations", [])
    if not isinstance(opers, list):
        raise AlgebraError("field 'operations' must be a list")
    seen = set()
    ops = []
    for k, entry in enumerate(opers):
        sym = entry.get("symbol")
        arity = entry.get("arity")
        if not isinstance(sym, str) or not sym:
            raise AlgebraError(f"operation {k}: 'symbol' must be a non-empty string")
        if sym in seen:
            raise AlgebraError(f"duplicate symbol name {sym!r} at operation {k}")
        seen.add(sym)
        if isinstance(arity, bool) or not isinstance(arity, int) or arity < 0:
            raise AlgebraError(f"symbol {sym!r}: 'arity' must be an integer >= 0")
        flat = _check_nested(entry.get("table"), size, arity, sym)
        if arity == 0 and not 0 <= flat[0] < size:
            raise AlgebraError(f"symbol {sym!r}: entry {flat[0]} out of range")
        ops.append(Operation(sym, arity, tuple(flat)))
    return FiniteAlgebra(size, tuple(ops), obj.get("name"))


def parse_algebra(text: str) -> FiniteAlgebra:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise AlgebraError(f"malformed algebra file: {exc.msg} at line {exc.lineno} column {exc.colno}") from None
    return algebra_from_dict(obj)


def algebra_to_dict(alg: FiniteAlgebra) -> dict:
    out: dict = {}
    if alg.name is not None:
        out["name"] = alg.name
    out["size"] = alg.size
    out["operations"] = [
        {"symbol": op.symbol, "arity": op.arity, "table": _nest(op.table, alg.size, op.arity)}
        for op in alg.operations
    ]
    return out


def serialize_algebra(alg: FiniteAlgebra) -> str:
    """Canonical text: fixed key order, one operation per line, LF endings."""
    d = algebra_to_dict(alg)
    lines = ["{"]
    if "name" in d:
        lines.append(f'  "name": {json.dumps(d["name"])},')
    lines.append(f'  "size": {d["size"]},')
    if not d["operations"]:
        lines.append('  "operations": []')
    else:
        lines.append('  "operations": [')
        body = [f"    {json.dumps(op)}" for op in d["operations"]]
        lines.append(",\n".join(body))
        lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def load_algebra(path) -> FiniteAlgebra:
    with open(path, encoding="utf-8") as fh:
        return parse_algebra(fh.read())


# ---------------------------------------------------------------- terms

@dataclass(frozen=True, eq=True)
class Var:
    index: int

    def __post_init__(self):
        if self.index < 1:
            raise AlgebraError("variable indices start at 1")

    def __str__(self):
        return f"x{self.index}"


@dataclass(frozen=True, eq=True)
class App:
    symbol: str
    args: tuple = ()

    def __str__(self):
        # iterative to cope with deep provenance terms
        return _term_str(self)


Term = Var | App


def _term_str(t) -> str:
    memo: dict[int, str] = {}
    stack = [(t, False)]
    while stack:
        node, ready = stack.pop()
        if id(node) in memo:
            continue
        if isinstance(node, Var):
            memo[id(node)] = str(node)
            continue
        if not node.args:
            memo[id(node)] = node.symbol
            continue
        if ready:
            memo[id(node)] = f"{node.symbol}({','.join(memo[id(a)] for a in node.args)})"
        else:
            stack.append((node, True))
            stack.extend((a, False) for a in node.args)
    return memo[id(t)]


_TOKEN = re.compile(r"\s*(?:(x(\d+))\b|([A-Za-z_][\w'^*+\-]*)|(\()|(\))|(,))")


def parse_term(text: str, signature: Signature | None = None):
    """Parse prefix notation such as ``mul(x1,inv(x2))``; constants are bare names."""
    pos = 0
    tokens = []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise AlgebraError(f"cannot parse term at {text[pos:]!r}")
        if m.group(1):
            tokens.append(("var", int(m.group(2))))
        elif m.group(3):
            tokens.append(("sym", m.group(3)))
        elif m.group(4):
            tokens.append(("(", None))
        elif m.group(5):
            tokens.append((")", None))
        else:
            tokens.append((",", None))
        pos = m.end()

    def parse(i):
        kind, val = tokens[i]
        if kind == "var":
            return Var(val), i + 1
        if kind != "sym":
            raise AlgebraError(f"unexpected token {kind!r} in term {text!r}")
        if i + 1 < len(tokens) and tokens[i + 1][0] == "(":
            args = []
            j = i + 2
            while True:
                arg, j = parse(j)
                args.append(arg)
                if tokens[j][0] == ",":
                    j += 1
                    continue
                if tokens[j][0] == ")":
                    j += 1
                    break
                raise AlgebraError(f"expected ',' or ')' in term {text!r}")
            t = App(val, tuple(args))
        else:
            t = App(val, ())
            j = i + 1
        if signature is not None and signature.arity(val) != len(t.args):
            raise AlgebraError(f"symbol {val!r} applied to {len(t.args)} arguments")
        return t, j

    try:
        term, end = parse(0)
    except IndexError:
        raise AlgebraError(f"unexpected end of term {text!r}") from None
    if end != len(tokens):
        raise AlgebraError(f"trailing input in term {text!r}")
    return term


def term_variables(t) -> set[int]:
    out: set[int] = set()
    seen: set[int] = set()
    stack = [t]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen.add(id(node))
        if isinstance(node, Var):
            out.add(node.index)
        else:
            stack.extend(node.args)
    return out


def substitute(t, mapping: dict[int, object]):
    """Replace variables by terms; used to permute or pad witness terms."""
    memo: dict[int, object] = {}

    def go(node):
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Var):
            res = mapping.get(node.index, node)
        else:
            res = App(node.symbol, tuple(go(a) for a in node.args))
        memo[key] = res
        return res

    return go(t)


def _eval_vectorized(alg: FiniteAlgebra, t, columns: Sequence[np.ndarray], length: int) -> np.ndarray:
    """Evaluate ``t`` on many assignments at once; ``columns[i]`` holds values of x(i+1)."""
    sig = alg.signature
    memo: dict[int, np.ndarray] = {}
    stack = [(t, False)]
    while stack:
        node, ready = stack.pop()
        key = id(node)
        if key in memo:
            continue
        if isinstance(node, Var):
            if node.index > len(columns):
                raise AlgebraError(f"unbound variable x{node.index}")
            memo[key] = np.asarray(columns[node.index - 1], dtype=np.int64)
            continue
        if node.symbol not in sig:
            raise AlgebraError(f"symbol {node.symbol!r} not in signature")
        si = sig.index(node.symbol)
        arity = sig.symbols[si][1]
        if len(node.args) != arity:
            raise AlgebraError(f"symbol {node.symbol!r} has arity {arity}, got {len(node.args)} arguments")
        if arity == 0:
            memo[key] = np.full(length, alg.operations[si].table[0], dtype=np.int64)
        elif ready:
            memo[key] = alg.apply(si, [memo[id(a)] for a in node.args])
        else:
            stack.append((node, True))
            stack.extend((a, False) for a in node.args)
    return memo[id(t)]


def eval_term(alg: FiniteAlgebra, t, assignment: Sequence[int]) -> int:
    cols = [np.array([a], dtype=np.int64) for a in assignment]
    return int(_eval_vectorized(alg, t, cols, 1)[0])


def term_table(alg: FiniteAlgebra, t, arity: int) -> tuple[int, ...]:
    used = term_variables(t)
    if used and max(used) > arity:
        raise AlgebraError(f"variable x{max(used)} exceeds arity {arity}")
    grid = all_tuples(alg.size, arity)
    cols = [grid[:, i] for i in range(arity)]
    return tuple(int(v) for v in _eval_vectorized(alg, t, cols, len(grid)))


def term_columns(alg: FiniteAlgebra, t, columns: Sequence[np.ndarray]) -> np.ndarray:
    """Evaluate ``t`` coordinatewise on argument vectors (one per variable)."""
    length = len(columns[0]) if columns else 1
    return _eval_vectorized(alg, t, columns, length)


# ---------------------------------------------------------------- constructions

def direct_product(*algs: FiniteAlgebra, name: str | None = None) -> FiniteAlgebra:
    """Direct product; element (a1,...,ar) is ranked in mixed radix, first factor most significant."""
    if not algs:
        raise AlgebraError("direct_product needs at least one factor")
    sig = algs[0].signature
    for a in algs[1:]:
        if a.signature != sig:
            raise AlgebraError("factors must share a signature")
    sizes = [a.size for a in algs]
    total = int(np.prod(sizes))
    # coords[e, j] = j-th component of element e
    coords = np.array(list(itertools.product(*[range(s) for s in sizes])), dtype=np.int64).reshape(total, len(algs))
    weights = np.array([int(np.prod(sizes[j + 1:])) for j in range(len(sizes))], dtype=np.int64)
    ops = []
    for si, (sym, arity) in enumerate(sig.symbols):
        if arity == 0:
            val = sum(a.operations[si].table[0] * int(w) for a, w in zip(algs, weights))
            ops.append(Operation(sym, 0, (int(val),)))
            continue
        grid = all_tuples(total, arity)
        out = np.zeros(len(grid), dtype=np.int64)
        for j, a in enumerate(algs):
            comp = a.apply(si, [coords[grid[:, p], j] for p in range(arity)])
            out += comp * weights[j]
        ops.append(Operation(sym, arity, tuple(int(v) for v in out)))
    if name is None and all(a.name for a in algs):
        name = "x".join(a.name for a in algs)
    return FiniteAlgebra(total, tuple(ops), name)


def tagged_union(left: FiniteAlgebra, right: FiniteAlgebra) -> FiniteAlgebra:
    """Universe left ⊔ right (right shifted by |left|); operations act componentwise on
    all-left or all-right arguments and arbitrarily on mixed ones.

    Used to close subsets of products A^p x B^q with the single-algebra engine:
    every column of a generator set stays inside one summand.
    """
    if left.signature != right.signature:
        raise AlgebraError("signature mismatch")
    n, m = left.size, right.size
    size = n + m
    ops = []
    for si, (sym, arity) in enumerate(left.signature.symbols):
        if arity == 0:
            # constants only make sense per summand; callers read them per column
            ops.append(Operation(sym, 0, (left.operations[si].table[0],)))
            continue
        grid = all_tuples(size, arity)
        out = np.zeros(len(grid), dtype=np.int64)
        all_left = np.all(grid < n, axis=1)
        all_right = np.all(grid >= n, axis=1)
        if all_left.any():
            g = grid[all_left]
            out[all_left] = left.apply(si, [g[:, p] for p in range(arity)])
        if all_right.any():
            g = grid[all_right] - n
            out[all_right] = right.apply(si, [g[:, p] for p in range(arity)]) + n
        ops.append(Operation(sym, arity, tuple(int(v) for v in out)))
    return FiniteAlgebra(size, tuple(ops))
