"""ucaw: command-line front end.

Every subcommand prints one JSON document on stdout.  Exit codes: 0 for a
computed verdict (negative ones included), 2 for usage or input errors, 3 when
a budget runs out.  Timing goes to stderr so that stdout is reproducible.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .algebra import AlgebraError, Budget, BudgetExceeded, algebra_from_dict, load_algebra, serialize_algebra
from .cache import cache_key, cached_free_algebra
from .clonoid import Seed, clonoid_leq_criterion, galois_check, generate_clonoid, is_clonoid, phi_forks, th_clonoid
from .maltsev import has_edge_term, has_malcev_term, has_nu_term, min_edge_arity
from .subpower import fork, sg
from .variety import cardinality_criticality, clone_size, generating_set, subcovers, var_member_witness
from .words import UpSet, Word, is_antichain, lea_witness, max_antichain_size, tab, tab_apply, upset_insert, words_up_to

SCHEMA = 1
EXACT, UP_TO_BOUND = "exact", "up-to-bound"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------- input helpers

def parse_tuples(text: str) -> list[tuple[int, ...]]:
    """'0 1; 1 0' -> [(0, 1), (1, 0)]."""
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if chunk:
            try:
                out.append(tuple(int(x) for x in chunk.replace(",", " ").split()))
            except ValueError:
                raise UsageError(f"bad tuple {chunk!r}") from None
    return out


def parse_word(text: str, t: int) -> tuple[int, ...]:
    try:
        return Word.parse(text, t).letters
    except ValueError as exc:
        raise UsageError(f"bad word {text!r}: {exc}") from None


def _load(path):
    try:
        return load_algebra(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def load_seeds(path):
    """Seed file: {"source_size", "target": path or inline algebra, "seeds": [{"arity", "table"}]}."""
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    try:
        t = int(obj["source_size"])
        target = obj["target"]
        if isinstance(target, str):
            target = _load(Path(path).parent / target)
        else:
            target = algebra_from_dict(target)
        seeds = [Seed(int(s["arity"]), tuple(int(v) for v in s["table"])) for s in obj["seeds"]]
    except (KeyError, TypeError) as exc:
        raise UsageError(f"{path}: malformed seed file ({exc})") from None
    return t, target, seeds


def _pairs(rel) -> list[list[int]]:
    return [list(p) for p in sorted(rel)]


# ---------------------------------------------------------------- commands

def cmd_info(args, budget):
    a = _load(args.algebra)
    gens = generating_set(a, budget)
    return {
        "name": a.name,
        "size": a.size,
        "signature": [{"symbol": op.symbol, "arity": op.arity} for op in a.operations],
        "constants": a.constants,
        "generating_set": list(gens),
        "digest": cache_key(a, 0)[:16],
        "marker": EXACT,
    }


def cmd_edge_term(args, budget):
    a = _load(args.algebra)
    if args.malcev:
        t = has_malcev_term(a, budget)
        return {"kind": "malcev", "verdict": t is not None, "witness": None if t is None else str(t),
                "verified": t is not None, "marker": EXACT}
    if args.nu is not None:
        t = has_nu_term(a, args.nu, budget)
        return {"kind": "near-unanimity", "k": args.nu, "verdict": t is not None,
                "witness": None if t is None else str(t), "verified": t is not None, "marker": EXACT}
    if args.min:
        k = min_edge_arity(a, args.kmax, budget)
        t = None if k is None else has_edge_term(a, k, budget)
        return {"kind": "edge", "kmax": args.kmax, "min_k": k, "witness": None if t is None else str(t),
                "verified": t is not None, "marker": EXACT if k is not None else UP_TO_BOUND}
    if args.k is None:
        raise UsageError("edge-term needs --k K, --min --kmax K, --nu K or --malcev")
    t = has_edge_term(a, args.k, budget)
    return {"kind": "edge", "k": args.k, "verdict": t is not None, "witness": None if t is None else str(t),
            "verified": t is not None, "marker": EXACT}


def cmd_clone_size(args, budget):
    a = _load(args.algebra)
    return {"arity": args.arity, "size": clone_size(a, args.arity, budget), "marker": EXACT}


def cmd_free(args, budget):
    a = _load(args.algebra)
    fa = cached_free_algebra(a, args.gens, budget)
    out = {"k": args.gens, "size": len(fa), "generator_indices": fa.generator_indices}
    if args.list:
        out["elements"] = [{"table": list(map(int, row)), "term": str(term)}
                           for row, term in zip(fa.carrier.rows, fa.terms)]
    out["marker"] = EXACT
    return out


def cmd_member(args, budget):
    b, a = _load(args.algebra), _load(getattr(args, "in"))
    res = var_member_witness(b, a, budget)
    return {"verdict": res.member, "generators": list(res.generators), "subalgebra_size": res.subalgebra_size,
            "witness": None if res.identity is None else str(res.identity), "marker": EXACT}


def cmd_forks(args, budget):
    a = _load(args.algebra)
    gens = parse_tuples(args.gens)
    if any(len(g) != args.power for g in gens):
        raise UsageError(f"every generator needs {args.power} coordinates")
    F = sg(a, args.power, gens, budget=budget)
    out = {"power": args.power, "size": len(F),
           "forks": [{"i": i, "pairs": _pairs(fork(F, i).pairs)} for i in range(1, args.power + 1)]}
    if args.list:
        out["tuples"] = [list(t) for t in F.tuples]
    out["marker"] = EXACT
    return out


def cmd_subcovers(args, budget):
    a = _load(args.algebra)
    classes = subcovers(a, args.bound, budget)
    return {"bound": args.bound,
            "classes": [{"identity": str(c.identity), "equivalent_identities": len(c.identities),
                         "quotient_sizes": list(c.quotient_sizes)} for c in classes],
            "marker": UP_TO_BOUND}


def cmd_critical(args, budget):
    b = _load(args.algebra)
    r = cardinality_criticality(b, budget)
    return {"verdict": r.critical, "convention": r.convention,
            "smaller_members": [m.name for m in r.smaller_members],
            "generators_used": [m.name for m in r.generators_used], "product_size": r.product_size,
            "witness": None if r.identity is None else str(r.identity), "marker": EXACT}


def cmd_wpo(args, budget):
    t = args.t
    if args.wpo_cmd == "lea":
        a, b = parse_word(args.a, t), parse_word(args.b, t)
        w = lea_witness(a, b)
        return {"verdict": w is not None, "witness": None if w is None else list(w.h), "marker": EXACT}
    if args.wpo_cmd == "tab":
        a, b = parse_word(args.a, t), parse_word(args.b, t)
        w = lea_witness(a, b)
        if w is None:
            return {"verdict": False, "witness": None, "tab": None, "marker": EXACT}
        tb = tab(a, b, w)
        out = {"verdict": True, "witness": list(w.h), "tab": list(tb)}
        if args.apply:
            out["applied"] = list(tab_apply(parse_word(args.apply, t), tb, len(a)))
        out["marker"] = EXACT
        return out
    words = [parse_word(" ".join(map(str, w)), t) for w in parse_tuples(args.words)]
    U = UpSet(t)
    for w in words:
        U = upset_insert(U, w)
    out = {"verdict": is_antichain(words), "basis": [list(g) for g in U.basis]}
    if args.max_len:
        out["max_len"] = args.max_len
        out["width"] = max_antichain_size(list(words_up_to(t, args.max_len)))
    out["marker"] = EXACT
    return out


def _clonoid_bound(seeds, *extra):
    return max([s.arity for s in seeds] + [x for x in extra if x])


def cmd_clonoid(args, budget):
    sub = args.clonoid_cmd
    if sub == "gen":
        t, B, seeds = load_seeds(args.seeds)
        C = generate_clonoid(B, t, seeds, args.bound, budget)
        return {"source_size": t, "target": B.name, "bound": args.bound, "layer_sizes": C.layer_sizes(),
                "empty_layers": C.empty_layers, "is_clonoid": is_clonoid(C), "marker": UP_TO_BOUND}
    if sub == "forks":
        t, B, seeds = load_seeds(args.seeds)
        w = parse_word(args.word, t)
        N = args.bound or _clonoid_bound(seeds, len(w))
        C = generate_clonoid(B, t, seeds, N, budget)
        return {"word": list(w), "bound": N, "pairs": _pairs(phi_forks(C, w).pairs), "marker": EXACT}
    if sub == "leq":
        t1, B1, s1 = load_seeds(args.seeds1)
        t2, B2, s2 = load_seeds(args.seeds2)
        if t1 != t2 or B1 != B2:
            raise UsageError("seed files disagree on source size or target algebra")
        N = args.bound or _clonoid_bound(s1 + s2, t1 ** (args.k - 1), args.len)
        C = generate_clonoid(B1, t1, s1, N, budget)
        D = generate_clonoid(B2, t2, s2, N, budget)
        v = clonoid_leq_criterion(C, D, args.k, args.len)
        w = v.witness
        if w is not None:
            w = {"kind": w[0], "arity" if w[0] == "layer" else "word": w[1] if w[0] == "layer" else list(w[1]),
                 "function" if w[0] == "layer" else "pair": list(w[2])}
        return {"k": args.k, "len": args.len, "bound": N, "verdict": v.status, "witness": w, "marker": v.marker}
    if sub == "th":
        a, b = _load(args.a), _load(args.b)
        pairs = th_clonoid(a, b, args.arity, budget)
        out = {"arity": args.arity, "count": len(pairs),
               "nontrivial": [[list(u), list(v)] for u, v in sorted(pairs) if u < v]}
        out["marker"] = EXACT
        return out
    a, b1, b2 = _load(args.a), _load(args.b1), _load(args.b2)
    v = galois_check(a, b1, b2, args.arity, budget)
    w = None if v.witness is None else {"arity": v.witness[0], "pair": [list(x) for x in v.witness[1]]}
    return {"arity": args.arity, "member": v.member, "inclusions": list(v.inclusions), "verdict": v.status,
            "witness": w, "marker": v.marker}


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ucaw", description="Finite algebra workbench.")
    p.add_argument("--version", action="version", version=f"ucaw {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("--max-tuples", type=int, default=10**7, help="closure work budget (default 10^7)")
    common.add_argument("--max-seconds", type=float, default=None, help="wall-clock budget (default none)")
    sp = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        q = sp.add_parser(name, parents=[common], help=help_)
        q.set_defaults(fn=fn)
        return q

    q = add("info", cmd_info, "summary of an algebra file")
    q.add_argument("algebra")
    q = add("edge-term", cmd_edge_term, "search for edge, near-unanimity or Mal'cev terms")
    q.add_argument("algebra")
    q.add_argument("--k", type=int)
    q.add_argument("--min", action="store_true")
    q.add_argument("--kmax", type=int, default=4)
    q.add_argument("--nu", type=int)
    q.add_argument("--malcev", action="store_true")
    q = add("clone-size", cmd_clone_size, "number of n-ary term functions")
    q.add_argument("algebra")
    q.add_argument("--arity", type=int, required=True)
    q = add("free", cmd_free, "free algebra on k generators")
    q.add_argument("algebra")
    q.add_argument("--gens", type=int, required=True)
    q.add_argument("--list", action="store_true")
    q = add("member", cmd_member, "decide B in Var(A)")
    q.add_argument("algebra")
    q.add_argument("--in", required=True)
    q = add("forks", cmd_forks, "fork relations of a generated subpower")
    q.add_argument("algebra")
    q.add_argument("--power", type=int, required=True)
    q.add_argument("--gens", required=True)
    q.add_argument("--list", action="store_true")
    q = add("subcovers", cmd_subcovers, "candidate subcovers of Var(A)")
    q.add_argument("algebra")
    q.add_argument("--bound", type=int, default=2)
    q = add("critical", cmd_critical, "cardinality criticality")
    q.add_argument("algebra")
    q.add_argument("--budget", type=int, default=None, help="alias for --max-tuples")

    q = add("wpo", cmd_wpo, "word order utilities")
    wsp = q.add_subparsers(dest="wpo_cmd", required=True, parser_class=_Parser)
    for name in ("lea", "tab"):
        r = wsp.add_parser(name)
        r.add_argument("a")
        r.add_argument("b")
        r.add_argument("--t", type=int, required=True)
        if name == "tab":
            r.add_argument("--apply")
    r = wsp.add_parser("antichain")
    r.add_argument("words", help='words separated by ";", e.g. "0 1; 1 0"')
    r.add_argument("--t", type=int, required=True)
    r.add_argument("--max-len", type=int, default=0)

    q = add("clonoid", cmd_clonoid, "clonoid generation and comparison")
    csp = q.add_subparsers(dest="clonoid_cmd", required=True, parser_class=_Parser)
    r = csp.add_parser("gen")
    r.add_argument("seeds")
    r.add_argument("--bound", type=int, default=3)
    r = csp.add_parser("forks")
    r.add_argument("seeds")
    r.add_argument("--word", required=True)
    r.add_argument("--bound", type=int, default=0)
    r = csp.add_parser("leq")
    r.add_argument("seeds1")
    r.add_argument("seeds2")
    r.add_argument("--k", type=int, required=True)
    r.add_argument("--len", type=int, required=True)
    r.add_argument("--bound", type=int, default=0)
    r = csp.add_parser("th")
    r.add_argument("a")
    r.add_argument("b")
    r.add_argument("--arity", type=int, default=1)
    r = csp.add_parser("galois")
    r.add_argument("a")
    r.add_argument("b1")
    r.add_argument("b2")
    r.add_argument("--arity", type=int, default=2)
    return p


def _echo(args) -> dict:
    skip = {"fn", "cmd", "wpo_cmd", "clonoid_cmd"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def run(argv) -> tuple[dict | None, int]:
    """Execute one command; returns (result document, exit code)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return None, 2
    max_tuples = args.budget if getattr(args, "budget", None) else args.max_tuples
    budget = Budget(max_tuples=max_tuples, max_seconds=args.max_seconds)
    name = " ".join(x for x in (args.cmd, getattr(args, "wpo_cmd", None), getattr(args, "clonoid_cmd", None)) if x)
    doc = {"schema": SCHEMA, "command": name, "args": _echo(args)}
    t0 = time.perf_counter()
    try:
        payload = args.fn(args, budget)
        code = 0
    except UsageError as exc:
        print(f"ucaw {name}: {exc}", file=sys.stderr)
        return None, 2
    except AlgebraError as exc:
        print(f"ucaw {name}: {exc}", file=sys.stderr)
        return None, 2
    except BudgetExceeded as exc:
        print(f"ucaw {name}: {exc}", file=sys.stderr)
        payload = {"verdict": None, "status": "budget-exceeded", "message": str(exc)}
        code = 3
    doc["result"] = payload
    doc["budget"] = {"max_tuples": budget.max_tuples, "max_seconds": budget.max_seconds, "tuples_used": budget.tuples}
    print(f"ucaw {name}: {time.perf_counter() - t0:.3f}s", file=sys.stderr)
    return doc, code


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def main(argv=None) -> int:
    doc, code = run(sys.argv[1:] if argv is None else argv)
    if doc is not None:
        sys.stdout.write(dumps(doc))
    return code


if __name__ == "__main__":
    sys.exit(main())
