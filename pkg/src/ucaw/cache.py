"""On-disk cache for free algebras, keyed by the canonical algebra text and k."""
from __future__ import annotations

import hashlib
import json
import logging
import os
from pathlib import Path

import numpy as np

from .algebra import Budget, FiniteAlgebra, serialize_algebra
from .subpower import Subpower
from .variety import FreeAlgebra, free_algebra, projection_vectors

log = logging.getLogger(__name__)

CACHE_ENV = "UCAW_CACHE_DIR"
FORMAT = 1


def cache_key(alg: FiniteAlgebra, k: int) -> str:
    h = hashlib.sha256(serialize_algebra(alg).encode("utf-8"))
    h.update(f"\nk={k}\n".encode())
    return h.hexdigest()


def _entry_path(path, alg, k) -> Path:
    return Path(path) / f"free-{cache_key(alg, k)}.json"


def _load(file: Path, alg: FiniteAlgebra, k: int) -> tuple[FreeAlgebra, int]:
    obj = json.loads(file.read_text(encoding="utf-8"))
    if obj.get("format") != FORMAT or obj.get("k") != k:
        raise ValueError("format or k mismatch")
    rows = np.asarray(obj["rows"], dtype=np.uint8).reshape(-1, alg.size**k)
    prov = [tuple(tuple(x) if isinstance(x, list) else x for x in e) for e in obj["provenance"]]
    if len(rows) != obj["count"] or len(prov) != obj["count"]:
        raise ValueError("element count mismatch")
    if rows.size and int(rows.max()) >= alg.size:
        raise ValueError("value outside universe")
    carrier = Subpower(alg, alg.size**k, rows, projection_vectors(alg.size, k), prov)
    if len(np.unique(carrier._keys)) != len(rows):
        raise ValueError("duplicate elements")
    return FreeAlgebra(alg, k, carrier), int(obj["work"])


def _store(file: Path, fa: FreeAlgebra, work: int) -> None:
    c = fa.carrier
    obj = {
        "format": FORMAT,
        "k": fa.k,
        "count": len(c),
        "work": work,
        "rows": c._disc_rows.astype(int).tolist(),
        "provenance": [list(e) for e in c._provenance],
    }
    tmp = file.with_suffix(".tmp")
    tmp.write_text(json.dumps(obj, separators=(",", ":")), encoding="utf-8")
    os.replace(tmp, file)


def cache_free_algebra(path, alg: FiniteAlgebra, k: int, budget: Budget | None = None) -> FreeAlgebra:
    """free_algebra(alg, k) through a content-addressed cache directory.

    Corrupt entries are logged, recomputed and overwritten.  A hit charges the
    budget with the recorded work, so counters and limits do not depend on the
    cache state.
    """
    budget = budget if budget is not None else Budget(max_tuples=None)
    Path(path).mkdir(parents=True, exist_ok=True)
    file = _entry_path(path, alg, k)
    if file.exists():
        try:
            fa, work = _load(file, alg, k)
        except (ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
            log.warning("corrupt cache entry %s (%s); recomputing", file.name, exc)
        else:
            budget.charge(work)
            return fa
    before = budget.tuples
    fa = free_algebra(alg, k, budget)
    _store(file, fa, budget.tuples - before)
    return fa


def cached_free_algebra(alg: FiniteAlgebra, k: int, budget: Budget | None = None) -> FreeAlgebra:
    """Use the cache only when UCAW_CACHE_DIR is set."""
    path = os.environ.get(CACHE_ENV)
    if path:
        return cache_free_algebra(path, alg, k, budget)
    return free_algebra(alg, k, budget)
