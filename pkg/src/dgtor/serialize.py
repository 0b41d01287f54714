"""Canonical JSON-ready encodings of the core structures.

Matrices serialize as sparse triplet lists [row, col, "p/q"]; scalar strings
always use the reduced form produced by the exact rational type.  The same
encoding backs workspace files, reports and the resolution cache, so content
hashes are stable across runs.
"""

from __future__ import annotations

import hashlib
import json

from .complexes import Complex
from .dg import DgAlgebra, DgModule, Generator, SemifreeModule
from .linalg import Matrix, rat


def scalar_str(v) -> str:
    return str(v)


def matrix_data(m: Matrix) -> dict:
    return {
        "rows": m.nrows,
        "cols": m.ncols,
        "entries": [[i, j, scalar_str(v)] for i, j, v in m.triplets()],
    }


def matrix_from_data(d: dict) -> Matrix:
    return Matrix.from_triplets(d["rows"], d["cols"], [(i, j, rat(v)) for i, j, v in d["entries"]])


def vector_data(v) -> list:
    return [scalar_str(x) for x in v]


def vector_from_data(d) -> list:
    return [rat(x) for x in d]


def complex_data(c: Complex) -> dict:
    return {
        "window": c.window,
        "dims": list(c.dims),
        "differentials": {str(n): matrix_data(c.diffs[n]) for n in range(1, c.window + 1) if not c.diffs[n].is_zero()},
    }


def complex_from_data(d: dict) -> Complex:
    from .complexes import build_complex

    diffs = {int(n): matrix_from_data(m) for n, m in d["differentials"].items()}
    return build_complex(d["window"], {n: dim for n, dim in enumerate(d["dims"])}, diffs)


def _tables_data(tables: dict) -> list:
    out = []
    for (p, i, q) in sorted(tables):
        m = tables[(p, i, q)]
        if not m.is_zero():
            out.append([p, i, q, matrix_data(m)])
    return out


def _tables_from_data(data, carrier_dims, coeff_dims, window) -> dict:
    tables = {}
    for p in range(window + 1):
        for i in range(coeff_dims[p]):
            for q in range(window + 1 - p):
                tables[(p, i, q)] = Matrix.zeros(carrier_dims[p + q], carrier_dims[q])
    for p, i, q, m in data:
        tables[(p, i, q)] = matrix_from_data(m)
    return tables


def algebra_data(a: DgAlgebra) -> dict:
    return {
        "carrier": complex_data(a.carrier),
        "unit": vector_data(a.unit),
        "products": _tables_data(a.mult),
    }


def algebra_from_data(d: dict) -> DgAlgebra:
    carrier = complex_from_data(d["carrier"])
    mult = _tables_from_data(d["products"], carrier.dims, carrier.dims, carrier.window)
    return DgAlgebra(carrier, mult, tuple(vector_from_data(d["unit"])))


def module_data(m: DgModule) -> dict:
    return {
        "carrier": complex_data(m.carrier),
        "actions": _tables_data(m.action),
    }


def module_from_data(d: dict, a: DgAlgebra) -> DgModule:
    carrier = complex_from_data(d["carrier"])
    action = _tables_from_data(d["actions"], carrier.dims, a.carrier.dims, carrier.window)
    return DgModule(a, carrier, action)


def semifree_data(sf: SemifreeModule) -> dict:
    return {
        "generators": [
            {"name": g.name, "degree": g.degree, "dvalue": vector_data(g.dvalue)} for g in sf.gens
        ],
    }


def semifree_from_data(d: dict, a: DgAlgebra) -> SemifreeModule:
    sf = SemifreeModule(a)
    for g in d["generators"]:
        sf.add_generator(g["name"], g["degree"], vector_from_data(g["dvalue"]), rebuild=False)
    sf._rebuild()
    return sf


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def content_hash(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()
