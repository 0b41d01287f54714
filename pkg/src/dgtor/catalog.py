"""Small stock algebras and modules used by tests, the CLI and generators."""

from __future__ import annotations

from .complexes import build_complex
from .dg import DgAlgebra, DgModule, SemifreeModule, base_field_algebra, free_module
from .linalg import Matrix, rat


def dual_numbers(window: int) -> DgAlgebra:
    """k[e]/(e^2) in degree 0, zero differential.  Basis: 1, e."""
    carrier = build_complex(window, {0: 2}, {})
    mult = {}
    # basis 0 = 1, basis 1 = e;  e*e = 0
    l1 = Matrix.identity(2)
    le = Matrix.from_triplets(2, 2, [(1, 0, 1)])
    for q in range(window + 1):
        dq = carrier.dim(q)
        if q == 0:
            mult[(0, 0, 0)] = l1
            mult[(0, 1, 0)] = le
        else:
            mult[(0, 0, q)] = Matrix.identity(dq)
            mult[(0, 1, q)] = Matrix.zeros(dq, dq)
    return DgAlgebra(carrier, mult, (rat(1), rat(0)))


def exterior_deg1(window: int, d_value: int = 0) -> DgAlgebra:
    """Lambda(x) with |x| = 1 and dx = d_value * 1.  Basis: 1 in degree 0, x in degree 1."""
    diffs = {}
    if d_value:
        diffs[1] = Matrix.from_triplets(1, 1, [(0, 0, d_value)])
    carrier = build_complex(window, {0: 1, 1: 1}, diffs)
    mult = {}
    for q in range(window + 1):
        mult[(0, 0, q)] = Matrix.identity(carrier.dim(q))
    # x * 1 = x ; x * x = 0
    mult[(1, 0, 0)] = Matrix.from_triplets(carrier.dim(1), 1, [(0, 0, 1)])
    for q in range(1, window):
        mult[(1, 0, q)] = Matrix.zeros(carrier.dim(q + 1), carrier.dim(q))
    return DgAlgebra(carrier, mult, (rat(1),))


def dual_with_odd_killer(window: int) -> DgAlgebra:
    """k[e]/(e^2) (x) Lambda(x) with dx = e.  Basis: 1, e in degree 0; x, ex in degree 1.

    H_0 = k, H_1 = k[ex]: a small algebra with homology in degree 1.
    """
    diffs = {1: Matrix.from_triplets(2, 2, [(1, 0, 1)])}  # dx = e, d(ex) = 0
    carrier = build_complex(window, {0: 2, 1: 2}, diffs)
    mult = {}
    for p in range(window + 1):
        for i in range(carrier.dim(p)):
            for q in range(window + 1 - p):
                mult[(p, i, q)] = Matrix.zeros(carrier.dim(p + q), carrier.dim(q))
    mult[(0, 0, 0)] = Matrix.identity(2)
    mult[(0, 1, 0)] = Matrix.from_triplets(2, 2, [(1, 0, 1)])
    mult[(0, 0, 1)] = Matrix.identity(2)
    mult[(0, 1, 1)] = Matrix.from_triplets(2, 2, [(1, 0, 1)])
    # x * 1 = x, x * e = ex ; products of two degree-1 elements vanish
    mult[(1, 0, 0)] = Matrix.from_triplets(2, 2, [(0, 0, 1), (1, 1, 1)])
    mult[(1, 1, 0)] = Matrix.from_triplets(2, 2, [(1, 0, 1)])
    return DgAlgebra(carrier, mult, (rat(1), rat(0)))


def augmentation_module(a: DgAlgebra, aug: list | None = None) -> DgModule:
    """k in degree 0 with a acting through an augmentation A_0 -> k.

    By default every non-unit degree-0 basis element maps to 0 (valid for the
    stock algebras above, whose unit is the first basis vector).
    """
    carrier = build_complex(a.window, {0: 1}, {})
    if aug is None:
        aug = [rat(0)] * a.dim(0)
        # unit must map to 1; stock algebras use a basis containing the unit
        for i, c in enumerate(a.unit):
            if c != 0:
                aug[i] = rat(1) / rat(c)
                break
    action = {}
    for p in range(a.window + 1):
        for i in range(a.dim(p)):
            for q in range(a.window + 1 - p):
                if p == 0 and q == 0:
                    action[(p, i, q)] = Matrix.from_triplets(1, 1, [(0, 0, aug[i])] if aug[i] != 0 else [])
                else:
                    action[(p, i, q)] = Matrix.zeros(carrier.dim(p + q), carrier.dim(q))
    m = DgModule(a, carrier, action)
    m.validate()
    return m


def algebra_as_module(a: DgAlgebra) -> SemifreeModule:
    """A as the free module on one degree-0 sphere."""
    return free_module(a, [("g", 0, "sphere")])


def complex_module(window: int, dims: dict, diffs: dict) -> tuple[DgAlgebra, DgModule]:
    """A complex viewed as a module over the base field."""
    from .dg import module_from_complex

    k = base_field_algebra(window)
    c = build_complex(window, dims, diffs)
    return k, module_from_complex(k, c)
