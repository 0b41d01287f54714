"""DG algebras and modules with explicit structure constants.

Multiplication and actions are stored per basis element: key (p, i, q) gives
the matrix of left multiplication/action by the i-th degree-p basis element
on the degree-q component.  The Koszul convention is fixed once here:
(id (x) d)(x (x) y) = (-1)^{|x|} x (x) dy, and the braiding carries
(-1)^{|x||y|}.  Products landing above the window are truncated away; all
axioms are asserted within the window only.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexes import (
    ChainMap,
    Complex,
    HomologyData,
    InternalCertificateError,
    homology,
)
from .linalg import Matrix, Subspace, express_in, quotient, rat


class ValidationError(ValueError):
    """A structural axiom (d^2, Leibniz, associativity, ...) fails on input."""


def _add_into(acc: dict, j: int, v):
    s = acc.get(j, 0) + v
    if s == 0:
        acc.pop(j, None)
    else:
        acc[j] = s


@dataclass(eq=False)
class DgAlgebra:
    """Graded-commutative DG algebra on an explicit basis."""

    carrier: Complex
    mult: dict  # (p, i, q) -> Matrix : A_q -> A_{p+q}
    unit: tuple  # coordinates in degree 0

    @property
    def window(self) -> int:
        return self.carrier.window

    def dim(self, n: int) -> int:
        return self.carrier.dim(n)

    def lmul(self, p: int, i: int, q: int) -> Matrix:
        """Left multiplication by basis element i of degree p on degree q."""
        if p + q > self.window:
            return Matrix.zeros(0, self.dim(q))
        return self.mult[(p, i, q)]

    def multiply(self, p: int, avec, q: int, bvec) -> list:
        """Product of two homogeneous elements given by coordinates."""
        if p + q > self.window:
            return []
        out = [rat(0)] * self.dim(p + q)
        for i, c in enumerate(avec):
            if c == 0:
                continue
            img = self.lmul(p, i, q).apply(list(bvec))
            for t, v in enumerate(img):
                out[t] += c * v
        return out

    def unit_vector(self) -> list:
        return list(self.unit)

    def is_graded(self) -> bool:
        return all(self.carrier.diff(n).is_zero() for n in range(1, self.window + 1))

    def validate(self):
        w = self.window
        d = self.carrier
        for p in range(w + 1):
            for i in range(self.dim(p)):
                for q in range(w + 1 - p):
                    m = self.mult.get((p, i, q))
                    if m is None or m.nrows != self.dim(p + q) or m.ncols != self.dim(q):
                        raise ValidationError(f"multiplication table missing/misshaped at {(p, i, q)}")
        # unitality
        for q in range(w + 1):
            acc = Matrix.zeros(self.dim(q), self.dim(q))
            for i, c in enumerate(self.unit):
                if c != 0:
                    acc = acc + self.lmul(0, i, q).scale(c)
            if acc != Matrix.identity(self.dim(q)):
                raise ValidationError(f"unit does not act as identity on degree {q}")
        # graded commutativity on basis pairs
        for p in range(w + 1):
            for q in range(w + 1 - p):
                sign = -1 if (p % 2 and q % 2) else 1
                for i in range(self.dim(p)):
                    mi = self.lmul(p, i, q)
                    for j in range(self.dim(q)):
                        left = [mi.entry(t, j) for t in range(self.dim(p + q))]
                        right = [self.lmul(q, j, p).entry(t, i) for t in range(self.dim(p + q))]
                        if left != [sign * v for v in right]:
                            raise ValidationError(
                                f"graded commutativity fails on basis pair {(p, i)}, {(q, j)}"
                            )
        # associativity on basis triples
        for p in range(w + 1):
            for q in range(w + 1 - p):
                for r in range(w + 1 - p - q):
                    for i in range(self.dim(p)):
                        for j in range(self.dim(q)):
                            ab = [self.lmul(p, i, q).entry(t, j) for t in range(self.dim(p + q))]
                            for k in range(self.dim(r)):
                                bc = [self.lmul(q, j, r).entry(t, k) for t in range(self.dim(q + r))]
                                lhs = self.multiply(p + q, ab, r, [1 if t == k else 0 for t in range(self.dim(r))])
                                rhs = self.multiply(p, [1 if t == i else 0 for t in range(self.dim(p))], q + r, bc)
                                if lhs != rhs:
                                    raise ValidationError(
                                        f"associativity fails on basis triple {(p, i)}, {(q, j)}, {(r, k)}"
                                    )
        # Leibniz on basis pairs
        for p in range(w + 1):
            for q in range(w + 1 - p):
                if p + q == 0 or p + q > w:
                    continue
                for i in range(self.dim(p)):
                    da = d.diff(p).column(i) if p >= 1 else {}
                    for j in range(self.dim(q)):
                        prod_col = [self.lmul(p, i, q).entry(t, j) for t in range(self.dim(p + q))]
                        lhs = d.diff(p + q).apply(prod_col)
                        rhs = [rat(0)] * self.dim(p + q - 1)
                        for t, v in da.items():
                            col = self.lmul(p - 1, t, q)
                            for s in range(self.dim(p + q - 1)):
                                rhs[s] += v * col.entry(s, j)
                        if q >= 1:
                            sgn = -1 if p % 2 else 1
                            db = d.diff(q).column(j)
                            for t, v in db.items():
                                col = self.lmul(p, i, q - 1)
                                for s in range(self.dim(p + q - 1)):
                                    rhs[s] += sgn * v * col.entry(s, t)
                        if lhs != rhs:
                            raise ValidationError(f"Leibniz fails on basis pair {(p, i)}, {(q, j)}")
        return self


@dataclass(eq=False)
class DgModule:
    """Left module over a DgAlgebra, action stored per algebra basis element."""

    algebra: DgAlgebra
    carrier: Complex
    action: dict  # (p, i, q) -> Matrix : M_q -> M_{p+q}

    @property
    def window(self) -> int:
        return self.carrier.window

    def dim(self, n: int) -> int:
        return self.carrier.dim(n)

    def act_m(self, p: int, i: int, q: int) -> Matrix:
        if p + q > self.window:
            return Matrix.zeros(0, self.dim(q))
        return self.action[(p, i, q)]

    def act(self, p: int, avec, q: int, xvec) -> list:
        if p + q > self.window:
            return []
        out = [rat(0)] * self.dim(p + q)
        for i, c in enumerate(avec):
            if c == 0:
                continue
            img = self.act_m(p, i, q).apply(list(xvec))
            for t, v in enumerate(img):
                out[t] += c * v
        return out

    def is_graded(self) -> bool:
        return all(self.carrier.diff(n).is_zero() for n in range(1, self.window + 1))

    def validate(self):
        a, w = self.algebra, self.window
        for p in range(w + 1):
            for i in range(a.dim(p)):
                for q in range(w + 1 - p):
                    m = self.action.get((p, i, q))
                    if m is None or m.nrows != self.dim(p + q) or m.ncols != self.dim(q):
                        raise ValidationError(f"action table missing/misshaped at {(p, i, q)}")
        for q in range(w + 1):
            acc = Matrix.zeros(self.dim(q), self.dim(q))
            for i, c in enumerate(a.unit):
                if c != 0:
                    acc = acc + self.act_m(0, i, q).scale(c)
            if acc != Matrix.identity(self.dim(q)):
                raise ValidationError(f"unit does not act as identity on module degree {q}")
        # (a b) m = a (b m) on basis triples
        for p in range(w + 1):
            for q in range(w + 1 - p):
                for r in range(w + 1 - p - q):
                    for i in range(a.dim(p)):
                        for j in range(a.dim(q)):
                            ab = [a.lmul(p, i, q).entry(t, j) for t in range(a.dim(p + q))]
                            for k in range(self.dim(r)):
                                ek = [1 if t == k else 0 for t in range(self.dim(r))]
                                bm = [self.act_m(q, j, r).entry(t, k) for t in range(self.dim(q + r))]
                                lhs = self.act(p + q, ab, r, ek)
                                rhs = self.act(p, [1 if t == i else 0 for t in range(a.dim(p))], q + r, bm)
                                if lhs != rhs:
                                    raise ValidationError(
                                        f"action associativity fails on {(p, i)}, {(q, j)}, module basis {(r, k)}"
                                    )
        # Leibniz d(a m) = (da) m + (-1)^p a (dm)
        for p in range(w + 1):
            for q in range(w + 1 - p):
                if p + q == 0 or p + q > w:
                    continue
                for i in range(a.dim(p)):
                    da = a.carrier.diff(p).column(i) if p >= 1 else {}
                    for k in range(self.dim(q)):
                        am = [self.act_m(p, i, q).entry(t, k) for t in range(self.dim(p + q))]
                        lhs = self.carrier.diff(p + q).apply(am)
                        rhs = [rat(0)] * self.dim(p + q - 1)
                        for t, v in da.items():
                            col = self.act_m(p - 1, t, q)
                            for s in range(self.dim(p + q - 1)):
                                rhs[s] += v * col.entry(s, k)
                        if q >= 1:
                            sgn = -1 if p % 2 else 1
                            dm = self.carrier.diff(q).column(k)
                            for t, v in dm.items():
                                col = self.act_m(p, i, q - 1)
                                for s in range(self.dim(p + q - 1)):
                                    rhs[s] += sgn * v * col.entry(s, t)
                        if lhs != rhs:
                            raise ValidationError(f"module Leibniz fails on {(p, i)}, basis {(q, k)}")
        return self


@dataclass(eq=False)
class ModuleMap:
    """An algebra-linear chain map between modules over the same algebra."""

    source: DgModule
    target: DgModule
    chain: ChainMap

    def __post_init__(self):
        if self.source.algebra is not self.target.algebra:
            raise ValidationError("modules live over different algebras")

    def component(self, n: int) -> Matrix:
        return self.chain.components[n]

    def validate_linear(self):
        a, w = self.source.algebra, self.source.window
        for p in range(w + 1):
            for i in range(a.dim(p)):
                for q in range(w + 1 - p):
                    lhs = self.target.act_m(p, i, q) * self.chain.components[q]
                    rhs = self.chain.components[p + q] * self.source.act_m(p, i, q)
                    if lhs != rhs:
                        raise ValidationError(f"map is not algebra-linear at {(p, i, q)}")
        return self

    def compose(self, inner: "ModuleMap") -> "ModuleMap":
        return ModuleMap(inner.source, self.target, self.chain.compose(inner.chain))


def module_identity(m: DgModule) -> ModuleMap:
    from .complexes import identity_map

    return ModuleMap(m, m, identity_map(m.carrier))


def module_zero_map(source: DgModule, target: DgModule) -> ModuleMap:
    from .complexes import zero_map

    return ModuleMap(source, target, zero_map(source.carrier, target.carrier))


# -- standard constructions ---------------------------------------------------


def base_field_algebra(window: int) -> DgAlgebra:
    """The base field as a DG algebra concentrated in degree 0."""
    from .complexes import build_complex

    carrier = build_complex(window, {0: 1}, {})
    mult = {}
    for q in range(window + 1):
        mult[(0, 0, q)] = Matrix.identity(carrier.dim(q))
    return DgAlgebra(carrier, mult, (rat(1),))


def module_from_complex(a: DgAlgebra, c: Complex) -> DgModule:
    """View a complex as a module over the base field algebra."""
    if a.dim(0) != 1 or any(a.dim(n) != 0 for n in range(1, a.window + 1)):
        raise ValidationError("module_from_complex needs the base field algebra")
    action = {(0, 0, q): Matrix.identity(c.dim(q)) for q in range(c.window + 1)}
    return DgModule(a, c, action)


def direct_sum_modules(m1: DgModule, m2: DgModule):
    """Direct sum with the two inclusion maps."""
    from .complexes import direct_sum

    if m1.algebra is not m2.algebra:
        raise ValidationError("direct sum over different algebras")
    c = direct_sum(m1.carrier, m2.carrier)
    a, w = m1.algebra, m1.window
    action = {}
    for p in range(w + 1):
        for i in range(a.dim(p)):
            for q in range(w + 1 - p):
                m = Matrix.zeros(c.dim(p + q), c.dim(q))
                for r, s, v in m1.act_m(p, i, q).triplets():
                    m.rows[r][s] = v
                for r, s, v in m2.act_m(p, i, q).triplets():
                    m.rows[r + m1.dim(p + q)][s + m1.dim(q)] = v
                action[(p, i, q)] = m
    total = DgModule(a, c, action)
    inc1 = ModuleMap(
        m1,
        total,
        ChainMap(
            m1.carrier,
            c,
            tuple(
                Matrix.from_triplets(c.dim(n), m1.dim(n), [(i, i, 1) for i in range(m1.dim(n))])
                for n in range(w + 1)
            ),
        ),
    )
    inc2 = ModuleMap(
        m2,
        total,
        ChainMap(
            m2.carrier,
            c,
            tuple(
                Matrix.from_triplets(c.dim(n), m2.dim(n), [(m1.dim(n) + i, i, 1) for i in range(m2.dim(n))])
                for n in range(w + 1)
            ),
        ),
    )
    return total, inc1, inc2


def restrict_module(m: DgModule, bases: list) -> tuple[DgModule, ModuleMap]:
    """Submodule spanned by per-degree column bases; returns the inclusion.

    Raises when the subspace is not closed under d or the action.
    """
    a, w = m.algebra, m.window
    dims = tuple(b.ncols for b in bases)
    diffs = [Matrix.zeros(0, 0)]
    for n in range(1, w + 1):
        d = express_in(bases[n - 1], m.carrier.diff(n) * bases[n])
        if d is None:
            raise ValidationError(f"subspace not closed under d at degree {n}")
        diffs.append(d)
    carrier = Complex(dims, tuple(diffs))
    action = {}
    for p in range(w + 1):
        for i in range(a.dim(p)):
            for q in range(w + 1 - p):
                img = m.act_m(p, i, q) * bases[q]
                re = express_in(bases[p + q], img)
                if re is None:
                    raise ValidationError(f"subspace not closed under action at {(p, i, q)}")
                action[(p, i, q)] = re
    sub = DgModule(a, carrier, action)
    incl = ModuleMap(sub, m, ChainMap(carrier, m.carrier, tuple(bases)))
    return sub, incl


# -- homology as graded structures --------------------------------------------


def homology_algebra(a: DgAlgebra) -> tuple[DgAlgebra, HomologyData]:
    """H(A) with its induced product, as a graded algebra (zero differential)."""
    h = homology(a.carrier)
    from .complexes import build_complex

    carrier = build_complex(a.window, {n: h.h_dims[n] for n in range(a.window + 1)}, {})
    mult = {}
    for p in range(a.window + 1):
        for i in range(h.h_dims[p]):
            rep_i = h.rep(p, i)
            for q in range(a.window + 1 - p):
                cols = []
                for j in range(h.h_dims[q]):
                    prod = a.multiply(p, rep_i, q, h.rep(q, j))
                    cols.append(h.classify(p + q, prod))
                mult[(p, i, q)] = Matrix.from_columns(h.h_dims[p + q], cols)
    unit = tuple(h.classify(0, a.unit_vector()))
    return DgAlgebra(carrier, mult, unit), h


def homology_module(m: DgModule, ha: DgAlgebra, ha_data: HomologyData) -> tuple[DgModule, HomologyData]:
    """H(M) as a graded module over H(A)."""
    h = homology(m.carrier)
    from .complexes import build_complex

    carrier = build_complex(m.window, {n: h.h_dims[n] for n in range(m.window + 1)}, {})
    action = {}
    for p in range(m.window + 1):
        for i in range(ha.dim(p)):
            rep_a = ha_data.rep(p, i)
            for q in range(m.window + 1 - p):
                cols = []
                for j in range(h.h_dims[q]):
                    img = m.act(p, rep_a, q, h.rep(q, j))
                    cols.append(h.classify(p + q, img))
                action[(p, i, q)] = Matrix.from_columns(h.h_dims[p + q], cols)
    return DgModule(ha, carrier, action), h


# -- tensor products ----------------------------------------------------------


class TensorIndex:
    """Basis bookkeeping for (M (x) N)_l = sum over r of M_r (x) N_{l-r}."""

    def __init__(self, mdims, ndims, window: int):
        self.window = window
        self.mdims = mdims
        self.ndims = ndims
        self.offsets = []
        self.dims = []
        for ell in range(window + 1):
            offs = {}
            pos = 0
            for r in range(ell + 1):
                offs[r] = pos
                pos += mdims[r] * ndims[ell - r]
            self.offsets.append(offs)
            self.dims.append(pos)

    def pos(self, ell: int, r: int, i: int, j: int) -> int:
        return self.offsets[ell][r] + i * self.ndims[ell - r] + j

    def embed(self, r: int, xvec, s: int, yvec) -> list:
        """Coordinates of x (x) y at degree r+s."""
        ell = r + s
        out = [rat(0)] * self.dims[ell]
        for i, xv in enumerate(xvec):
            if xv == 0:
                continue
            for j, yv in enumerate(yvec):
                if yv == 0:
                    continue
                out[self.pos(ell, r, i, j)] += xv * yv
        return out


def tensor_complexes(mc: Complex, nc: Complex) -> tuple[Complex, TensorIndex]:
    """Tensor over the base field: d(x (x) y) = dx (x) y + (-1)^{|x|} x (x) dy."""
    if mc.window != nc.window:
        raise ValidationError("window mismatch in tensor product")
    w = mc.window
    idx = TensorIndex(mc.dims, nc.dims, w)
    diffs = [Matrix.zeros(0, 0)]
    for ell in range(1, w + 1):
        m = Matrix.zeros(idx.dims[ell - 1], idx.dims[ell])
        for r in range(ell + 1):
            s = ell - r
            sgn = -1 if r % 2 else 1
            for i in range(mc.dim(r)):
                dcol = mc.diff(r).column(i) if r >= 1 else {}
                for j in range(nc.dim(s)):
                    col = idx.pos(ell, r, i, j)
                    for t, v in dcol.items():
                        _add_into(m.rows[idx.pos(ell - 1, r - 1, t, j)], col, v)
                    if s >= 1:
                        for t, v in nc.diff(s).column(j).items():
                            _add_into(m.rows[idx.pos(ell - 1, r, i, t)], col, sgn * v)
        diffs.append(m)
    c = Complex(tuple(idx.dims), tuple(diffs))
    return c, idx


@dataclass(eq=False)
class AlgebraTensor:
    """M (x)_A N presented as a quotient of M (x)_k N.

    Per degree: projection/section matrices between the plain tensor and the
    quotient, plus the relation span that was divided out.  The quotient
    carries the induced differential and left action.
    """

    left: DgModule
    right: DgModule
    module: DgModule
    index: TensorIndex
    projections: tuple
    sections: tuple
    relation_bases: tuple

    def project_tensor(self, r: int, xvec, s: int, yvec) -> list:
        """Class of x (x) y in the quotient at degree r+s."""
        return self.projections[r + s].apply(self.index.embed(r, xvec, s, yvec))


def _relation_columns(m: DgModule, n: DgModule, idx: TensorIndex, ell: int) -> Matrix:
    """Span of (a x) (x) y - (-1)^{|a||x|} x (x) (a y) over basis triples."""
    a = m.algebra
    cols = []
    w = m.window
    for p in range(ell + 1):
        for r in range(ell - p + 1):
            s = ell - p - r
            sgn = -1 if (p % 2 and r % 2) else 1
            for i in range(a.dim(p)):
                ax = m.act_m(p, i, r)
                ay = n.act_m(p, i, s)
                for x in range(m.dim(r)):
                    axv = ax.column(x)
                    for y in range(n.dim(s)):
                        vec = {}
                        for t, v in axv.items():
                            _add_into(vec, idx.pos(ell, p + r, t, y), v)
                        for t, v in ay.column(y).items():
                            _add_into(vec, idx.pos(ell, r, x, t), -sgn * v)
                        if vec:
                            cols.append(vec)
    return Matrix.from_columns(idx.dims[ell], cols)


def tensor_over_algebra(m: DgModule, n: DgModule, check_action: bool = True) -> AlgebraTensor:
    """The coequalizer M (x)_A N with explicit projection and section.

    Only meant for small instances; resolutions use the structured semifree
    paths below and are cross-checked against this construction.
    """
    if m.algebra is not n.algebra:
        raise ValidationError("tensor over different algebras")
    a, w = m.algebra, m.window
    tc, idx = tensor_complexes(m.carrier, n.carrier)
    projs, secs, rel_bases, dims = [], [], [], []
    for ell in range(w + 1):
        rel = Subspace.from_span(idx.dims[ell], _relation_columns(m, n, idx, ell))
        d, proj, sec = quotient(idx.dims[ell], rel)
        dims.append(d)
        projs.append(proj)
        secs.append(sec)
        rel_bases.append(rel)
    diffs = [Matrix.zeros(0, 0)]
    for ell in range(1, w + 1):
        if not (projs[ell - 1] * (tc.diff(ell) * rel_bases[ell].basis)).is_zero():
            raise InternalCertificateError("differential does not descend to the quotient")
        diffs.append(projs[ell - 1] * (tc.diff(ell) * secs[ell]))
    carrier = Complex(tuple(dims), tuple(diffs))
    action = {}
    for p in range(w + 1):
        for i in range(a.dim(p)):
            for q in range(w + 1 - p):
                # a (x (x) y) := (a x) (x) y on representatives
                raw = Matrix.zeros(idx.dims[p + q], idx.dims[q])
                for r in range(q + 1):
                    s = q - r
                    am = m.act_m(p, i, r)
                    for x in range(m.dim(r)):
                        for t, v in am.column(x).items():
                            for y in range(n.dim(s)):
                                _add_into(raw.rows[idx.pos(p + q, p + r, t, y)], idx.pos(q, r, x, y), v)
                if check_action and not (projs[p + q] * (raw * rel_bases[q].basis)).is_zero():
                    raise InternalCertificateError("action does not descend to the quotient")
                action[(p, i, q)] = projs[p + q] * (raw * secs[q])
    mod = DgModule(a, carrier, action)
    return AlgebraTensor(m, n, mod, idx, tuple(projs), tuple(secs), tuple(rel_bases))


def braiding_map(t_mn: AlgebraTensor, t_nm: AlgebraTensor) -> ChainMap:
    """Koszul braiding M (x)_A N -> N (x)_A M, x (x) y |-> (-1)^{|x||y|} y (x) x."""
    m, n = t_mn.left, t_mn.right
    w = m.window
    comps = []
    for ell in range(w + 1):
        raw = Matrix.zeros(t_nm.index.dims[ell], t_mn.index.dims[ell])
        for r in range(ell + 1):
            s = ell - r
            sgn = -1 if (r % 2 and s % 2) else 1
            for i in range(m.dim(r)):
                for j in range(n.dim(s)):
                    raw.rows[t_nm.index.pos(ell, s, j, i)][t_mn.index.pos(ell, r, i, j)] = rat(sgn)
        if not (t_nm.projections[ell] * (raw * t_mn.relation_bases[ell].basis)).is_zero():
            raise InternalCertificateError("braiding does not descend to the quotient")
        comps.append(t_nm.projections[ell] * (raw * t_mn.sections[ell]))
    return ChainMap(t_mn.module.carrier, t_nm.module.carrier, tuple(comps))


# -- semifree (Sullivan) modules ----------------------------------------------


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    dvalue: tuple  # coordinates in the carrier at degree-1, earlier gens only


class SemifreeModule:
    """A (x) (free graded space on ordered generators) with lowering differential.

    Basis at degree l: for each generator g (in order) with n_g <= l, one copy
    of the algebra basis of A_{l - n_g}; columns are (gen-major, algebra-minor).
    d(1 (x) g) is the recorded dvalue, a cycle supported on earlier generators.
    """

    def __init__(self, algebra: DgAlgebra, gens=()):
        self.algebra = algebra
        self.gens: list = []
        self._offsets: list = [dict() for _ in range(algebra.window + 1)]
        self._dims = [0] * (algebra.window + 1)
        self.module: DgModule | None = None
        for g in gens:
            self.add_generator(g.name, g.degree, list(g.dvalue), rebuild=False)
        self._rebuild()

    @property
    def window(self) -> int:
        return self.algebra.window

    def dim(self, n: int) -> int:
        return self._dims[n] if 0 <= n <= self.window else 0

    def pos(self, ell: int, gi: int, aj: int) -> int:
        return self._offsets[ell][gi] + aj

    def gen_element(self, gi: int) -> list:
        """Coordinates of 1 (x) g_i at its degree."""
        g = self.gens[gi]
        vec = [rat(0)] * self.dim(g.degree)
        for j, c in enumerate(self.algebra.unit):
            if c != 0:
                vec[self.pos(g.degree, gi, j)] = rat(c)
        return vec

    def add_generator(self, name: str, degree: int, dvalue=None, rebuild: bool = True) -> int:
        if degree < 0 or degree > self.window:
            raise ValidationError("generator degree outside window")
        if dvalue is None:
            dvalue = [rat(0)] * self.dim(degree - 1) if degree >= 1 else []
        dvalue = [rat(v) for v in dvalue]
        if degree >= 1 and len(dvalue) != self.dim(degree - 1):
            raise ValidationError("dvalue has wrong length")
        if degree == 0 and any(v != 0 for v in dvalue):
            raise ValidationError("degree-0 generator cannot have a differential")
        gi = len(self.gens)
        self.gens.append(Generator(name, degree, tuple(dvalue)))
        a = self.algebra
        for ell in range(degree, self.window + 1):
            self._offsets[ell][gi] = self._dims[ell]
            self._dims[ell] += a.dim(ell - degree)
        if rebuild:
            self._rebuild()
        return gi

    def act_on_vector(self, p: int, i: int, q: int, vec) -> list:
        """(a_{p,i}) (x (in carrier at q)) via multiplication into the A factor."""
        a = self.algebra
        out = [rat(0)] * self.dim(p + q)
        for gi, off in self._offsets[q].items():
            nd = self.gens[gi].degree
            adim = a.dim(q - nd)
            for aj in range(adim):
                c = vec[off + aj]
                if c == 0:
                    continue
                prod = a.lmul(p, i, q - nd).column(aj)
                for t, v in prod.items():
                    out[self.pos(p + q, gi, t)] += c * v
        return out

    def _rebuild(self):
        a, w = self.algebra, self.window
        diffs = [Matrix.zeros(0, 0)]
        for ell in range(1, w + 1):
            m = Matrix.zeros(self._dims[ell - 1], self._dims[ell])
            for gi, off in self._offsets[ell].items():
                g = self.gens[gi]
                q = ell - g.degree
                for aj in range(a.dim(q)):
                    col = off + aj
                    # (d a) (x) g
                    if q >= 1:
                        for t, v in a.carrier.diff(q).column(aj).items():
                            _add_into(m.rows[self.pos(ell - 1, gi, t)], col, v)
                    # (-1)^{|a|} a . d(1 (x) g)
                    if g.degree >= 1 and any(v != 0 for v in g.dvalue):
                        sgn = -1 if q % 2 else 1
                        img = self.act_on_vector(q, aj, g.degree - 1, list(g.dvalue))
                        for t, v in enumerate(img):
                            if v != 0:
                                _add_into(m.rows[t], col, sgn * v)
            diffs.append(m)
        carrier = Complex(tuple(self._dims), tuple(diffs))
        action = {}
        for p in range(w + 1):
            for i in range(a.dim(p)):
                for q in range(w + 1 - p):
                    mm = Matrix.zeros(self._dims[p + q], self._dims[q])
                    for gi, off in self._offsets[q].items():
                        nd = self.gens[gi].degree
                        lm = a.lmul(p, i, q - nd)
                        for aj in range(a.dim(q - nd)):
                            for t, v in lm.column(aj).items():
                                mm.rows[self.pos(p + q, gi, t)][off + aj] = v
                    action[(p, i, q)] = mm
        self.module = DgModule(a, carrier, action)

    def stageless_copy(self) -> "SemifreeModule":
        return SemifreeModule(self.algebra, tuple(self.gens))


def free_module(algebra: DgAlgebra, sphere_basis) -> SemifreeModule:
    """Free module on spheres and disks.

    sphere_basis: iterable of (name, degree, kind) with kind 'sphere'/'disk';
    a disk contributes a lower generator in degree-1 and a top generator whose
    differential is 1 (x) lower.
    """
    sf = SemifreeModule(algebra)
    for name, degree, kind in sphere_basis:
        if kind == "sphere":
            sf.add_generator(name, degree, rebuild=False)
        elif kind == "disk":
            if degree < 1:
                raise ValidationError("disk generator needs degree >= 1")
            low = sf.add_generator(f"{name}-", degree - 1, rebuild=False)
            dv = [rat(0)] * sf.dim(degree - 1)
            for j, c in enumerate(algebra.unit):
                if c != 0:
                    dv[sf.pos(degree - 1, low, j)] = rat(c)
            sf.add_generator(name, degree, dv, rebuild=False)
        else:
            raise ValidationError(f"unknown generator kind {kind!r}")
    sf._rebuild()
    return sf


def morphism_from_free(sf: SemifreeModule, values: list, target: DgModule) -> ModuleMap:
    """The A-linear chain map with f(1 (x) g_i) = values[i].

    Sphere generators demand cycle values; a non-chain-map assembly raises.
    """
    a, w = sf.algebra, sf.window
    for gi, g in enumerate(sf.gens):
        if (g.degree == 0 or not any(v != 0 for v in g.dvalue)) and g.degree >= 1:
            img = target.carrier.diff(g.degree).apply(list(values[gi]))
            if any(v != 0 for v in img):
                raise ValidationError(f"sphere value for generator {g.name} is not a cycle")
    comps = []
    for ell in range(w + 1):
        m = Matrix.zeros(target.dim(ell), sf.dim(ell))
        for gi, off in sf._offsets[ell].items():
            g = sf.gens[gi]
            q = ell - g.degree
            for aj in range(a.dim(q)):
                img = target.act_m(q, aj, g.degree).apply(list(values[gi]))
                for t, v in enumerate(img):
                    if v != 0:
                        m.rows[t][off + aj] = v
        comps.append(m)
    chain = ChainMap(sf.module.carrier, target.carrier, tuple(comps))
    return ModuleMap(sf.module, target, chain)


# -- structured tensor products with a semifree factor -------------------------


class SemifreeTensorIndex:
    """Basis bookkeeping for F (x)_A N with F semifree: pairs (gen, N-basis)."""

    def __init__(self, gens, ndims, window: int):
        self.window = window
        self.ndims = ndims
        self.offsets = []
        self.dims = []
        for ell in range(window + 1):
            offs = {}
            pos = 0
            for gi, g in enumerate(gens):
                if g.degree <= ell:
                    offs[gi] = pos
                    pos += ndims[ell - g.degree]
            self.offsets.append(offs)
            self.dims.append(pos)

    def pos(self, ell: int, gi: int, j: int) -> int:
        return self.offsets[ell][gi] + j


@dataclass(eq=False)
class SemifreeLeftTensor:
    """F (x)_A N for F semifree, with basis (1 (x) g) (x) y.

    Every decomposed tensor (a (x) g) (x) y rewrites to
    (-1)^{|a||g|} (1 (x) g) (x) (a y); no quotient is ever formed.
    """

    left: SemifreeModule
    right: DgModule
    module: DgModule
    index: SemifreeTensorIndex

    def embed(self, r: int, xvec, s: int, yvec) -> list:
        """Class of x (x) y for x in the carrier of F at degree r."""
        sf, n = self.left, self.right
        out = [rat(0)] * self.index.dims[r + s]
        for gi, off in sf._offsets[r].items():
            g = sf.gens[gi]
            p = r - g.degree
            sgn = -1 if (p % 2 and g.degree % 2) else 1
            for aj in range(sf.algebra.dim(p)):
                c = xvec[off + aj]
                if c == 0:
                    continue
                ay = n.act_m(p, aj, s)
                for j, yv in enumerate(yvec):
                    if yv == 0:
                        continue
                    for t, v in ay.column(j).items():
                        out[self.index.pos(r + s, gi, t)] += sgn * c * yv * v
        return out


def tensor_semifree_left(sf: SemifreeModule, n: DgModule) -> SemifreeLeftTensor:
    if sf.algebra is not n.algebra:
        raise ValidationError("tensor over different algebras")
    a, w = sf.algebra, sf.window
    idx = SemifreeTensorIndex(sf.gens, n.carrier.dims, w)
    diffs = [Matrix.zeros(0, 0)]
    for ell in range(1, w + 1):
        m = Matrix.zeros(idx.dims[ell - 1], idx.dims[ell])
        for gi, off in idx.offsets[ell].items():
            g = sf.gens[gi]
            s = ell - g.degree
            gsgn = -1 if g.degree % 2 else 1
            # d(1 (x) g) expanded over pairs (a (x) g'), pushed into N
            dval = {}
            if g.degree >= 1:
                for t, v in enumerate(sf.gens[gi].dvalue):
                    if v != 0:
                        dval[t] = v
            for j in range(n.dim(s)):
                col = idx.pos(ell, gi, j)
                # (-1)^{|g|} g (x) dy
                if s >= 1:
                    for t, v in n.carrier.diff(s).column(j).items():
                        _add_into(m.rows[idx.pos(ell - 1, gi, t)], col, gsgn * v)
                # d(1 (x) g) (x) y
                for t, v in dval.items():
                    gj, aj, p = _locate(sf, g.degree - 1, t)
                    sgn = -1 if (p % 2 and sf.gens[gj].degree % 2) else 1
                    for u, av in n.act_m(p, aj, s).column(j).items():
                        _add_into(m.rows[idx.pos(ell - 1, gj, u)], col, sgn * v * av)
        diffs.append(m)
    carrier = Complex(tuple(idx.dims), tuple(diffs))
    action = {}
    for p in range(w + 1):
        for i in range(a.dim(p)):
            for q in range(w + 1 - p):
                m = Matrix.zeros(idx.dims[p + q], idx.dims[q])
                for gi, off in idx.offsets[q].items():
                    g = sf.gens[gi]
                    s = q - g.degree
                    sgn = -1 if (p % 2 and g.degree % 2) else 1
                    ay = n.act_m(p, i, s)
                    for j in range(n.dim(s)):
                        for t, v in ay.column(j).items():
                            m.rows[idx.pos(p + q, gi, t)][off + j] = rat(sgn) * v
                action[(p, i, q)] = m
    mod = DgModule(a, carrier, action)
    return SemifreeLeftTensor(sf, n, mod, idx)


def _locate(sf: SemifreeModule, ell: int, flat: int):
    """Map a flat carrier coordinate at degree ell to (gen, alg index, alg degree)."""
    for gi in sorted(sf._offsets[ell], reverse=True):
        off = sf._offsets[ell][gi]
        if flat >= off:
            return gi, flat - off, ell - sf.gens[gi].degree
    raise IndexError("flat coordinate out of range")


@dataclass(eq=False)
class SemifreeRightTensor:
    """M (x)_A F for F semifree, with basis x (x) (1 (x) h).

    x (x) (a (x) h) rewrites to (-1)^{|a||x|} (a x) (x) (1 (x) h).
    """

    left: DgModule
    right: SemifreeModule
    module: DgModule
    index: SemifreeTensorIndex  # gen-major over the right factor

    def embed(self, r: int, xvec, s: int, yvec) -> list:
        m, sf = self.left, self.right
        out = [rat(0)] * self.index.dims[r + s]
        for hi, off in sf._offsets[s].items():
            h = sf.gens[hi]
            p = s - h.degree
            for aj in range(sf.algebra.dim(p)):
                c = yvec[off + aj]
                if c == 0:
                    continue
                sgn = -1 if (p % 2 and r % 2) else 1
                ax = m.act_m(p, aj, r)
                for i, xv in enumerate(xvec):
                    if xv == 0:
                        continue
                    for t, v in ax.column(i).items():
                        out[self.index.pos(r + s, hi, t)] += sgn * c * xv * v
        return out


def tensor_semifree_right(m: DgModule, sf: SemifreeModule) -> SemifreeRightTensor:
    if sf.algebra is not m.algebra:
        raise ValidationError("tensor over different algebras")
    a, w = sf.algebra, sf.window
    idx = SemifreeTensorIndex(sf.gens, m.carrier.dims, w)
    diffs = [Matrix.zeros(0, 0)]
    for ell in range(1, w + 1):
        mat = Matrix.zeros(idx.dims[ell - 1], idx.dims[ell])
        for hi, off in idx.offsets[ell].items():
            h = sf.gens[hi]
            r = ell - h.degree
            for i in range(m.dim(r)):
                col = idx.pos(ell, hi, i)
                # dx (x) h
                if r >= 1:
                    for t, v in m.carrier.diff(r).column(i).items():
                        _add_into(mat.rows[idx.pos(ell - 1, hi, t)], col, v)
                # (-1)^{|x|} x (x) d(1 (x) h)
                if h.degree >= 1:
                    xs = -1 if r % 2 else 1
                    for t, v in enumerate(h.dvalue):
                        if v == 0:
                            continue
                        hj, aj, p = _locate(sf, h.degree - 1, t)
                        sgn = -1 if (p % 2 and r % 2) else 1
                        img = m.act_m(p, aj, r).column(i)
                        for u, av in img.items():
                            _add_into(mat.rows[idx.pos(ell - 1, hj, u)], col, xs * sgn * v * av)
        diffs.append(mat)
    carrier = Complex(tuple(idx.dims), tuple(diffs))
    action = {}
    for p in range(w + 1):
        for i in range(a.dim(p)):
            for q in range(w + 1 - p):
                mat = Matrix.zeros(idx.dims[p + q], idx.dims[q])
                for hi, off in idx.offsets[q].items():
                    h = sf.gens[hi]
                    r = q - h.degree
                    ax = m.act_m(p, i, r)
                    for x in range(m.dim(r)):
                        for t, v in ax.column(x).items():
                            mat.rows[idx.pos(p + q, hi, t)][off + x] = v
                action[(p, i, q)] = mat
    mod = DgModule(a, carrier, action)
    return SemifreeRightTensor(m, sf, mod, idx)


# -- shifted modules -----------------------------------------------------------


def suspend_module(m: DgModule) -> DgModule:
    """1-shift with the action sign a . x |-> (-1)^{|a|} a x on the shifted copy."""
    from .complexes import suspension

    carrier = suspension(m.carrier)
    a, w = m.algebra, m.window
    action = {}
    for p in range(w + 1):
        sgn = -1 if p % 2 else 1
        for i in range(a.dim(p)):
            for q in range(w + 1 - p):
                if q == 0 or p + q > w:
                    action[(p, i, q)] = Matrix.zeros(carrier.dim(p + q), carrier.dim(q))
                else:
                    action[(p, i, q)] = m.act_m(p, i, q - 1).scale(sgn)
    return DgModule(a, carrier, action)


def loop_module(m: DgModule) -> tuple[DgModule, Matrix]:
    """Omega M = truncation of the (-1)-shift, action signed as in the shift.

    Returns the module and the degree-0 basis inside M_1.
    """
    from .complexes import loop

    carrier, incl = loop(m.carrier)
    basis0 = incl.components[0]
    a, w = m.algebra, m.window
    action = {}
    for p in range(w + 1):
        sgn = -1 if p % 2 else 1
        for i in range(a.dim(p)):
            for q in range(w + 1 - p):
                if p + q > w:
                    action[(p, i, q)] = Matrix.zeros(0, carrier.dim(q))
                    continue
                src = m.act_m(p, i, q + 1) if q + 1 <= w else Matrix.zeros(0, m.dim(q + 1))
                if q == 0:
                    raw = src * basis0 if q + 1 <= w else Matrix.zeros(m.dim(p + 1), basis0.ncols)
                else:
                    raw = src
                if p + q == 0:
                    re = express_in(basis0, raw)
                    if re is None:
                        raise InternalCertificateError("loop action leaves the truncated degree 0")
                    action[(p, i, q)] = re.scale(sgn)
                else:
                    action[(p, i, q)] = raw.scale(sgn)
    return DgModule(a, carrier, action), basis0


# -- named isomorphism checkers -------------------------------------------------


def check_prop_tri(mc: Complex, a: DgAlgebra, n: DgModule) -> dict:
    """Certify (M (x) A) (x)_A N ~ M (x) N with the explicit map
    (x (x) b) (x) y |-> x (x) (b y), degreewise bijective and A-linear.
    """
    w = a.window
    ma_c, ma_idx = tensor_complexes(mc, a.carrier)
    ma_act = {}
    for p in range(w + 1):
        for i in range(a.dim(p)):
            for q in range(w + 1 - p):
                mat = Matrix.zeros(ma_idx.dims[p + q], ma_idx.dims[q])
                for r in range(q + 1):
                    s = q - r
                    sgn = -1 if (p % 2 and r % 2) else 1
                    lm = a.lmul(p, i, s)
                    for x in range(mc.dim(r)):
                        for b in range(a.dim(s)):
                            for t, v in lm.column(b).items():
                                mat.rows[ma_idx.pos(p + q, r, x, t)][ma_idx.pos(q, r, x, b)] = rat(sgn) * v
                ma_act[(p, i, q)] = mat
    ma_mod = DgModule(a, ma_c, ma_act)

    mn_c, mn_idx = tensor_complexes(mc, n.carrier)
    mn_act = {}
    for p in range(w + 1):
        for i in range(a.dim(p)):
            for q in range(w + 1 - p):
                mat = Matrix.zeros(mn_idx.dims[p + q], mn_idx.dims[q])
                for r in range(q + 1):
                    s = q - r
                    sgn = -1 if (p % 2 and r % 2) else 1
                    av = n.act_m(p, i, s)
                    for x in range(mc.dim(r)):
                        for y in range(n.dim(s)):
                            for t, v in av.column(y).items():
                                mat.rows[mn_idx.pos(p + q, r, x, t)][mn_idx.pos(q, r, x, y)] = rat(sgn) * v
                mn_act[(p, i, q)] = mat
    mn_mod = DgModule(a, mn_c, mn_act)

    lhs = tensor_over_algebra(ma_mod, n)
    comps = []
    for ell in range(w + 1):
        raw = Matrix.zeros(mn_idx.dims[ell], lhs.index.dims[ell])
        # lhs plain basis: ((x at r, b at s), y at ell - r - s)
        for rq in range(ell + 1):
            yq = ell - rq
            for r in range(rq + 1):
                s = rq - r
                for x in range(mc.dim(r)):
                    for b in range(a.dim(s)):
                        xb = ma_idx.pos(rq, r, x, b)
                        act = n.act_m(s, b, yq)
                        for y in range(n.dim(yq)):
                            colpos = lhs.index.pos(ell, rq, xb, y)
                            for t, v in act.column(y).items():
                                _add_into(raw.rows[mn_idx.pos(ell, r, x, t)], colpos, v)
        if not (raw * lhs.relation_bases[ell].basis).is_zero():
            raise InternalCertificateError("prop-tri map does not kill the relations")
        comps.append(raw * lhs.sections[ell])
    chain = ChainMap(lhs.module.carrier, mn_c, tuple(comps))
    iso = all(
        comps[ell].rank() == mn_idx.dims[ell] and lhs.module.dim(ell) == mn_idx.dims[ell]
        for ell in range(w + 1)
    )
    mmap = ModuleMap(lhs.module, mn_mod, chain)
    mmap.validate_linear()
    return {
        "iso": iso,
        "dims_lhs": [lhs.module.dim(ell) for ell in range(w + 1)],
        "dims_rhs": list(mn_idx.dims),
    }


def check_kunneth_spheres(sphere_degrees, n: DgModule) -> dict:
    """Lemma: S (x) H(N) ~ H(S (x) N) for a direct sum of spheres S,
    via s (x) [y] |-> [s (x) y], compatibly with the H(A)-action.
    """
    from .complexes import build_complex

    w = n.window
    dims = {}
    for d in sphere_degrees:
        dims[d] = dims.get(d, 0) + 1
    sc = build_complex(w, dims, {})
    sn_c, sn_idx = tensor_complexes(sc, n.carrier)
    h_sn = homology(sn_c)
    h_n = homology(n.carrier)
    # expected dims: (S (x) H(N))_q
    ok = True
    degs = sorted(sphere_degrees)
    maps = {}
    for q in range(w + 1):
        expected = sum(h_n.h_dims[q - d] for d in degs if 0 <= q - d <= w)
        if expected != h_sn.h_dims[q]:
            ok = False
            continue
        cols = []
        for r in sorted(dims):
            if not (0 <= q - r <= w):
                continue
            for i in range(dims[r]):
                for j in range(h_n.h_dims[q - r]):
                    svec = [rat(0)] * sc.dim(r)
                    svec[i] = rat(1)
                    vec = sn_idx.embed(r, svec, q - r, h_n.rep(q - r, j))
                    cols.append(h_sn.classify(q, vec))
        mat = Matrix.from_columns(h_sn.h_dims[q], cols)
        maps[q] = mat
        if mat.rank() != h_sn.h_dims[q] or mat.ncols != h_sn.h_dims[q]:
            ok = False
    return {"iso": ok, "h_tensor": list(h_sn.h_dims), "maps": maps}
