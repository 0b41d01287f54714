"""Bounded non-negatively graded chain complexes over the rationals.

A complex lives on degrees 0..window.  Homology carries explicit
cycle-section / class-projection matrices so that induced maps, long exact
sequences and spectral comparisons are honest matrices, never dimension
counts.  Shifting down may produce a single degree -1 slot, consumed only by
good truncation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .linalg import Matrix, Subspace, express_in, image, kernel, quotient


class InternalCertificateError(AssertionError):
    """An internal exactness/commutation certificate failed: engine bug."""


@dataclass(frozen=True)
class Complex:
    """dims[n] for 0 <= n <= window; diffs[n] : degree n -> degree n-1.

    diffs has one entry per degree 1..window (index 0 is a placeholder).
    """

    dims: tuple
    diffs: tuple

    def __post_init__(self):
        if len(self.diffs) != len(self.dims):
            raise ValueError("need one differential slot per degree")
        for n in range(1, len(self.dims)):
            d = self.diffs[n]
            if d.nrows != self.dims[n - 1] or d.ncols != self.dims[n]:
                raise ValueError(f"differential d_{n} has wrong shape")
        for n in range(1, len(self.dims) - 1):
            if not (self.diffs[n] * self.diffs[n + 1]).is_zero():
                raise ValueError(f"d_{n} o d_{n + 1} != 0")

    @property
    def window(self) -> int:
        return len(self.dims) - 1

    def dim(self, n: int) -> int:
        if 0 <= n <= self.window:
            return self.dims[n]
        return 0

    def diff(self, n: int) -> Matrix:
        if 1 <= n <= self.window:
            return self.diffs[n]
        return Matrix.zeros(self.dim(n - 1), self.dim(n))

    def total_dim(self) -> int:
        return sum(self.dims)

    def is_zero(self) -> bool:
        return all(d == 0 for d in self.dims)


def build_complex(window: int, dims: dict | list, diffs: dict) -> Complex:
    """Assemble a complex from per-degree dimensions and sparse differentials."""
    dvec = [0] * (window + 1)
    items = dims.items() if isinstance(dims, dict) else enumerate(dims)
    for n, d in items:
        if n > window:
            raise ValueError(f"degree {n} beyond window {window}")
        dvec[n] = d
    mats = [Matrix.zeros(0, 0)]
    for n in range(1, window + 1):
        mats.append(diffs.get(n, Matrix.zeros(dvec[n - 1], dvec[n])))
    return Complex(tuple(dvec), tuple(mats))


def zero_complex(window: int) -> Complex:
    return build_complex(window, {}, {})


def sphere(n: int, window: int) -> Complex:
    """k concentrated in degree n with zero differential."""
    return build_complex(window, {n: 1}, {})


def disk(n: int, window: int) -> Complex:
    """The acyclic complex k --id--> k in degrees n, n-1."""
    if n < 1:
        raise ValueError("disk needs degree >= 1")
    return build_complex(window, {n: 1, n - 1: 1}, {n: Matrix.identity(1)})


def direct_sum(a: Complex, b: Complex) -> Complex:
    if a.window != b.window:
        raise ValueError("window mismatch")
    dims = tuple(da + db for da, db in zip(a.dims, b.dims))
    diffs = [Matrix.zeros(0, 0)]
    for n in range(1, a.window + 1):
        m = Matrix.zeros(dims[n - 1], dims[n])
        for i, j, v in a.diffs[n].triplets():
            m.rows[i][j] = v
        for i, j, v in b.diffs[n].triplets():
            m.rows[i + a.dims[n - 1]][j + a.dims[n]] = v
        diffs.append(m)
    return Complex(dims, tuple(diffs))


@dataclass(frozen=True)
class ChainMap:
    source: Complex
    target: Complex
    components: tuple  # Matrix per degree 0..window

    def __post_init__(self):
        if self.source.window != self.target.window:
            raise ValueError("window mismatch")
        for n in range(self.source.window + 1):
            f = self.components[n]
            if f.nrows != self.target.dims[n] or f.ncols != self.source.dims[n]:
                raise ValueError(f"component {n} has wrong shape")
        for n in range(1, self.source.window + 1):
            lhs = self.target.diffs[n] * self.components[n]
            rhs = self.components[n - 1] * self.source.diffs[n]
            if lhs != rhs:
                raise ValueError(f"does not commute with differentials at degree {n}")

    def component(self, n: int) -> Matrix:
        return self.components[n]

    def compose(self, inner: "ChainMap") -> "ChainMap":
        if inner.target != self.source:
            raise ValueError("composition mismatch")
        comps = tuple(f * g for f, g in zip(self.components, inner.components))
        return ChainMap(inner.source, self.target, comps)

    def is_surjective_positive_degrees(self) -> bool:
        """Fibration test: surjective in every strictly positive degree."""
        return all(
            self.components[n].rank() == self.target.dims[n]
            for n in range(1, self.source.window + 1)
        )


def identity_map(c: Complex) -> ChainMap:
    return ChainMap(c, c, tuple(Matrix.identity(d) for d in c.dims))


def zero_map(source: Complex, target: Complex) -> ChainMap:
    return ChainMap(
        source, target, tuple(Matrix.zeros(dt, ds) for ds, dt in zip(source.dims, target.dims))
    )


@dataclass(frozen=True)
class HomologyData:
    """Explicit homology of a complex.

    Per degree n: h_dims[n] classes, sections[n] holds cycle representatives
    as columns, projections[n] maps the ambient degree-n space onto class
    coordinates (only meaningful on cycles; boundaries go to zero).  The top
    degree assumes nothing enters from above the window.
    """

    complex: Complex
    h_dims: tuple
    sections: tuple
    projections: tuple
    cycle_bases: tuple

    @property
    def window(self) -> int:
        return self.complex.window

    def dim(self, n: int) -> int:
        if 0 <= n <= self.window:
            return self.h_dims[n]
        return 0

    def classify(self, n: int, vec) -> list:
        """Class coordinates of a cycle at degree n."""
        dn = self.complex.diff(n)
        if any(v != 0 for v in dn.apply(list(vec))):
            raise InternalCertificateError("classify called on a non-cycle")
        return self.projections[n].apply(list(vec))

    def rep(self, n: int, k: int) -> list:
        col = self.sections[n].column(k)
        return [col.get(i, 0) for i in range(self.complex.dims[n])]

    def is_acyclic(self, upto: int | None = None) -> bool:
        upto = self.window if upto is None else upto
        return all(self.h_dims[n] == 0 for n in range(0, upto + 1))


def homology(c: Complex) -> HomologyData:
    h_dims, secs, projs, cycs = [], [], [], []
    for n in range(c.window + 1):
        amb = c.dims[n]
        cyc = Subspace.full(amb) if n == 0 else kernel(c.diffs[n])
        bnd = image(c.diffs[n + 1]) if n < c.window else Subspace.zero(amb)
        b_in_z = express_in(cyc.basis, bnd.basis)
        if b_in_z is None:
            raise InternalCertificateError("boundaries not contained in cycles")
        hdim, proj_z, sec_z = quotient(cyc.dim, Subspace.from_span(cyc.dim, b_in_z))
        section = cyc.basis * sec_z
        # extend Z-coordinates to the whole ambient space, complement -> 0
        _, _, comp = quotient(amb, cyc)
        full = cyc.basis.hstack(comp)
        coords = full.solve_many(Matrix.identity(amb))
        z_coords = coords.take_rows(range(cyc.dim))
        projection = proj_z * z_coords
        h_dims.append(hdim)
        secs.append(section)
        projs.append(projection)
        cycs.append(cyc)
    return HomologyData(c, tuple(h_dims), tuple(secs), tuple(projs), tuple(cycs))


def induced_map(f: ChainMap, h_src: HomologyData, h_tgt: HomologyData) -> list:
    """H(f) per degree.  Raises when a cycle image fails to be a cycle."""
    out = []
    for n in range(f.source.window + 1):
        img = f.components[n] * h_src.sections[n]
        dtgt = h_tgt.complex.diff(n)
        if not (dtgt * img).is_zero():
            raise InternalCertificateError(f"image of a cycle is not a cycle at degree {n}")
        out.append(h_tgt.projections[n] * img)
    return out


def is_quasi_iso(f: ChainMap, upto: int | None = None) -> bool:
    hs, ht = homology(f.source), homology(f.target)
    upto = f.source.window if upto is None else upto
    mats = induced_map(f, hs, ht)
    for n in range(upto + 1):
        if hs.h_dims[n] != ht.h_dims[n] or mats[n].rank() != ht.h_dims[n]:
            return False
    return True


# -- shifts and truncation --------------------------------------------------


@dataclass(frozen=True)
class ShiftedComplex:
    """A complex with one extra degree -1 slot, produced by shift_down."""

    complex: Complex
    minus1_dim: int
    d0: Matrix  # degree 0 -> degree -1

    def __post_init__(self):
        if self.d0.nrows != self.minus1_dim or self.d0.ncols != self.complex.dims[0]:
            raise ValueError("d0 has wrong shape")
        if self.complex.window >= 1 and not (self.d0 * self.complex.diffs[1]).is_zero():
            raise ValueError("d_{-1..0} o d_1 != 0")


def shift_down(c: Complex) -> ShiftedComplex:
    """D[-1]: degree n holds D_{n+1}, differentials negated."""
    w = c.window
    dims = tuple(c.dims[n + 1] for n in range(w)) + (0,)
    diffs = [Matrix.zeros(0, 0)]
    for n in range(1, w + 1):
        diffs.append(-c.diff(n + 1))
    return ShiftedComplex(Complex(dims, tuple(diffs)), c.dims[0], -c.diffs[1] if w >= 1 else Matrix.zeros(c.dims[0], 0))


def suspension(c: Complex) -> Complex:
    """1-shift: degree n holds D_{n-1}, differentials negated, degree 0 empty.

    Content at the top window degree is dropped; lossless when c.dims[-1]=0.
    """
    w = c.window
    dims = (0,) + tuple(c.dims[n - 1] for n in range(1, w + 1))
    diffs = [Matrix.zeros(0, 0), Matrix.zeros(0, c.dims[0])]
    for n in range(2, w + 1):
        diffs.append(-c.diffs[n - 1])
    return Complex(dims, tuple(diffs))


def truncate_geq0(sc: ShiftedComplex | Complex) -> tuple[Complex, ChainMap]:
    """Good truncation: degree 0 becomes ker(d_0); returns the inclusion."""
    if isinstance(sc, Complex):
        return sc, identity_map(sc)
    c = sc.complex
    ker0 = kernel(sc.d0)
    dims = (ker0.dim,) + c.dims[1:]
    diffs = [Matrix.zeros(0, 0)]
    if c.window >= 1:
        d1 = express_in(ker0.basis, c.diffs[1])
        if d1 is None:
            raise InternalCertificateError("image of d_1 not inside ker d_0")
        diffs.append(d1)
        diffs.extend(c.diffs[2:])
    trunc = Complex(dims, tuple(diffs))
    comps = [ker0.basis] + [Matrix.identity(d) for d in c.dims[1:]]
    return trunc, ChainMap(trunc, c, tuple(comps))


def loop(c: Complex) -> tuple[Complex, ChainMap]:
    """Omega: good truncation of the (-1)-shift; inclusion targets D[-1]."""
    return truncate_geq0(shift_down(c))


# -- path objects, mapping fibers, long exact sequences ----------------------


def _block(nrows, ncols, blocks) -> Matrix:
    """blocks: list of (row_off, col_off, Matrix, sign)."""
    m = Matrix.zeros(nrows, ncols)
    for ro, co, b, s in blocks:
        for i, j, v in b.triplets():
            m.rows[i + ro][j + co] = s * v
    return m


@dataclass(frozen=True)
class Path0Data:
    complex: Complex
    projection: ChainMap  # onto the base complex
    basis0: Matrix  # degree-0 basis inside D_0 (+) D_1


def path0(d: Complex) -> Path0Data:
    """Based path object: good truncation of degree n |-> D_n (+) D_{n+1}
    with differential (x, y) |-> (dx, -x-dy).  Acyclic by construction;
    the projection onto the first summand is a fibration.
    """
    w = d.window
    raw_dims = [d.dim(n) + d.dim(n + 1) for n in range(w + 1)]
    # degree-0 constraint (x, y) |-> -x - d_1 y into the -1 slot
    c0 = _block(d.dims[0], raw_dims[0], [(0, 0, Matrix.identity(d.dims[0]), -1), (0, d.dims[0], d.diff(1), -1)])
    basis0 = c0.kernel()
    dims = [basis0.ncols] + raw_dims[1:]
    diffs = [Matrix.zeros(0, 0)]
    for n in range(1, w + 1):
        raw = _block(
            raw_dims[n - 1],
            raw_dims[n],
            [
                (0, 0, d.diff(n), 1),
                (d.dim(n - 1), 0, Matrix.identity(d.dim(n)), -1),
                (d.dim(n - 1), d.dim(n), d.diff(n + 1), -1),
            ],
        )
        if n == 1:
            raw = express_in(basis0, raw)
            if raw is None:
                raise InternalCertificateError("path object d_1 misses ker d_0")
        diffs.append(raw)
    p = Complex(tuple(dims), tuple(diffs))
    comps = [basis0.take_rows(range(d.dims[0]))]
    for n in range(1, w + 1):
        comps.append(_block(d.dim(n), raw_dims[n], [(0, 0, Matrix.identity(d.dim(n)), 1)]))
    proj = ChainMap(p, d, tuple(comps))
    if not homology(p).is_acyclic():
        raise InternalCertificateError("path object is not acyclic")
    return Path0Data(p, proj, basis0)


@dataclass(frozen=True)
class FiberData:
    """Mapping fiber of f: B -> D with its canonical square and connecting map."""

    f: ChainMap
    fiber: Complex
    pi_f: ChainMap  # fiber -> B
    p_f: ChainMap  # fiber -> Path_0 D
    path: Path0Data
    omega: Complex  # loop of D
    omega_incl: ChainMap  # loop -> D[-1] nonnegative part
    delta_f: ChainMap  # loop of D -> fiber
    basis0: Matrix  # degree-0 basis inside B_0 (+) D_1


def mapping_fiber(f: ChainMap) -> FiberData:
    b, d = f.source, f.target
    w = b.window
    path = path0(d)
    raw_dims = [b.dim(n) + d.dim(n + 1) for n in range(w + 1)]
    # degree-0 constraint (v, y) |-> -f(v) - d_1 y
    c0 = _block(d.dims[0], raw_dims[0], [(0, 0, f.components[0], -1), (0, b.dims[0], d.diff(1), -1)])
    basis0 = c0.kernel()
    dims = [basis0.ncols] + raw_dims[1:]
    diffs = [Matrix.zeros(0, 0)]
    for n in range(1, w + 1):
        raw = _block(
            raw_dims[n - 1],
            raw_dims[n],
            [
                (0, 0, b.diff(n), 1),
                (b.dim(n - 1), 0, f.components[n], -1),
                (b.dim(n - 1), b.dim(n), d.diff(n + 1), -1),
            ],
        )
        if n == 1:
            raw = express_in(basis0, raw)
            if raw is None:
                raise InternalCertificateError("fiber d_1 misses the truncated degree 0")
        diffs.append(raw)
    k = Complex(tuple(dims), tuple(diffs))

    pi_comps = [basis0.take_rows(range(b.dims[0]))]
    for n in range(1, w + 1):
        pi_comps.append(_block(b.dim(n), raw_dims[n], [(0, 0, Matrix.identity(b.dim(n)), 1)]))
    pi_f = ChainMap(k, b, tuple(pi_comps))

    p_comps = []
    raw0 = _block(
        d.dim(0) + d.dim(1), raw_dims[0], [(0, 0, f.components[0], 1), (d.dim(0), b.dim(0), Matrix.identity(d.dim(1)), 1)]
    )
    p0 = express_in(path.basis0, raw0 * basis0)
    if p0 is None:
        raise InternalCertificateError("fiber does not land in the path object")
    p_comps.append(p0)
    for n in range(1, w + 1):
        p_comps.append(
            _block(
                d.dim(n) + d.dim(n + 1),
                raw_dims[n],
                [(0, 0, f.components[n], 1), (d.dim(n), b.dim(n), Matrix.identity(d.dim(n + 1)), 1)],
            )
        )
    p_f = ChainMap(k, path.complex, tuple(p_comps))

    omega, omega_incl = loop(d)
    del_comps = []
    raw0 = _block(raw_dims[0], d.dim(1), [(b.dim(0), 0, Matrix.identity(d.dim(1)), 1)])
    d0 = express_in(basis0, raw0 * omega_incl.components[0])
    if d0 is None:
        raise InternalCertificateError("connecting map misses the fiber")
    del_comps.append(d0)
    for n in range(1, w + 1):
        del_comps.append(_block(raw_dims[n], d.dim(n + 1), [(b.dim(n), 0, Matrix.identity(d.dim(n + 1)), 1)]))
    delta_f = ChainMap(omega, k, tuple(del_comps))
    return FiberData(f, k, pi_f, p_f, path, omega, omega_incl, delta_f, basis0)


@dataclass(frozen=True)
class LongExactSequence:
    """... -> H_{n+1}(D) -> H_n(K_f) -> H_n(B) -> H_n(D) -> ...

    nodes: list of (label, degree, dim) from the top of the window down;
    maps[i] connects nodes[i] -> nodes[i+1].  exact_upto is the largest
    degree through which interior exactness is certified.
    """

    nodes: list
    maps: list
    exact_upto: int


def _connecting_matrices(fib: FiberData, h_d: HomologyData, h_k: HomologyData) -> list:
    """H_{n+1}(D) -> H_n(K_f) induced by the connecting map, for each n."""
    b, d = fib.f.source, fib.f.target
    w = d.window
    out = []
    for n in range(w):
        cols = []
        for t in range(h_d.h_dims[n + 1]):
            z = h_d.rep(n + 1, t)  # cycle in D_{n+1}
            if n >= 1:
                vec = [0] * b.dim(n) + list(z)
            else:
                raw = [0] * b.dim(0) + list(z)
                coords = fib.basis0.solve(raw)
                if coords is None:
                    raise InternalCertificateError("connecting image outside fiber degree 0")
                vec = coords
            cols.append(h_k.classify(n, vec))
        out.append(Matrix.from_columns(h_k.h_dims[n], cols))
    return out


def long_exact_sequence(fib: FiberData) -> LongExactSequence:
    b, d = fib.f.source, fib.f.target
    w = b.window
    h_b, h_d, h_k = homology(b), homology(d), homology(fib.fiber)
    hf = induced_map(fib.f, h_b, h_d)
    hpi = induced_map(fib.pi_f, h_k, h_b)
    conn = _connecting_matrices(fib, h_d, h_k)

    nodes, maps = [], []
    for n in range(w - 1, -1, -1):
        if not nodes:
            nodes.append(("H(D)", n + 1, h_d.h_dims[n + 1]))
        maps.append(conn[n])
        nodes.append(("H(K)", n, h_k.h_dims[n]))
        maps.append(hpi[n])
        nodes.append(("H(B)", n, h_b.h_dims[n]))
        maps.append(hf[n])
        nodes.append(("H(D)", n, h_d.h_dims[n]))

    for i in range(1, len(nodes) - 1):
        incoming, outgoing = maps[i - 1], maps[i]
        im = image(incoming)
        ker = kernel(outgoing)
        if not im.equals(ker):
            raise InternalCertificateError(
                f"long exact sequence fails at node {nodes[i]}: im dim {im.dim}, ker dim {ker.dim}"
            )
    return LongExactSequence(nodes, maps, w - 1)
