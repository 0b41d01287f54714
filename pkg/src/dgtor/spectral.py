"""First-quadrant double complexes and their filtration spectral sequences.

Pages are honest subquotients of the total complex: each cell stores a
numerator basis, a denominator basis and chosen representatives inside
Tot_n, so page differentials, stabilization, convergence and edge maps are
all explicit matrices.  The total-complex basis is ordered by ascending
column index, which makes the horizontal filtration a coordinate prefix.
"""

from __future__ import annotations

from dataclasses import dataclass

from .complexes import Complex, HomologyData, InternalCertificateError, homology, induced_map
from .dg import DgAlgebra, DgModule, homology_algebra, homology_module, tensor_semifree_left
from .linalg import Matrix, Subspace, express_in, image, kernel, quotient, rat
from .resolutions import (
    DgResolution,
    cofibrant_replacement,
    dg_resolution_for_ss,
    graded_tor,
    homology_pairing,
)


@dataclass(eq=False)
class DoubleComplex:
    """Commuting first-quadrant grid; the sign lives in the total differential."""

    p_max: int
    q_max: int
    cells: dict  # (p, q) -> dimension
    d_h: dict  # (p, q) -> Matrix into (p-1, q)
    d_v: dict  # (p, q) -> Matrix into (p, q-1)

    def dim(self, p: int, q: int) -> int:
        return self.cells.get((p, q), 0)

    def dh(self, p: int, q: int) -> Matrix:
        return self.d_h.get((p, q), Matrix.zeros(self.dim(p - 1, q), self.dim(p, q)))

    def dv(self, p: int, q: int) -> Matrix:
        return self.d_v.get((p, q), Matrix.zeros(self.dim(p, q - 1), self.dim(p, q)))

    def validate(self):
        for (p, q) in sorted(self.cells):
            if p >= 2 and not (self.dh(p - 1, q) * self.dh(p, q)).is_zero():
                raise InternalCertificateError(f"(d^h)^2 != 0 at {(p, q)}")
            if q >= 2 and not (self.dv(p, q - 1) * self.dv(p, q)).is_zero():
                raise InternalCertificateError(f"(d^v)^2 != 0 at {(p, q)}")
            if p >= 1 and q >= 1:
                if self.dv(p - 1, q) * self.dh(p, q) != self.dh(p, q - 1) * self.dv(p, q):
                    raise InternalCertificateError(f"d^v d^h != d^h d^v at {(p, q)}")
        return self

    def transpose(self) -> "DoubleComplex":
        cells = {(q, p): d for (p, q), d in self.cells.items()}
        d_h = {(q, p): m for (p, q), m in self.d_v.items()}
        d_v = {(q, p): m for (p, q), m in self.d_h.items()}
        return DoubleComplex(self.q_max, self.p_max, cells, d_h, d_v)


@dataclass(eq=False)
class TotalComplex:
    complex: Complex
    offsets: dict  # (n, p) -> start of cell (p, n-p) in the degree-n basis
    prefix: dict  # (n, p) -> dimension of F_p in degree n
    dc: DoubleComplex


def total_complex(dc: DoubleComplex) -> TotalComplex:
    """Tot_n = sum of cells on the antidiagonal, d = d^h + (-1)^p d^v."""
    n_max = dc.p_max + dc.q_max
    offsets, prefix = {}, {}
    dims = []
    for n in range(n_max + 1):
        pos = 0
        for p in range(n + 1):
            q = n - p
            offsets[(n, p)] = pos
            pos += dc.dim(p, q)
            prefix[(n, p)] = pos
        dims.append(pos)
    diffs = [Matrix.zeros(0, 0)]
    for n in range(1, n_max + 1):
        m = Matrix.zeros(dims[n - 1], dims[n])
        for p in range(n + 1):
            q = n - p
            if dc.dim(p, q) == 0:
                continue
            co = offsets[(n, p)]
            if p >= 1:
                ro = offsets[(n - 1, p - 1)]
                for i, j, v in dc.dh(p, q).triplets():
                    m.rows[ro + i][co + j] = v
            if q >= 1:
                ro = offsets[(n - 1, p)]
                sgn = -1 if p % 2 else 1
                for i, j, v in dc.dv(p, q).triplets():
                    m.rows[ro + i][co + j] = rat(sgn) * v
        diffs.append(m)
    return TotalComplex(Complex(tuple(dims), tuple(diffs)), offsets, prefix, dc)


class Subquotient:
    """Z/B inside an ambient space, with explicit representative columns.

    One elimination of [B | Z] yields the reduced denominator basis, the
    representatives completing it inside Z, and the containment certificate
    B <= span(Z) (the join must not exceed the rank of Z).
    """

    __slots__ = ("ambient", "z", "b", "reps", "_full")

    def __init__(self, ambient: int, z_span: Matrix, b_span: Matrix, z_independent: bool = False):
        self.ambient = ambient
        self.z = z_span if z_independent else z_span.image()
        ext = b_span.hstack(self.z)
        _, pivots = ext._eliminate(block=b_span.ncols)
        b_cols = sorted(j for _, j in pivots if j < b_span.ncols)
        rep_cols = sorted(j - b_span.ncols for _, j in pivots if j >= b_span.ncols)
        if len(b_cols) + len(rep_cols) != self.z.ncols:
            raise InternalCertificateError("denominator not inside numerator")
        self.b = b_span.take_columns(b_cols)
        self.reps = self.z.take_columns(rep_cols)
        self._full = self.reps.hstack(self.b)

    @property
    def dim(self) -> int:
        return self.reps.ncols

    def reduce_many(self, vecs: Matrix) -> Matrix:
        """Classes of columns lying in Z; raises if one escapes the numerator."""
        sol = self._full.solve_many(vecs)
        if sol is None:
            raise InternalCertificateError("vector escapes the subquotient numerator")
        return sol.take_rows(range(self.reps.ncols))

    def same_spaces(self, other: "Subquotient") -> bool:
        return (
            Subspace(self.ambient, self.z).equals(Subspace(other.ambient, other.z))
            and Subspace(self.ambient, self.b).equals(Subspace(other.ambient, other.b))
        )


@dataclass(eq=False)
class SpectralSequence:
    tot: TotalComplex
    r_max: int
    pages: list  # pages[r]: dict (p, q) -> Subquotient
    differentials: list  # [r]: dict (p, q) -> Matrix E^r_{pq} -> E^r_{p-r, q+r-1}
    stabilized_at: dict  # (p, q) -> page index r from which cells stay constant

    def dim(self, r: int, p: int, q: int) -> int:
        cell = self.pages[r].get((p, q))
        return cell.dim if cell is not None else 0

    def einf(self, p: int, q: int):
        return self.pages[-1].get((p, q))

    def einf_dim(self, p: int, q: int) -> int:
        return self.dim(len(self.pages) - 1, p, q)

    def dims_grid(self, r: int) -> dict:
        return {f"{p},{q}": self.dim(r, p, q) for (p, q) in sorted(self.pages[r])}


def _filtration_cut(tot: TotalComplex, n: int, p: int) -> int:
    """dim of F_p inside Tot_n; full above the antidiagonal, empty below 0."""
    if n < 0 or n > tot.complex.window or p < 0:
        return 0
    if p >= n:
        return tot.complex.dims[n]
    return tot.prefix[(n, p)]


def _a_space(tot: TotalComplex, cache: dict, r: int, p: int, n: int) -> Matrix:
    """Basis of A^r_{p,n} = {x in F_p Tot_n : dx in F_{p-r}}."""
    if n < 0 or n > tot.complex.window:
        return Matrix.zeros(0, 0)
    dims_n = tot.complex.dims[n]
    if p < 0:
        return Matrix.zeros(dims_n, 0)
    key = (r, p, n)
    if key in cache:
        return cache[key]
    if r <= 0:
        # F_p itself: the coordinate prefix
        kp = _filtration_cut(tot, n, p)
        basis = Matrix.from_triplets(dims_n, kp, [(i, i, 1) for i in range(kp)])
        cache[key] = basis
        return basis
    prev = _a_space(tot, cache, r - 1, p, n)
    if n == 0:
        cache[key] = prev
        return prev
    d = tot.complex.diff(n)
    img = d * prev
    cut = _filtration_cut(tot, n - 1, p - r)
    tail = img.take_rows(range(cut, tot.complex.dims[n - 1]))
    coeff = tail.kernel()
    # prev has independent columns and coeff is a kernel basis, so the
    # product keeps full column rank
    basis = prev * coeff
    cache[key] = basis
    return basis


def spectral_sequence(dc: DoubleComplex, direction: str = "horizontal", r_max: int | None = None) -> SpectralSequence:
    """Pages of the filtration spectral sequence, r = 0 .. r_max.

    The vertical sequence is the horizontal one of the transposed grid; the
    total complexes differ by the sign isomorphism x_{pq} |-> (-1)^{pq} x_{pq}.
    """
    if direction == "vertical":
        dc = dc.transpose()
    elif direction != "horizontal":
        raise ValueError("direction must be horizontal or vertical")
    dc.validate()
    tot = total_complex(dc)
    if r_max is None:
        r_max = max(dc.p_max + 1, dc.q_max + 2) + 1
    cache: dict = {}
    pages, diffs = [], []
    for r in range(r_max + 1):
        page, dmaps = {}, {}
        for p in range(dc.p_max + 1):
            for q in range(dc.q_max + 1):
                n = p + q
                if dc.dim(p, q) == 0 and r >= 1:
                    # cell can only shrink from E^0 = C_pq
                    page[(p, q)] = Subquotient(
                        tot.complex.dim(n), Matrix.zeros(tot.complex.dim(n), 0), Matrix.zeros(tot.complex.dim(n), 0)
                    )
                    continue
                z = _a_space(tot, cache, r, p, n)
                below = _a_space(tot, cache, r - 1, p - 1, n)
                up = _a_space(tot, cache, r - 1, p + r - 1, n + 1)
                bd = tot.complex.diff(n + 1) * up if n + 1 <= tot.complex.window else Matrix.zeros(
                    tot.complex.dim(n), 0
                )
                page[(p, q)] = Subquotient(tot.complex.dim(n), z.hstack(below).image(), below.hstack(bd).image())
        pages.append(page)
        if r >= 1:
            for (p, q), cell in page.items():
                tp, tq = p - r, q + r - 1
                target = page.get((tp, tq))
                if cell.dim == 0 or target is None or target.dim == 0:
                    dmaps[(p, q)] = Matrix.zeros(target.dim if target else 0, cell.dim)
                    continue
                n = p + q
                imgs = tot.complex.diff(n) * cell.reps
                dmaps[(p, q)] = target.reduce_many(imgs)
            diffs.append(dmaps)
        else:
            diffs.append({})
    # d^r o d^r = 0 on every computed page
    for r in range(1, r_max + 1):
        for (p, q), m in diffs[r].items():
            nxt = diffs[r].get((p - r, q + r - 1))
            if nxt is not None and not (nxt * m).is_zero():
                raise InternalCertificateError(f"d^{r} o d^{r} != 0 at {(p, q)}")
    stabilized = {}
    for p in range(dc.p_max + 1):
        for q in range(dc.q_max + 1):
            r_stab = r_max
            for r in range(r_max, 0, -1):
                if pages[r][(p, q)].same_spaces(pages[r - 1][(p, q)]):
                    r_stab = r - 1
                else:
                    break
            stabilized[(p, q)] = r_stab
    return SpectralSequence(tot, r_max, pages, diffs, stabilized)


def page_homology_check(ss: SpectralSequence, r: int) -> bool:
    """Certify E^{r+1} = H(E^r, d^r) through the canonical comparison map."""
    for (p, q), nxt_cell in ss.pages[r + 1].items():
        cur = ss.pages[r][(p, q)]
        dout = ss.differentials[r].get((p, q), Matrix.zeros(0, cur.dim))
        din = ss.differentials[r].get((p + r, q - r + 1), Matrix.zeros(cur.dim, 0))
        ker_sp = kernel(dout)
        img_sp = image(din)
        if not ker_sp.contains(img_sp):
            return False
        hdim = ker_sp.dim - img_sp.dim
        if hdim != nxt_cell.dim:
            return False
        if nxt_cell.dim == 0:
            continue
        # canonical map: representatives of E^{r+1} classes read inside E^r
        coords = cur.reduce_many(nxt_cell.reps)
        in_ker = express_in(ker_sp.basis, coords)
        if in_ker is None:
            return False
        _, proj, _ = quotient(ker_sp.dim, Subspace.from_span(ker_sp.dim, express_in(ker_sp.basis, img_sp.basis)))
        if (proj * in_ker).rank() != hdim:
            return False
    return True


@dataclass(eq=False)
class ConvergenceReport:
    entries: dict  # (p, q) -> {stable_page, einf_dim, graded_dim, match}
    h_tot: HomologyData

    def all_match(self) -> bool:
        return all(e["match"] for e in self.entries.values())


def converge_check(ss: SpectralSequence, region=None) -> ConvergenceReport:
    """E^infty against the graded pieces of the filtered homology of Tot.

    The comparison is the explicit class map, not a dimension count.
    """
    tot = ss.tot
    h = homology(tot.complex)
    entries = {}
    cells = sorted(ss.pages[-1]) if region is None else sorted(region)
    for (p, q) in cells:
        n = p + q
        if n > tot.complex.window:
            continue
        cyc = Subspace.full(tot.complex.dim(n)) if n == 0 else kernel(tot.complex.diff(n))
        bnd = (
            image(tot.complex.diff(n + 1))
            if n + 1 <= tot.complex.window
            else Subspace.zero(tot.complex.dim(n))
        )
        kp = _filtration_cut(tot, n, p)
        kp1 = _filtration_cut(tot, n, p - 1)
        pref_p = Matrix.from_triplets(tot.complex.dim(n), kp, [(i, i, 1) for i in range(kp)])
        pref_p1 = Matrix.from_triplets(tot.complex.dim(n), kp1, [(i, i, 1) for i in range(kp1)])
        zp = Subspace(tot.complex.dim(n), pref_p).intersect(cyc)
        zp1 = Subspace(tot.complex.dim(n), pref_p1).intersect(cyc)
        graded = Subquotient(
            tot.complex.dim(n), zp.basis.hstack(bnd.basis).image(), zp1.basis.hstack(bnd.basis).image()
        )
        einf = ss.einf(p, q)
        match = einf.dim == graded.dim
        if match and einf.dim > 0:
            cmp_m = graded.reduce_many(einf.reps)
            match = cmp_m.rank() == graded.dim
        entries[(p, q)] = {
            "stable_page": ss.stabilized_at.get((p, q)),
            "einf_dim": einf.dim,
            "graded_dim": graded.dim,
            "match": bool(match),
        }
    return ConvergenceReport(entries, h)


# -- the Tor spectral sequence -------------------------------------------------


@dataclass(eq=False)
class TorSpectralSequence:
    algebra: DgAlgebra
    left: object
    right: object
    window: int
    p_max: int
    resolution: DgResolution
    grid: DoubleComplex
    ss: SpectralSequence
    tor: object  # independent TorTable
    e2_region: list  # (p, q) cells where the E^2 identification is certified
    e2_match: bool
    convergence: ConvergenceReport | None
    abutment_ok: bool
    edge: dict  # q -> {"matrix": Matrix, "iso": bool}
    derived: object  # SemifreeLeftTensor of QM (x) QN
    h_derived: HomologyData


def build_grid(res: DgResolution, qn_module, p_top: int) -> tuple[DoubleComplex, list]:
    """Cells (P_p (x)_A Q)_q with d^h = pi-tilde (x) id and d^v the tensor differential."""
    w = res.x0.window
    tensors = [tensor_semifree_left(res.stages[p].p, qn_module) for p in range(p_top + 1)]
    cells, d_h, d_v = {}, {}, {}
    for p in range(p_top + 1):
        t = tensors[p]
        for q in range(w + 1):
            cells[(p, q)] = t.module.dim(q)
            if q >= 1:
                d_v[(p, q)] = t.module.carrier.diff(q)
        if p >= 1:
            pit = res.pi_tilde(p)
            prev = tensors[p - 1]
            sf = res.stages[p].p
            for q in range(w + 1):
                mat = Matrix.zeros(prev.module.dim(q), t.module.dim(q))
                for gi, off in t.index.offsets[q].items():
                    g = sf.gens[gi]
                    wv = pit.component(g.degree).apply(sf.gen_element(gi))
                    s = q - g.degree
                    for j in range(qn_module.dim(s)):
                        yv = [rat(1) if tt == j else rat(0) for tt in range(qn_module.dim(s))]
                        col = prev.embed(g.degree, wv, s, yv)
                        for tt, v in enumerate(col):
                            if v != 0:
                                mat.rows[tt][off + j] = v
                d_h[(p, q)] = mat
    dc = DoubleComplex(p_top, w, cells, d_h, d_v)
    dc.validate()
    return dc, tensors


def tor_spectral_sequence(
    a: DgAlgebra,
    m,
    n,
    p_max: int = 6,
    with_pages: bool = True,
    resolution: DgResolution | None = None,
) -> TorSpectralSequence:
    """Assemble the first-quadrant spectral sequence of the double complex
    (P_p (x)_A Q)_q, certify its E^2 page against the independently computed
    graded Tor of the homologies, and match E^infty with the filtration of
    the homology of the derived tensor product.

    Certificates are restricted to p <= p_max and q <= window-1 for the E^2
    identification, and to p+q <= window-1 for convergence.
    """
    w = a.window
    rep_m = cofibrant_replacement(m)
    rep_n = cofibrant_replacement(n)
    x = rep_m.module
    qn = rep_n.module
    if resolution is None:
        resolution = dg_resolution_for_ss(a, x.module, p_max + 1)
    grid, tensors = build_grid(resolution, qn.module, p_max + 1)

    ss = spectral_sequence(grid, "horizontal", r_max=None if with_pages else 2)

    # independent second page: graded Tor over H(A) of H(m), H(n)
    ha, ha_data = homology_algebra(a)
    target_m = rep_m.quasi_iso.target
    target_n = rep_n.quasi_iso.target
    hm_mod, _ = homology_module(target_m, ha, ha_data)
    hn_mod, _ = homology_module(target_n, ha, ha_data)
    tor = graded_tor(ha, hm_mod, hn_mod, p_max)
    e2_region = [(p, q) for p in range(p_max + 1) for q in range(w)]
    e2_match = all(ss.dim(2, p, q) == tor.dim(p, q) for (p, q) in e2_region)

    # abutment: H(Tot) ~ H(QM (x) QN) through projection onto the p=0 column
    derived = tensor_semifree_left(x, qn.module)
    h_derived = homology(derived.module.carrier)
    abutment_ok = _check_abutment(resolution, tensors, derived, ss, w)

    convergence = None
    if with_pages:
        conv_region = [(p, q) for p in range(p_max + 1) for q in range(w) if p + q <= min(w - 1, p_max)]
        convergence = converge_check(ss, conv_region)

    # edge maps (H(M) (x)_{H(A)} H(N))_q -> H_q(M (x)^L N)
    hx_mod, hx_data = homology_module(x.module, ha, ha_data)
    hq_mod, hq_data = homology_module(qn.module, ha, ha_data)
    _, mats, isos = homology_pairing(hx_mod, hx_data, hq_mod, hq_data, derived.embed, h_derived, upto=w - 1)
    edge = {q: {"matrix": mats[q], "iso": isos[q]} for q in range(w)}

    return TorSpectralSequence(
        a,
        m,
        n,
        w,
        p_max,
        resolution,
        grid,
        ss,
        tor,
        e2_region,
        e2_match,
        convergence,
        abutment_ok,
        edge,
        derived,
        h_derived,
    )


def _check_abutment(res: DgResolution, tensors, derived, ss: SpectralSequence, w: int) -> bool:
    """The projection Tot -> QM (x) QN is a quasi-isomorphism through window-1."""
    from .complexes import ChainMap

    tot = ss.tot
    t0 = tensors[0]
    pi0 = res.stages[0].pi
    sf0 = res.stages[0].p
    qn_mod = t0.right
    comps = []
    for nn in range(tot.complex.window + 1):
        mat = Matrix.zeros(derived.module.dim(nn) if nn <= w else 0, tot.complex.dim(nn))
        if nn <= w and (nn, 0) in tot.offsets and tot.dc.dim(0, nn) > 0:
            off = tot.offsets[(nn, 0)]
            for gi, goff in t0.index.offsets[nn].items():
                g = sf0.gens[gi]
                val = pi0.component(g.degree).apply(sf0.gen_element(gi))
                s = nn - g.degree
                for j in range(qn_mod.dim(s)):
                    yv = [rat(1) if tt == j else rat(0) for tt in range(qn_mod.dim(s))]
                    col = derived.embed(g.degree, val, s, yv)
                    for tt, v in enumerate(col):
                        if v != 0:
                            mat.rows[tt][off + goff + j] = v
        comps.append(mat)
    # extend the derived complex by zeros up to the total window for the map
    from .complexes import build_complex

    ext = build_complex(
        tot.complex.window,
        {nn: derived.module.dim(nn) for nn in range(w + 1)},
        {nn: derived.module.carrier.diff(nn) for nn in range(1, w + 1)},
    )
    eps = ChainMap(tot.complex, ext, tuple(comps))
    h_tot = homology(tot.complex)
    h_ext = homology(ext)
    mats = induced_map(eps, h_tot, h_ext)
    upto = min(w - 1, res.stages and len(res.stages) - 2 or 0)
    return all(
        h_tot.h_dims[nn] == h_ext.h_dims[nn] and mats[nn].rank() == h_ext.h_dims[nn]
        for nn in range(upto + 1)
    )
