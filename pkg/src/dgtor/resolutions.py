"""Semifree replacements, free resolutions, graded Tor and derived tensors.

The cofibrant replacement attaches cells in stages: spheres hitting a basis
of every homology degree, disks restoring degreewise surjectivity (added one
at a time against the current module-generated image, which keeps kernels
small), then cells killing the kernel of the induced homology map from the
bottom degree up.  Resolutions for the spectral sequence iterate the same
stage construction on literal kernels, so the short exact sequences hold on
the nose and are certified, not assumed.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from .complexes import (
    Complex,
    HomologyData,
    InternalCertificateError,
    homology,
    induced_map,
)
from .dg import (
    DgAlgebra,
    DgModule,
    ModuleMap,
    SemifreeModule,
    ValidationError,
    module_identity,
    morphism_from_free,
    restrict_module,
    tensor_over_algebra,
    tensor_semifree_left,
    tensor_semifree_right,
)
from .linalg import Matrix, Subspace, express_in, image, kernel, rat


@dataclass(eq=False)
class SemifreeReplacement:
    module: SemifreeModule
    quasi_iso: ModuleMap
    stage_log: list
    valid_upto: int
    identity: bool = False

    @property
    def target(self) -> DgModule:
        return self.quasi_iso.target


def _component_image(values, sf: SemifreeModule, target: DgModule, ell: int) -> Matrix:
    """Column span of the candidate map at degree ell."""
    a = sf.algebra
    cols = []
    for gi, off in sf._offsets[ell].items():
        g = sf.gens[gi]
        q = ell - g.degree
        for aj in range(a.dim(q)):
            img = target.act_m(q, aj, g.degree).apply(list(values[gi]))
            cols.append({t: v for t, v in enumerate(img) if v != 0})
    return Matrix.from_columns(target.dim(ell), cols)


def _stage_cover(m: DgModule, name_prefix: str):
    """Spheres on a homology basis plus greedy disks for positive-degree surjectivity.

    Returns (semifree module, values, sphere generator indices).
    """
    w = m.window
    hm = homology(m.carrier)
    sf = SemifreeModule(m.algebra)
    values: list = []
    spheres: list = []
    for k in range(w + 1):
        for t in range(hm.h_dims[k]):
            gi = sf.add_generator(f"{name_prefix}s{k}.{t}", k, rebuild=False)
            values.append(hm.rep(k, t))
            spheres.append(gi)
    sf._rebuild()
    for ell in range(1, w + 1):
        while True:
            img = image(_component_image(values, sf, m, ell))
            missing = None
            for j in range(m.dim(ell)):
                e = [rat(1) if t == j else rat(0) for t in range(m.dim(ell))]
                if img.basis.solve(e) is None:
                    missing = e
                    break
            if missing is None:
                break
            low = sf.add_generator(f"{name_prefix}d{ell}.{len(sf.gens)}-", ell - 1, rebuild=False)
            dv = [rat(0)] * sf.dim(ell - 1)
            for j, c in enumerate(m.algebra.unit):
                if c != 0:
                    dv[sf.pos(ell - 1, low, j)] = rat(c)
            sf.add_generator(f"{name_prefix}d{ell}.{len(sf.gens)}", ell, dv, rebuild=False)
            sf._rebuild()
            dval = m.carrier.diff(ell).apply(missing)
            values.append(dval)
            values.append(missing)
    return sf, values, spheres


def semifree_replace(m: DgModule) -> SemifreeReplacement:
    """Cofibrant replacement Q(m) -> m: quasi-isomorphism in degrees < window,
    surjective in positive degrees, built by staged cell attachment.
    """
    w = m.window
    sf, values, spheres = _stage_cover(m, "q")
    log = [{"stage": 0, "generators": len(sf.gens)}]
    for k in range(w):
        f = morphism_from_free(sf, values, m)
        h_src = homology(sf.module.carrier)
        h_tgt = homology(m.carrier)
        hk = induced_map(f.chain, h_src, h_tgt)[k]
        ker_basis = hk.kernel()
        added = 0
        for c in range(ker_basis.ncols):
            coords = ker_basis.column(c)
            z = [rat(0)] * sf.dim(k)
            for t, v in coords.items():
                for u, rv in enumerate(h_src.rep(k, t)):
                    z[u] += v * rv
            fz = f.component(k).apply(z)
            if k + 1 <= w:
                wvec = m.carrier.diff(k + 1).solve(fz)
            else:
                wvec = None
            if wvec is None:
                raise InternalCertificateError("kernel class image is not a boundary")
            sf.add_generator(f"c{k + 1}.{len(sf.gens)}", k + 1, z, rebuild=False)
            sf._rebuild()
            values.append(wvec)
            added += 1
        if added:
            log.append({"stage": k + 1, "generators": added})
    q = morphism_from_free(sf, values, m)
    rep = SemifreeReplacement(sf, q, log, w - 1)
    _certify_replacement(rep)
    return rep


def _certify_replacement(rep: SemifreeReplacement):
    q, w = rep.quasi_iso, rep.module.window
    h_src = homology(q.source.carrier)
    h_tgt = homology(q.target.carrier)
    mats = induced_map(q.chain, h_src, h_tgt)
    for n in range(rep.valid_upto + 1):
        if h_src.h_dims[n] != h_tgt.h_dims[n] or mats[n].rank() != h_tgt.h_dims[n]:
            raise InternalCertificateError(f"replacement not a quasi-isomorphism at degree {n}")
    for n in range(1, w + 1):
        if q.component(n).rank() != q.target.dim(n):
            raise InternalCertificateError(f"replacement not surjective at degree {n}")


def cofibrant_replacement(m) -> SemifreeReplacement:
    """Identity on semifree modules, staged replacement otherwise."""
    if isinstance(m, SemifreeModule):
        return SemifreeReplacement(m, module_identity(m.module), [], m.window - 1, identity=True)
    if isinstance(m, SemifreeReplacement):
        return m
    return semifree_replace(m)


# -- resolutions for the spectral sequence ------------------------------------


@dataclass(eq=False)
class ResolutionStage:
    p: SemifreeModule
    pi: ModuleMap  # P_p -> X_p, surjective
    spheres: list  # generator indices whose classes form the free homology basis
    x_next: DgModule  # ker(pi)
    incl: ModuleMap  # X_{p+1} -> P_p


@dataclass(eq=False)
class DgResolution:
    algebra: DgAlgebra
    x0: DgModule
    stages: list
    certificates: dict

    def pi_tilde(self, p: int) -> ModuleMap:
        """P_p -> P_{p-1}, the composite through X_p."""
        return self.stages[p - 1].incl.compose(self.stages[p].pi)


def dg_resolution_for_ss(a: DgAlgebra, x0: DgModule, p_max: int) -> DgResolution:
    stages = []
    x = x0
    for p in range(p_max + 1):
        sf, values, spheres = _stage_cover(x, f"p{p}.")
        pi = morphism_from_free(sf, values, x)
        for n in range(x.window + 1):
            if pi.component(n).rank() != x.dim(n):
                raise InternalCertificateError(f"resolution stage {p} not surjective at degree {n}")
        bases = [pi.component(n).kernel() for n in range(x.window + 1)]
        x_next, incl = restrict_module(sf.module, bases)
        stages.append(ResolutionStage(sf, pi, spheres, x_next, incl))
        x = x_next
    res = DgResolution(a, x0, stages, {})
    res.certificates = certify_resolution(res)
    return res


def certify_resolution(res: DgResolution) -> dict:
    """Exactness of the short sequences, the long sequence, and their images
    in homology; freeness of H(P_p) on the sphere classes.
    """
    w = res.x0.window
    cert = {"sequence_a": [], "sequence_b": [], "sequence_ah": [], "sequence_bh": [], "h_free": []}
    h_stage = []
    for p, st in enumerate(res.stages):
        # 0 -> X_{p+1} -> P_p -> X_p -> 0 exact: inclusion basis = ker(pi)
        ok = all(
            kernel(st.pi.component(n)).equals(Subspace.from_span(st.p.dim(n), st.incl.component(n)))
            and st.pi.component(n).rank() == st.pi.target.dim(n)
            for n in range(w + 1)
        )
        cert["sequence_a"].append(ok)
        if not ok:
            raise InternalCertificateError(f"sequence A fails at stage {p}")
        # homology level: 0 -> H(X_{p+1}) -> H(P_p) -> H(X_p) -> 0
        h_sub = homology(st.x_next.carrier)
        h_p = homology(st.p.module.carrier)
        h_x = homology(st.pi.target.carrier)
        h_stage.append(h_p)
        inc = induced_map(st.incl.chain, h_sub, h_p)
        prj = induced_map(st.pi.chain, h_p, h_x)
        ok = True
        for n in range(w + 1):
            if inc[n].kernel().ncols != 0 or prj[n].rank() != h_x.h_dims[n]:
                ok = False
            if not image(inc[n]).equals(kernel(prj[n])):
                ok = False
        cert["sequence_ah"].append(ok)
        if not ok:
            raise InternalCertificateError(f"sequence AH fails at stage {p}")
        # freeness: classes of algebra-basis times sphere generators span H(P_p)
        ok = _h_free_on_spheres(res.algebra, st, h_p)
        cert["h_free"].append(ok)
        if not ok:
            raise InternalCertificateError(f"homology of P_{p} not free on sphere classes")
    # chain-level and homology-level exactness of ... -> P_1 -> P_0 -> X -> 0
    h_x0 = homology(res.x0.carrier)
    hpi0 = induced_map(res.stages[0].pi.chain, h_stage[0], h_x0)
    hpit = [None] + [
        induced_map(res.pi_tilde(p).chain, h_stage[p], h_stage[p - 1]) for p in range(1, len(res.stages))
    ]
    for p in range(len(res.stages) - 1):
        pit_next = res.pi_tilde(p + 1)
        ok_b, ok_bh = True, True
        for n in range(w + 1):
            ker_n = (
                kernel(res.stages[0].pi.component(n)) if p == 0 else kernel(res.pi_tilde(p).component(n))
            )
            if not image(pit_next.component(n)).equals(ker_n):
                ok_b = False
            hker = kernel(hpi0[n]) if p == 0 else kernel(hpit[p][n])
            if not image(hpit[p + 1][n]).equals(hker):
                ok_bh = False
        cert["sequence_b"].append(ok_b)
        cert["sequence_bh"].append(ok_bh)
        if not ok_b:
            raise InternalCertificateError(f"sequence B fails at stage {p}")
        if not ok_bh:
            raise InternalCertificateError(f"sequence BH fails at stage {p}")
    return cert


def _h_free_on_spheres(a: DgAlgebra, st: ResolutionStage, h_p: HomologyData) -> bool:
    """H(P) = H(A) . [sphere generators] with independent columns.

    Certified through window-1: at the window edge the truncated disk cones
    lose their incoming differential, so the disk summands need not be
    acyclic there.
    """
    ha_data = homology(a.carrier)
    w = a.window
    for n in range(w):
        cols = []
        for gi in st.spheres:
            g = st.p.gens[gi]
            p_deg = n - g.degree
            if p_deg < 0:
                continue
            for i in range(ha_data.h_dims[p_deg]):
                # element [a_i] . (1 (x) g): act with a representative of the class
                rep = ha_data.rep(p_deg, i)
                elt = [rat(0)] * st.p.dim(n)
                base = st.p.gen_element(gi)
                for bi, bv in enumerate(rep):
                    if bv == 0:
                        continue
                    img = st.p.act_on_vector(p_deg, bi, g.degree, base)
                    for t, v in enumerate(img):
                        elt[t] += bv * v
                dmat = st.p.module.carrier.diff(n)
                if any(v != 0 for v in dmat.apply(elt)):
                    return False
                cols.append(h_p.classify(n, elt))
        mat = Matrix.from_columns(h_p.h_dims[n], cols)
        if mat.ncols != h_p.h_dims[n] or mat.rank() != h_p.h_dims[n]:
            return False
    return True


# -- graded free resolutions and Tor -------------------------------------------


@dataclass(eq=False)
class GradedFreeResolution:
    algebra: DgAlgebra
    target: DgModule
    stages: list  # (SemifreeModule, ModuleMap onto previous kernel, kernel DgModule, incl)
    length: int  # index of the last nonzero stage

    def free(self, p: int) -> SemifreeModule | None:
        return self.stages[p][0] if p < len(self.stages) else None


def _graded_cover(a: DgAlgebra, m: DgModule, prefix: str):
    """Free graded cover with a greedy minimal generating family."""
    if not (a.is_graded() and m.is_graded()):
        raise ValidationError("graded cover needs zero differentials")
    sf = SemifreeModule(a)
    values: list = []
    for ell in range(m.window + 1):
        while True:
            img = image(_component_image(values, sf, m, ell))
            missing = None
            for j in range(m.dim(ell)):
                e = [rat(1) if t == j else rat(0) for t in range(m.dim(ell))]
                if img.basis.solve(e) is None:
                    missing = e
                    break
            if missing is None:
                break
            sf.add_generator(f"{prefix}g{ell}.{len(sf.gens)}", ell, rebuild=False)
            sf._rebuild()
            values.append(missing)
    return sf, values


def graded_free_resolution(a: DgAlgebra, m: DgModule, p_max: int) -> GradedFreeResolution:
    stages = []
    target = m
    length = -1
    for p in range(p_max + 1):
        sf, values = _graded_cover(a, target, f"r{p}.")
        pi = morphism_from_free(sf, values, target)
        if sf.gens:
            length = p
        bases = [pi.component(n).kernel() for n in range(m.window + 1)]
        ker_mod, incl = restrict_module(sf.module, bases)
        stages.append((sf, pi, ker_mod, incl))
        target = ker_mod
        if target.carrier.is_zero():
            break
    return GradedFreeResolution(a, m, stages, length)


def certify_graded_resolution(res: GradedFreeResolution) -> bool:
    w = res.target.window
    for p, (sf, pi, ker_mod, incl) in enumerate(res.stages):
        for n in range(w + 1):
            if pi.component(n).rank() != pi.target.dim(n):
                raise InternalCertificateError(f"graded cover not surjective at stage {p}")
            if not kernel(pi.component(n)).equals(Subspace.from_span(sf.dim(n), incl.component(n))):
                raise InternalCertificateError(f"graded kernel mismatch at stage {p}")
    return True


@dataclass(eq=False)
class TorTable:
    algebra: DgAlgebra
    left: DgModule
    right: DgModule
    p_max: int
    dims: dict  # (p, q) -> dimension
    resolution: GradedFreeResolution

    def dim(self, p: int, q: int) -> int:
        return self.dims.get((p, q), 0)


def graded_tor(a: DgAlgebra, m: DgModule, n: DgModule, p_max: int) -> TorTable:
    """Tor^A_p(M, N)_q as H_p of M (x)_A (free resolution of N), per degree q.

    The resolution runs one stage past p_max so the boundaries entering the
    top requested index are present.
    """
    res = graded_free_resolution(a, n, p_max + 1)
    w = m.window
    tensors = []
    maps = []
    prev = None
    for p in range(p_max + 2):
        sf = res.free(p)
        if sf is None:
            tensors.append(None)
            maps.append(None)
            continue
        t = tensor_semifree_right(m, sf)
        if p >= 1 and tensors[p - 1] is not None:
            # id (x) pi-tilde: (x (x) h) |-> x (x) incl(pi(1 (x) h))
            prev_t = tensors[p - 1]
            comps = []
            for ell in range(w + 1):
                mat = Matrix.zeros(prev_t.index.dims[ell], t.index.dims[ell])
                for hi, off in t.index.offsets[ell].items():
                    h = sf.gens[hi]
                    _, pi_p, _, _ = res.stages[p]
                    incl_prev = res.stages[p - 1][3]
                    wvec = incl_prev.component(h.degree).apply(pi_p.component(h.degree).apply(sf.gen_element(hi)))
                    for x in range(m.dim(ell - h.degree)):
                        xv = [rat(1) if tt == x else rat(0) for tt in range(m.dim(ell - h.degree))]
                        col = prev_t.embed(ell - h.degree, xv, h.degree, wvec)
                        for tt, v in enumerate(col):
                            if v != 0:
                                mat.rows[tt][off + x] = v
                comps.append(mat)
            maps.append(comps)
        else:
            maps.append(None)
        tensors.append(t)
    dims = {}
    for q in range(w + 1):
        for p in range(p_max + 1):
            tp = tensors[p] if p < len(tensors) else None
            if tp is None:
                dims[(p, q)] = 0
                continue
            amb = tp.index.dims[q]
            out_map = maps[p] if p >= 1 and maps[p] is not None else None
            ker_sp = kernel(out_map[q]) if out_map is not None else Subspace.full(amb)
            in_map = maps[p + 1] if p + 1 < len(maps) and maps[p + 1] is not None else None
            img_sp = image(in_map[q]) if in_map is not None else Subspace.zero(amb)
            if not ker_sp.contains(img_sp):
                raise InternalCertificateError("tor differential does not square to zero")
            dims[(p, q)] = ker_sp.dim - img_sp.dim
    return TorTable(a, m, n, p_max, dims, res)


# -- derived tensor product -----------------------------------------------------


@dataclass(eq=False)
class DerivedTensor:
    left: DgModule
    right: DgModule
    replacement: SemifreeReplacement
    tensor: object  # SemifreeLeftTensor
    valid_upto: int

    @property
    def module(self) -> DgModule:
        return self.tensor.module


def derived_tensor(m, n: DgModule) -> DerivedTensor:
    """Q(m) (x)_A n; homology is the derived-tensor homology through window-1."""
    rep = cofibrant_replacement(m)
    t = tensor_semifree_left(rep.module, n)
    return DerivedTensor(rep.target, n, rep, t, rep.module.window - 1)


def one_sided_comparison(m: DgModule, n: DgModule) -> dict:
    """Certify QM (x) QN ~ QM (x) N ~ M (x) QN in homology (one-sided resolutions)."""
    qm = cofibrant_replacement(m)
    qn = cofibrant_replacement(n)
    w = m.window
    t_qq = tensor_semifree_left(qm.module, qn.module.module)
    t_qn = tensor_semifree_left(qm.module, n)
    t_mq = tensor_semifree_right(m, qn.module)

    # id (x) q_N : blockwise the components of q_N
    comps1 = []
    for ell in range(w + 1):
        mat = Matrix.zeros(t_qn.index.dims[ell], t_qq.index.dims[ell])
        for gi, off in t_qq.index.offsets[ell].items():
            s = ell - qm.module.gens[gi].degree
            comp = qn.quasi_iso.component(s)
            for i, j, v in comp.triplets():
                mat.rows[t_qn.index.pos(ell, gi, i)][off + j] = v
        comps1.append(mat)
    from .complexes import ChainMap

    map1 = ChainMap(t_qq.module.carrier, t_qn.module.carrier, tuple(comps1))

    # q_M (x) id : (1 (x) g) (x) y |-> value(g) (x) y
    comps2 = []
    for ell in range(w + 1):
        mat = Matrix.zeros(t_mq.index.dims[ell], t_qq.index.dims[ell])
        for gi, off in t_qq.index.offsets[ell].items():
            g = qm.module.gens[gi]
            val = qm.quasi_iso.component(g.degree).apply(qm.module.gen_element(gi))
            s = ell - g.degree
            for j in range(qn.module.dim(s)):
                yv = [rat(1) if tt == j else rat(0) for tt in range(qn.module.dim(s))]
                col = t_mq.embed(g.degree, val, s, yv)
                for tt, v in enumerate(col):
                    if v != 0:
                        mat.rows[tt][off + j] = v
        comps2.append(mat)
    map2 = ChainMap(t_qq.module.carrier, t_mq.module.carrier, tuple(comps2))

    h_qq = homology(t_qq.module.carrier)
    h_qn = homology(t_qn.module.carrier)
    h_mq = homology(t_mq.module.carrier)
    m1 = induced_map(map1, h_qq, h_qn)
    m2 = induced_map(map2, h_qq, h_mq)
    upto = w - 1
    iso1 = all(
        h_qq.h_dims[k] == h_qn.h_dims[k] and m1[k].rank() == h_qn.h_dims[k] for k in range(upto + 1)
    )
    iso2 = all(
        h_qq.h_dims[k] == h_mq.h_dims[k] and m2[k].rank() == h_mq.h_dims[k] for k in range(upto + 1)
    )
    return {
        "dims_qq": list(h_qq.h_dims),
        "dims_qn": list(h_qn.h_dims),
        "dims_mq": list(h_mq.h_dims),
        "iso_qq_qn": iso1,
        "iso_qq_mq": iso2,
        "valid_upto": upto,
    }


# -- homology pairing (Prop 5.5 and edge maps) ----------------------------------


def homology_pairing(
    hp_mod: DgModule,
    hp_data: HomologyData,
    hn_mod: DgModule,
    hn_data: HomologyData,
    embed,
    h_t: HomologyData,
    upto: int | None = None,
):
    """The map (H(P) (x)_{H(A)} H(N))_q -> H_q(T), [x] (x) [y] |-> [x (x) y].

    embed(r, xrep, s, yrep) places a decomposed tensor into T's coordinates.
    Returns (tensor, matrices per degree, iso flags per degree).
    """
    t = tensor_over_algebra(hp_mod, hn_mod)
    w = hp_mod.window
    upto = w if upto is None else upto
    mats, isos = [], []
    for q in range(upto + 1):
        idx = t.index
        cols = []
        for r in range(q + 1):
            s = q - r
            for i in range(hp_mod.dim(r)):
                xrep = hp_data.rep(r, i)
                for j in range(hn_mod.dim(s)):
                    vec = embed(r, xrep, s, hn_data.rep(s, j))
                    cols.append(h_t.classify(q, vec))
        raw = Matrix.from_columns(h_t.h_dims[q], cols)
        if not (raw * t.relation_bases[q].basis).is_zero():
            raise InternalCertificateError("homology pairing does not kill tensor relations")
        phi = raw * t.sections[q]
        mats.append(phi)
        isos.append(phi.ncols == h_t.h_dims[q] and phi.rank() == h_t.h_dims[q])
    return t, mats, isos


def prop55_check(p_sf: SemifreeModule, n: DgModule, upto: int | None = None) -> dict:
    """H(P) (x)_{H(A)} H(N) ~ H(P (x)_A N) for semifree P with H(A)-free homology."""
    from .dg import homology_algebra, homology_module

    ha, ha_data = homology_algebra(p_sf.algebra)
    hp_mod, hp_data = homology_module(p_sf.module, ha, ha_data)
    hn_mod, hn_data = homology_module(n, ha, ha_data)
    t = tensor_semifree_left(p_sf, n)
    h_t = homology(t.module.carrier)
    # embed takes homology representatives living in the carriers of P and N
    _, mats, isos = homology_pairing(hp_mod, hp_data, hn_mod, hn_data, t.embed, h_t, upto)
    return {"isos": isos, "lhs_dims": [m.ncols for m in mats], "rhs_dims": list(h_t.h_dims)}


# -- resolution cache ------------------------------------------------------------


def cache_dir() -> Path:
    env = os.environ.get("DGTOR_CACHE_DIR")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "dgtor"


def _replacement_key(a: DgAlgebra, m: DgModule, p_max: int | None = None) -> str:
    from .serialize import algebra_data, content_hash, module_data

    payload = {
        "algebra": algebra_data(a),
        "module": module_data(m),
        "window": m.window,
        "p_max": p_max,
    }
    return content_hash(payload)


def cached_replacement(m: DgModule) -> SemifreeReplacement:
    """Disk-backed semifree replacement; entries re-validate on load."""
    from .serialize import canonical_json, matrix_data, matrix_from_data, semifree_data, semifree_from_data
    import json

    key = _replacement_key(m.algebra, m)
    path = cache_dir() / f"qrep-{key}.json"
    if path.exists():
        try:
            data = json.loads(path.read_text())
            sf = semifree_from_data(data["semifree"], m.algebra)
            comps = tuple(matrix_from_data(c) for c in data["quasi_iso"])
            from .complexes import ChainMap

            q = ModuleMap(sf.module, m, ChainMap(sf.module.carrier, m.carrier, comps))
            rep = SemifreeReplacement(sf, q, data.get("stage_log", []), m.window - 1)
            _certify_replacement(rep)
            return rep
        except Exception:
            path.unlink(missing_ok=True)
    rep = semifree_replace(m)
    payload = {
        "semifree": semifree_data(rep.module),
        "quasi_iso": [matrix_data(rep.quasi_iso.component(i)) for i in range(m.window + 1)],
        "stage_log": rep.stage_log,
    }
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(canonical_json(payload))
    tmp.replace(path)
    return rep


def cache_entries() -> list:
    d = cache_dir()
    if not d.exists():
        return []
    return sorted(p.name for p in d.glob("qrep-*.json"))


def cache_clear() -> int:
    d = cache_dir()
    n = 0
    if d.exists():
        for p in d.glob("qrep-*.json"):
            p.unlink()
            n += 1
    return n
