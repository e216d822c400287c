"""The bilocalization by I~: firm reflection I~ (x) -, closed reflection Map(I~, -),
classification of objects and the round trip recovering the ideal.

Map(S, D) for a system S sitting in one degree is a tower of complexes of
level-N modules, stage m being Hom_{A_N}(bc^{N-m} S_m, D(N)) with N the
horizon; stage m+1 restricts to stage m along the transition of S.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import complexes as cx
from . import modules as lm
from . import systems as ls
from .arrows import ArrowObject, SmithIdealData, is_homotopically_idempotent, ker_cok_comparison
from .complexes import ChainComplex, ChainMap
from .errors import UsageError
from .matrix import Mat, hstack, kron
from .modules import LevelModule, ModuleMap
from .poly import Poly
from .systems import DEFAULT_HORIZON, LevelSystem
from .verdict import Verdict, Witness, agree, both, combine


# module-level complexes and towers ------------------------------------------------------

@dataclass
class ModComplex:
    """A complex of modules at one level: terms[k] and d[k]: terms[k] -> terms[k-1]."""
    terms: dict[int, LevelModule]
    d: dict[int, ModuleMap]

    def degrees(self) -> list[int]:
        return sorted(self.terms)

    def homology(self, k: int) -> lm.Homology:
        mid = self.terms[k]
        return lm.homology(self.d.get(k + 1), self.d.get(k), mid)

    def boundary_test(self, k: int):
        mid = self.terms[k]
        mats = [mid.full_rels]
        if k + 1 in self.d:
            mats.insert(0, self.d[k + 1].matrix)
        A = hstack(mid.field, mats, nrows=mid.gens)
        from .matrix import _snf, solve
        snf = _snf(A)

        def test(v: Mat) -> int | None:
            for j in range(v.ncols):
                col = v.select_cols([j])
                if not col.is_zero() and solve(A, col, snf) is None:
                    return j
            return None
        return test

    def is_zero(self) -> bool:
        return all(t.gens == 0 or t.is_zero() for t in self.terms.values())


def level_complex(C: ChainComplex, n: int) -> ModComplex:
    terms = {k: C.term(k).member(n) for k in C.degrees() if C._has(k)}
    d = {k: C.d(k).at(n) for k in terms if k - 1 in terms}
    return ModComplex(terms, d)


class MapTower:
    """Map(S, D) for S concentrated in one degree, as a tower of level-N complexes."""

    def __init__(self, S: ChainComplex, D: ChainComplex, horizon: int = DEFAULT_HORIZON):
        degs = [k for k in S.degrees() if S._has(k)]
        if len(degs) != 1:
            raise UsageError("Map towers need a source concentrated in one degree")
        self.S, self.D = S, D
        self.d0 = degs[0]
        self.src = S.term(self.d0)
        self.ring = D.ring
        self.N = max(horizon, self.src.base, D.base)
        self.base = max(self.src.base, D.base)
        self._stages: dict[int, tuple] = {}
        self._res: dict[int, dict] = {}
        self.target = level_complex(D, self.N)

    def domain(self, m: int) -> LevelModule:
        mod = self.src.member(m)
        for _ in range(self.N - m):
            mod = lm.base_change(mod)
        return mod

    def stage_data(self, m: int) -> dict[int, lm.HomModule]:
        if m not in self._stages:
            dom = self.domain(m)
            self._stages[m] = {k: lm.hom(dom, self.target.terms[k + self.d0])
                               for k in self._degrees()}
        return self._stages[m]

    def _degrees(self) -> list[int]:
        return [k - self.d0 for k in self.target.degrees()]

    def _postcompose(self, m: int, k: int) -> ModuleMap:
        homs = self.stage_data(m)
        hi, lo = homs[k], homs[k - 1]
        d = self.target.d[k + self.d0].matrix
        g = hi.source.gens
        big = kron(Mat.identity(self.ring.field, g), d) @ hi.embedding.matrix
        L = lm.lift(lo.embedding, big)
        if L is None:
            raise UsageError("postcomposition leaves the hom module")
        return ModuleMap(hi.module, lo.module, L, check=False)

    def stage(self, m: int) -> ModComplex:
        homs = self.stage_data(m)
        terms = {k: h.module for k, h in homs.items()}
        d = {k: self._postcompose(m, k) for k in terms if k - 1 in terms}
        return ModComplex(terms, d)

    def restriction(self, m: int) -> dict[int, ModuleMap]:
        """Stage m+1 -> stage m, degreewise."""
        if m not in self._res:
            t = self.src.transition(m).substitute_power(1 << (self.N - m - 1))
            field = self.ring.field
            hi_all, lo_all = self.stage_data(m + 1), self.stage_data(m)
            out = {}
            for k in hi_all:
                hi, lo = hi_all[k], lo_all[k]
                gN = hi.target.gens
                big = kron(t.T, Mat.identity(field, gN)) @ hi.embedding.matrix
                L = lm.lift(lo.embedding, big)
                if L is None:
                    raise UsageError("restriction leaves the hom module")
                out[k] = ModuleMap(hi.module, lo.module, L, check=False)
            self._res[m] = out
        return self._res[m]

    def stages(self) -> range:
        return range(self.base, self.N + 1)


@dataclass
class StageTower:
    """Generic tower: stage(m) complexes and restriction(m): stage m+1 -> stage m."""
    base: int
    N: int
    stage_fn: object
    res_fn: object
    name: str = "tower"
    _cache: dict = field(default_factory=dict)

    def stage(self, m: int) -> ModComplex:
        if m not in self._cache:
            self._cache[m] = self.stage_fn(m)
        return self._cache[m]

    def restriction(self, m: int) -> dict[int, ModuleMap]:
        return self.res_fn(m)


def _as_stage_tower(T) -> StageTower:
    if isinstance(T, StageTower):
        return T
    return StageTower(T.base, T.N, T.stage, T.restriction, "Map")


def tower_contractible(T, horizon: int = DEFAULT_HORIZON) -> Verdict:
    """Pro-zero homology: H(T_N) -> H(T_m) vanishes for every m up to the middle stage."""
    T = _as_stage_tower(T)
    top = T.stage(T.N)
    if top.is_zero():
        return Verdict.up_to(T.N, "top stage vanishes")
    for k in top.degrees():
        Z = top.homology(k)
        if Z.module.is_zero():
            continue
        cyc = Z.inclusion.matrix @ cx.homology_section(Z)
        v = cyc
        for m in range(T.N - 1, T.base - 1, -1):
            v = T.restriction(m)[k].matrix @ v
            if m not in ls.birth_levels(T.base, T.N):
                continue
            st = T.stage(m)
            j = st.boundary_test(k)(st.terms[k].reduce(v))
            if j is not None:
                return Verdict.fail(Witness(m, f"class {j} of H{k} at stage {T.N} survives to "
                                               f"stage {m} of {T.name}"), T.N)
    return Verdict.up_to(T.N, f"homology of stage {T.N} dies by stage "
                              f"{ls.birth_levels(T.base, T.N)[-1]}")


# the reflections ---------------------------------------------------------------------------

@dataclass
class TildeData:
    It: LevelSystem
    jt: ls.SystemMap
    C: ChainComplex        # I~ in degree 0
    arrow: ArrowObject     # I~ -> V


_tilde_cache: dict = {}


def tilde(ring) -> TildeData:
    td = _tilde_cache.get(ring)
    if td is None:
        It, jt = ls.tilde_ideal(ring)
        C = ChainComplex.single(It, 0, "I~")
        V = cx.unit_complex(ring)
        td = TildeData(It, jt, C, ArrowObject(cx.chain_map(C, V, {0: jt}, "j~"), "j~"))
        _tilde_cache[ring] = td
    return td


def tilde_multiplication(ring) -> ChainMap:
    """I~ (x) I -> I~, t (x) a |-> t j(a)."""
    td = tilde(ring)
    I, j = ls.ideal_system(ring)
    src = ChainComplex.single(ls.sys_tensor(td.It, I), 0, "I~(x)I")
    field = ring.field
    return ChainMap(src, td.C, {0: lambda n: kron(Mat.identity(field, td.It.member(n).gens),
                                                  j.matrix(n))}, "mu:I~(x)I->I~")


def firm_reflection(C: ChainComplex) -> tuple[ChainComplex, ChainMap]:
    """(I~ (x) C, counit I~ (x) C -> C), the counit being mu o (j~ (x) id)."""
    td = tilde(C.ring)
    T = cx.complex_tensor(td.C, C, f"I~(x){C.name}")
    V = td.arrow.target
    VC = cx.complex_tensor(V, C)
    jt = cx.tensor_maps(td.arrow.f, ChainMap.identity_of(C), T, VC)
    eps = cx.left_unitor(C, V, VC) @ jt
    eps.name = f"eps:{C.name}"
    return T, eps


class ClosedReflection:
    """Map(I~, C) with its unit C -> Map(I~, C)."""

    def __init__(self, C: ChainComplex, horizon: int = DEFAULT_HORIZON):
        self.C = C
        td = tilde(C.ring)
        self.td = td
        self.tower = MapTower(td.C, C, horizon)
        self.N = self.tower.N
        self.base = self.tower.base

    def unit(self, m: int) -> dict[int, ModuleMap]:
        """C(N) -> stage m: c |-> (g |-> j~(g) c)."""
        T = self.tower
        jt = self.td.jt.matrix(m).substitute_power(1 << (self.N - m))
        field = self.C.field
        homs = T.stage_data(m)
        out = {}
        for k, h in homs.items():
            tgt_term = T.target.terms[k]
            big = kron(jt.T, Mat.identity(field, tgt_term.gens))
            L = lm.lift(h.embedding, big)
            if L is None:
                raise UsageError("unit leaves the hom module")
            out[k] = ModuleMap(tgt_term, h.module, L, check=False)
        return out

    def unit_cone(self) -> StageTower:
        T = self.tower
        src = T.target
        field = self.C.field

        def stage(m):
            st = T.stage(m)
            u = self.unit(m)
            terms, d = {}, {}
            for k in sorted(set(src.terms) | {x + 1 for x in src.terms} | set(st.terms)):
                parts = []
                if k - 1 in src.terms:
                    parts.append(src.terms[k - 1])
                if k in st.terms:
                    parts.append(st.terms[k])
                if parts:
                    terms[k] = lm.direct_sum([p for p in parts], self.C.ring, self.N)
            for k in terms:
                if k - 1 not in terms:
                    continue
                rows_lo = _layout(src, st, k - 1)
                cols_hi = _layout(src, st, k)
                M = Mat(field, terms[k - 1].gens, terms[k].gens)
                # (c, phi) |-> (-dc, u c + d phi)
                if "c" in cols_hi and "c" in rows_lo and (k - 1) in src.d:
                    _put(M, rows_lo["c"], cols_hi["c"], -src.d[k - 1].matrix)
                if "c" in cols_hi and "h" in rows_lo:
                    _put(M, rows_lo["h"], cols_hi["c"], u[k - 1].matrix)
                if "h" in cols_hi and "h" in rows_lo and k in st.d:
                    _put(M, rows_lo["h"], cols_hi["h"], st.d[k].matrix)
                d[k] = ModuleMap(terms[k], terms[k - 1], M, check=False)
            return ModComplex(terms, d)

        def res(m):
            hi, lo = T.stage(m + 1), T.stage(m)
            r = T.restriction(m)
            out = {}
            cone_hi, cone_lo = stage(m + 1), stage(m)
            for k, mod in cone_hi.terms.items():
                a, b = _layout(src, hi, k), _layout(src, lo, k)
                M = Mat(field, cone_lo.terms[k].gens, mod.gens)
                if "c" in a:
                    _put(M, b["c"], a["c"], Mat.identity(field, src.terms[k - 1].gens))
                if "h" in a:
                    _put(M, b["h"], a["h"], r[k].matrix)
                out[k] = ModuleMap(mod, cone_lo.terms[k], M, check=False)
            return out

        return StageTower(self.base, self.N, stage, res, f"cone(unit:{self.C.name})")


def _layout(src: ModComplex, st: ModComplex, k: int) -> dict:
    out, off = {}, 0
    if k - 1 in src.terms:
        g = src.terms[k - 1].gens
        out["c"] = (off, g)
        off += g
    if k in st.terms:
        g = st.terms[k].gens
        out["h"] = (off, g)
    return out


def _put(M: Mat, rows: tuple, cols: tuple, B: Mat) -> None:
    r0, _ = rows
    c0, _ = cols
    for i in range(B.nrows):
        for j in range(B.ncols):
            if B.rows[i][j]:
                M.rows[r0 + i][c0 + j] = B.rows[i][j]


def closed_reflection(C: ChainComplex, horizon: int = DEFAULT_HORIZON) -> ClosedReflection:
    return ClosedReflection(C, horizon)


def _homology_map(hs: lm.Homology, ht: lm.Homology, f: Mat) -> ModuleMap:
    sect = cx.homology_section(hs)
    img = f @ hs.inclusion.matrix @ sect
    L = lm.lift(ht.inclusion, img)
    if L is None:
        raise UsageError("map does not send cycles to cycles")
    return ModuleMap(hs.module, ht.module, ht.projection.matrix @ L, check=False)


def unit_is_almost_weq(refl: ClosedReflection, horizon: int = DEFAULT_HORIZON) -> Verdict:
    """At stage m the kernel and cokernel of H(unit) are killed by x^(2^(1-m))."""
    T = refl.tower
    src = T.target
    field = refl.C.field
    for m in T.stages():
        st = T.stage(m)
        u = refl.unit(m)
        y = Poly.monomial(field, 1 << (refl.N - m + 1))
        for k in src.degrees():
            if k not in st.terms:
                continue
            hs, ht = src.homology(k), st.homology(k)
            hm = _homology_map(hs, ht, u[k].matrix)
            for what, (mod, _) in (("kernel", lm.kernel(hm)), ("cokernel", lm.cokernel(hm))):
                if mod.gens and not mod.contains(Mat.scalar(field, mod.gens, y)):
                    return Verdict.fail(Witness(m, f"{what} of H{k}(unit) at stage {m} is "
                                                   f"{mod.describe()}, not killed by "
                                                   f"x^(2^(1-{m}))"), T.N)
    return Verdict.up_to(T.N, "unit is an almost isomorphism on homology at every stage")


# reflection triangle ------------------------------------------------------------------------

def check_theorem_a(C: ChainComplex, horizon: int = DEFAULT_HORIZON) -> Verdict:
    T, eps = firm_reflection(C)
    TT, eps2 = firm_reflection(T)
    idem = cx.is_quasi_iso(eps2, horizon).with_detail("I~(x)(I~(x)C) -> I~(x)C quasi-iso")
    refl = closed_reflection(C, horizon)
    equiv = combine([("counit", cx.is_almost_weq(eps, horizon)),
                     ("unit", unit_is_almost_weq(refl, horizon))],
                    "unit and counit are almost weak equivalences", horizon)
    bicond = agree("I~(x)C contractible", cx.is_contractible(T, horizon),
                   "Map(I~,C) tower-contractible", tower_contractible(refl.tower, horizon),
                   horizon, "contractibility biconditional")
    return combine([("idempotent reflection", idem), ("almost equivalences", equiv),
                    ("contractibility biconditional", bicond)], f"reflection triangle for {C.name}",
                   horizon)


def lax_monoidal_map(M: ChainComplex, N: ChainComplex):
    """mu: (I~(x)M)(x)(I~(x)N) -> I~(x)(M(x)N), (t(x)m)(x)(t'(x)n) |-> t t' (x) (m(x)n)."""
    td = tilde(M.ring)
    It = td.C
    A = cx.complex_tensor(It, M)
    B = cx.complex_tensor(It, N)
    src = cx.complex_tensor(A, B)
    MN = cx.complex_tensor(M, N)
    tgt = cx.complex_tensor(It, MN)
    field = M.field

    def fn(k, n):
        g = td.It.member(n).gens
        mu = kron(Mat.identity(field, g), td.jt.matrix(n))  # I~ (x) I~ -> I~, t(x)t' |-> t j~(t')
        soff = cx.part_offsets(src, k, n)
        moff = cx.part_offsets(MN, k, n)
        gmn = MN.gens(k, n)
        rows, cols = tgt.gens(k, n), src.gens(k, n)
        entries = []
        for (p, q), (off, _) in soff.items():
            gp, gq = M.gens(p, n), N.gens(q, n)
            base = moff[(p, q)][0]
            for i in range(g):
                for a in range(gp):
                    for j in range(g):
                        for b in range(gq):
                            col = off + (i * gp + a) * (g * gq) + (j * gq + b)
                            for l in range(g):
                                c = mu.rows[l][i * g + j]
                                if c:
                                    entries.append((l * gmn + base + a * gq + b, col, c))
        return cx.sparse_matrix(field, rows, cols, entries)

    comps = {k: (lambda k: lambda n: fn(k, n))(k) for k in src.degrees() if src._has(k)}
    return ChainMap(src, tgt, comps, "mu_I~", constant=False)


def check_lax_monoidal(M: ChainComplex, N: ChainComplex,
                       horizon: int = DEFAULT_HORIZON) -> Verdict:
    mu = lax_monoidal_map(M, N)
    return combine([("chain map", cx.chain_map_verdict(mu, horizon)),
                    ("quasi-iso", cx.is_quasi_iso(mu, horizon))],
                   f"(I~(x){M.name})(x)(I~(x){N.name}) -> I~(x){M.name}(x){N.name}", horizon)


# classification ----------------------------------------------------------------------------

@dataclass
class ClassificationReport:
    name: str
    almost_zero: Verdict
    firm: Verdict
    closed: Verdict
    consistency: Verdict

    def to_dict(self) -> dict:
        return {"object": self.name, "almost_zero": self.almost_zero.to_dict(),
                "firm": self.firm.to_dict(), "closed": self.closed.to_dict(),
                "consistency": self.consistency.to_dict()}


def classify(obj, horizon: int = DEFAULT_HORIZON) -> ClassificationReport:
    if isinstance(obj, LevelSystem):
        C = ChainComplex.single(obj)
        az = ls.is_almost_zero(obj, horizon)
        firm_sys = ls.is_firm(obj, horizon)
    else:
        C = obj
        az = cx.homology_almost_zero_all(C, horizon)
        firm_sys = None
    _, eps = firm_reflection(C)
    firm_cx = cx.is_quasi_iso(eps, horizon)
    firm = firm_cx if firm_sys is None else both("I(x)M -> M colimit iso", firm_sys,
                                                 "I~(x)M -> M quasi-iso", firm_cx, horizon,
                                                 "firmness, two characterizations")
    refl = closed_reflection(C, horizon)
    closed = tower_contractible(refl.unit_cone(), horizon).with_detail(
        "cone of the unit is pro-zero")
    if firm.passed and az.passed:
        cons = cx.is_contractible(C, horizon).with_detail("firm and almost zero => contractible")
    else:
        cons = Verdict.certified("premise not met", horizon)
    if firm_sys is not None:
        routes = agree("colimit route", firm_sys, "quasi-iso route", firm_cx, horizon)
        cons = combine([("firm routes agree", routes), ("firm and almost zero", cons)],
                       "classification consistency", horizon)
    return ClassificationReport(getattr(obj, "name", "object"), az, firm, closed, cons)


# round trip ---------------------------------------------------------------------------------

def recovered_ideal(ring) -> tuple[SmithIdealData, ChainMap]:
    """Homotopy image of the counit I~ (x) V -> V, with the comparison from I~ (x) V."""
    V = cx.unit_complex(ring)
    T, eps = firm_reflection(V)
    c = ArrowObject(eps, "c_V")
    cmp = ker_cok_comparison(c)
    J = cmp.target
    Jc = J.source
    field = ring.field

    # J_0 = V + I~, J_-1 = V, d(v, t) = -(v + j~ t).  x j(y) - j(x) y = dH + Hd for
    # H(w (x) (v, t)) = (0, w t), H((v, t) (x) w) = (0, -w t), H(w (x) w') = w w'.
    def h0(n):
        g0 = Jc.gens(0, n)
        out = Mat(field, g0, 2 * g0)
        for b in range(1, g0):
            out.rows[b][b] = Poly.const(field, 1)
            out.rows[b][g0 + b] = Poly.const(field, -1)
        return out

    def h_1(n):
        return Mat.identity(field, 1)

    s = SmithIdealData(ArrowObject(J.f, "J"), "J", {0: h0, -1: h_1})
    return s, cmp.a0


def theorem_b_roundtrip(ring, horizon: int = DEFAULT_HORIZON,
                        corpus: Sequence[ChainComplex] = ()) -> Verdict:
    td = tilde(ring)
    s, psi = recovered_ideal(ring)
    idem = is_homotopically_idempotent(s, horizon)
    # I <- I~ (x) V -> J
    I, j = ls.ideal_system(ring)
    IC = ChainComplex.single(I, 0, "I")
    field = ring.field
    src = psi.source
    mu = ChainMap(src, IC, {0: lambda n: kron(Mat.identity(field, I.member(n).gens), j.matrix(n))},
                  "I~(x)V -> I")
    cmp = combine([("I~(x)V -> I", cx.is_quasi_iso(mu, horizon)),
                   ("I~(x)V -> J", cx.is_quasi_iso(psi, horizon))],
                  "recovered ideal ~ I", horizon)
    parts = [("idempotent", idem), ("quasi-iso to I", cmp)]
    for C in corpus:
        T, _ = firm_reflection(C)
        r1 = cx.is_contractible(T, horizon)
        r2 = combine([(f"H{k}", ls.is_zero(ls.sys_tensor(td.It, C.homology(k)), horizon))
                      for k in C.degrees() if C._has(k)], "I~(x)H(C) = 0", horizon)
        parts.append((f"vanishing {C.name}", agree("F(M) contractible", r1,
                                               "I~(x)H(M) vanishes", r2, horizon)))
        TT, eps2 = firm_reflection(T)
        parts.append((f"comparison {C.name}", cx.is_quasi_iso(eps2, horizon)))
    return combine(parts, "round trip recovers the idempotent ideal", horizon)
