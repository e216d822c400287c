"""The arrow category of complexes: diagonal and push-out products, cok/ker,
Smith ideals and the idempotency checker.

Pushouts inside the push-out product are homotopy pushouts (cones).  For
f: X0 -> X1 and g: Y0 -> Y1 the source of f[]g is

    P = cone(X0(x)Y0 -> (X0(x)Y1) + (X1(x)Y0)),  x |-> ((1(x)g)x, -(f(x)1)x)

and f[]g: P -> X1(x)Y1 is (a, c, b) |-> (f(x)1)c + (1(x)g)b.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from . import complexes as cx
from . import modules as lm
from . import systems as ls
from .complexes import ChainComplex, ChainMap
from .errors import UsageError
from .matrix import Mat
from .poly import Poly
from .systems import DEFAULT_HORIZON, LevelSystem
from .verdict import Verdict, Witness, agree, combine


@dataclass
class ArrowObject:
    f: ChainMap
    name: str = ""

    def __post_init__(self):
        self.name = self.name or self.f.name

    @property
    def source(self) -> ChainComplex:
        return self.f.source

    @property
    def target(self) -> ChainComplex:
        return self.f.target

    @property
    def ring(self):
        return self.f.ring

    def __repr__(self) -> str:
        return f"Arrow({self.name}: {self.source.name} -> {self.target.name})"


@dataclass
class ArrowMap:
    """Commuting square a1 o f = g o a0 from f to g."""
    source: ArrowObject
    target: ArrowObject
    a0: ChainMap
    a1: ChainMap
    name: str = "alpha"

    def commutes(self, horizon: int = DEFAULT_HORIZON) -> Verdict:
        lhs = self.a1 @ self.source.f
        rhs = self.target.f @ self.a0
        v = cx.chain_map_verdict(self.a0, horizon), cx.chain_map_verdict(self.a1, horizon)
        d = cx.homology_map_is_zero(lhs - rhs, horizon) if not _strictly_equal(lhs, rhs, horizon) \
            else Verdict.certified("square commutes on the nose", horizon)
        return combine([("a0 chain map", v[0]), ("a1 chain map", v[1]), ("square", d)],
                       f"{self.name} commutes", horizon)

    def is_weq(self, horizon: int = DEFAULT_HORIZON) -> Verdict:
        """Both components quasi-isomorphisms (a weak equivalence of arrows)."""
        return combine([("square", self.commutes(horizon)),
                        ("source", cx.is_quasi_iso(self.a0, horizon)),
                        ("target", cx.is_quasi_iso(self.a1, horizon))],
                       f"{self.name} is a weak equivalence of arrows", horizon)


def _strictly_equal(f: ChainMap, g: ChainMap, horizon: int) -> bool:
    base = max(f.source.base, f.target.base)
    for k in f.source.degrees():
        if not (f.source._has(k) and f.target._has(k)):
            continue
        for n in range(base, max(horizon, base) + 1):
            if not f.target.term(k).member(n).contains(f.matrix(k, n) - g.matrix(k, n)):
                return False
    return True


def arrow(f: ChainMap, name: str = "") -> ArrowObject:
    return ArrowObject(f, name)


def zero_arrow(ring) -> ArrowObject:
    Z = ChainComplex.zero(ring)
    return ArrowObject(ChainMap.zero_of(Z, Z), "0->0")


# monoidal products ----------------------------------------------------------------

def diag_tensor(f: ArrowObject, g: ArrowObject) -> ArrowObject:
    if f.ring != g.ring:
        raise UsageError("arrows over different rings")
    return ArrowObject(cx.tensor_maps(f.f, g.f), f"({f.name}(x){g.name})")


@dataclass
class BoxProduct:
    arrow: ArrowObject
    P: ChainComplex
    h: ChainMap          # X0(x)Y0 -> X0(x)Y1 + X1(x)Y0
    legs: tuple          # (1(x)g, f(x)1) out of X0(x)Y0
    outs: tuple          # (f(x)1 on X0(x)Y1, 1(x)g on X1(x)Y0) into X1(x)Y1
    tensors: dict = field(default_factory=dict)


def box_data(f: ArrowObject, g: ArrowObject) -> BoxProduct:
    if f.ring != g.ring:
        raise UsageError("arrows over different rings")
    X0, X1, Y0, Y1 = f.source, f.target, g.source, g.target
    T00 = cx.complex_tensor(X0, Y0)
    T01 = cx.complex_tensor(X0, Y1)
    T10 = cx.complex_tensor(X1, Y0)
    T11 = cx.complex_tensor(X1, Y1)
    idX0, idY0 = ChainMap.identity_of(X0), ChainMap.identity_of(Y0)
    idX1, idY1 = ChainMap.identity_of(X1), ChainMap.identity_of(Y1)
    leg_y = cx.tensor_maps(idX0, g.f, T00, T01)
    leg_z = cx.tensor_maps(f.f, idY0, T00, T10)
    S = cx.direct_sum([T01, T10])
    h = cx.map_into_sum([leg_y, -leg_z], S, "(1(x)g,-f(x)1)")
    P = cx.cone(h, f"({X0.name}(x){Y1.name}) u ({X1.name}(x){Y0.name})")
    out_c = cx.tensor_maps(f.f, idY1, T01, T11)
    out_b = cx.tensor_maps(idX1, g.f, T10, T11)
    phi = cx.map_from_sum([out_c, out_b], S, "(f(x)1,1(x)g)")
    box = cx.cone_out(h, phi, P)
    box.name = f"({f.name}[]{g.name})"
    return BoxProduct(ArrowObject(box, box.name), P, h, (leg_y, leg_z), (out_c, out_b),
                      {"00": T00, "01": T01, "10": T10, "11": T11, "S": S})


def pushout_product(f: ArrowObject, g: ArrowObject) -> ArrowObject:
    return box_data(f, g).arrow


# cok / ker and the unit arrows -----------------------------------------------------------

def cok_functor(f: ArrowObject) -> ArrowObject:
    C = cx.cone(f.f)
    return ArrowObject(cx.cone_inclusion(f.f, C), f"cok({f.name})")


def ker_functor(f: ArrowObject) -> ArrowObject:
    F = cx.fiber(f.f)
    return ArrowObject(cx.fiber_projection(f.f, F), f"ker({f.name})")


def u0(X: ChainComplex) -> ArrowObject:
    return ArrowObject(ChainMap.zero_of(ChainComplex.zero(X.ring), X), f"0->{X.name}")


def l0(X: ChainComplex) -> ArrowObject:
    return ArrowObject(ChainMap.identity_of(X), f"id:{X.name}")


def l1(A) -> ArrowObject:
    """Unit arrow V -> A of a monoid object."""
    eta = getattr(A, "eta", None)
    if eta is None:
        raise UsageError("l1 needs a monoid object")
    return ArrowObject(eta, f"eta:{A.name}")


def _block_map(S: ChainComplex, T: ChainComplex, fn, name: str, constant: bool) -> ChainMap:
    comps = {k: (lambda k: lambda n: fn(k, n))(k) for k in S.degrees() if S._has(k) and T._has(k)}
    return ChainMap(S, T, comps, name, constant=constant)


def ker_cok_comparison(f: ArrowObject) -> ArrowMap:
    """f -> ker(cok f): x |-> (f x, -x, 0) into fib(Y -> cone f), identity on Y."""
    kc = ker_functor(cok_functor(f))
    X, Y = f.source, f.target
    Fb = kc.source
    field = X.field

    def fn(k, n):
        # fib_k = Y_k + cone(f)_{k+1} = Y_k + (X_k + Y_{k+1})
        gy, gx, gy1 = Y.gens(k, n), X.gens(k, n), Y.gens(k + 1, n)
        out = Mat(field, gy + gx + gy1, gx)
        if gy:
            fm = f.f.matrix(k, n)
            for i in range(gy):
                out.rows[i] = list(fm.rows[i])
        for i in range(gx):
            out.rows[gy + i][i] = Poly.const(field, -1)
        return out

    psi = _block_map(X, Fb, fn, "psi", f.f.constant)
    return ArrowMap(f, kc, psi, ChainMap.identity_of(Y), "f->ker(cok f)")


def cok_ker_comparison(f: ArrowObject) -> ArrowMap:
    """cok(ker f) -> f: identity on X, (x', y, x) |-> -y + f x on cone(fib f -> X)."""
    ck = cok_functor(ker_functor(f))
    X, Y = f.source, f.target
    C = ck.target
    field = Y.field

    def fn(k, n):
        # cone(p)_k = fib_{k-1} + X_k = (X_{k-1} + Y_k) + X_k
        gx0, gy, gx = X.gens(k - 1, n), Y.gens(k, n), X.gens(k, n)
        out = Mat(field, gy, gx0 + gy + gx)
        for i in range(gy):
            out.rows[i][gx0 + i] = Poly.const(field, -1)
        if gx:
            fm = f.f.matrix(k, n)
            for i in range(gy):
                for j in range(gx):
                    out.rows[i][gx0 + gy + j] = fm.rows[i][j]
        return out

    phi = _block_map(C, Y, fn, "phi", f.f.constant)
    return ArrowMap(ck, f, ChainMap.identity_of(X), phi, "cok(ker f)->f")


def cok_u0_comparison(X: ChainComplex) -> ArrowMap:
    """l0(X) -> cok(u0(X)): identity on X and the cone inclusion X -> cone(0 -> X)."""
    c = cok_functor(u0(X))
    return ArrowMap(l0(X), c, ChainMap.identity_of(X), c.f, "l0 -> cok(u0)")


def ker_l0_check(X: ChainComplex, horizon: int = DEFAULT_HORIZON) -> Verdict:
    """ker(id_X) has a contractible source, i.e. it is weakly equivalent to u0(X)."""
    k = ker_functor(l0(X))
    return cx.is_contractible(k.source, horizon).with_detail("fiber of an identity is contractible")


# cok is monoidal: the zig-zag through the total cofiber ------------------------------------

@dataclass
class CokZigZag:
    Z: ChainComplex
    theta: ChainMap       # Z -> cone(f[]g)
    phi: ChainMap         # Z -> cone(f) (x) cone(g)


def cok_zigzag(f: ArrowObject, g: ArrowObject) -> CokZigZag:
    bd = box_data(f, g)
    T = bd.tensors
    X0, X1, Y0, Y1 = f.source, f.target, g.source, g.target
    field = X0.field
    F0 = cx.tensor_maps(f.f, ChainMap.identity_of(Y0), T["00"], T["10"])
    F1 = cx.tensor_maps(f.f, ChainMap.identity_of(Y1), T["01"], T["11"])
    G0 = cx.tensor_maps(ChainMap.identity_of(X0), g.f, T["00"], T["01"])
    G1 = cx.tensor_maps(ChainMap.identity_of(X1), g.f, T["10"], T["11"])
    row = cx.map_cone(G0, G1, F0, F1)
    Z = cx.cone(row, f"Z({f.name},{g.name})")
    K = cx.cone(bd.arrow.f, f"cone({bd.arrow.name})")
    Cf, Cg = cx.cone(f.f), cx.cone(g.f)
    CT = cx.complex_tensor(Cf, Cg)

    def tensor_blocks(A, B, m, n):
        """[(i, offset, gA_i, gB_{m-i})] for complex_tensor(A, B)_m."""
        out, off = [], 0
        for i in A.degrees():
            if A._has(i) and B._has(m - i):
                ga, gb = A.gens(i, n), B.gens(m - i, n)
                out.append((i, off, ga, gb))
                off += ga * gb
        return out, off

    def z_layout(k, n):
        """Z_k = (X0Y0)_{k-2} + (X1Y0)_{k-1} + (X0Y1)_{k-1} + (X1Y1)_k (a, b, c, e)."""
        names = [("a", X0, Y0, k - 2), ("b", X1, Y0, k - 1), ("c", X0, Y1, k - 1),
                 ("e", X1, Y1, k)]
        out, off = {}, 0
        for nm, A, B, m in names:
            bl, size = tensor_blocks(A, B, m, n)
            out[nm] = (off, bl)
            off += size
        return out, off

    def theta_fn(k, n):
        lay, size = z_layout(k, n)
        # cone(f[]g)_k = P_{k-1} + (X1Y1)_k, P_{k-1} = (X0Y0)_{k-2} + (X0Y1)_{k-1} + (X1Y0)_{k-1}
        tgt_order = ["a", "c", "b", "e"]
        toff, r = {}, 0
        for nm in tgt_order:
            toff[nm] = r
            r += sum(ga * gb for _, _, ga, gb in lay[nm][1])
        entries = []
        for nm in tgt_order:
            off, bl = lay[nm]
            cnt = sum(ga * gb for _, _, ga, gb in bl)
            sgn = -1 if nm == "a" else 1
            entries.extend((toff[nm] + t, off + t, sgn) for t in range(cnt))
        return cx.sparse_matrix(field, r, size, entries)

    def phi_fn(k, n):
        lay, size = z_layout(k, n)
        parts, r = {}, 0
        for p in Cf.degrees():
            q = k - p
            if Cf._has(p) and Cg._has(q):
                gp, gq = Cf.gens(p, n), Cg.gens(q, n)
                parts[(p, q)] = (r, gq)
                r += gp * gq
        entries = []

        def place(p, q, u, v, src, sgn):
            off, gq = parts[(p, q)]
            entries.append((off + u * gq + v, src, sgn))

        for nm in ("a", "b", "c", "e"):
            off, bl = lay[nm]
            for i, boff, ga, gb in bl:
                for u in range(ga):
                    for v in range(gb):
                        src = off + boff + u * gb + v
                        if nm == "a":      # x0 (x) y0 -> (-1)^(i+1) sx0 (x) sy0
                            p, q = i + 1, k - 1 - i
                            place(p, q, u, v, src, -1 if i % 2 == 0 else 1)
                        elif nm == "b":    # x1 (x) y0 -> (-1)^i x1 (x) sy0
                            p, q = i, k - i
                            place(p, q, X0.gens(i - 1, n) + u, v, src, -1 if i % 2 else 1)
                        elif nm == "c":    # x0 (x) y1 -> sx0 (x) y1
                            p, q = i + 1, k - 1 - i
                            place(p, q, u, Y0.gens(q - 1, n) + v, src, 1)
                        else:              # x1 (x) y1 -> x1 (x) y1
                            p, q = i, k - i
                            place(p, q, X0.gens(i - 1, n) + u, Y0.gens(q - 1, n) + v, src, 1)
        return cx.sparse_matrix(field, r, size, entries)

    const = f.f.constant and g.f.constant
    theta = _block_map(Z, K, theta_fn, "Theta", const)
    phi = _block_map(Z, CT, phi_fn, "Phi", const)
    return CokZigZag(Z, theta, phi)


def check_cok_monoidal(f: ArrowObject, g: ArrowObject, horizon: int = DEFAULT_HORIZON) -> Verdict:
    zz = cok_zigzag(f, g)
    parts = [("Theta chain map", cx.chain_map_verdict(zz.theta, horizon)),
             ("Phi chain map", cx.chain_map_verdict(zz.phi, horizon))]
    if all(v.passed for _, v in parts):
        parts += [("Z -> cone(f[]g)", cx.is_quasi_iso(zz.theta, horizon)),
                  ("Z -> cone(f)(x)cone(g)", cx.is_quasi_iso(zz.phi, horizon))]
    return combine(parts, f"Coker({f.name}[]{g.name}) ~ Coker({f.name})(x)Coker({g.name})", horizon)


# Smith ideals ----------------------------------------------------------------------------

@dataclass
class SmithIdealData:
    """An arrow j: I -> V with V the unit complex; the multiplication of the
    Smith ideal is j[]j -> j, induced by the unitors."""
    j: ArrowObject
    name: str = "j"
    # degree +1 maps (I(x)I)_{k-1} -> I_k making the multiplication a chain map
    homotopy: dict | None = None

    @property
    def I(self) -> ChainComplex:
        return self.j.source

    @property
    def V(self) -> ChainComplex:
        return self.j.target


def smith_multiplication(s: SmithIdealData):
    """(box data, mu_j as an ArrowMap j[]j -> j, mu: I (x) I -> I)."""
    j = s.j
    bd = box_data(j, j)
    T = bd.tensors
    I, V = s.I, s.V
    rho = cx.right_unitor(I, V, T["01"])
    lam = cx.left_unitor(I, V, T["10"])
    src = cx.map_from_sum([rho, lam], T["S"], "(rho,lambda)")
    mu0 = cx.cone_out(bd.h, src, bd.P, s.homotopy)
    mu0.name = "mu_j,0"
    mu1 = cx.left_unitor(V, V, T["11"])
    mu_arrow = ArrowMap(bd.arrow, j, mu0, mu1, "mu_j")
    # I (x) I -> I, x (x) y |-> x j(y)
    mu = rho @ bd.legs[0]
    mu.name = "mu:I(x)I->I"
    return bd, mu_arrow, mu


def builtin_smith_ideal(ring) -> SmithIdealData:
    I, jmap = ls.ideal_system(ring)
    V = cx.unit_complex(ring)
    return SmithIdealData(ArrowObject(cx.chain_map(ChainComplex.single(I, 0, "I"), V, {0: jmap}),
                                      "j"), "j")


def zero_smith_ideal(ring) -> SmithIdealData:
    V = cx.unit_complex(ring)
    return SmithIdealData(ArrowObject(ChainMap.zero_of(ChainComplex.zero(ring), V), "0->V"),
                          "0->V")


def scalar_smith_ideal(ring, power: int = 1, level: int = 1, name: str = "") -> SmithIdealData:
    """V -> V, multiplication by x^(power/2^level): the non-idempotent control."""
    field = ring.field
    V0 = ls.constant_system(lm.free(ring, level, 1), "V")
    V = ChainComplex.single(V0, 0, "V")
    m = lm.ModuleMap(V0.member(level), V0.member(level),
                     Mat.from_rows(field, [[Poly.monomial(field, power)]]))
    f = ls.constant_map(m, V0, V0, f"x^({power}/{1 << level})")
    return SmithIdealData(ArrowObject(cx.chain_map(V, V, {0: f}, f.name, constant=True), f.name),
                          name or f.name)


def flatness_check(It_terms: Sequence[LevelSystem], modules: Sequence[LevelSystem],
                   horizon: int = DEFAULT_HORIZON) -> Verdict:
    """Tor_1(I~_n, M_n) = 0 for every module in the list at every level up to the horizon."""
    checked = 0
    for T in It_terms:
        if T.zero:
            continue
        for M in modules:
            for n in range(max(T.base, M.base), horizon + 1):
                t = lm.tor1(T.member(n), M.member(n))
                checked += 1
                if not t.is_zero():
                    return Verdict.fail(Witness(n, f"Tor1({T.name}, {M.name}) = {t.describe()}"),
                                        horizon)
    return Verdict.up_to(horizon, f"{checked} Tor1 groups vanish")


def default_flatness_modules(ring) -> list[LevelSystem]:
    return [ls.unit_system(ring), ls.cyclic_quotient(ring, "1/2"), ls.cyclic_quotient(ring, "3/4"),
            ls.quotient_by_ideal(ring), ls.ideal_system(ring)[0]]


def is_homotopically_idempotent(s: SmithIdealData, horizon: int = DEFAULT_HORIZON,
                                modules: Sequence[LevelSystem] | None = None) -> Verdict:
    j = s.j
    ring = j.ring
    # (a) the defining square: I ~ fib(V -> cone j)
    cmp = ker_cok_comparison(j)
    a = cx.is_quasi_iso(cmp.a0, horizon).with_detail("I -> fib(V -> cone j) quasi-iso")
    # (b) mu_j a weak equivalence, cross-checked against cone(I (x) I -> I)
    bd, mu_arrow, mu = smith_multiplication(s)
    b1 = mu_arrow.is_weq(horizon)
    b2 = cx.is_contractible(cx.cone(mu), horizon)
    b = agree("mu_j weq", b1, "cone(mu) contractible", b2, horizon)
    if b.passed:
        b = combine([("mu_j weq", b1), ("cone(mu) contractible", b2)], "mu_j weak equivalence",
                    horizon)
    # (c) flatness of I~ = I (x) I
    It = cx.complex_tensor(s.I, s.I)
    terms = [It.term(k) for k in It.degrees() if It._has(k)]
    mods = list(modules) if modules is not None else default_flatness_modules(ring)
    c = flatness_check(terms, mods, horizon)
    return combine([("homotopy cartesian", a), ("mu_j weq", b), ("flatness", c)],
                   f"{s.name} homotopically idempotent", horizon)
