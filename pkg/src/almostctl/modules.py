"""Finitely presented modules over the level rings A_n.

A module is ``A_n^g / (column span of rels)``.  In the truncated variant
A_n = k[y]/(y^e) with e = 2^n; the relations y^e * e_i are kept implicit
and added whenever a normal form is needed.  Every computation therefore
runs over the Euclidean ring k[y], which keeps level-10 objects cheap.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .errors import UsageError
from .ground import RingSpec
from .matrix import SNF, Mat, _snf, block_diag, hstack, kernel_basis, kron, solve, vstack
from .poly import Poly


class LevelModule:
    __slots__ = ("ring", "level", "gens", "rels", "__dict__")

    def __init__(self, ring: RingSpec, level: int, gens: int, rels: Mat | None = None):
        field = ring.field
        if rels is None:
            rels = Mat(field, gens, 0)
        if rels.nrows != gens:
            raise UsageError(f"relation matrix has {rels.nrows} rows for {gens} generators")
        self.ring = ring
        self.level = level
        self.gens = gens
        self.rels = rels.truncate(ring.level_bound(level))

    @property
    def field(self):
        return self.ring.field

    @property
    def bound(self) -> int | None:
        return self.ring.level_bound(self.level)

    def y(self, k: int = 1) -> Poly:
        return Poly.monomial(self.field, k)

    @cached_property
    def full_rels(self) -> Mat:
        if self.bound is None:
            return self.rels
        return hstack(self.field, [self.rels, Mat.scalar(self.field, self.gens, self.y(self.bound))])

    @cached_property
    def snf(self) -> SNF:
        return _snf(self.full_rels)

    def reduce(self, v: Mat) -> Mat:
        return v.truncate(self.bound)

    def contains(self, v: Mat) -> bool:
        """True when every column of v lies in the relation submodule."""
        v = self.reduce(v)
        if v.is_zero():
            return True
        return solve(self.full_rels, v, self.snf) is not None

    # invariants ---------------------------------------------------------

    @cached_property
    def invariant_factors(self) -> tuple[tuple[int, ...], ...]:
        """Nonunit invariant factors as coefficient tuples; zero means a free summand."""
        out = []
        diag = self.snf.diagonal
        for i in range(self.gens):
            d = diag[i] if i < len(diag) else Poly.zero(self.field)
            if d.is_unit():
                continue
            out.append(d)
        return tuple(_poly_key(d) for d in out)

    def iso_invariants(self) -> tuple:
        return (self.ring, self.level, self.invariant_factors)

    @property
    def free_rank(self) -> int:
        return sum(1 for d in self.invariant_factors if d == ())

    def k_dim(self) -> int | None:
        """Dimension over k, or None for modules with a free summand (domain)."""
        if self.free_rank:
            return None
        return sum(len(d) - 1 for d in self.invariant_factors)

    def is_zero(self) -> bool:
        return not self.invariant_factors

    def annihilator(self) -> Poly | None:
        """Monic generator of Ann(M) (zero polynomial if M has a free part)."""
        diag = self.snf.diagonal
        if self.free_rank:
            return Poly.zero(self.field)
        if not self.invariant_factors:
            return Poly.const(self.field, 1)
        return diag[self.gens - 1]

    def describe(self) -> str:
        parts = []
        for key in self.invariant_factors:
            if key == ():
                parts.append("A")
            else:
                d = Poly.from_terms(self.field, [(e, a) for e, a in enumerate(key)])
                parts.append(f"A/({d})")
        ring = "k[y]" if self.bound is None else f"k[y]/(y^{self.bound})"
        return f"{' + '.join(parts) or '0'} over {ring}, level {self.level}"

    def __repr__(self) -> str:
        return f"LevelModule({self.describe()})"


def _poly_key(p: Poly) -> tuple:
    if not p:
        return ()
    return tuple(p.coeff(e) for e in range(p.degree + 1))


def isomorphic(m: LevelModule, n: LevelModule) -> bool:
    return m.iso_invariants() == n.iso_invariants()


# constructors ------------------------------------------------------------

def free(ring: RingSpec, level: int, g: int = 1) -> LevelModule:
    return LevelModule(ring, level, g)


def zero_module(ring: RingSpec, level: int) -> LevelModule:
    return LevelModule(ring, level, 0)


def cyclic(ring: RingSpec, level: int, p: Poly) -> LevelModule:
    """A_n / (p)."""
    return LevelModule(ring, level, 1, Mat.from_rows(ring.field, [[p]]))


def _check_same(*mods: LevelModule):
    m0 = mods[0]
    for m in mods[1:]:
        if m.ring != m0.ring:
            raise UsageError(f"modules over different rings: {m0.ring} vs {m.ring}")
        if m.level != m0.level:
            raise UsageError(f"modules at different levels: {m0.level} vs {m.level}")


class ModuleMap:
    __slots__ = ("source", "target", "matrix")

    def __init__(self, source: LevelModule, target: LevelModule, matrix: Mat, check: bool = True):
        _check_same(source, target)
        if matrix.shape != (target.gens, source.gens):
            raise UsageError(f"map matrix has shape {matrix.shape}, expected "
                             f"{(target.gens, source.gens)}")
        self.source = source
        self.target = target
        self.matrix = matrix.truncate(target.bound)
        if check and not target.contains(self.matrix @ source.rels):
            raise UsageError("matrix does not carry source relations into target relations")

    @classmethod
    def identity(cls, m: LevelModule) -> "ModuleMap":
        return cls(m, m, Mat.identity(m.field, m.gens), check=False)

    @classmethod
    def zero(cls, s: LevelModule, t: LevelModule) -> "ModuleMap":
        return cls(s, t, Mat(s.field, t.gens, s.gens), check=False)

    def __matmul__(self, other: "ModuleMap") -> "ModuleMap":
        """Composition self o other."""
        if other.target.gens != self.source.gens:
            raise UsageError("composing maps with mismatched middle module")
        return ModuleMap(other.source, self.target, self.matrix @ other.matrix, check=False)

    def __add__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(self.source, self.target, self.matrix + other.matrix, check=False)

    def __sub__(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(self.source, self.target, self.matrix - other.matrix, check=False)

    def __neg__(self) -> "ModuleMap":
        return ModuleMap(self.source, self.target, -self.matrix, check=False)

    def scale(self, p: Poly) -> "ModuleMap":
        return ModuleMap(self.source, self.target, self.matrix.scale(p), check=False)

    def is_zero(self) -> bool:
        return self.target.contains(self.matrix)

    def equals(self, other: "ModuleMap") -> bool:
        return (self - other).is_zero()

    def is_iso(self) -> bool:
        return subquotient(self, "kernel")[0].is_zero() and subquotient(self, "cokernel")[0].is_zero()

    def __repr__(self) -> str:
        return f"ModuleMap({self.source.gens}->{self.target.gens}, {self.matrix})"


# normal forms --------------------------------------------------------------

@dataclass
class Simplified:
    module: LevelModule
    to_new: Mat   # old coordinates -> new coordinates
    to_old: Mat   # new coordinates -> old coordinates


def simplify(m: LevelModule) -> Simplified:
    """Diagonal presentation; unit invariant factors are dropped."""
    s = m.snf
    diag = s.diagonal
    keep = []
    rel_entries = []
    for i in range(m.gens):
        d = diag[i] if i < len(diag) else Poly.zero(m.field)
        if d.is_unit():
            continue
        keep.append(i)
        rel_entries.append(d)
    field = m.field
    g = len(keep)
    cols = []
    for k, d in enumerate(rel_entries):
        if not d:
            continue
        if m.bound is not None and d.degree >= m.bound:
            continue
        cols.append(k)
    rels = Mat(field, g, len(cols))
    for c, k in enumerate(cols):
        rels.rows[k][c] = rel_entries[k]
    new = LevelModule(m.ring, m.level, g, rels)
    return Simplified(new, s.U.select_rows(keep).truncate(m.bound),
                      s.Uinv.select_cols(keep).truncate(m.bound))


def subquotient(f: ModuleMap, kind: str) -> tuple[LevelModule, ModuleMap]:
    """kernel/image come with their inclusion, cokernel/coimage with the projection."""
    M, N = f.source, f.target
    field = M.field
    if kind == "cokernel":
        raw = LevelModule(M.ring, M.level, N.gens, hstack(field, [N.rels, f.matrix]))
        s = simplify(raw)
        return s.module, ModuleMap(N, s.module, s.to_new, check=False)
    K = kernel_basis(hstack(field, [f.matrix, N.full_rels])).row_block(0, M.gens)
    K = K.truncate(M.bound).nonzero_cols()
    if kind == "kernel":
        rels = kernel_basis(hstack(field, [K, M.full_rels])).row_block(0, K.ncols)
        raw = LevelModule(M.ring, M.level, K.ncols, rels)
        s = simplify(raw)
        return s.module, ModuleMap(s.module, M, K @ s.to_old, check=False)
    if kind in ("image", "coimage"):
        raw = LevelModule(M.ring, M.level, M.gens, K)
        s = simplify(raw)
        if kind == "coimage":
            return s.module, ModuleMap(M, s.module, s.to_new, check=False)
        return s.module, ModuleMap(s.module, N, f.matrix @ s.to_old, check=False)
    raise UsageError(f"unknown subquotient kind {kind!r}")


def kernel(f: ModuleMap):
    return subquotient(f, "kernel")


def cokernel(f: ModuleMap):
    return subquotient(f, "cokernel")


def lift(incl: ModuleMap, g: Mat) -> Mat | None:
    """Matrix L with incl o L == g modulo target relations, if one exists."""
    X = incl.target
    A = hstack(X.field, [incl.matrix, X.full_rels])
    sol = solve(A, X.reduce(g))
    if sol is None:
        return None
    return sol.row_block(0, incl.source.gens).truncate(incl.source.bound)


@dataclass
class Homology:
    module: LevelModule
    cycles: LevelModule
    inclusion: ModuleMap   # cycles -> middle term
    projection: ModuleMap  # cycles -> homology


def homology(d_in: ModuleMap | None, d_out: ModuleMap | None, middle: LevelModule) -> Homology:
    """Homology at ``middle`` of P --d_in--> middle --d_out--> S (either may be None)."""
    if d_out is None:
        Z, incl = middle, ModuleMap.identity(middle)
    else:
        Z, incl = kernel(d_out)
    if d_in is None or d_in.source.gens == 0:
        ident = ModuleMap.identity(Z)
        return Homology(Z, Z, incl, ident)
    L = lift(incl, d_in.matrix)
    if L is None:
        raise UsageError("d_out o d_in is not zero")
    H, proj = cokernel(ModuleMap(d_in.source, Z, L, check=False))
    return Homology(H, Z, incl, proj)


# constructions -------------------------------------------------------------

def direct_sum(mods: Sequence[LevelModule], ring: RingSpec | None = None,
               level: int | None = None) -> LevelModule:
    if not mods:
        if ring is None or level is None:
            raise UsageError("empty direct sum needs ring and level")
        return zero_module(ring, level)
    _check_same(*mods)
    field = mods[0].field
    return LevelModule(mods[0].ring, mods[0].level, sum(m.gens for m in mods),
                       block_diag(field, [m.rels for m in mods]))


def power(m: LevelModule, k: int) -> LevelModule:
    return direct_sum([m] * k, m.ring, m.level)


def tensor(M: LevelModule, N: LevelModule) -> LevelModule:
    """Generators ordered (a, b) -> a*N.gens + b."""
    _check_same(M, N)
    field = M.field
    rels = hstack(field, [kron(M.rels, Mat.identity(field, N.gens)),
                          kron(Mat.identity(field, M.gens), N.rels)])
    return LevelModule(M.ring, M.level, M.gens * N.gens, rels)


def tensor_maps(f: ModuleMap, g: ModuleMap) -> ModuleMap:
    return ModuleMap(tensor(f.source, g.source), tensor(f.target, g.target),
                     kron(f.matrix, g.matrix), check=False)


@dataclass
class HomModule:
    module: LevelModule
    embedding: ModuleMap  # into N^(M.gens); column a*N.gens + b = image of gen a, coord b
    source: LevelModule
    target: LevelModule

    def as_matrix(self, v: Mat) -> Mat:
        """Turn a hom element (column in module coordinates) into an N x M matrix."""
        flat = self.embedding.matrix @ v
        gM, gN = self.source.gens, self.target.gens
        return Mat.from_rows(self.source.field,
                             [[flat.rows[a * gN + b][0] for a in range(gM)] for b in range(gN)],
                             ncols=gM)


def hom(M: LevelModule, N: LevelModule) -> HomModule:
    _check_same(M, N)
    field = M.field
    big = power(N, M.gens)
    rel_target = power(N, M.rels.ncols)
    cond = ModuleMap(big, rel_target, kron(M.rels.T, Mat.identity(field, N.gens)), check=False)
    H, incl = kernel(cond)
    return HomModule(H, incl, M, N)


def tor1(M: LevelModule, N: LevelModule) -> LevelModule:
    """Tor_1 over A_n from two steps of a free resolution of M."""
    _check_same(M, N)
    field = M.field
    g, r = M.gens, M.rels.ncols
    if r == 0:
        return zero_module(M.ring, M.level)
    # over A_n the implicit y^e relations are zero, so M.rels presents M
    rel = M.rels
    F1, F0 = free(M.ring, M.level, r), free(M.ring, M.level, g)
    S_mod, S_incl = kernel(ModuleMap(F1, F0, rel, check=False))
    S = S_incl.matrix
    gN = N.gens
    I = Mat.identity(field, gN)
    Nr, Ng, Ns = power(N, rel.ncols), power(N, g), power(N, S.ncols)
    d_out = ModuleMap(Nr, Ng, kron(rel, I), check=False)
    d_in = ModuleMap(Ns, Nr, kron(S, I), check=False)
    return homology(d_in, d_out, Nr).module


def base_change(M: LevelModule, target: int | None = None) -> LevelModule:
    if target is None:
        target = M.level + 1
    if target != M.level + 1:
        raise UsageError(f"base change goes one level up: {M.level} -> {M.level + 1}")
    return LevelModule(M.ring, target, M.gens, M.rels.substitute_power(2))


def base_change_map(f: ModuleMap) -> ModuleMap:
    return ModuleMap(base_change(f.source), base_change(f.target),
                     f.matrix.substitute_power(2), check=False)


def injections(mods: Sequence[LevelModule]) -> list[Mat]:
    field = mods[0].field
    total = sum(m.gens for m in mods)
    out = []
    off = 0
    for m in mods:
        e = Mat(field, total, m.gens)
        for i in range(m.gens):
            e.rows[off + i][i] = Poly.const(field, 1)
        out.append(e)
        off += m.gens
    return out


def projections(mods: Sequence[LevelModule]) -> list[Mat]:
    return [e.T for e in injections(mods)]


def stack_maps(field, blocks_: Sequence[Sequence[Mat]]) -> Mat:
    return vstack(field, [hstack(field, list(r)) for r in blocks_])
