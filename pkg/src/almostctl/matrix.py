"""Dense matrices of sparse polynomials and Smith normal form over k[y]."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import UsageError
from .poly import Poly
from .runtime import check_cancelled


class Mat:
    """Row-major matrix of :class:`Poly`; shape is stored so 0xN works."""

    __slots__ = ("field", "nrows", "ncols", "rows")

    def __init__(self, field, nrows: int, ncols: int, rows: list[list[Poly]] | None = None):
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        if rows is None:
            z = Poly.zero(field)
            rows = [[z] * ncols for _ in range(nrows)]
        self.rows = rows

    # constructors -------------------------------------------------------

    @classmethod
    def zeros(cls, field, m: int, n: int) -> "Mat":
        return cls(field, m, n)

    @classmethod
    def identity(cls, field, n: int) -> "Mat":
        return cls.scalar(field, n, Poly.const(field, 1))

    @classmethod
    def scalar(cls, field, n: int, p: Poly) -> "Mat":
        out = cls(field, n, n)
        for i in range(n):
            out.rows[i][i] = p
        return out

    @classmethod
    def from_rows(cls, field, rows: Sequence[Sequence[Poly]], ncols: int | None = None) -> "Mat":
        rows = [list(r) for r in rows]
        n = len(rows[0]) if rows else (ncols or 0)
        if any(len(r) != n for r in rows):
            raise UsageError("ragged matrix")
        return cls(field, len(rows), n, rows)

    @classmethod
    def from_ints(cls, field, rows: Sequence[Sequence[int]]) -> "Mat":
        return cls.from_rows(field, [[Poly.const(field, a) for a in r] for r in rows])

    @classmethod
    def diag(cls, field, entries: Sequence[Poly]) -> "Mat":
        n = len(entries)
        out = cls(field, n, n)
        for i, p in enumerate(entries):
            out.rows[i][i] = p
        return out

    # basic ops ----------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def copy(self) -> "Mat":
        return Mat(self.field, self.nrows, self.ncols, [list(r) for r in self.rows])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def is_zero(self) -> bool:
        return all(not p for r in self.rows for p in r)

    def __eq__(self, other) -> bool:
        return isinstance(other, Mat) and self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash((self.shape, tuple(tuple(r) for r in self.rows)))

    def __add__(self, other: "Mat") -> "Mat":
        self._same(other)
        return Mat(self.field, self.nrows, self.ncols,
                   [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "Mat") -> "Mat":
        self._same(other)
        return Mat(self.field, self.nrows, self.ncols,
                   [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> "Mat":
        return Mat(self.field, self.nrows, self.ncols, [[-a for a in r] for r in self.rows])

    def _same(self, other: "Mat"):
        if self.shape != other.shape:
            raise UsageError(f"shape mismatch {self.shape} vs {other.shape}")

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.ncols != other.nrows:
            raise UsageError(f"cannot multiply {self.shape} by {other.shape}")
        z = Poly.zero(self.field)
        ocols = other.ncols
        orows = other.rows
        out = []
        for r in self.rows:
            acc = [z] * ocols
            for k, a in enumerate(r):
                if not a:
                    continue
                row_k = orows[k]
                for j in range(ocols):
                    b = row_k[j]
                    if b:
                        acc[j] = acc[j] + a * b
            out.append(acc)
        return Mat(self.field, self.nrows, ocols, out)

    def scale(self, p: Poly) -> "Mat":
        return Mat(self.field, self.nrows, self.ncols, [[a * p for a in r] for r in self.rows])

    def map(self, fn: Callable[[Poly], Poly]) -> "Mat":
        return Mat(self.field, self.nrows, self.ncols, [[fn(a) for a in r] for r in self.rows])

    def truncate(self, bound: int | None) -> "Mat":
        if bound is None:
            return self
        return self.map(lambda p: p.truncate(bound))

    def substitute_power(self, k: int) -> "Mat":
        return self.map(lambda p: p.substitute_power(k))

    @property
    def T(self) -> "Mat":
        return Mat(self.field, self.ncols, self.nrows,
                   [[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)])

    def select_rows(self, idx: Sequence[int]) -> "Mat":
        return Mat(self.field, len(idx), self.ncols, [list(self.rows[i]) for i in idx])

    def select_cols(self, idx: Sequence[int]) -> "Mat":
        return Mat(self.field, self.nrows, len(idx), [[r[j] for j in idx] for r in self.rows])

    def row_block(self, start: int, stop: int) -> "Mat":
        return self.select_rows(range(start, stop))

    def col_block(self, start: int, stop: int) -> "Mat":
        return self.select_cols(range(start, stop))

    def nonzero_cols(self) -> "Mat":
        keep = [j for j in range(self.ncols) if any(r[j] for r in self.rows)]
        return self.select_cols(keep)

    def __repr__(self) -> str:
        body = "; ".join(", ".join(str(p) for p in r) for r in self.rows)
        return f"Mat{self.shape}[{body}]"


def hstack(field, mats: Sequence[Mat], nrows: int | None = None) -> Mat:
    if not mats:
        return Mat(field, nrows or 0, 0)
    m = mats[0].nrows
    if any(a.nrows != m for a in mats):
        raise UsageError("hstack row mismatch")
    rows = [[p for a in mats for p in a.rows[i]] for i in range(m)]
    return Mat(field, m, sum(a.ncols for a in mats), rows)


def vstack(field, mats: Sequence[Mat], ncols: int | None = None) -> Mat:
    if not mats:
        return Mat(field, 0, ncols or 0)
    n = mats[0].ncols
    if any(a.ncols != n for a in mats):
        raise UsageError("vstack column mismatch")
    return Mat(field, sum(a.nrows for a in mats), n, [list(r) for a in mats for r in a.rows])


def block_diag(field, mats: Sequence[Mat]) -> Mat:
    m = sum(a.nrows for a in mats)
    n = sum(a.ncols for a in mats)
    out = Mat(field, m, n)
    r0 = c0 = 0
    for a in mats:
        for i in range(a.nrows):
            out.rows[r0 + i][c0:c0 + a.ncols] = a.rows[i]
        r0 += a.nrows
        c0 += a.ncols
    return out


def blocks(field, grid: Sequence[Sequence[Mat]]) -> Mat:
    """Assemble a block matrix; every block in a row shares its height."""
    return vstack(field, [hstack(field, list(row)) for row in grid])


def kron(a: Mat, b: Mat) -> Mat:
    """Kronecker product; row index (i, k) -> i*b.nrows + k."""
    field = a.field
    out = Mat(field, a.nrows * b.nrows, a.ncols * b.ncols)
    for i in range(a.nrows):
        for j in range(a.ncols):
            x = a.rows[i][j]
            if not x:
                continue
            for k in range(b.nrows):
                row = out.rows[i * b.nrows + k]
                brow = b.rows[k]
                for l in range(b.ncols):
                    y = brow[l]
                    if y:
                        row[j * b.ncols + l] = x * y
    return out


def permutation(field, perm: Sequence[int], signs: Sequence[int] | None = None) -> Mat:
    """Matrix P with P e_j = sign_j e_perm[j]."""
    n = len(perm)
    out = Mat(field, n, n)
    for j, i in enumerate(perm):
        out.rows[i][j] = Poly.const(field, 1 if signs is None else signs[j])
    return out


# Smith normal form -------------------------------------------------------

@dataclass
class SNF:
    """U @ A @ W == D with U, W unimodular; Uinv is U's inverse."""
    U: Mat
    Uinv: Mat
    D: Mat
    W: Mat
    rank: int

    @property
    def diagonal(self) -> list[Poly]:
        return [self.D.rows[i][i] for i in range(min(self.D.nrows, self.D.ncols))]


def _snf(a: Mat, cancel=None) -> SNF:
    field = a.field
    m, n = a.shape
    D = [list(r) for r in a.rows]
    one = Poly.const(field, 1)
    zero = Poly.zero(field)
    U = [[one if i == j else zero for j in range(m)] for i in range(m)]
    Ui = [[one if i == j else zero for j in range(m)] for i in range(m)]
    W = [[one if i == j else zero for j in range(n)] for i in range(n)]

    def swap_rows(i, k):
        if i != k:
            D[i], D[k] = D[k], D[i]
            U[i], U[k] = U[k], U[i]
            for r in Ui:
                r[i], r[k] = r[k], r[i]

    def swap_cols(j, k):
        if j != k:
            for r in D:
                r[j], r[k] = r[k], r[j]
            for r in W:
                r[j], r[k] = r[k], r[j]

    def add_row(dst, src, c):
        # row_dst += c * row_src
        if not c:
            return
        rd, rs = D[dst], D[src]
        for j in range(n):
            if rs[j]:
                rd[j] = rd[j] + rs[j] * c
        ud, us = U[dst], U[src]
        for j in range(m):
            if us[j]:
                ud[j] = ud[j] + us[j] * c
        for r in Ui:
            if r[dst]:
                r[src] = r[src] - r[dst] * c

    def add_col(dst, src, c):
        if not c:
            return
        for r in D:
            if r[src]:
                r[dst] = r[dst] + r[src] * c
        for r in W:
            if r[src]:
                r[dst] = r[dst] + r[src] * c

    t = 0
    rank = 0
    while t < min(m, n):
        if cancel is not None:
            cancel()
        else:
            check_cancelled()
        best = None
        for i in range(t, m):
            row = D[i]
            for j in range(t, n):
                p = row[j]
                if p and (best is None or p.degree < best[0]):
                    best = (p.degree, i, j)
                    if best[0] == 0:
                        break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            piv = D[t][t]
            dirty = False
            for i in range(t + 1, m):
                if D[i][t]:
                    q, r = D[i][t].divmod(piv)
                    add_row(i, t, -q)
                    if r:
                        dirty = True
            for j in range(t + 1, n):
                if D[t][j]:
                    q, r = D[t][j].divmod(piv)
                    add_col(j, t, -q)
                    if r:
                        dirty = True
            if dirty:
                # move the smallest leftover in row/column t into the pivot
                cand = None
                for i in range(t + 1, m):
                    p = D[i][t]
                    if p and (cand is None or p.degree < cand[0]):
                        cand = (p.degree, "r", i)
                for j in range(t + 1, n):
                    p = D[t][j]
                    if p and (cand is None or p.degree < cand[0]):
                        cand = (p.degree, "c", j)
                if cand[1] == "r":
                    swap_rows(t, cand[2])
                else:
                    swap_cols(t, cand[2])
                continue
            # divisibility of the remaining block
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if D[i][j] and not piv.divides(D[i][j]):
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, one)
        piv = D[t][t]
        lc = piv.lc
        if lc != 1:
            c = field.inv(lc)
            D[t] = [p.scale(c) for p in D[t]]
            U[t] = [p.scale(c) for p in U[t]]
            for r in Ui:
                r[t] = r[t].scale(lc)
        t += 1
        rank += 1
    return SNF(Mat(field, m, m, U), Mat(field, m, m, Ui), Mat(field, m, n, D),
               Mat(field, n, n, W), rank)


def smith_normal_form(a: Mat, ring=None, cancel=None) -> SNF:
    """Smith normal form over k[y]; only meaningful in the domain variant."""
    if ring is not None and ring.truncated:
        raise UsageError("smith_normal_form needs the domain variant (k[y] is Euclidean); "
                         "truncated modules go through the module layer")
    return _snf(a, cancel)


def kernel_basis(a: Mat) -> Mat:
    """Columns form a basis of the (free) kernel of a over k[y]."""
    s = _snf(a)
    return s.W.col_block(s.rank, a.ncols)


def solve(a: Mat, b: Mat, snf: SNF | None = None) -> Mat | None:
    """Some x with a @ x == b, or None if no polynomial solution exists."""
    s = snf or _snf(a)
    c = s.U @ b
    field = a.field
    x = Mat(field, a.ncols, b.ncols)
    for i in range(a.nrows):
        for k in range(b.ncols):
            v = c.rows[i][k]
            if not v:
                continue
            if i >= s.rank:
                return None
            q, r = v.divmod(s.D.rows[i][i])
            if r:
                return None
            x.rows[i][k] = q
    return s.W @ x
