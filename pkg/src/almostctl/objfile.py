"""Parser for ``.alm`` object files.

A file is a sequence of one-line declarations and ``end``-terminated blocks::

    ring domain field fp:5
    module M level 1 gens 2 rels [[x^(1/2), 0], [0, 1]]
    system Q kind constant module M
    system I2 kind ideal power 2
    system D kind custom
      level * gens 1 rels [[u]]
      transition * [[0]]
    end
    complex K degrees 0..1
      term 1 V
      term 0 V
      d 1 [[x^(1/2)]]
    end
    arrow f from V to K
      map 0 [[1]]
    end
    monoid A carrier K
      mu 0 [[1]]
      mu 1 [[1, 1]]
      eta [[1]]
    end

Matrix entries use the ground-ring element syntax.  Inside level-dependent
matrices ``u`` is the uniformizer of the level being evaluated.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from . import complexes as cx
from . import modules as lm
from . import systems as ls
from .complexes import ChainComplex, ChainMap
from .errors import AlmostError, ParseError, UsageError
from .ground import DEFAULT_RING, FieldSpec, RingSpec, level_of, parse_element, to_level_poly
from .matrix import Mat
from .modules import LevelModule
from .monoids import MonoidObject
from .systems import LevelSystem, SystemMap

KINDS = ("module", "system", "complex", "arrow", "monoid")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_~'^/().+\-]*$")
CHECK_LEVELS = 2


@dataclass
class Entry:
    kind: str
    name: str
    obj: object
    path: str
    line: int


@dataclass
class ObjectTable:
    entries: dict[str, Entry] = field(default_factory=dict)

    def add(self, e: Entry) -> None:
        old = self.entries.get(e.name)
        if old is not None:
            raise ParseError(f"duplicate name {e.name!r}: defined at {old.path}:{old.line} "
                             f"and again at {e.path}:{e.line}", e.path, e.line)
        self.entries[e.name] = e

    def of_kind(self, kind: str) -> dict[str, object]:
        return {n: e.obj for n, e in sorted(self.entries.items()) if e.kind == kind}

    @property
    def modules(self) -> dict[str, LevelModule]:
        return self.of_kind("module")

    @property
    def systems(self) -> dict[str, LevelSystem]:
        return self.of_kind("system")

    @property
    def complexes(self) -> dict[str, ChainComplex]:
        return self.of_kind("complex")

    @property
    def arrows(self) -> dict[str, ChainMap]:
        return self.of_kind("arrow")

    @property
    def monoids(self) -> dict[str, MonoidObject]:
        return self.of_kind("monoid")

    def counts(self) -> dict[str, int]:
        return {k: len(self.of_kind(k)) for k in KINDS}

    def __len__(self) -> int:
        return len(self.entries)


# matrices -----------------------------------------------------------------------

class MatrixTemplate:
    """A matrix literal whose entries are evaluated at a chosen level."""

    def __init__(self, rows: list[list[tuple[str, int]]], ring: RingSpec, path: str, line: int):
        self.rows = rows
        self.ring = ring
        self.path = path
        self.line = line
        self.uses_u = any("u" in t for r in rows for t, _ in r)
        self._const = {}
        self._cache: dict[int, Mat] = {}
        lvl, where = 0, None
        for r in rows:
            for t, col in r:
                if "u" not in t:
                    a = parse_element(t, ring, None, (path, line, col))
                    self._const[(t, col)] = a
                    if level_of(a) > lvl:
                        lvl, where = level_of(a), col
        # least level at which every constant entry is defined, and the entry forcing it
        self.min_level = lvl
        self.min_level_col = where

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), (len(self.rows[0]) if self.rows else 0)

    def at(self, n: int, shape: tuple[int, int] | None = None) -> Mat:
        m = self._cache.get(n)
        if m is not None:
            return m
        field_ = self.ring.field
        out = []
        for r in self.rows:
            row = []
            for t, col in r:
                a = self._const.get((t, col))
                if a is None:
                    a = parse_element(t, self.ring, n, (self.path, self.line, col))
                try:
                    row.append(to_level_poly(a, n))
                except UsageError as exc:
                    raise ParseError(f"level inconsistency: {exc}", self.path, self.line, col) from None
            out.append(row)
        if not out and shape is not None:
            m = Mat(field_, shape[0], shape[1])
        else:
            m = Mat.from_rows(field_, out)
        if shape is not None and m.shape != shape:
            raise ParseError(f"matrix has shape {m.shape}, expected {shape} at level {n}",
                             self.path, self.line)
        self._cache[n] = m
        return m


def _split_top(text: str, start: int, path: str, line: int) -> list[tuple[str, int]]:
    """Split on commas outside parentheses; returns (stripped piece, column)."""
    out, depth, cur0 = [], 0, 0
    for i, ch in enumerate(text + ","):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced ')'", path, line, start + i)
        elif ch == "," and depth > 0 and i == len(text):
            raise ParseError("unbalanced '('", path, line, start + i)
        elif ch == "," and depth == 0:
            piece = text[cur0:i]
            lead = len(piece) - len(piece.lstrip())
            out.append((piece.strip(), start + cur0 + lead))
            cur0 = i + 1
    return out


def parse_matrix(text: str, col0: int, path: str, line: int) -> list[list[tuple[str, int]]]:
    """``[[a, b], [c, d]]`` -> rows of (entry text, 1-based column)."""
    s = text.rstrip()
    if not (s.startswith("[") and s.endswith("]")):
        raise ParseError("matrix must be written [[...], ...]", path, line, col0)
    inner = s[1:-1]
    rows, i = [], 0
    while i < len(inner):
        ch = inner[i]
        if ch.isspace() or ch == ",":
            i += 1
            continue
        if ch != "[":
            raise ParseError(f"unexpected {ch!r} in matrix", path, line, col0 + 1 + i)
        j = inner.find("]", i)
        if j < 0:
            raise ParseError("unterminated matrix row", path, line, col0 + 1 + i)
        body = inner[i + 1:j]
        if "[" in body:
            raise ParseError("nested brackets in matrix row", path, line, col0 + 1 + i)
        cells = _split_top(body, col0 + 2 + i, path, line) if body.strip() else []
        for t, c in cells:
            if not t:
                raise ParseError("empty matrix entry", path, line, c)
        rows.append(cells)
        i = j + 1
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise ParseError("ragged matrix", path, line, col0)
    if rows and not rows[0]:
        rows = []
    return rows


# parser ---------------------------------------------------------------------

def _rebase(S: LevelSystem, base: int) -> LevelSystem:
    if base <= S.base:
        return S
    out = LevelSystem(S.ring, base, S.member, S.transition, S.name, constant=S.constant,
                      zero=S.zero, killed=S.killed)
    if hasattr(S, "factors"):
        out.factors = S.factors
    return out


def _rebase_complex(C: ChainComplex, base: int) -> ChainComplex:
    if base <= C.base:
        return C
    parts = {k: [(key, _rebase(S, base)) for key, S in C.parts(k)] for k in C.degrees()}
    blocks = {k: C.dblocks(k) for k in C.degrees()}
    return ChainComplex(C.ring, parts, blocks, C.name, constant=C.constant)


class _Line:
    def __init__(self, raw: str, no: int):
        self.no = no
        text = raw.split("#", 1)[0].rstrip()
        self.text = text
        k = text.find("[")
        head = text if k < 0 else text[:k]
        self.matrix = None if k < 0 else (text[k:], k + 1)
        self.words = []
        for m in re.finditer(r"\S+", head):
            self.words.append((m.group(), m.start() + 1))

    @property
    def blank(self) -> bool:
        return not self.text.strip()


class Parser:
    def __init__(self, ring: RingSpec, table: ObjectTable, path: str):
        self.ring = ring
        self.table = table
        self.path = path

    # helpers
    def err(self, msg: str, ln: _Line, col: int | None = None):
        raise ParseError(msg, self.path, ln.no, col)

    def word(self, ln: _Line, i: int, what: str) -> str:
        if i >= len(ln.words):
            self.err(f"expected {what}", ln, len(ln.text) + 1)
        return ln.words[i][0]

    def expect(self, ln: _Line, i: int, kw: str) -> None:
        w = self.word(ln, i, repr(kw))
        if w != kw:
            self.err(f"expected {kw!r}, got {w!r}", ln, ln.words[i][1])

    def integer(self, ln: _Line, i: int, what: str) -> int:
        w = self.word(ln, i, what)
        try:
            return int(w)
        except ValueError:
            self.err(f"expected integer {what}, got {w!r}", ln, ln.words[i][1])

    def name(self, ln: _Line, i: int) -> str:
        w = self.word(ln, i, "a name")
        if not _NAME.match(w) or w in ("end",):
            self.err(f"bad name {w!r}", ln, ln.words[i][1])
        return w

    def lookup(self, ln: _Line, i: int, kind: str):
        w = self.word(ln, i, f"{kind} name")
        e = self.table.entries.get(w)
        if e is None:
            self.err(f"unknown {kind} {w!r}", ln, ln.words[i][1])
        if e.kind != kind:
            self.err(f"{w!r} is a {e.kind}, expected a {kind}", ln, ln.words[i][1])
        return e.obj

    def system_ref(self, ln: _Line, i: int) -> LevelSystem:
        w = self.word(ln, i, "system name")
        e = self.table.entries.get(w)
        if e is not None and e.kind == "module":
            return ls.constant_system(e.obj, w)
        return self.lookup(ln, i, "system")

    def matrix(self, ln: _Line) -> MatrixTemplate:
        if ln.matrix is None:
            self.err("expected a matrix", ln, len(ln.text) + 1)
        text, col = ln.matrix
        rows = parse_matrix(text, col, self.path, ln.no)
        return MatrixTemplate(rows, self.ring, self.path, ln.no)

    def no_extra(self, ln: _Line, n: int) -> None:
        if len(ln.words) > n:
            self.err(f"unexpected {ln.words[n][0]!r}", ln, ln.words[n][1])

    def guard(self, fn, ln: _Line):
        try:
            return fn()
        except ParseError:
            raise
        except AlmostError as exc:
            self.err(str(exc), ln)

    # top level
    def run(self, text: str) -> None:
        lines = [_Line(r, i + 1) for i, r in enumerate(text.splitlines())]
        i = 0
        while i < len(lines):
            ln = lines[i]
            if ln.blank:
                i += 1
                continue
            head = ln.words[0][0] if ln.words else ""
            if head == "ring":
                self.ring_header(ln)
                i += 1
            elif head == "module":
                self.module(ln)
                i += 1
            elif head == "system":
                i = self.system(lines, i)
            elif head in ("complex", "arrow", "monoid"):
                j = i + 1
                while j < len(lines) and not (lines[j].words and lines[j].words[0][0] == "end"):
                    j += 1
                if j == len(lines):
                    self.err(f"{head} block is not closed by 'end'", ln)
                body = [b for b in lines[i + 1:j] if not b.blank]
                getattr(self, head)(ln, body)
                self.no_extra(lines[j], 1)
                i = j + 1
            else:
                col = ln.words[0][1] if ln.words else 1
                self.err(f"unknown declaration {head!r}", ln, col)

    def ring_header(self, ln: _Line) -> None:
        variant = self.word(ln, 1, "ring variant")
        fld = None
        if len(ln.words) > 2:
            self.expect(ln, 2, "field")
            try:
                fld = FieldSpec.parse(self.word(ln, 3, "field spec"))
            except AlmostError as exc:
                self.err(str(exc), ln, ln.words[3][1])
            self.no_extra(ln, 4)
        if variant != self.ring.variant or (fld is not None and fld != self.ring.field):
            want = f"{variant}/{fld}" if fld is not None else variant
            self.err(f"RingSpec mismatch: file declares {want}, configured ring is {self.ring}",
                     ln, ln.words[1][1])

    def add(self, kind: str, name: str, obj, ln: _Line) -> None:
        self.table.add(Entry(kind, name, obj, self.path, ln.no))

    def module_spec(self, ln: _Line, i: int, level: int | None) -> LevelModule:
        """Parse ``[level n] gens g [rels [...]]`` starting at word i."""
        if level is None:
            self.expect(ln, i, "level")
            level = self.integer(ln, i + 1, "level")
            i += 2
        self.expect(ln, i, "gens")
        g = self.integer(ln, i + 1, "generator count")
        rels = None
        if len(ln.words) > i + 2:
            self.expect(ln, i + 2, "rels")
            self.no_extra(ln, i + 3)
            t = self.matrix(ln)
            if t.min_level > level:
                self.err(f"level inconsistency: relations need level {t.min_level}, "
                         f"module is declared at level {level}", ln, t.min_level_col)
            rels = t.at(level, (g, t.shape[1]) if t.rows else (g, 0))
        elif ln.matrix is not None:
            self.err("matrix without 'rels'", ln, ln.matrix[1])
        return self.guard(lambda: LevelModule(self.ring, level, g, rels), ln)

    def module(self, ln: _Line) -> None:
        name = self.name(ln, 1)
        self.add("module", name, self.module_spec(ln, 2, None), ln)

    def system(self, lines: list[_Line], i: int) -> int:
        ln = lines[i]
        name = self.name(ln, 1)
        self.expect(ln, 2, "kind")
        kind = self.word(ln, 3, "system kind")
        ring = self.ring
        if kind == "custom":
            j = i + 1
            while j < len(lines) and not (lines[j].words and lines[j].words[0][0] == "end"):
                j += 1
            if j == len(lines):
                self.err("custom system is not closed by 'end'", ln)
            S = self.custom(ln, name, [b for b in lines[i + 1:j] if not b.blank])
            self.add("system", name, S, ln)
            return j + 1
        if kind == "constant":
            if self.word(ln, 4, "'module' or 'level'") == "module":
                m = self.lookup(ln, 5, "module")
                self.no_extra(ln, 6)
            else:
                m = self.module_spec(ln, 4, None)
            S = ls.constant_system(m, name)
        elif kind == "ideal":
            power = 1
            if len(ln.words) > 4:
                self.expect(ln, 4, "power")
                power = self.integer(ln, 5, "power")
                self.no_extra(ln, 6)
                if power < 1:
                    self.err("ideal power must be positive", ln, ln.words[5][1])
            S, _ = ls.ideal_system(ring, power, name=name)
        elif kind == "tilde":
            self.no_extra(ln, 4)
            S, _ = ls.tilde_ideal(ring)
            S.name = name
        elif kind == "quotient-by-ideal":
            self.no_extra(ln, 4)
            S = ls.quotient_by_ideal(ring)
            S.name = name
        elif kind == "zero":
            self.no_extra(ln, 4)
            S = ls.zero_system(ring)
        elif kind in ("sum", "tensor"):
            parts = [self.system_ref(ln, k) for k in range(4, len(ln.words))]
            if len(parts) < 2:
                self.err(f"{kind} needs at least two systems", ln)
            if kind == "sum":
                S = ls.sys_sum(parts, name)
            else:
                S = parts[0]
                for P in parts[1:]:
                    S = ls.sys_tensor(S, P)
                S.name = name
        else:
            self.err(f"unknown system kind {kind!r}", ln, ln.words[3][1])
        S.name = name
        self.add("system", name, S, ln)
        return i + 1

    def custom(self, head: _Line, name: str, body: list[_Line]) -> LevelSystem:
        ring = self.ring
        members: dict[object, tuple] = {}
        trans: dict[object, MatrixTemplate] = {}
        for ln in body:
            w = self.word(ln, 0, "'level' or 'transition'")
            if w not in ("level", "transition"):
                self.err(f"expected 'level' or 'transition', got {w!r}", ln, ln.words[0][1])
            key_w = self.word(ln, 1, "level or '*'")
            key = "*" if key_w == "*" else self.integer(ln, 1, "level")
            table = members if w == "level" else trans
            if key in table:
                self.err(f"{w} {key_w} given twice", ln, ln.words[1][1])
            if w == "transition":
                self.no_extra(ln, 2)
                trans[key] = self.matrix(ln)
            elif self.word(ln, 2, "'gens' or 'module'") == "module":
                if key == "*":
                    self.err("'level *' needs gens/rels, not a module", ln, ln.words[2][1])
                m = self.lookup(ln, 3, "module")
                self.no_extra(ln, 4)
                if m.level != key:
                    self.err(f"level inconsistency: module {ln.words[3][0]} lives at level "
                             f"{m.level}, listed at level {key}", ln, ln.words[3][1])
                members[key] = ("module", m, ln)
            else:
                self.expect(ln, 2, "gens")
                g = self.integer(ln, 3, "generator count")
                rels = None
                if len(ln.words) > 4:
                    self.expect(ln, 4, "rels")
                    self.no_extra(ln, 5)
                    rels = self.matrix(ln)
                    if key != "*" and rels.min_level > key:
                        self.err(f"level inconsistency: relations need level {rels.min_level}",
                                 ln, rels.min_level_col)
                members[key] = ("spec", (g, rels), ln)
        if not members:
            self.err("custom system lists no levels", head)
        listed = sorted(k for k in members if k != "*")
        star = members.get("*")
        if listed:
            base = listed[0]
        else:
            base = max([star[1][1].min_level] if star[1][1] is not None else [0])
        for k in trans:
            if k != "*" and k < base:
                self.err(f"transition {k} below the first level {base}", head)
        if star is not None and star[1][1] is not None and star[1][1].min_level > base:
            self.err("level inconsistency: level * relations are not defined at the first level",
                     star[2])
        cache: dict[int, LevelModule] = {}

        def member(n):
            m = cache.get(n)
            if m is not None:
                return m
            spec = members.get(n)
            if spec is None and star is not None:
                spec = star
            if spec is None:
                m = lm.base_change(member(n - 1))
            elif spec[0] == "module":
                m = spec[1]
            else:
                g, rels = spec[1]
                R = rels.at(n, (g, rels.shape[1]) if rels.rows else (g, 0)) if rels else None
                m = LevelModule(ring, n, g, R)
            cache[n] = m
            return m

        def transition(n):
            t = trans.get(n, trans.get("*"))
            a, b = member(n), member(n + 1)
            if t is None:
                if a.gens != b.gens:
                    raise ParseError(f"{name}: no transition given at level {n} and the "
                                     "generator counts differ", self.path, head.no)
                return Mat.identity(ring.field, a.gens)
            if t.min_level > n + 1:
                raise ParseError(f"level inconsistency: transition needs level {t.min_level}",
                                 t.path, t.line, t.min_level_col)
            return t.at(n + 1, (b.gens, a.gens))

        S = LevelSystem(ring, base, member, transition, name)
        self.guard(lambda: S.check(base + CHECK_LEVELS), head)
        return S

    def complex(self, head: _Line, body: list[_Line]) -> None:
        name = self.name(head, 1)
        self.expect(head, 2, "degrees")
        rng = self.word(head, 3, "degree range a..b")
        m = re.fullmatch(r"(-?\d+)\.\.(-?\d+)", rng)
        if not m or int(m.group(1)) > int(m.group(2)):
            self.err(f"bad degree range {rng!r}", head, head.words[3][1])
        lo, hi = int(m.group(1)), int(m.group(2))
        self.no_extra(head, 4)
        terms: dict[int, LevelSystem] = {}
        diffs: dict[int, tuple[MatrixTemplate, _Line]] = {}
        for ln in body:
            w = self.word(ln, 0, "'term' or 'd'")
            if w not in ("term", "d"):
                self.err(f"expected 'term' or 'd', got {w!r}", ln, ln.words[0][1])
            k = self.integer(ln, 1, "degree")
            if not lo <= k <= hi:
                self.err(f"degree {k} outside {lo}..{hi}", ln, ln.words[1][1])
            if w == "term":
                if k in terms:
                    self.err(f"term {k} given twice", ln, ln.words[1][1])
                terms[k] = self.system_ref(ln, 2)
                self.no_extra(ln, 3)
            else:
                if k in diffs:
                    self.err(f"d {k} given twice", ln, ln.words[1][1])
                self.no_extra(ln, 2)
                diffs[k] = (self.matrix(ln), ln)
        for k, (_, ln) in diffs.items():
            if k not in terms or k - 1 not in terms:
                self.err(f"d {k} needs terms {k} and {k - 1}", ln)
        base = max([S.base for S in terms.values()] + [t.min_level for t, _ in diffs.values()]
                   + [0])
        terms = {k: _rebase(S, base) for k, S in terms.items()}
        ring = self.ring
        parts = {k: [((), S)] for k, S in terms.items()}
        blocks = {}
        for k, (t, _) in diffs.items():
            src, tgt = terms[k], terms[k - 1]
            fn = (lambda t, src, tgt: lambda n: t.at(n, (tgt.member(n).gens, src.member(n).gens)))(
                t, src, tgt)
            blocks[k] = [((), (), fn)]
        constant = all(S.constant for S in terms.values()) and not any(
            t.uses_u for t, _ in diffs.values())
        C = ChainComplex(ring, parts, blocks, name, constant=constant)
        self.guard(lambda: C.check(C.base + CHECK_LEVELS), head)
        self.add("complex", name, C, head)

    def _templates(self, body, key: str) -> dict[int, tuple[MatrixTemplate, _Line]]:
        out = {}
        for ln in body:
            self.expect(ln, 0, key)
            k = self.integer(ln, 1, "degree")
            self.no_extra(ln, 2)
            if k in out:
                self.err(f"{key} {k} given twice", ln, ln.words[1][1])
            out[k] = (self.matrix(ln), ln)
        return out

    @staticmethod
    def _comps(ts, src: ChainComplex, tgt: ChainComplex) -> dict:
        return {k: (lambda t, k: lambda n: t.at(n, (tgt.gens(k, n), src.gens(k, n))))(t, k)
                for k, (t, _) in ts.items()}

    def arrow(self, head: _Line, body: list[_Line]) -> None:
        name = self.name(head, 1)
        self.expect(head, 2, "from")
        src = self._complex_ref(head, 3)
        self.expect(head, 4, "to")
        tgt = self._complex_ref(head, 5)
        self.no_extra(head, 6)
        ts = self._templates(body, "map")
        base = max([src.base, tgt.base] + [t.min_level for t, _ in ts.values()])
        src, tgt = _rebase_complex(src, base), _rebase_complex(tgt, base)
        f = ChainMap(src, tgt, self._comps(ts, src, tgt), name)
        self.guard(lambda: f.check(base + CHECK_LEVELS), head)
        self.add("arrow", name, f, head)

    def _complex_ref(self, ln: _Line, i: int) -> ChainComplex:
        w = self.word(ln, i, "complex name")
        e = self.table.entries.get(w)
        if e is not None and e.kind in ("system", "module"):
            return ChainComplex.single(self.system_ref(ln, i), 0, w)
        return self.lookup(ln, i, "complex")

    def monoid(self, head: _Line, body: list[_Line]) -> None:
        name = self.name(head, 1)
        self.expect(head, 2, "carrier")
        C = self._complex_ref(head, 3)
        self.no_extra(head, 4)
        mus = [ln for ln in body if ln.words and ln.words[0][0] == "mu"]
        etas = [ln for ln in body if ln.words and ln.words[0][0] == "eta"]
        for ln in body:
            if ln not in mus and ln not in etas:
                self.err(f"expected 'mu' or 'eta', got {ln.words[0][0]!r}", ln, ln.words[0][1])
        if len(etas) != 1:
            self.err("monoid needs exactly one eta line", head)
        ts = self._templates(mus, "mu")
        ln = etas[0]
        self.no_extra(ln, 1)
        t = self.matrix(ln)
        base = max([C.base, t.min_level] + [m.min_level for m, _ in ts.values()])
        C = _rebase_complex(C, base)
        CC = cx.complex_tensor(C, C)
        V = cx.unit_complex(self.ring)
        mu = ChainMap(CC, C, self._comps(ts, CC, C), f"mu:{name}")
        eta = ChainMap(V, C, {0: lambda n: t.at(n, (C.gens(0, n), 1))}, f"eta:{name}")
        for f in (mu, eta):
            self.guard(lambda: f.check(C.base + CHECK_LEVELS), head)
        self.add("monoid", name, MonoidObject(C, mu, eta, name), head)


def parse_text(text: str, path: str = "<string>", ring: RingSpec = DEFAULT_RING,
               table: ObjectTable | None = None) -> ObjectTable:
    table = table if table is not None else ObjectTable()
    Parser(ring, table, path).run(text)
    return table


def parse_objects(path, ring: RingSpec = DEFAULT_RING,
                  table: ObjectTable | None = None) -> ObjectTable:
    """Parse one ``.alm`` file, or every ``*.alm`` in a directory in name order."""
    p = Path(path)
    table = table if table is not None else ObjectTable()
    if p.is_dir():
        files = sorted(p.glob("*.alm"))
    elif p.exists():
        files = [p]
    else:
        raise ParseError("no such file or directory", str(p))
    for f in files:
        try:
            text = f.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise ParseError(f"cannot read: {exc}", str(f)) from None
        parse_text(text, str(f), ring, table)
    return table
