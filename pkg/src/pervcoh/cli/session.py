"""Session documents: one ring, named points, perversities, complexes and commands.

The document is TOML with dotted keys::

    field.char = 32003
    ambient.vars = ["x", "y", "z"]
    ambient.order = "grevlex"
    quotient = ["x*y - z^2"]
    points.eta = []
    points.o = ["x", "y", "z"]
    perversity.mid = { eta = -1, o = 0 }
    complex.IC.degree.-1.gens = 1
    complex.SKY.degree.0.gens = 1
    complex.SKY.degree.0.rels = [["x", "y", "z"]]
    commands.heart = "member IC mid leq"

A matrix is a list of rows.  ``rels`` has one row per generator and one
column per relation; ``diff.<k>`` has one row per generator in degree
``k + 1`` and one column per generator in degree ``k``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import tomli

from ..complexes import Complex
from ..errors import PervcohError, PolySyntaxError, SpaceError, PerversityError
from ..groebner import AmbientRing, QuotientRing, is_prime
from ..modules import PresentedModule
from ..space import DeclaredSpace, build_space, check_perversity

MAX_CHAR = 2 ** 31
MAX_GENS = 500
MAX_DEGREE = 1000

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_TOP_KEYS = {"field", "ambient", "quotient", "points", "perversity", "complex", "commands"}


class InputError(PervcohError):
    """A malformed session document or command, with a position when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(where + message)


@dataclass
class SessionDocument:
    ring: QuotientRing
    space: DeclaredSpace
    perversities: dict
    complexes: dict
    commands: dict = field(default_factory=dict)
    text: str = ""


# --------------------------------------------------------------------------
# positions


class _Locator:
    """Maps dotted key paths to the line where they are assigned."""

    _header = re.compile(r"\s*\[([^\[\]]+)\]\s*(#.*)?$")
    _assign = re.compile(r"\s*((?:[A-Za-z0-9_\-]+|\"[^\"]*\"|'[^']*')(?:\s*\.\s*(?:[A-Za-z0-9_\-]+|\"[^\"]*\"|'[^']*'))*)\s*=")

    def __init__(self, text: str):
        self.lines = text.split("\n")
        self.where: dict = {}
        table: tuple = ()
        for i, line in enumerate(self.lines, 1):
            m = self._header.match(line)
            if m:
                table = self._split(m.group(1))
                self.where.setdefault(table, i)
                continue
            m = self._assign.match(line)
            if m:
                path = table + self._split(m.group(1))
                self.where.setdefault(path, i)
                # inline tables: record their keys on the same line
                for sub in re.finditer(r"([A-Za-z0-9_\-]+)\s*=", line[m.end():]):
                    self.where.setdefault(path + (sub.group(1),), i)

    @staticmethod
    def _split(key: str) -> tuple:
        parts = re.findall(r"\"[^\"]*\"|'[^']*'|[^.\s]+", key)
        return tuple(p[1:-1] if p[:1] in "\"'" else p for p in parts)

    def line_of(self, path) -> int | None:
        path = tuple(str(p) for p in path)
        while path:
            if path in self.where:
                return self.where[path]
            path = path[:-1]
        return None

    def error(self, message: str, path, literal: str | None = None, offset: int = 0) -> InputError:
        line = self.line_of(path)
        col = None
        if line is not None:
            col = 1
            if literal is not None:
                # the literal may sit on a continuation line of a multi-line array
                for j in range(line - 1, len(self.lines)):
                    k = self.lines[j].find('"' + literal + '"')
                    if k < 0:
                        k = self.lines[j].find("'" + literal + "'")
                    if k >= 0:
                        line, col = j + 1, k + 2 + max(offset - 1, 0)
                        break
        return InputError(message, line, col)


# --------------------------------------------------------------------------
# parsing


def _toml_error(exc: Exception) -> InputError:
    msg = str(exc)
    line = getattr(exc, "lineno", None)
    col = getattr(exc, "colno", None)
    m = re.search(r"\(at line (\d+), column (\d+)\)", msg)
    if m:
        line, col = int(m.group(1)), int(m.group(2))
    msg = getattr(exc, "msg", None) or re.sub(r"\s*\(at line \d+, column \d+\)", "", msg)
    msg = re.sub(r"\s*\(at (line \d+, column \d+|end of document)\)", "", msg)
    return InputError(f"syntax error: {msg}", line, col)


def _expect(cond: bool, loc: _Locator, path, message: str):
    if not cond:
        raise loc.error(message, path)


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _poly(text, ring: QuotientRing, loc: _Locator, path):
    if not isinstance(text, str):
        if _is_int(text):
            text = str(text)
        else:
            raise loc.error(f"expected a polynomial string, got {type(text).__name__}", path)
    try:
        return ring.parse(text)
    except PolySyntaxError as e:
        raise loc.error(f"polynomial {text!r}: {e.message}", path, text, e.column) from None
    except (ValueError, RecursionError) as e:
        raise loc.error(f"polynomial {text!r}: {e}", path, text) from None


def _poly_list(value, ring, loc, path) -> list:
    _expect(isinstance(value, list), loc, path, "expected a list of polynomial strings")
    return [_poly(v, ring, loc, path) for v in value]


def _matrix(value, nrows: int, ring, loc, path, what: str):
    """Rows of polynomial strings -> sparse columns."""
    _expect(isinstance(value, list), loc, path, f"{what} must be a list of rows")
    if not value or all(isinstance(r, list) and not r for r in value):
        return None
    _expect(all(isinstance(r, list) for r in value), loc, path, f"{what} must be a list of rows")
    _expect(len(value) == nrows, loc, path, f"{what} has {len(value)} rows, expected {nrows}")
    ncols = len(value[0])
    _expect(all(len(r) == ncols for r in value), loc, path, f"{what} rows have different lengths")
    cols = [{} for _ in range(ncols)]
    for i, row in enumerate(value):
        for j, entry in enumerate(row):
            f = _poly(entry, ring, loc, path)
            for e, c in f.terms.items():
                cols[j][(i, e)] = c
    return cols


def _ring(doc: dict, loc: _Locator) -> QuotientRing:
    fld = doc.get("field", {})
    _expect(isinstance(fld, dict), loc, ("field",), "field must be a table")
    _expect(set(fld) <= {"char"}, loc, ("field",), f"unknown field keys: {sorted(set(fld) - {'char'})}")
    p = fld.get("char", 32003)
    _expect(_is_int(p), loc, ("field", "char"), "field.char must be an integer")
    _expect(1 < p < MAX_CHAR and is_prime(p), loc, ("field", "char"), f"characteristic {p} is not prime")
    amb = doc.get("ambient")
    _expect(isinstance(amb, dict), loc, ("ambient",), "missing ambient table with ambient.vars")
    _expect(set(amb) <= {"vars", "order"}, loc, ("ambient",), f"unknown ambient keys: {sorted(set(amb) - {'vars', 'order'})}")
    names = amb.get("vars")
    _expect(isinstance(names, list) and names, loc, ("ambient", "vars"), "ambient.vars must be a non-empty list of names")
    for v in names:
        _expect(isinstance(v, str) and bool(_NAME.match(v)), loc, ("ambient", "vars"), f"bad variable name {v!r}")
    _expect(len(set(names)) == len(names), loc, ("ambient", "vars"), "duplicate variable names")
    order = amb.get("order", "grevlex")
    _expect(order == "grevlex", loc, ("ambient", "order"), f"unsupported monomial order {order!r}")
    S = AmbientRing(names, p)
    base = QuotientRing(S)
    quot = doc.get("quotient", [])
    rels = _poly_list(quot, base, loc, ("quotient",))
    try:
        return QuotientRing(S, [f for f in rels if f])
    except ValueError as e:
        raise loc.error(f"quotient: {e}", ("quotient",)) from None


def _space(doc, ring, loc) -> DeclaredSpace:
    pts = doc.get("points")
    _expect(isinstance(pts, dict) and pts, loc, ("points",), "missing points table")
    decl = []
    for name, gens in pts.items():
        _expect(bool(_NAME.match(name)), loc, ("points", name), f"bad point name {name!r}")
        decl.append((name, _poly_list(gens, ring, loc, ("points", name))))
    try:
        return build_space(decl, ring)
    except (SpaceError, ValueError) as e:
        raise loc.error(f"points: {e}", ("points",)) from None


def _perversities(doc, space, loc) -> dict:
    out = {}
    pv = doc.get("perversity", {})
    _expect(isinstance(pv, dict), loc, ("perversity",), "perversity must be a table")
    for name, values in pv.items():
        path = ("perversity", name)
        _expect(isinstance(values, dict), loc, path, f"perversity {name!r} must map point names to integers")
        for pt, v in values.items():
            if pt not in space.names:
                raise loc.error(f"perversity {name!r} refers to undeclared point {pt!r}", path + (pt,))
            _expect(_is_int(v), loc, path + (pt,), f"perversity {name!r} value at {pt!r} must be an integer")
        missing = [x for x in space.names if x not in values]
        _expect(not missing, loc, path, f"perversity {name!r} has no value at {missing}")
        try:
            out[name] = check_perversity(values, space)
        except PerversityError as e:
            raise loc.error(str(e), path) from None
    return out


def _complex(name, body, ring, loc) -> Complex:
    path = ("complex", name)
    _expect(isinstance(body, dict), loc, path, f"complex {name!r} must be a table")
    _expect(set(body) <= {"degree", "diff"}, loc, path, f"complex {name!r}: unknown keys {sorted(set(body) - {'degree', 'diff'})}")
    terms = {}
    degs = body.get("degree", {})
    _expect(isinstance(degs, dict), loc, path + ("degree",), "degree must be a table keyed by integers")
    for key, entry in degs.items():
        dpath = path + ("degree", key)
        k = _degree(key, loc, dpath)
        _expect(isinstance(entry, dict) and set(entry) <= {"gens", "rels"}, loc, dpath, "a degree needs gens and optional rels")
        g = entry.get("gens")
        _expect(_is_int(g) and 0 <= g <= MAX_GENS, loc, dpath + ("gens",), f"gens must be an integer in [0, {MAX_GENS}]")
        rels = _matrix(entry.get("rels", []), g, ring, loc, dpath + ("rels",), "rels") or []
        _expect(k not in terms, loc, dpath, f"degree {k} given twice")
        terms[k] = PresentedModule(ring, g, rels)
    diffs = {}
    dd = body.get("diff", {})
    _expect(isinstance(dd, dict), loc, path + ("diff",), "diff must be a table keyed by integers")
    for key, mat in dd.items():
        dpath = path + ("diff", key)
        k = _degree(key, loc, dpath)
        src = terms.get(k, PresentedModule.zero(ring)).ngens
        tgt = terms.get(k + 1, PresentedModule.zero(ring)).ngens
        cols = _matrix(mat, tgt, ring, loc, dpath, f"diff.{k}")
        if cols is None:
            continue
        _expect(len(cols) == src, loc, dpath, f"diff.{k} has {len(cols)} columns, expected {src}")
        diffs[k] = cols
    C = Complex(ring, terms, diffs)
    _expect(C.check(), loc, path, f"complex {name!r}: d∘d != 0 or a differential does not respect relations")
    return C


def _degree(key, loc, path) -> int:
    try:
        k = int(key)
    except ValueError:
        raise loc.error(f"degree key {key!r} is not an integer", path) from None
    _expect(abs(k) <= MAX_DEGREE, loc, path, f"degree {k} out of range")
    return k


def parse_input(text: str) -> SessionDocument:
    """Parse and resolve a session document; every failure is an ``InputError``."""
    loc = _Locator(text)
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as e:
        raise _toml_error(e) from None
    try:
        return _resolve(doc, loc, text)
    except InputError:
        raise
    except RecursionError:
        raise InputError("input nested too deeply") from None
    except (PervcohError, ValueError, TypeError, ArithmeticError) as e:
        raise InputError(f"invalid session: {e}") from None


def _resolve(doc: dict, loc: _Locator, text: str) -> SessionDocument:
    unknown = sorted(set(doc) - _TOP_KEYS)
    if unknown:
        raise loc.error(f"unknown top-level key {unknown[0]!r}", (unknown[0],))
    ring = _ring(doc, loc)
    space = _space(doc, ring, loc)
    pervs = _perversities(doc, space, loc)
    cx = doc.get("complex", {})
    _expect(isinstance(cx, dict), loc, ("complex",), "complex must be a table")
    complexes = {}
    for name, body in cx.items():
        _expect(bool(_NAME.match(name)), loc, ("complex", name), f"bad complex name {name!r}")
        complexes[name] = _complex(name, body, ring, loc)
    cmds = doc.get("commands", {})
    _expect(isinstance(cmds, dict), loc, ("commands",), "commands must be a table of command lines")
    session = SessionDocument(ring, space, pervs, complexes, {}, text)
    from .commands import parse_command
    for name, line in cmds.items():
        _expect(isinstance(line, str), loc, ("commands", name), f"command {name!r} must be a string")
        try:
            session.commands[name] = parse_command(line, session)
        except InputError as e:
            raise loc.error(f"command {name!r}: {e.message}", ("commands", name)) from None
    return session


# --------------------------------------------------------------------------
# serialization


def _q(s: str) -> str:
    return '"' + s + '"'


def _rows(cols, nrows: int, ring: QuotientRing) -> list:
    S = ring.ambient
    from ..groebner import Poly
    rows = [[{} for _ in cols] for _ in range(nrows)]
    for j, col in enumerate(cols):
        for (i, e), c in col.items():
            rows[i][j][e] = c
    return [[str(Poly(S, t)) for t in row] for row in rows]


def _matrix_text(rows) -> str:
    return "[" + ", ".join("[" + ", ".join(_q(x) for x in r) + "]" for r in rows) + "]"


def complex_to_dict(C: Complex) -> dict:
    """Plain structure mirroring the document layout (rows of polynomial strings)."""
    ring = C.ring
    out = {"degree": {}, "diff": {}}
    for k, M in C.terms.items():
        entry = {"gens": M.ngens}
        if M.rels:
            entry["rels"] = _rows(M.rels, M.ngens, ring)
        out["degree"][str(k)] = entry
    for k, cols in C.diffs.items():
        if any(cols):
            out["diff"][str(k)] = _rows(cols, C.module(k + 1).ngens, ring)
    return out


def serialize_complex(name: str, C: Complex) -> str:
    d = complex_to_dict(C)
    lines = []
    for k, entry in d["degree"].items():
        lines.append(f"complex.{name}.degree.{k}.gens = {entry['gens']}")
        if "rels" in entry:
            lines.append(f"complex.{name}.degree.{k}.rels = {_matrix_text(entry['rels'])}")
    for k, rows in d["diff"].items():
        lines.append(f"complex.{name}.diff.{k} = {_matrix_text(rows)}")
    return "\n".join(lines) + ("\n" if lines else "")


def serialize_header(ring: QuotientRing, space: DeclaredSpace | None = None, perversities=None) -> str:
    S = ring.ambient
    lines = [f"field.char = {ring.char}",
             "ambient.vars = [" + ", ".join(_q(v) for v in S.variables) + "]",
             'ambient.order = "grevlex"',
             "quotient = [" + ", ".join(_q(str(f)) for f in ring.ideal) + "]"]
    if space is not None:
        for x in space.points:
            lines.append(f"points.{x.name} = [" + ", ".join(_q(str(g)) for g in x.gens) + "]")
    for name, P in (perversities or {}).items():
        body = ", ".join(f"{k} = {v}" for k, v in P.values.items())
        lines.append(f"perversity.{name} = {{ {body} }}")
    return "\n".join(lines) + "\n"


def serialize_session(session: SessionDocument) -> str:
    out = serialize_header(session.ring, session.space, session.perversities)
    for name, C in session.complexes.items():
        out += serialize_complex(name, C)
    for name, cmd in session.commands.items():
        out += f"commands.{name} = {_q(cmd.text)}\n"
    return out
