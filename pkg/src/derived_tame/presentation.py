"""Quivers, paths, presentations and the presentation file grammar.

Paths are written right to left: ``b*a`` means "first ``a``, then ``b``".  A
path is stored as ``(source, arrows)`` with ``arrows`` in written order, so the
last arrow of the tuple is applied first; the trivial path at ``v`` is
``(v, ())``.  Vertices are 0-based internally and 1-based in files and labels.

File grammar (``#`` starts a comment)::

    name: dual numbers
    field: Q                  # or F<q>
    vertices: 1
    arrows:
      x: 1 -> 1
    relations:
      x*x                     # linear combinations, e.g. 2*b*a - 1/3*c*d
    bound: 2                  # truncation bound N: normal words have length <= N
    parameter: lambda         # family files only; coefficients may use it

Relation terms are products of numbers, arrow names, ``e<k>`` (trivial
paths), the parameter and parenthesised sub-expressions; ``^`` takes powers.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .fields import Field, parse_field

Path = tuple[int, tuple[int, ...]]
Poly = tuple[Fraction, ...]  # coefficients low degree first, no trailing zeros


class PresentationError(ValueError):
    """Invalid presentation; ``line``/``col`` are 1-based when known."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line, self.col = line, col
        where = f"line {line}, col {col}: " if line is not None else ""
        super().__init__(where + message)


# --- polynomials in the family parameter -------------------------------------

def ptrim(p: Iterable[Fraction]) -> Poly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(Fraction(c) for c in p)


def padd(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return ptrim((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return ptrim(out)


def pscale(a: Poly, c) -> Poly:
    return ptrim(x * c for x in a)


def peval(a: Poly, x) -> Fraction:
    acc = Fraction(0)
    for c in reversed(a):
        acc = acc * x + c
    return acc


def pconst(c) -> Poly:
    return ptrim([Fraction(c)])


# --- quivers -----------------------------------------------------------------

@dataclass(frozen=True)
class Quiver:
    num_vertices: int
    arrows: tuple[tuple[str, int, int], ...]  # (name, source, target), 0-based

    def __post_init__(self):
        if self.num_vertices < 1:
            raise PresentationError("a quiver needs at least one vertex")
        names = [a[0] for a in self.arrows]
        if len(set(names)) != len(names):
            raise PresentationError("arrow names must be unique")
        for name, s, t in self.arrows:
            if not (0 <= s < self.num_vertices and 0 <= t < self.num_vertices):
                raise PresentationError(f"arrow {name} has an endpoint outside 1..{self.num_vertices}")

    @property
    def arrow_index(self) -> dict[str, int]:
        return {a[0]: i for i, a in enumerate(self.arrows)}

    def source(self, path: Path) -> int:
        return path[0]

    def target(self, path: Path) -> int:
        v, arrows = path
        return self.arrows[arrows[0]][2] if arrows else v

    def trivial(self, v: int) -> Path:
        return (v, ())

    def arrow_path(self, a: int) -> Path:
        return (self.arrows[a][1], (a,))

    def compose(self, p: Path, q: Path) -> Path | None:
        """``p*q`` (first ``q``, then ``p``) or ``None`` when not composable."""
        if self.source(p) != self.target(q):
            return None
        return (q[0], p[1] + q[1])

    def is_path(self, path: Path) -> bool:
        v, arrows = path
        cur = v
        for a in reversed(arrows):
            if self.arrows[a][1] != cur:
                return False
            cur = self.arrows[a][2]
        return True

    def path_name(self, path: Path) -> str:
        v, arrows = path
        if not arrows:
            return f"e{v + 1}"
        return "*".join(self.arrows[a][0] for a in arrows)

    def parse_path(self, name: str) -> Path:
        name = name.strip()
        m = re.fullmatch(r"e(\d+)", name)
        if m and name not in self.arrow_index:
            v = int(m.group(1)) - 1
            if not 0 <= v < self.num_vertices:
                raise PresentationError(f"no vertex {v + 1}")
            return (v, ())
        idx = self.arrow_index
        arrows = []
        for part in name.split("*"):
            part = part.strip()
            if part not in idx:
                raise PresentationError(f"unknown arrow {part!r}")
            arrows.append(idx[part])
        path = (self.arrows[arrows[-1]][1], tuple(arrows))
        if not self.is_path(path):
            raise PresentationError(f"{name!r} is not a path")
        return path

    def paths_of_length(self, n: int) -> list[Path]:
        paths = [(v, ()) for v in range(self.num_vertices)]
        for _ in range(n):
            paths = [
                (p[0], (a,) + p[1])
                for p in paths
                for a, (_, s, _) in enumerate(self.arrows)
                if s == self.target(p)
            ]
        return paths

    def paths_up_to(self, n: int) -> list[Path]:
        out = []
        for k in range(n + 1):
            out.extend(self.paths_of_length(k))
        return out


def path_order_key(path: Path):
    """Degree-lexicographic key; ties by arrow declaration order, then vertex."""
    return (len(path[1]), path[1], path[0])


# --- presentations -------------------------------------------------------------

Relation = tuple[tuple[Path, Fraction], ...]
FamilyRelation = tuple[tuple[Path, Poly], ...]


@dataclass(frozen=True)
class AlgebraPresentation:
    """Quiver with relations over a field; coefficients stored as exact rationals."""

    quiver: Quiver
    relations: tuple[Relation, ...]
    field: Field
    bound: int
    name: str = ""

    def with_field(self, F: Field) -> "AlgebraPresentation":
        return AlgebraPresentation(self.quiver, self.relations, F, self.bound, self.name)

    def with_relations(self, extra: Iterable[Relation], name: str | None = None) -> "AlgebraPresentation":
        return AlgebraPresentation(
            self.quiver, self.relations + tuple(extra), self.field, self.bound,
            self.name if name is None else name,
        )

    def is_admissible(self) -> bool:
        return all(len(p[1]) >= 2 for rel in self.relations for p, c in rel if c != 0)

    def relation_strings(self) -> list[str]:
        return [format_combination(self.quiver, rel) for rel in self.relations]


@dataclass(frozen=True)
class FamilyPresentation:
    """Relations whose coefficients are polynomials in one parameter."""

    quiver: Quiver
    relations: tuple[FamilyRelation, ...]
    field: Field
    bound: int
    name: str = ""
    parameter: str = "lambda"

    def evaluate(self, value) -> AlgebraPresentation:
        value = Fraction(value)
        rels = []
        for rel in self.relations:
            terms = tuple((p, peval(c, value)) for p, c in rel if peval(c, value) != 0)
            if terms:
                rels.append(terms)
        return AlgebraPresentation(self.quiver, tuple(rels), self.field, self.bound,
                                   f"{self.name}({self.parameter}={value})")

    def with_field(self, F: Field) -> "FamilyPresentation":
        return FamilyPresentation(self.quiver, self.relations, F, self.bound, self.name, self.parameter)

    def relation_strings(self) -> list[str]:
        return [format_family_relation(self.quiver, rel, self.parameter) for rel in self.relations]


def format_combination(quiver: Quiver, terms) -> str:
    out = []
    for path, c in sorted(terms, key=lambda t: path_order_key(t[0]), reverse=True):
        c = Fraction(c)
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        body = quiver.path_name(path)
        if mag != 1:
            body = f"{mag}*{body}"
        out.append((sign, body))
    if not out:
        return "0"
    s = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, body in out[1:]:
        s += f" {sign} {body}"
    return s


def _format_poly(p: Poly, param: str) -> str:
    parts = []
    for k, c in enumerate(p):
        if c == 0:
            continue
        mono = "" if k == 0 else (param if k == 1 else f"{param}^{k}")
        if mono and c == 1:
            parts.append(mono)
        elif mono:
            parts.append(f"{c}*{mono}")
        else:
            parts.append(str(c))
    return " + ".join(parts) or "0"


def format_family_relation(quiver: Quiver, rel: FamilyRelation, param: str) -> str:
    out = []
    for path, c in sorted(rel, key=lambda t: path_order_key(t[0]), reverse=True):
        name = quiver.path_name(path)
        nonzero = [(k, v) for k, v in enumerate(c) if v != 0]
        if len(nonzero) == 1:
            k, v = nonzero[0]
            mono = "" if k == 0 else (param if k == 1 else f"{param}^{k}")
            mag = abs(v)
            factors = ([str(mag)] if mag != 1 else []) + ([mono] if mono else [])
            out.append(("-" if v < 0 else "+", "*".join(factors + [name])))
        else:
            out.append(("+", f"({_format_poly(c, param)})*{name}"))
    if not out:
        return "0"
    s = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, body in out[1:]:
        s += f" {sign} {body}"
    return s


# --- parser --------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_']*)|(\S))")


@dataclass
class _Tok:
    kind: str  # num, id, op, end
    text: str
    col: int


def _tokenize(text: str, line: int, col0: int) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        if m.group(1):
            toks.append(_Tok("num", m.group(1), col0 + m.start(1)))
        elif m.group(2):
            toks.append(_Tok("id", m.group(2), col0 + m.start(2)))
        elif m.group(3):
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise PresentationError(f"unexpected character {ch!r}", line, col0 + m.start(3))
            toks.append(_Tok("op", ch, col0 + m.start(3)))
        pos = m.end()
    toks.append(_Tok("end", "", col0 + len(text)))
    return toks


_SCALAR = None  # key of the path-free part of a combination


class _ExprParser:
    """Recursive descent over one relation; values map path (or None) -> Poly."""

    def __init__(self, quiver: Quiver, param: str | None, text: str, line: int, col0: int):
        self.q = quiver
        self.param = param
        self.line = line
        self.toks = _tokenize(text, line, col0)
        self.i = 0

    def err(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.toks[self.i]
        raise PresentationError(msg, self.line, tok.col + 1)

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def parse(self) -> dict:
        val = self.expr()
        if self.peek().kind != "end":
            self.err(f"unexpected {self.peek().text!r}")
        return val

    def expr(self) -> dict:
        sign = 1
        if self.peek().text in "+-" and self.peek().kind == "op":
            sign = -1 if self.take().text == "-" else 1
        acc = self._scale(self.term(), sign)
        while self.peek().kind == "op" and self.peek().text in "+-":
            sign = -1 if self.take().text == "-" else 1
            acc = self._add(acc, self._scale(self.term(), sign))
        return acc

    def term(self) -> dict:
        acc = self.power()
        while self.peek().kind == "op" and self.peek().text == "*":
            self.take()
            acc = self._mul(acc, self.power())
        return acc

    def power(self) -> dict:
        base = self.factor()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.take()
            tok = self.take()
            if tok.kind != "num":
                self.err("exponent must be a non-negative integer", tok)
            n = int(tok.text)
            out = {_SCALAR: pconst(1)}
            for _ in range(n):
                out = self._mul(out, base)
            return out
        return base

    def factor(self) -> dict:
        tok = self.take()
        if tok.kind == "num":
            value = Fraction(int(tok.text))
            if self.peek().kind == "op" and self.peek().text == "/":
                self.take()
                den = self.take()
                if den.kind != "num" or int(den.text) == 0:
                    self.err("bad denominator", den)
                value /= int(den.text)
            return {_SCALAR: pconst(value)}
        if tok.kind == "id":
            name = tok.text
            if self.param is not None and name == self.param:
                return {_SCALAR: (Fraction(0), Fraction(1))}
            try:
                path = self.q.parse_path(name)
            except PresentationError:
                self.err(f"unknown arrow {name!r}", tok)
            return {path: pconst(1)}
        if tok.kind == "op" and tok.text == "(":
            val = self.expr()
            close = self.take()
            if close.text != ")":
                self.err("expected ')'", close)
            return val
        self.err(f"unexpected {tok.text or 'end of line'!r}", tok)

    @staticmethod
    def _scale(val: dict, c) -> dict:
        return {k: pscale(v, c) for k, v in val.items()}

    @staticmethod
    def _add(a: dict, b: dict) -> dict:
        out = dict(a)
        for k, v in b.items():
            out[k] = padd(out.get(k, ()), v)
        return {k: v for k, v in out.items() if v}

    def _mul(self, a: dict, b: dict) -> dict:
        out: dict = {}
        for ka, va in a.items():
            for kb, vb in b.items():
                if ka is _SCALAR:
                    key = kb
                elif kb is _SCALAR:
                    key = ka
                else:
                    key = self.q.compose(ka, kb)
                    if key is None:
                        self.err(f"{self.q.path_name(ka)} and {self.q.path_name(kb)} do not compose")
                out[key] = padd(out.get(key, ()), pmul(va, vb))
        return {k: v for k, v in out.items() if v}


def parse_relation(quiver: Quiver, text: str, param: str | None = None,
                   line: int = 1, col0: int = 0) -> FamilyRelation:
    """Parse one relation into ``((path, poly), ...)``; checks uniformity."""
    val = _ExprParser(quiver, param, text, line, col0).parse()
    if _SCALAR in val:
        raise PresentationError("relation has a term without a path", line, col0 + 1)
    ends = {(quiver.source(p), quiver.target(p)) for p in val}
    if len(ends) > 1:
        raise PresentationError("relation mixes paths with different endpoints", line, col0 + 1)
    return tuple(sorted(val.items(), key=lambda t: path_order_key(t[0]), reverse=True))


_KEY = re.compile(r"^([A-Za-z_]+)\s*:\s*(.*)$")


def _parse_sections(text: str):
    """Yield ``(key, value, [(line_no, col, item), ...])`` blocks."""
    blocks = []
    cur = None
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        indented = line[0] in " \t"
        m = _KEY.match(line.strip())
        if not indented and m:
            cur = [m.group(1).lower(), m.group(2).strip(), no, []]
            blocks.append(cur)
        elif indented and cur is not None:
            stripped = line.lstrip()
            cur[3].append((no, len(line) - len(stripped), stripped))
        else:
            raise PresentationError(f"cannot parse {line.strip()!r}", no, 1)
    return blocks


def _parse_common(text: str, allow_parameter: bool):
    blocks = _parse_sections(text)
    seen = {}
    for key, value, no, items in blocks:
        if key in seen:
            raise PresentationError(f"duplicate section {key!r}", no, 1)
        seen[key] = (value, no, items)
    known = {"name", "field", "vertices", "arrows", "relations", "bound", "truncation", "parameter"}
    for key, (_, no, _) in seen.items():
        if key not in known:
            raise PresentationError(f"unknown section {key!r}", no, 1)
    if "parameter" in seen and not allow_parameter:
        raise PresentationError("'parameter' is only allowed in family files", seen["parameter"][1], 1)
    for req in ("field", "vertices", "arrows"):
        if req not in seen:
            raise PresentationError(f"missing section {req!r}")
    value, no, _ = seen["field"]
    try:
        F = parse_field(value)
    except ValueError as exc:
        raise PresentationError(str(exc), no, 1) from None
    value, no, _ = seen["vertices"]
    if not value.isdigit():
        raise PresentationError("vertices must be a positive integer", no, 1)
    nv = int(value)

    value, no, items = seen["arrows"]
    entries = [(no, 0, v) for v in value.split(",") if v.strip()] if value else []
    entries += items
    arrows = []
    for lno, col, item in entries:
        for chunk in item.split(","):
            if not chunk.strip():
                continue
            m = re.fullmatch(r"\s*([A-Za-z_][A-Za-z0-9_']*)\s*:\s*(\d+)\s*->\s*(\d+)\s*", chunk)
            if not m:
                raise PresentationError(f"bad arrow declaration {chunk.strip()!r}", lno, col + 1)
            s, t = int(m.group(2)), int(m.group(3))
            if not (1 <= s <= nv and 1 <= t <= nv):
                raise PresentationError(f"arrow {m.group(1)} endpoint outside 1..{nv}", lno, col + 1)
            if re.fullmatch(r"e\d+", m.group(1)):
                raise PresentationError("arrow names of the form e<k> are reserved", lno, col + 1)
            arrows.append((m.group(1), s - 1, t - 1))
    try:
        quiver = Quiver(nv, tuple(arrows))
    except PresentationError as exc:
        raise PresentationError(str(exc), no, 1) from None

    bound_entry = seen.get("bound") or seen.get("truncation")
    if bound_entry is None:
        raise PresentationError("missing section 'bound'")
    value, no, _ = bound_entry
    if not value.isdigit():
        raise PresentationError("bound must be a non-negative integer", no, 1)
    bound = int(value)

    param = None
    if allow_parameter:
        param = seen["parameter"][0] if "parameter" in seen else "lambda"
    rels = []
    if "relations" in seen:
        value, no, items = seen["relations"]
        entries = ([(no, 0, value)] if value else []) + items
        for lno, col, item in entries:
            rels.append(parse_relation(quiver, item, param, lno, col))
    name = seen["name"][0] if "name" in seen else ""
    return quiver, tuple(rels), F, bound, name, param


def parse_presentation(text: str) -> AlgebraPresentation:
    quiver, rels, F, bound, name, _ = _parse_common(text, allow_parameter=False)
    plain = []
    for rel in rels:
        plain.append(tuple((p, c[0] if c else Fraction(0)) for p, c in rel))
    return AlgebraPresentation(quiver, tuple(plain), F, bound, name)


def parse_family(text: str) -> FamilyPresentation:
    quiver, rels, F, bound, name, param = _parse_common(text, allow_parameter=True)
    return FamilyPresentation(quiver, rels, F, bound, name, param)


def load_presentation(path) -> AlgebraPresentation:
    with open(path, encoding="utf-8") as fh:
        return parse_presentation(fh.read())


def load_family(path) -> FamilyPresentation:
    with open(path, encoding="utf-8") as fh:
        return parse_family(fh.read())


def dump_presentation(pres: AlgebraPresentation) -> str:
    q = pres.quiver
    lines = []
    if pres.name:
        lines.append(f"name: {pres.name}")
    lines.append(f"field: {pres.field.name}")
    lines.append(f"vertices: {q.num_vertices}")
    lines.append("arrows:")
    for name, s, t in q.arrows:
        lines.append(f"  {name}: {s + 1} -> {t + 1}")
    if pres.relations:
        lines.append("relations:")
        for rel in pres.relations:
            lines.append(f"  {format_combination(q, rel)}")
    lines.append(f"bound: {pres.bound}")
    return "\n".join(lines) + "\n"
