"""Noncommutative Buchberger algorithm for quotients of path algebras.

Elements of the path algebra are dicts ``path -> scalar`` whose paths share
source and target.  The monomial order is degree-lexicographic
(:func:`~derived_tame.presentation.path_order_key`), so the leading term of
an element is one of its longest paths.  Scalars come from a
:class:`Scalars` adapter, so the same code runs over a finite field, over Q
and over the rational function field k(lambda).
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction

from .presentation import Path, Quiver, path_order_key


class GroebnerError(ValueError):
    """The computation did not close within its safety caps."""


class Scalars:
    """Arithmetic adapter for coefficients."""

    zero = 0
    one = 1

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def div(self, a, b):
        return a / b

    def is_zero(self, a) -> bool:
        return a == 0

    def from_fraction(self, c: Fraction):
        raise NotImplementedError

    def from_poly(self, coeffs):
        """Element for a polynomial in the parameter (coefficients low first)."""
        raise NotImplementedError


class FieldScalars(Scalars):
    """Scalars of a :class:`~derived_tame.fields.Field`."""

    def __init__(self, F):
        self.F = F
        self.zero = F.zero
        self.one = F.one

    def add(self, a, b):
        return self.F.add(a, b)

    def sub(self, a, b):
        return self.F.sub(a, b)

    def mul(self, a, b):
        return self.F.mul(a, b)

    def div(self, a, b):
        return self.F.mul(a, self.F.inv(b))

    def is_zero(self, a) -> bool:
        return bool(self.F.is_zero(a))

    def from_fraction(self, c):
        return self.F.convert(Fraction(c))

    def from_poly(self, coeffs):
        if len(coeffs) > 1:
            raise ValueError("parameter-dependent coefficient over a plain field")
        return self.from_fraction(coeffs[0] if coeffs else 0)


class RationalFunctionScalars(Scalars):
    """k(lambda) for k = Q or F_p, through sympy's exact domains."""

    def __init__(self, characteristic: int = 0):
        import sympy
        from sympy.polys.domains import FF, QQ

        self.symbol = sympy.Symbol("lambda")
        base = QQ if characteristic == 0 else FF(characteristic)
        self.K = base.frac_field(self.symbol)
        self.base = base
        self.zero = self.K.zero
        self.one = self.K.one
        self._lam = self.K.from_sympy(self.symbol)

    def div(self, a, b):
        return self.K.quo(a, b)

    def is_zero(self, a) -> bool:
        return self.K.is_zero(a)

    def from_fraction(self, c):
        c = Fraction(c)
        return self.K.quo(self.K.convert(c.numerator), self.K.convert(c.denominator))

    def from_poly(self, coeffs):
        acc = self.zero
        for c in reversed(coeffs):
            acc = acc * self._lam + self.from_fraction(c)
        return acc


# --- elements --------------------------------------------------------------------

def leading(poly: dict) -> Path:
    return max(poly, key=path_order_key)


def _clean(S: Scalars, poly: dict) -> dict:
    return {p: c for p, c in poly.items() if not S.is_zero(c)}


def _axpy(S: Scalars, acc: dict, c, terms: dict, wrap=None):
    """``acc += c * wrap(terms)`` in place; ``wrap`` maps paths to paths."""
    for p, v in terms.items():
        q = wrap(p) if wrap else p
        val = S.add(acc.get(q, S.zero), S.mul(c, v))
        if S.is_zero(val):
            acc.pop(q, None)
        else:
            acc[q] = val


def _vertex_at(quiver: Quiver, path: Path, i: int) -> int:
    """Vertex between ``arrows[:i]`` and ``arrows[i:]``."""
    v, arrows = path
    return v if i == len(arrows) else quiver.arrows[arrows[i]][2]


def find_divisor(quiver: Quiver, path: Path, tips: list[Path]):
    """First ``(g_index, i)`` with ``tips[g]`` occurring in ``path`` at arrow offset ``i``."""
    v, arrows = path
    n = len(arrows)
    for g, (tv, tarr) in enumerate(tips):
        m = len(tarr)
        if m == 0:
            for i in range(n + 1):
                if _vertex_at(quiver, path, i) == tv:
                    return g, i
            continue
        for i in range(n - m + 1):
            if arrows[i:i + m] == tarr:
                return g, i
    return None


def _wrapper(path: Path, i: int, m: int):
    """Map inner paths into ``path`` replacing the window ``[i, i+m)``."""
    v, arrows = path
    left, right = arrows[:i], arrows[i + m:]
    return lambda p: (v, left + p[1] + right)


class GroebnerBasis:
    """Reduced Groebner basis of a two-sided ideal of a path algebra."""

    def __init__(self, quiver: Quiver, S: Scalars, polys: list[dict]):
        self.quiver = quiver
        self.S = S
        self.polys = polys
        self.tips = [leading(f) for f in polys]

    def reduce(self, poly: dict) -> dict:
        """Normal form: no term contains a leading path of the basis."""
        S, q = self.S, self.quiver
        poly = _clean(S, poly)
        out: dict = {}
        while poly:
            t = leading(poly)
            c = poly[t]
            hit = find_divisor(q, t, self.tips)
            if hit is None:
                out[t] = c
                del poly[t]
                continue
            g, i = hit
            f = self.polys[g]
            factor = S.div(c, f[self.tips[g]])
            _axpy(S, poly, S.sub(S.zero, factor), f, _wrapper(t, i, len(self.tips[g][1])))
        return out

    def is_normal(self, path: Path) -> bool:
        return find_divisor(self.quiver, path, self.tips) is None

    def normal_words(self, max_len: int) -> list[Path] | None:
        """All normal paths, or ``None`` if one longer than ``max_len`` exists."""
        q = self.quiver
        words = []
        frontier = deque(p for p in q.paths_of_length(0) if self.is_normal(p))
        while frontier:
            p = frontier.popleft()
            if len(p[1]) > max_len:
                return None
            words.append(p)
            t = q.target(p)
            for a, (_, s, _) in enumerate(q.arrows):
                if s == t:
                    nxt = (p[0], (a,) + p[1])
                    if self.is_normal(nxt):
                        frontier.append(nxt)
        words.sort(key=path_order_key)
        return words


def _monic(S: Scalars, f: dict) -> dict:
    lc = f[leading(f)]
    return {p: S.div(c, lc) for p, c in f.items()}


def _overlaps(quiver: Quiver, f: dict, g: dict):
    """S-elements from a proper suffix of lead(f) matching a prefix of lead(g).

    With ``lead(f) = a1 c`` and ``lead(g) = c b2`` (written order), the word
    ``a1 c b2`` has two reductions; their difference is ``f b2 - a1 g``.
    """
    (_, a), (gv, b) = leading(f), leading(g)
    if not a or not b:
        return
    for k in range(1, min(len(a), len(b))):
        if a[len(a) - k:] == b[:k]:
            yield gv, a[: len(a) - k], b[k:]


def _s_element(S: Scalars, f: dict, g: dict, a1, b2, src) -> dict:
    out: dict = {}
    _axpy(S, out, S.one, f, lambda p: (src, p[1] + b2))
    _axpy(S, out, S.sub(S.zero, S.one), g, lambda p: (src, a1 + p[1]))
    return out


def _interreduce(quiver: Quiver, S: Scalars, polys: list[dict]) -> list[dict]:
    polys = [_monic(S, f) for f in polys if f]
    changed = True
    while changed:
        changed = False
        polys.sort(key=lambda f: path_order_key(leading(f)))
        idx = 0
        while idx < len(polys):
            gb = GroebnerBasis(quiver, S, polys[:idx] + polys[idx + 1:])
            r = gb.reduce(polys[idx])
            if r == polys[idx]:
                idx += 1
                continue
            changed = True
            if r:
                polys[idx] = _monic(S, r)
                idx += 1
            else:
                polys.pop(idx)
    polys.sort(key=lambda f: path_order_key(leading(f)))
    return polys


def groebner_basis(quiver: Quiver, S: Scalars, generators: list[dict],
                   max_tip_len: int, max_size: int = 2000) -> GroebnerBasis:
    """Buchberger completion with overlap S-elements.

    Raises :class:`GroebnerError` when a leading path longer than
    ``max_tip_len`` or more than ``max_size`` elements would be needed.
    """
    polys = _interreduce(quiver, S, [_clean(S, g) for g in generators])
    while True:
        gb = GroebnerBasis(quiver, S, polys)
        new = []
        for f in polys:
            for g in polys:
                for src, a1, b2 in _overlaps(quiver, f, g):
                    r = gb.reduce(_s_element(S, f, g, a1, b2, src))
                    if r:
                        if len(leading(r)[1]) > max_tip_len:
                            raise GroebnerError(
                                f"completion needs a leading path longer than {max_tip_len}; "
                                "the quotient is probably infinite-dimensional")
                        new.append(r)
                        gb = GroebnerBasis(quiver, S, polys + new)
        if not new:
            return gb
        polys = _interreduce(quiver, S, polys + new)
        if len(polys) > max_size:
            raise GroebnerError(f"Groebner basis exceeds {max_size} elements")
