"""One-parameter families of algebras: fibre dimensions, flat limits, par scans.

A family is a quiver with relations whose coefficients are polynomials in
``lambda``.  The generic fibre is computed by a Groebner basis over the
rational function field ``k(lambda)``; special fibres by substitution.  The
flat limit at ``lambda = 0`` is the reduction modulo ``lambda`` of the
saturated ideal ``I k[lambda, 1/lambda] ∩ kQ[lambda]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg
from .algebra import AlgebraData, AlgebraError, build_algebra
from .families import VectorRank, par_estimate, radical_ideal
from .fields import Field
from .groebner import GroebnerError, RationalFunctionScalars, groebner_basis
from .presentation import (AlgebraPresentation, FamilyPresentation, Path, format_combination,
                           path_order_key)


class DeformationError(ValueError):
    """A family computation could not be completed."""


def evaluate_family(fam: FamilyPresentation, value, field: Field | None = None) -> AlgebraData:
    """The fibre at ``lambda = value``.

    Fibres whose relations are not admissible (for instance ``x^2 - 3x``) are
    built leniently: the quotient only has to be finite-dimensional and the
    radical is computed directly.
    """
    pres = fam.evaluate(value)
    if field is not None:
        pres = pres.with_field(field)
    try:
        return build_algebra(pres, strict=pres.is_admissible())
    except AlgebraError:
        if pres.is_admissible():
            return build_algebra(pres, strict=False)
        raise


def generic_dim(fam: FamilyPresentation, max_tip_len: int | None = None) -> int:
    """Dimension of the generic fibre, from a Groebner basis over ``k(lambda)``."""
    S = RationalFunctionScalars(fam.field.characteristic)
    gens = []
    for rel in fam.relations:
        g = {p: S.from_poly(c) for p, c in rel}
        g = {p: c for p, c in g.items() if not S.is_zero(c)}
        if g:
            gens.append(g)
    cap = max_tip_len if max_tip_len is not None else 4 * fam.bound + 4
    try:
        gb = groebner_basis(fam.quiver, S, gens, max_tip_len=cap)
    except GroebnerError as exc:
        raise DeformationError(f"generic fibre: {exc}") from None
    words = gb.normal_words(cap)
    if words is None:
        raise DeformationError("the generic fibre is infinite-dimensional")
    return len(words)


def dim_scan(fam: FamilyPresentation, values) -> dict:
    """``{value: dim A(value)}`` (``None`` where the fibre is infinite-dimensional)."""
    out = {}
    for v in values:
        try:
            out[v] = evaluate_family(fam, v).dim
        except AlgebraError:
            out[v] = None
    return out


def is_flat_on(fam: FamilyPresentation, values) -> bool:
    """Whether every fibre over ``values`` has the generic dimension."""
    g = generic_dim(fam)
    return all(d == g for d in dim_scan(fam, values).values())


# --- truncated path spaces ------------------------------------------------------------

def _path_basis(fam: FamilyPresentation, length: int) -> list[Path]:
    return sorted(fam.quiver.paths_up_to(length), key=path_order_key)


def _ideal_rows(fam: FamilyPresentation, paths: list[Path], length: int) -> list[dict]:
    """All ``p * g * q`` for relations ``g`` whose terms stay within ``length``.

    Rows are ``{path: polynomial}`` with polynomial coefficients in ``lambda``.
    """
    q = fam.quiver
    rows = []
    for rel in fam.relations:
        src = q.source(rel[0][0])
        tgt = q.target(rel[0][0])
        longest = max(len(p[1]) for p, _ in rel)
        rights = [r for r in paths if q.target(r) == src]
        lefts = [l for l in paths if q.source(l) == tgt]
        for r in rights:
            for l in lefts:
                if longest + len(r[1]) + len(l[1]) > length:
                    continue
                row = {}
                for p, c in rel:
                    w = q.compose(l, q.compose(p, r))
                    row[w] = c
                rows.append(row)
    return rows


def _poly_tensor(F: Field, rows: list[dict], index: dict) -> np.ndarray:
    """Rows as an array ``(rows, paths, degree + 1)`` of coefficients in ``F``."""
    deg = max((len(c) for row in rows for c in row.values()), default=1)
    T = F.zeros((len(rows), len(index), max(deg, 1)))
    for r, row in enumerate(rows):
        for p, c in row.items():
            for k, v in enumerate(c):
                T[r, index[p], k] = F.add(T[r, index[p], k], F.convert(Fraction(v)))
    return T


def _independent_rows(F: Field, T: np.ndarray) -> list[int]:
    """Indices of rows of ``T`` independent over ``k(lambda)``."""
    import sympy
    from sympy.polys.matrices import DomainMatrix

    S = RationalFunctionScalars(F.characteristic)
    lam = S.symbol
    n_rows, n_cols, deg = T.shape
    if n_rows == 0:
        return []

    def entry(r, c):
        coeffs = [F.to_json(T[r, c, k]) for k in range(deg)]
        expr = sum(sympy.Rational(str(v)) * lam**k for k, v in enumerate(coeffs))
        return S.K.from_sympy(sympy.expand(expr))

    M = DomainMatrix([[entry(r, c) for r in range(n_rows)] for c in range(n_cols)], (n_cols, n_rows), S.K)
    _, pivots = M.rref()
    return list(pivots)


def _saturate(F: Field, P: np.ndarray) -> np.ndarray:
    """Saturate the lattice spanned by the rows of ``P`` at ``lambda = 0``.

    While the rows are dependent at 0, a dependency ``c`` gives a row
    ``c . P`` divisible by ``lambda``; it replaces one of the rows it uses.
    Each step enlarges the lattice inside its saturation, so the loop stops.
    Returns the rows evaluated at 0.
    """
    P = P.copy()
    while True:
        P0 = P[:, :, 0]
        dep = linalg.left_nullspace(F, P0)
        if dep.shape[0] == 0:
            return P0
        c = dep[0]
        i = int(np.nonzero(~F.is_zero(c))[0][0])
        combo = F.matmul(c[None, :], P.reshape(P.shape[0], -1)).reshape(P.shape[1:])
        shifted = F.zeros(combo.shape)
        shifted[:, :-1] = combo[:, 1:]
        if F.is_zero(shifted).all():
            raise DeformationError("rows dependent over k(lambda)")
        P[i] = shifted


@dataclass
class FlatLimit:
    """Flat limit at 0: its presentation, the extra relations and the dimension."""

    presentation: AlgebraPresentation
    extras: list
    dim: int
    generic_dim: int
    truncation: int
    notes: list = field(default_factory=list)

    def extra_strings(self) -> list[str]:
        return [format_combination(self.presentation.quiver, rel) for rel in self.extras]

    def to_json(self) -> dict:
        return {"dim": self.dim, "generic_dim": self.generic_dim, "truncation": self.truncation,
                "extra_relations": self.extra_strings(),
                "relations": self.presentation.relation_strings(), "notes": list(self.notes)}


def _closure(F: Field, fam: FamilyPresentation, paths, index, rows: np.ndarray) -> np.ndarray:
    """Row space of the two-sided ideal generated by ``rows`` inside the truncated path space."""
    q = fam.quiver
    n = len(paths)
    arrows = [q.arrow_path(a) for a in range(len(q.arrows))]
    # left and right multiplication by arrows as matrices on the truncated space
    mults = []
    for a in arrows:
        for side in (0, 1):
            M = F.zeros((n, n))
            for k, p in enumerate(paths):
                w = q.compose(a, p) if side == 0 else q.compose(p, a)
                if w is not None and w in index:
                    M[k, index[w]] = F.one
            mults.append(M)
    span = linalg.rowspace(F, rows) if rows.shape[0] else F.zeros((0, n))
    while True:
        grown = [span] + [F.matmul(span, M) for M in mults]
        new = linalg.rowspace(F, np.vstack(grown))
        if new.shape[0] == span.shape[0]:
            return span
        span = new


def _to_relation(F: Field, paths, row) -> tuple:
    terms = []
    for k, p in enumerate(paths):
        if not F.is_zero(row[k]):
            if F.order is None:
                c = Fraction(F.to_json(row[k]))
            else:
                c = int(F.to_json(row[k]))
                c = Fraction(c - F.order if c > F.order // 2 else c)
            terms.append((p, c))
    return tuple(sorted(terms, key=lambda t: path_order_key(t[0]), reverse=True))


def flat_limit(fam: FamilyPresentation, max_truncation: int | None = None) -> FlatLimit:
    """Flat limit of the family at ``lambda = 0``.

    The ideal is truncated to paths of length at most ``L``; the truncated
    generic span is saturated at 0 and the result generates an ideal contained
    in the limit ideal.  ``L`` grows until the quotient has the generic
    dimension, which certifies equality.  Over a prime field the extension
    is only available for prime fields and Q (the coefficients must be
    representable as fractions).
    """
    F = fam.field
    if F.order is not None and F.order != F.characteristic:
        raise DeformationError("flat limits need Q or a prime field")
    g = generic_dim(fam)
    cap = max_truncation if max_truncation is not None else 2 * fam.bound + 2
    at0 = fam.evaluate(0)
    for L in range(max(fam.bound, 1), cap + 1):
        paths = _path_basis(fam, L)
        index = {p: k for k, p in enumerate(paths)}
        rows = _ideal_rows(fam, paths, L)
        if not rows:
            continue
        T = _poly_tensor(F, rows, index)
        keep = _independent_rows(F, T)
        limit_rows = _saturate(F, T[keep])
        # the ideal I(0) of the special fibre, truncated the same way
        base_rows = T[:, :, 0]
        base = _closure(F, fam, paths, index, base_rows)
        extras = []
        span = base
        reduced = linalg.rref(F, limit_rows)[0]
        order = sorted(range(reduced.shape[0]), key=lambda r: _row_key(F, paths, reduced[r]))
        for r in order:
            row = reduced[r]
            if linalg.rank(F, np.vstack([span, row[None, :]])) == linalg.rank(F, span):
                continue
            extras.append(_to_relation(F, paths, _monic(F, row)))
            span = _closure(F, fam, paths, index, np.vstack([span, row[None, :]]))
        pres = at0.with_relations(extras, name=f"{fam.name} flat limit")
        try:
            alg = build_algebra(pres, strict=False, max_tip_len=max(4 * fam.bound + 4, L + 1))
        except AlgebraError:
            continue
        if alg.dim == g:
            return FlatLimit(pres, extras, alg.dim, g, L)
    raise DeformationError(
        f"no truncation up to {cap} produced a limit of the generic dimension {g}; "
        "refusing to report a flat limit")


def _row_key(F: Field, paths, row):
    nz = [k for k in range(len(paths)) if not F.is_zero(row[k])]
    lead = max((paths[k] for k in nz), key=path_order_key)
    return path_order_key(lead)


def _monic(F: Field, row):
    nz = np.nonzero(~F.is_zero(row))[0]
    lead = nz[-1] if len(nz) else 0
    return F.mul(row, F.inv(row[lead]))


# --- par along a family -----------------------------------------------------------------

@dataclass
class ParScan:
    values: list
    par: dict
    flat: bool
    semicontinuous: bool | None
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"values": [str(v) for v in self.values],
                "par": {str(v): p for v, p in self.par.items()},
                "flat": self.flat, "semicontinuous": self.semicontinuous, "notes": list(self.notes)}


def constant_or_peaks_at_zero(par: dict) -> bool:
    """``par`` constant away from 0 and at least that large at 0."""
    others = {p for v, p in par.items() if v != 0}
    if len(others) > 1:
        return False
    if 0 not in par or not others:
        return True
    return par[0] >= next(iter(others))


def par_scan(fam: FamilyPresentation, vrank: VectorRank, values, mode: str = "exact",
             seed: int = 0, ideal_fn=radical_ideal) -> ParScan:
    """``par`` of each fibre over a grid of parameter values.

    The semicontinuity check is only meaningful for flat families; for others
    it is reported as ``None``.
    """
    values = list(values)
    flat = is_flat_on(fam, values)
    par = {}
    for v in values:
        alg = evaluate_family(fam, v)
        est = par_estimate(alg, vrank, mode=mode, ideal_fn=ideal_fn, seed=seed)
        par[v] = est.lo if est.value is not None else [est.lo, est.hi]
    notes = []
    semi = None
    if flat and all(isinstance(p, int) for p in par.values()):
        semi = constant_or_peaks_at_zero(par)
    elif not flat:
        notes.append("family is not flat on the grid; semicontinuity not checked")
    else:
        notes.append("only bounds available; semicontinuity not checked")
    return ParScan(values, par, flat, semi, notes)


def default_grid(F: Field, count: int = 11) -> list:
    if F.order is not None:
        return list(range(min(count, F.characteristic)))
    return list(range(count))
