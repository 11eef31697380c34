"""Basic finite-dimensional algebras from quivers with relations.

:func:`build_algebra` computes normal-form path monomials, structure
constants, the Peirce blocks ``A_ji = e_j A e_i`` and the radical blocks
``J_ji``, together with the dualized multiplication ``nu``.

Conventions: ``A_ji`` collects paths from vertex ``i`` to vertex ``j``, so
``A_ji . A_ik`` lands in ``A_jk``.  Radical blocks are stored as row bases
(in A-coordinates) in reduced echelon form; the J-coordinates of an element
of ``J_ji`` are its entries at the pivot columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import linalg
from .fields import Field
from .groebner import FieldScalars, GroebnerBasis, GroebnerError, groebner_basis
from .presentation import AlgebraPresentation, Path


def dual_label(label: str) -> str:
    """Name of the dual basis vector: ``x*`` or ``(b*a)*``."""
    return f"({label})*" if "*" in label else f"{label}*"


class AlgebraError(ValueError):
    """The presentation does not define an admissible finite-dimensional algebra."""


def contract(F: Field, X: np.ndarray, Y: np.ndarray, nx: int) -> np.ndarray:
    """Sum over the last ``nx`` axes of ``X`` against the first ``nx`` axes of ``Y``."""
    X = np.asarray(X)
    Y = np.asarray(Y)
    k = int(np.prod(X.shape[X.ndim - nx:], dtype=np.int64)) if nx else 1
    left, right = X.shape[: X.ndim - nx], Y.shape[nx:]
    m = int(np.prod(left, dtype=np.int64))
    n = int(np.prod(right, dtype=np.int64))
    if m == 0 or n == 0 or k == 0:
        return F.zeros(left + right)
    out = F.matmul(X.reshape(m, k), Y.reshape(k, n))
    return out.reshape(left + right)


@dataclass(eq=False)
class AlgebraData:
    """Exact data of a basic algebra ``A = kQ/I``.

    Attributes:
        presentation: the defining quiver with relations.
        field: base field.
        basis: normal-form paths, deg-lex ordered (trivial paths first).
        mult: structure tensor, ``basis[u] * basis[v] = sum_w mult[u, v, w] basis[w]``.
        rad: ``rad[(j, i)]`` is a row basis (A-coordinates, RREF) of ``J_ji``.
        gb: Groebner basis used for normal forms.
    """

    presentation: AlgebraPresentation
    field: Field
    basis: tuple[Path, ...]
    mult: np.ndarray
    rad: dict
    gb: GroebnerBasis
    arrow_radical: bool = True

    # --- shape ------------------------------------------------------------------
    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def num_vertices(self) -> int:
        return self.presentation.quiver.num_vertices

    @property
    def quiver(self):
        return self.presentation.quiver

    @property
    def name(self) -> str:
        return self.presentation.name

    @cached_property
    def index(self) -> dict:
        return {p: k for k, p in enumerate(self.basis)}

    @cached_property
    def labels(self) -> list[str]:
        return [self.quiver.path_name(p) for p in self.basis]

    def idempotent_index(self, i: int) -> int:
        return self.index[(i, ())]

    @cached_property
    def peirce(self) -> dict:
        """``peirce[(j, i)]``: basis indices of paths from ``i`` to ``j``."""
        s = self.num_vertices
        out = {(j, i): [] for j in range(s) for i in range(s)}
        for k, p in enumerate(self.basis):
            out[(self.quiver.target(p), self.quiver.source(p))].append(k)
        return out

    def peirce_dims(self) -> np.ndarray:
        s = self.num_vertices
        return np.array([[len(self.peirce[(j, i)]) for i in range(s)] for j in range(s)], dtype=int)

    def radical_dims(self) -> np.ndarray:
        s = self.num_vertices
        return np.array([[self.rad[(j, i)].shape[0] for i in range(s)] for j in range(s)], dtype=int)

    @cached_property
    def rad_pivots(self) -> dict:
        out = {}
        for key, B in self.rad.items():
            piv = []
            for row in B:
                nz = np.nonzero(~self.field.is_zero(row))[0]
                piv.append(int(nz[0]))
            out[key] = piv
        return out

    def rad_labels(self, j: int, i: int) -> list[str]:
        """Names of the basis of ``J_ji`` (path names when the radical is the arrow ideal)."""
        if self.arrow_radical:
            return [self.labels[c] for c in self.rad_pivots[(j, i)]]
        return [f"J{j + 1}{i + 1}[{t}]" for t in range(self.rad[(j, i)].shape[0])]

    def rad_coords(self, j: int, i: int, vec: np.ndarray) -> np.ndarray:
        """J_ji-coordinates of an A-coordinate vector (or rows) known to lie in ``J_ji``."""
        vec = np.asarray(vec)
        return vec[..., self.rad_pivots[(j, i)]]

    # --- multiplication -----------------------------------------------------------
    def product(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Product of two coordinate vectors."""
        F = self.field
        t = contract(F, np.asarray(a)[None, :], self.mult, 1)[0]  # (v, w)
        return contract(F, np.asarray(b)[None, :], t, 1)[0]

    def block_product(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """Product of matrices with algebra entries, shapes ``(p, q, d)`` and ``(q, r, d)``."""
        F = self.field
        p, q, d = X.shape
        r = Y.shape[1]
        if Y.shape[0] != q:
            raise ValueError(f"shape mismatch {X.shape} x {Y.shape}")
        if p == 0 or r == 0 or q == 0:
            return F.zeros((p, r, d))
        T = contract(F, X, self.mult, 1)  # (p, q, v, w)
        T = np.transpose(T, (0, 3, 1, 2)).reshape(p * d, q * d)
        Z = F.matmul(T, np.transpose(Y, (0, 2, 1)).reshape(q * d, r))
        return np.transpose(Z.reshape(p, d, r), (0, 2, 1))

    def element(self, spec) -> "AlgebraElement":
        """Element from a path name, a path, or a coordinate vector."""
        F = self.field
        if isinstance(spec, str):
            spec = self.quiver.parse_path(spec)
        if isinstance(spec, tuple):
            vec = self.normal_form({spec: F.one})
        else:
            vec = F.asarray(spec) if not isinstance(spec, np.ndarray) else spec
        return AlgebraElement(self, vec)

    def one(self) -> "AlgebraElement":
        vec = self.field.zeros(self.dim)
        for i in range(self.num_vertices):
            vec[self.idempotent_index(i)] = self.field.one
        return AlgebraElement(self, vec)

    def normal_form(self, combo: dict) -> np.ndarray:
        """Coordinates of a combination ``path -> scalar`` of arbitrary paths."""
        F = self.field
        r = self.gb.reduce(dict(combo))
        vec = F.zeros(self.dim)
        for p, c in r.items():
            vec[self.index[p]] = c
        return vec

    # --- dualized multiplication ------------------------------------------------
    def nu_tensor(self, j: int, k: int, i: int) -> np.ndarray:
        """``N[b, g, a]``: coefficient of ``a`` (basis of J_ji) in ``b*g``.

        ``b`` runs over the basis of ``J_jk`` and ``g`` over ``J_ki``.  Read as
        a map on dual bases, ``nu(a*) = sum N[b, g, a] b* (x) g*``.
        """
        return self._nu_tensors[(j, k, i)]

    @cached_property
    def _nu_tensors(self) -> dict:
        F = self.field
        s = self.num_vertices
        out = {}
        for j in range(s):
            for k in range(s):
                for i in range(s):
                    B, G = self.rad[(j, k)], self.rad[(k, i)]
                    na = self.rad[(j, i)].shape[0]
                    if B.shape[0] == 0 or G.shape[0] == 0:
                        out[(j, k, i)] = F.zeros((B.shape[0], G.shape[0], na))
                        continue
                    prod = self.block_product(B[:, None, :], G[None, :, :])
                    out[(j, k, i)] = self.rad_coords(j, i, prod)
        return out

    def nu(self, j: int, i: int) -> dict:
        """``nu`` on the dual basis of ``J_ji`` as ``{a_label: [(coef, b_label, g_label), ...]}``."""
        F = self.field
        out = {}
        labels = self.rad_labels(j, i)
        for a, lab in enumerate(labels):
            terms = []
            for k in range(self.num_vertices):
                N = self.nu_tensor(j, k, i)
                bl, gl = self.rad_labels(j, k), self.rad_labels(k, i)
                for b, g in zip(*np.nonzero(~F.is_zero(N[:, :, a]))):
                    terms.append((F.to_json(N[b, g, a]), dual_label(bl[b]), dual_label(gl[g])))
            out[dual_label(lab)] = terms
        return out

    # --- invariants -------------------------------------------------------------
    def check_invariants(self) -> list[str]:
        """Exact checks of the algebra axioms; returns a list of failures."""
        F = self.field
        d, s = self.dim, self.num_vertices
        fails = []
        C = self.mult
        # (uv)w versus u(vw) for all basis triples
        lhs = contract(F, C, C, 1)  # (uv)w: [u, v, w', w]
        rhs = contract(F, C, np.transpose(C, (1, 0, 2)), 1)  # u(vw): [v, w', u, w]
        rhs = np.transpose(rhs, (2, 0, 1, 3))
        if not (lhs == rhs).all():
            fails.append("multiplication is not associative")
        one = self.one().vec
        left = contract(F, one[None, :], C, 1)[0]
        right = contract(F, one[None, :], np.transpose(C, (1, 0, 2)), 1)[0]
        if not ((left == F.eye(d)).all() and (right == F.eye(d)).all()):
            fails.append("sum of the trivial paths is not the unit")
        for a in range(s):
            for b in range(s):
                ea, eb = self.idempotent_index(a), self.idempotent_index(b)
                want = F.zeros(d)
                if a == b:
                    want[ea] = F.one
                if not (C[ea, eb] == want).all():
                    fails.append(f"e{a + 1} e{b + 1} is wrong")
        if int(self.peirce_dims().sum()) != d:
            fails.append("Peirce blocks do not add up to dim A")
        for (j, i), idx in self.peirce.items():
            ej, ei = self.idempotent_index(j), self.idempotent_index(i)
            for u in idx:
                unit = F.zeros(d)
                unit[u] = F.one
                if not (C[ej, u] == unit).all() or not (C[u, ei] == unit).all():
                    fails.append(f"basis element {self.labels[u]} is not in A_{j + 1}{i + 1}")
                    break
            for k in range(s):
                inner = self.peirce[(i, k)]
                if not idx or not inner:
                    continue
                outside = np.ones(d, dtype=bool)
                outside[self.peirce[(j, k)]] = False
                block = C[np.ix_(idx, inner)][..., outside]
                if (~F.is_zero(block)).any():
                    fails.append(f"A_{j + 1}{i + 1} A_{i + 1}{k + 1} leaves A_{j + 1}{k + 1}")
        radd, peird = self.radical_dims(), self.peirce_dims()
        if (radd > peird).any():
            fails.append("radical block larger than Peirce block")
        off = ~np.eye(s, dtype=bool)
        if (radd[off] != peird[off]).any():
            fails.append("J_ji differs from A_ji for some i != j")
        # nilpotency: J^(N+1) = 0
        power = self.radical_power_basis(self.presentation.bound + 1)
        if power.shape[0]:
            fails.append(f"J^{self.presentation.bound + 1} is not zero")
        return fails

    # --- ideals -------------------------------------------------------------------
    @cached_property
    def radical_basis(self) -> np.ndarray:
        rows = [B for B in self.rad.values() if B.shape[0]]
        return np.vstack(rows) if rows else self.field.zeros((0, self.dim))

    def radical_power_basis(self, n: int) -> np.ndarray:
        """Row basis of ``J^n`` (``J^0 = A``)."""
        F = self.field
        if n == 0:
            return F.eye(self.dim)
        cur = self.radical_basis
        for _ in range(n - 1):
            if cur.shape[0] == 0:
                break
            prod = self.block_product(cur[:, None, :], self.radical_basis[None, :, :])
            cur = linalg.rowspace(F, prod.reshape(-1, self.dim))
        return cur

    def ideal_blocks(self, rows: np.ndarray) -> dict:
        """Split a Peirce-homogeneous subspace into ``{(j, i): RREF row basis}``."""
        F = self.field
        out = {}
        for key, idx in self.peirce.items():
            if rows.shape[0] == 0 or not idx:
                out[key] = F.zeros((0, self.dim))
                continue
            mask = np.zeros(self.dim, dtype=bool)
            mask[idx] = True
            part = rows.copy()
            part[:, ~mask] = F.zero
            out[key] = linalg.rowspace(F, part)
        return out

    def generated_ideal(self, generators: np.ndarray) -> np.ndarray:
        """Row basis of the two-sided ideal generated by the given rows."""
        F = self.field
        if generators.shape[0] == 0:
            return F.zeros((0, self.dim))
        E = F.eye(self.dim)
        left = self.block_product(E[:, None, :], generators[None, :, :]).reshape(-1, self.dim)
        both = self.block_product(linalg.rowspace(F, left)[:, None, :], E[None, :, :])
        return linalg.rowspace(F, both.reshape(-1, self.dim))

    def with_field(self, F: Field, strict: bool | None = None) -> "AlgebraData":
        return build_algebra(self.presentation.with_field(F),
                             strict=self.presentation.is_admissible() if strict is None else strict)

    def summary(self) -> dict:
        return {
            "name": self.name,
            "field": self.field.name,
            "dim": self.dim,
            "vertices": self.num_vertices,
            "basis": self.labels,
            "peirce_dims": self.peirce_dims().tolist(),
            "radical_dims": self.radical_dims().tolist(),
        }


class AlgebraElement:
    """Coordinate vector bound to its algebra."""

    __slots__ = ("parent", "vec")

    def __init__(self, parent: AlgebraData, vec: np.ndarray):
        self.parent = parent
        self.vec = vec

    def _check(self, other):
        if not isinstance(other, AlgebraElement) or other.parent is not self.parent:
            raise ValueError("elements of different algebras")

    def __mul__(self, other):
        self._check(other)
        return AlgebraElement(self.parent, self.parent.product(self.vec, other.vec))

    def __add__(self, other):
        self._check(other)
        return AlgebraElement(self.parent, self.parent.field.add(self.vec, other.vec))

    def __sub__(self, other):
        self._check(other)
        return AlgebraElement(self.parent, self.parent.field.sub(self.vec, other.vec))

    def __eq__(self, other):
        return (isinstance(other, AlgebraElement) and other.parent is self.parent
                and bool((self.vec == other.vec).all()))

    def __hash__(self):
        return hash(tuple(self.parent.field.to_json(x) for x in self.vec))

    def is_zero(self) -> bool:
        return bool(self.parent.field.is_zero(self.vec).all())

    def __repr__(self):
        F = self.parent.field
        terms = [f"{F.fmt(c)}*{lab}" for c, lab in zip(self.vec, self.parent.labels) if not F.is_zero(c)]
        return " + ".join(terms) or "0"


def multiply(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    return a * b


def _structure_tensor(F: Field, gb: GroebnerBasis, basis, index) -> np.ndarray:
    d = len(basis)
    q = gb.quiver
    C = F.zeros((d, d, d))
    for u, pu in enumerate(basis):
        for v, pv in enumerate(basis):
            path = q.compose(pu, pv)
            if path is None:
                continue
            for p, c in gb.reduce({path: F.one}).items():
                C[u, v, index[p]] = c
    return C


def build_algebra(pres: AlgebraPresentation, strict: bool = True,
                  max_tip_len: int | None = None) -> AlgebraData:
    """Build :class:`AlgebraData` from a presentation.

    With ``strict`` (the default) the presentation must be admissible: every
    relation term has length at least 2, every normal path has length at most
    the bound ``N``, and ``J^(N+1) = 0``.  With ``strict=False`` any relations
    are accepted as long as the quotient is finite-dimensional; the radical is
    then computed directly (arrow ideal when nilpotent, trace form otherwise).
    """
    F = pres.field
    q = pres.quiver
    N = pres.bound
    if strict and not pres.is_admissible():
        bad = [r for r in pres.relation_strings()]
        raise AlgebraError(f"non-admissible relation (a term of length < 2) among {bad}")
    S = FieldScalars(F)
    gens = []
    for rel in pres.relations:
        g = {p: S.from_fraction(c) for p, c in rel}
        g = {p: c for p, c in g.items() if not S.is_zero(c)}
        if g:
            gens.append(g)
    cap = max_tip_len if max_tip_len is not None else 4 * N + 4
    try:
        gb = groebner_basis(q, S, gens, max_tip_len=cap)
    except GroebnerError as exc:
        raise AlgebraError(str(exc)) from None
    basis = gb.normal_words(N if strict else cap)
    if basis is None:
        raise AlgebraError(
            f"a path longer than the bound {N if strict else cap} survives the relations; "
            "the quotient is infinite-dimensional or the bound is too small")
    basis = tuple(basis)
    index = {p: k for k, p in enumerate(basis)}
    C = _structure_tensor(F, gb, basis, index)
    d = len(basis)
    s = q.num_vertices

    arrow_rows = {}
    for (j, i) in [(j, i) for j in range(s) for i in range(s)]:
        idx = [k for k, p in enumerate(basis)
               if p[1] and q.target(p) == j and q.source(p) == i]
        B = F.zeros((len(idx), d))
        for r, k in enumerate(idx):
            B[r, k] = F.one
        arrow_rows[(j, i)] = B
    alg = AlgebraData(pres, F, basis, C, arrow_rows, gb, arrow_radical=True)
    # the arrow ideal is the radical exactly when it is nilpotent
    nilpotent = alg.radical_power_basis(max(N, 1) + 1 if strict else d + 1).shape[0] == 0
    if strict:
        if not nilpotent:
            raise AlgebraError(f"paths of length {N + 1} do not vanish; J^{N + 1} != 0")
        return alg
    if nilpotent:
        return alg
    if F.characteristic and F.characteristic <= d:
        raise AlgebraError("trace-form radical needs characteristic 0 or larger than dim A")
    alg.rad = _trace_radical(alg)
    alg.arrow_radical = False
    alg.__dict__.pop("rad_pivots", None)
    alg.__dict__.pop("radical_basis", None)
    alg.__dict__.pop("_nu_tensors", None)
    return alg


def _trace_radical(alg: AlgebraData) -> dict:
    """``J = {a : tr(L_{ab}) = 0 for all b}``, valid in characteristic 0 or > dim A."""
    F = alg.field
    d = alg.dim
    C = alg.mult
    # tr(L_w) = sum_x C[w, x, x]
    tr = F.zeros(d)
    for w in range(d):
        tr[w] = F.sum(np.array([C[w, x, x] for x in range(d)], dtype=F.dtype)) if d else F.zero
    # form[a, b] = tr(L_{ab}) = sum_w C[a, b, w] tr[w]
    form = contract(F, C, tr[:, None], 1)[:, :, 0]
    out = {}
    for (j, i), idx in alg.peirce.items():
        back = alg.peirce[(i, j)]
        if not idx:
            out[(j, i)] = F.zeros((0, d))
            continue
        sub = form[np.ix_(idx, back)] if back else F.zeros((len(idx), 0))
        ker = linalg.nullspace(F, sub.T) if back else F.eye(len(idx))
        rows = F.zeros((ker.shape[0], d))
        rows[:, idx] = ker
        out[(j, i)] = linalg.rowspace(F, rows) if rows.shape[0] else rows
    return out


def check_coassociativity(alg: AlgebraData) -> list[str]:
    """Compare ``(nu (x) 1) nu`` with ``(1 (x) nu) nu`` on every quadruple of vertices."""
    F = alg.field
    s = alg.num_vertices
    fails = []
    for j in range(s):
        for l in range(s):
            for k in range(s):
                for i in range(s):
                    # (beta delta) gamma with beta in J_jl, delta in J_lk, gamma in J_ki
                    T1 = contract(F, alg.nu_tensor(j, l, k), alg.nu_tensor(j, k, i), 1)
                    # beta (delta gamma): sum_n N_lki[d, g, n] N_jli[b, n, a]
                    A = alg.nu_tensor(l, k, i)  # [d, g, n]
                    B = np.transpose(alg.nu_tensor(j, l, i), (1, 0, 2))  # [n, b, a]
                    T2 = np.transpose(contract(F, A, B, 1), (2, 0, 1, 3))
                    if T1.shape != T2.shape or not (T1 == T2).all():
                        fails.append(f"coassociativity fails at vertices {(j + 1, l + 1, k + 1, i + 1)}")
    return fails
