"""The sliced box of a basic algebra and its representations.

Objects are pairs ``(i, k)`` (vertex, degree) in a window ``low..top``.  For
every degree ``k`` and every basis element ``a`` of ``J_ji`` there is an arrow
``a*@k : (i, k) -> (j, k - 1)``.  Relations come from the dualized
multiplication: for ``a`` in ``J_ji`` and a degree ``k`` with ``k - 2 >= low``,

    sum  N[b, g, a] * (g*@k then b*@(k-1))   over  b in J_jm, g in J_mi,

where ``N[b, g, a]`` is the coefficient of ``a`` in ``b g``.  A representation
assigns ``k^{r_{k,i}}`` to ``(i, k)`` and a matrix to each arrow; it is the same
data as a minimal complex (the ``a``-coordinates of the entries of ``d_k``),
and the relations are the coordinates of ``d_{k-1} d_k``.

Morphisms are handled through the same dictionary: a chain map ``f`` with
entries in ``A_ji`` becomes matrices ``F_n(a*)`` for every basis element ``a``
of ``A_ji``; composition uses the structure constants of ``A``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .algebra import AlgebraData, dual_label
from .complexes import ComplexError, ProjComplex, copies


class BoxError(ValueError):
    """Malformed box data."""


@dataclass(frozen=True)
class BoxArrow:
    label: str
    source: tuple[int, int]  # (vertex, degree)
    target: tuple[int, int]
    degree: int              # degree of the source
    block: tuple[int, int]   # (j, i): the radical block J_ji
    index: int               # basis index inside J_ji


@dataclass
class SlicedBox:
    alg: AlgebraData
    low: int
    top: int
    objects: list
    arrows: list
    relations: list  # dicts: {"source", "target", "alpha", "terms": [(coef, first_arrow, second_arrow)]}
    arrow_lookup: dict = field(default_factory=dict)

    def census(self) -> dict:
        return {"objects": len(self.objects), "arrows": len(self.arrows), "relations": len(self.relations)}

    def slices(self) -> dict:
        return {k: [(i, k) for i in range(self.alg.num_vertices)] for k in range(self.low, self.top + 1)}

    def to_json(self, full: bool = True) -> dict:
        F = self.alg.field
        out = {"window": [self.low, self.top], "census": self.census()}
        if full:
            out["objects"] = [[i + 1, k] for i, k in self.objects]
            out["arrows"] = [
                {"label": a.label, "source": [a.source[0] + 1, a.source[1]],
                 "target": [a.target[0] + 1, a.target[1]]}
                for a in self.arrows
            ]
            out["relations"] = [
                {"source": [r["source"][0] + 1, r["source"][1]],
                 "target": [r["target"][0] + 1, r["target"][1]],
                 "from": r["alpha"],
                 "terms": [[F.to_json(c), self.arrows[g].label, self.arrows[b].label] for c, g, b in r["terms"]]}
                for r in self.relations
            ]
        return out


def build_sliced_box(alg: AlgebraData, low: int, top: int) -> SlicedBox:
    if top < low:
        raise BoxError(f"empty window [{low}..{top}]")
    F = alg.field
    s = alg.num_vertices
    objects = [(i, k) for k in range(low, top + 1) for i in range(s)]
    arrows, lookup = [], {}
    for k in range(low + 1, top + 1):
        for i in range(s):
            for j in range(s):
                for t, lab in enumerate(alg.rad_labels(j, i)):
                    lookup[(k, j, i, t)] = len(arrows)
                    arrows.append(BoxArrow(f"{dual_label(lab)}@{k}", (i, k), (j, k - 1), k, (j, i), t))
    relations = []
    for k in range(low + 2, top + 1):
        for i in range(s):
            for j in range(s):
                labels = alg.rad_labels(j, i)
                for a, lab in enumerate(labels):
                    terms = []
                    for m in range(s):
                        N = alg.nu_tensor(j, m, i)
                        for b, g in zip(*np.nonzero(~F.is_zero(N[:, :, a]))):
                            terms.append((N[b, g, a], lookup[(k, m, i, int(g))], lookup[(k - 1, j, m, int(b))]))
                    if terms:
                        relations.append({"source": (i, k), "target": (j, k - 2),
                                          "alpha": dual_label(lab), "block": (j, i), "index": a,
                                          "degree": k, "terms": terms})
    return SlicedBox(alg, low, top, objects, arrows, relations, lookup)


# --- representations ---------------------------------------------------------------

@dataclass
class BoxRepresentation:
    box: SlicedBox
    dims: dict   # (i, k) -> int
    mats: dict   # arrow index -> matrix (dim target x dim source)

    def dim_vector(self) -> dict:
        return dict(self.dims)

    def same_as(self, other: "BoxRepresentation") -> bool:
        if self.dims != other.dims:
            return False
        return all((self.mats[a] == other.mats[a]).all() for a in self.mats)


def zero_representation(box: SlicedBox, dims: dict) -> BoxRepresentation:
    F = box.alg.field
    mats = {}
    for idx, a in enumerate(box.arrows):
        mats[idx] = F.zeros((dims.get(a.target, 0), dims.get(a.source, 0)))
    return BoxRepresentation(box, dict(dims), mats)


def relation_value(rep: BoxRepresentation, rel: dict) -> np.ndarray:
    F = rep.box.alg.field
    out = F.zeros((rep.dims[rel["target"]], rep.dims[rel["source"]]))
    for c, g, b in rel["terms"]:
        prod = F.matmul(rep.mats[b], rep.mats[g])
        out = F.add(out, F.mul(c, prod))
    return out


def check_box_relations(rep: BoxRepresentation) -> bool:
    """Whether every relation of the box vanishes on the representation."""
    F = rep.box.alg.field
    for idx, a in enumerate(rep.box.arrows):
        want = (rep.dims[a.target], rep.dims[a.source])
        if rep.mats[idx].shape != want:
            raise BoxError(f"matrix of {a.label} has shape {rep.mats[idx].shape}, expected {want}")
    return all(F.is_zero(relation_value(rep, rel)).all() for rel in rep.box.relations)


def rep_from_complex(c: ProjComplex, box: SlicedBox | None = None) -> BoxRepresentation:
    """Representation with ``M(i, k) = k^{r_{k,i}}`` and the J-coordinates of ``d_k``."""
    alg, F = c.alg, c.alg.field
    if box is None:
        box = build_sliced_box(alg, c.low, c.top)
    if (box.low, box.top) != (c.low, c.top) or box.alg is not alg:
        raise BoxError("box and complex have different windows or algebras")
    if not c.is_minimal():
        raise ComplexError("only minimal complexes correspond to representations")
    dims = {(i, k): c.rank(k)[i] for (i, k) in box.objects}
    mats = {}
    for idx, a in enumerate(box.arrows):
        k = a.degree
        j, i = a.block
        rows = [r for r, v in enumerate(c.vertices(k - 1)) if v == j]
        cols = [q for q, v in enumerate(c.vertices(k)) if v == i]
        sub = c.d(k)[np.ix_(rows, cols)] if rows and cols else F.zeros((len(rows), len(cols), alg.dim))
        coords = alg.rad_coords(j, i, sub) if sub.size else F.zeros((len(rows), len(cols), 0))
        mats[idx] = coords[:, :, a.index] if coords.shape[2] else F.zeros((len(rows), len(cols)))
    return BoxRepresentation(box, dims, mats)


def complex_from_rep(rep: BoxRepresentation) -> ProjComplex:
    """Complex with ``P_k = sum_i e_i A (x) M(i, k)`` and ``d_k`` rebuilt from the matrices."""
    box = rep.box
    alg, F = box.alg, box.alg.field
    s = alg.num_vertices
    ranks = tuple(tuple(rep.dims[(i, k)] for i in range(s)) for k in range(box.low, box.top + 1))
    diffs = {}
    for k in range(box.low + 1, box.top + 1):
        rv, cv = copies(ranks[k - 1 - box.low]), copies(ranks[k - box.low])
        D = F.zeros((len(rv), len(cv), alg.dim))
        diffs[k] = D
    for idx, a in enumerate(box.arrows):
        k = a.degree
        j, i = a.block
        rv, cv = copies(ranks[k - 1 - box.low]), copies(ranks[k - box.low])
        rows = [r for r, v in enumerate(rv) if v == j]
        cols = [q for q, v in enumerate(cv) if v == i]
        if not rows or not cols:
            continue
        M = rep.mats[idx]
        basis_row = alg.rad[(j, i)][a.index]
        D = diffs[k]
        block = D[np.ix_(rows, cols)]
        block = F.add(block, F.mul(M[:, :, None], basis_row[None, None, :]))
        D[np.ix_(rows, cols)] = block
    return ProjComplex(alg, box.low, ranks, diffs)


# --- morphisms ------------------------------------------------------------------------

@dataclass
class BoxMorphism:
    """Matrices ``F_n(a*) : M(i, n) -> N(j, n)`` for basis elements ``a`` of ``A_ji``."""

    src: BoxRepresentation
    dst: BoxRepresentation
    mats: dict  # (n, basis index a) -> matrix

    def same_as(self, other: "BoxMorphism") -> bool:
        keys = set(self.mats) | set(other.mats)
        F = self.src.box.alg.field
        for key in keys:
            a = self.mats.get(key)
            b = other.mats.get(key)
            if a is None:
                a = F.zeros(b.shape)
            if b is None:
                b = F.zeros(a.shape)
            if a.shape != b.shape or not (a == b).all():
                return False
        return True


def _basis_block(alg: AlgebraData) -> list[tuple[int, int]]:
    """Peirce position ``(j, i)`` of every basis element."""
    q = alg.quiver
    return [(q.target(p), q.source(p)) for p in alg.basis]


def morphism_transfer(f: dict, c: ProjComplex, c2: ProjComplex,
                      rep: BoxRepresentation | None = None,
                      rep2: BoxRepresentation | None = None) -> BoxMorphism:
    """Chain map (degree -> block matrix) to box-morphism matrices."""
    alg, F = c.alg, c.alg.field
    rep = rep or rep_from_complex(c)
    rep2 = rep2 or rep_from_complex(c2, rep.box)
    pos = _basis_block(alg)
    mats = {}
    for n in range(rep.box.low, rep.box.top + 1):
        fn = f.get(n)
        rv, cv = c2.vertices(n), c.vertices(n)
        for a, (j, i) in enumerate(pos):
            rows = [r for r, v in enumerate(rv) if v == j]
            cols = [q for q, v in enumerate(cv) if v == i]
            if fn is None or not rows or not cols:
                mats[(n, a)] = F.zeros((len(rows), len(cols)))
            else:
                mats[(n, a)] = fn[np.ix_(rows, cols)][:, :, a]
    return BoxMorphism(rep, rep2, mats)


def morphism_from_box(m: BoxMorphism) -> dict:
    """Inverse of :func:`morphism_transfer`."""
    alg, F = m.src.box.alg, m.src.box.alg.field
    box = m.src.box
    s = alg.num_vertices
    pos = _basis_block(alg)
    out = {}
    for n in range(box.low, box.top + 1):
        rv = copies([m.dst.dims[(i, n)] for i in range(s)])
        cv = copies([m.src.dims[(i, n)] for i in range(s)])
        if not rv or not cv:
            continue
        fn = F.zeros((len(rv), len(cv), alg.dim))
        for a, (j, i) in enumerate(pos):
            rows = [r for r, v in enumerate(rv) if v == j]
            cols = [q for q, v in enumerate(cv) if v == i]
            if rows and cols and (n, a) in m.mats:
                fn[np.ix_(rows, cols, [a])] = m.mats[(n, a)][:, :, None]
        out[n] = fn
    return out


def identity_box_morphism(rep: BoxRepresentation) -> BoxMorphism:
    box = rep.box
    alg, F = box.alg, box.alg.field
    pos = _basis_block(alg)
    mats = {}
    for n in range(box.low, box.top + 1):
        for a, (j, i) in enumerate(pos):
            shape = (rep.dims[(j, n)], rep.dims[(i, n)])
            if alg.basis[a] == (i, ()) and i == j:
                mats[(n, a)] = F.eye(shape[0])
            else:
                mats[(n, a)] = F.zeros(shape)
    return BoxMorphism(rep, rep, mats)


def compose_box_morphisms(g: BoxMorphism, f: BoxMorphism) -> BoxMorphism:
    """``(g f)_n(c*) = sum_{a, b} coef_c(a b) g_n(a*) f_n(b*)`` (dualized multiplication)."""
    box = f.src.box
    alg, F = box.alg, box.alg.field
    pos = _basis_block(alg)
    C = alg.mult
    mats = {}
    for n in range(box.low, box.top + 1):
        for c_idx, (j, i) in enumerate(pos):
            shape = (g.dst.dims[(j, n)], f.src.dims[(i, n)])
            acc = F.zeros(shape)
            for a, (ja, ma) in enumerate(pos):
                if ja != j:
                    continue
                for b, (mb, ib) in enumerate(pos):
                    if mb != ma or ib != i:
                        continue
                    coef = C[a, b, c_idx]
                    if F.is_zero(coef):
                        continue
                    acc = F.add(acc, F.mul(coef, F.matmul(g.mats[(n, a)], f.mats[(n, b)])))
            mats[(n, c_idx)] = acc
    return BoxMorphism(f.src, g.dst, mats)


def box_morphism_defect(m: BoxMorphism) -> list[np.ndarray]:
    """Blocks of the morphism condition on the box side.

    For each degree ``n``, vertices ``i`` (source degree ``n``), ``j`` (degree
    ``n-1``) and basis element ``c`` of ``A_ji``:
    ``sum coef_c(a g) F_{n-1}(a*) M_n(g*) - sum coef_c(b t) N_n(b*) F_n(t*)``
    with ``g, b`` radical arrows and ``a, t`` basis elements of ``A``.
    """
    box = m.src.box
    alg, F = box.alg, box.alg.field
    pos = _basis_block(alg)
    out = []
    for n in range(box.low + 1, box.top + 1):
        for c_idx, (j, i) in enumerate(pos):
            acc = F.zeros((m.dst.dims[(j, n - 1)], m.src.dims[(i, n)]))
            for idx, arr in enumerate(box.arrows):
                if arr.degree != n:
                    continue
                jj, ii = arr.block
                gvec = alg.rad[arr.block][arr.index]
                if ii == i:
                    # F_{n-1}(a*) M_n(g*) with a in A_{j, jj}
                    for a, (ja, ia) in enumerate(pos):
                        if ja != j or ia != jj:
                            continue
                        coef = alg.product(_unit(F, alg.dim, a), gvec)[c_idx]
                        if not F.is_zero(coef):
                            acc = F.add(acc, F.mul(coef, F.matmul(m.mats[(n - 1, a)], m.src.mats[idx])))
                if jj == j:
                    # N_n(b*) F_n(t*) with t in A_{ii, i}
                    for t, (jt, it) in enumerate(pos):
                        if jt != ii or it != i:
                            continue
                        coef = alg.product(gvec, _unit(F, alg.dim, t))[c_idx]
                        if not F.is_zero(coef):
                            acc = F.sub(acc, F.mul(coef, F.matmul(m.dst.mats[idx], m.mats[(n, t)])))
            out.append(acc)
    return out


def _unit(F, d: int, k: int) -> np.ndarray:
    v = F.zeros(d)
    v[k] = F.one
    return v


def is_box_morphism(m: BoxMorphism) -> bool:
    F = m.src.box.alg.field
    return all(F.is_zero(block).all() for block in box_morphism_defect(m))


def box_hom_space(rep: BoxRepresentation, rep2: BoxRepresentation):
    """Basis of box morphisms ``rep -> rep2`` solved on the box side.

    Returns ``(keys, basis)``: ``keys`` lists ``(n, a, row, col)`` unknowns and
    the rows of ``basis`` span the solution space.
    """
    box = rep.box
    alg, F = box.alg, box.alg.field
    pos = _basis_block(alg)
    keys = []
    for n in range(box.low, box.top + 1):
        for a, (j, i) in enumerate(pos):
            for r in range(rep2.dims[(j, n)]):
                for q in range(rep.dims[(i, n)]):
                    keys.append((n, a, r, q))

    def unpack(x):
        mats = {}
        for n in range(box.low, box.top + 1):
            for a, (j, i) in enumerate(pos):
                mats[(n, a)] = F.zeros((rep2.dims[(j, n)], rep.dims[(i, n)]))
        for val, (n, a, r, q) in zip(x, keys):
            mats[(n, a)][r, q] = val
        return BoxMorphism(rep, rep2, mats)

    def defect(x):
        blocks = box_morphism_defect(unpack(x))
        flat = [b.ravel() for b in blocks if b.size]
        return np.concatenate(flat) if flat else F.zeros(0)

    if not keys:
        return keys, F.zeros((0, 0)), unpack
    M = linalg.linear_map_matrix(F, defect, len(keys))
    basis = linalg.nullspace(F, M) if M.shape[0] else F.eye(len(keys))
    return keys, basis, unpack


def box_morphism_invertible(m: BoxMorphism) -> bool:
    """Invertible iff every ``F_n(e_i*)`` is an invertible matrix."""
    box = m.src.box
    alg, F = box.alg, box.alg.field
    for n in range(box.low, box.top + 1):
        for i in range(alg.num_vertices):
            M = m.mats[(n, alg.idempotent_index(i))]
            if M.shape[0] != M.shape[1] or (M.shape[0] and not linalg.is_invertible(F, M)):
                return False
    return True


def box_isomorphic_exhaustive(rep: BoxRepresentation, rep2: BoxRepresentation, cap: int = 10**6) -> bool:
    """Exhaustive isomorphism test on the box side over a finite field."""
    import itertools

    F = rep.box.alg.field
    if rep.dims != rep2.dims:
        return False
    keys, basis, unpack = box_hom_space(rep, rep2)
    k = basis.shape[0]
    if F.order is None or F.order ** k > cap:
        raise BoxError("space too large for exhaustion")
    if not keys:
        return True
    for tup in itertools.product(F.elements(), repeat=k):
        x = F.matmul(np.array(tup, dtype=F.dtype)[None, :], basis)[0] if k else F.zeros(len(keys))
        if box_morphism_invertible(unpack(x)):
            return True
    return False


# --- wild pattern -----------------------------------------------------------------------

@dataclass
class BoxPresentation:
    """Hand-entered normal box: vertices and arrows flagged by ``d = 0``."""

    vertices: list
    arrows: list  # (name, source, target, differential_is_zero)

    def validate(self):
        names = set()
        for arr in self.arrows:
            if len(arr) != 4:
                raise BoxError(f"arrow {arr!r} must be (name, source, target, d_is_zero)")
            name, s, t, _ = arr
            if s not in self.vertices or t not in self.vertices:
                raise BoxError(f"arrow {name} has an unknown endpoint")
            if name in names:
                raise BoxError(f"duplicate arrow {name}")
            names.add(name)


def box_presentation(box: SlicedBox) -> BoxPresentation:
    """The arrows of a sliced box as a normal-box presentation (all minimal)."""
    return BoxPresentation(list(box.objects), [(a.label, a.source, a.target, True) for a in box.arrows])


def wild_pattern_detect(pres: BoxPresentation) -> dict | None:
    """Find a vertex with a loop and another arrow starting there, both with ``d = 0``.

    Returns ``{"vertex", "loop", "arrow"}`` or ``None``; ``None`` says nothing
    about tameness.
    """
    pres.validate()
    for v in pres.vertices:
        loops = [a for a in pres.arrows if a[1] == v and a[2] == v and a[3]]
        if not loops:
            continue
        for a in pres.arrows:
            # a second loop at v is accepted as well (free algebra in two loops)
            if a[1] == v and a[3] and a[0] != loops[0][0]:
                return {"vertex": v, "loop": loops[0][0], "arrow": a[0]}
    return None
