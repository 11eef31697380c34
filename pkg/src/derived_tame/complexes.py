"""Bounded complexes of projective modules over an :class:`AlgebraData`.

A complex lives in degrees ``low..top`` (homological indexing, ``d_n`` goes
from degree ``n`` to ``n - 1``).  The term in degree ``n`` is the right module
``P_n = sum_i (e_i A)^{r_{n,i}}``; its summands are ordered by vertex, then
copy.  ``d_n`` acts by left multiplication with a block matrix whose entry in
row ``r`` (a copy of ``e_j A`` in degree ``n-1``) and column ``c`` (a copy of
``e_i A`` in degree ``n``) lies in ``A_ji = e_j A e_i``.  Entries are stored as
full A-coordinate vectors, so ``diffs[n]`` has shape ``(rows, cols, dim A)``.

A complex is minimal when every entry lies in the radical; the same class
holds non-minimal complexes, which :func:`minimalize` reduces.
"""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg
from .algebra import AlgebraData, contract
from .fields import Field, finite_field


class ComplexError(ValueError):
    """Malformed complex data."""


def copies(ranks) -> list[int]:
    """Vertex of each summand for a rank tuple ``(r_1, ..., r_s)``."""
    return [v for v, r in enumerate(ranks) for _ in range(r)]


# --- spaces of block matrices ----------------------------------------------------

class BlockSpace:
    """Block matrices ``rows x cols`` whose ``(r, c)`` entry lies in a chosen block.

    Args:
        alg: the algebra.
        row_vertices, col_vertices: vertex of each row/column summand.
        blocks: ``{(j, i): row basis in A-coordinates}`` for the allowed entries
            between a column of vertex ``i`` and a row of vertex ``j``
            (e.g. ``alg.rad`` for radical entries).
    """

    def __init__(self, alg: AlgebraData, row_vertices, col_vertices, blocks: dict):
        self.alg = alg
        self.rows = list(row_vertices)
        self.cols = list(col_vertices)
        self.blocks = blocks
        self.slots = []  # (r, c, basis row index)
        for r, j in enumerate(self.rows):
            for c, i in enumerate(self.cols):
                for t in range(blocks[(j, i)].shape[0]):
                    self.slots.append((r, c, t))

    @property
    def dim(self) -> int:
        return len(self.slots)

    @property
    def shape(self):
        return (len(self.rows), len(self.cols), self.alg.dim)

    def combine(self, coeffs) -> np.ndarray:
        F = self.alg.field
        out = F.zeros(self.shape)
        for x, (r, c, t) in zip(coeffs, self.slots):
            if not F.is_zero(x):
                B = self.blocks[(self.rows[r], self.cols[c])]
                out[r, c] = F.add(out[r, c], F.mul(x, B[t]))
        return out

    def basis_tensor(self) -> np.ndarray:
        """All basis matrices stacked: shape ``(dim, rows, cols, dim A)``."""
        F = self.alg.field
        out = F.zeros((self.dim,) + self.shape)
        for k, (r, c, t) in enumerate(self.slots):
            out[k, r, c] = self.blocks[(self.rows[r], self.cols[c])][t]
        return out

    def coords(self, M: np.ndarray) -> np.ndarray:
        """Coordinates of a matrix in this space (entries must lie in the blocks)."""
        F = self.alg.field
        out = F.zeros(self.dim)
        pivcache = {}
        for k, (r, c, t) in enumerate(self.slots):
            key = (self.rows[r], self.cols[c])
            if key not in pivcache:
                pivcache[key] = _pivots(F, self.blocks[key])
            out[k] = M[r, c][pivcache[key][t]]
        return out


def _pivots(F: Field, B: np.ndarray) -> list[int]:
    return [int(np.nonzero(~F.is_zero(row))[0][0]) for row in B]


def peirce_blocks(alg: AlgebraData) -> dict:
    F = alg.field
    out = {}
    for key, idx in alg.peirce.items():
        B = F.zeros((len(idx), alg.dim))
        for r, k in enumerate(idx):
            B[r, k] = F.one
        out[key] = B
    return out


def in_blocks(alg: AlgebraData, M: np.ndarray, rows, cols, blocks: dict) -> bool:
    """Whether every entry of ``M`` lies in its block."""
    F = alg.field
    for r, j in enumerate(rows):
        for c, i in enumerate(cols):
            entry = M[r, c]
            if F.is_zero(entry).all():
                continue
            B = blocks[(j, i)]
            if B.shape[0] == 0:
                return False
            if not linalg.in_rowspace(F, B, _pivots(F, B), entry):
                return False
    return True


# --- complexes -------------------------------------------------------------------

@dataclass(eq=False)
class ProjComplex:
    """Bounded complex of projectives (see module docstring for conventions)."""

    alg: AlgebraData
    low: int
    ranks: tuple[tuple[int, ...], ...]
    diffs: dict = field(default_factory=dict)

    def __post_init__(self):
        s = self.alg.num_vertices
        self.ranks = tuple(tuple(int(x) for x in r) for r in self.ranks)
        for r in self.ranks:
            if len(r) != s or any(x < 0 for x in r):
                raise ComplexError(f"rank tuple {r} must have {s} nonnegative entries")
        F = self.alg.field
        full = {}
        for n in range(self.low + 1, self.top + 1):
            shape = (self.size(n - 1), self.size(n), self.alg.dim)
            D = self.diffs.get(n)
            if D is None:
                D = F.zeros(shape)
            D = np.asarray(D)
            if D.shape != shape:
                raise ComplexError(f"d_{n} has shape {D.shape}, expected {shape}")
            full[n] = D
        extra = set(self.diffs) - set(full)
        if extra:
            raise ComplexError(f"differentials outside the window: {sorted(extra)}")
        self.diffs = full
        for n, D in full.items():
            if not in_blocks(self.alg, D, self.vertices(n - 1), self.vertices(n), peirce_blocks(self.alg)):
                raise ComplexError(f"an entry of d_{n} is not in the Peirce block of its position")

    # --- shape -------------------------------------------------------------
    @property
    def top(self) -> int:
        return self.low + len(self.ranks) - 1

    @property
    def degrees(self) -> range:
        return range(self.low, self.top + 1)

    def rank(self, n: int) -> tuple[int, ...]:
        if self.low <= n <= self.top:
            return self.ranks[n - self.low]
        return (0,) * self.alg.num_vertices

    def vertices(self, n: int) -> list[int]:
        return copies(self.rank(n))

    def size(self, n: int) -> int:
        return sum(self.rank(n))

    def d(self, n: int) -> np.ndarray:
        if n in self.diffs:
            return self.diffs[n]
        return self.alg.field.zeros((self.size(n - 1), self.size(n), self.alg.dim))

    @property
    def total_rank(self) -> int:
        """``|R| = sum of all r_{n,i}``."""
        return sum(sum(r) for r in self.ranks)

    def vector_rank(self) -> dict:
        return {n: self.rank(n) for n in self.degrees}

    # --- properties -----------------------------------------------------------
    def is_minimal(self) -> bool:
        return all(
            in_blocks(self.alg, D, self.vertices(n - 1), self.vertices(n), self.alg.rad)
            for n, D in self.diffs.items()
        )

    def copy(self) -> "ProjComplex":
        return ProjComplex(self.alg, self.low, self.ranks, {n: D.copy() for n, D in self.diffs.items()})

    def same_as(self, other: "ProjComplex") -> bool:
        """Exact equality of window, ranks and differentials."""
        if self.alg is not other.alg or self.low != other.low or self.ranks != other.ranks:
            return False
        return all((self.d(n) == other.d(n)).all() for n in self.diffs)

    def __repr__(self):
        return f"ProjComplex(low={self.low}, ranks={self.ranks})"


# --- d^2 ---------------------------------------------------------------------------

@dataclass
class DSquaredReport:
    ok: bool
    failing_degree: int | None = None


def composite(c: ProjComplex, n: int) -> np.ndarray:
    """``d_{n} d_{n+1}`` as a block matrix ``P_{n+1} -> P_{n-1}``."""
    return c.alg.block_product(c.d(n), c.d(n + 1))


def check_dsquared(c: ProjComplex) -> DSquaredReport:
    F = c.alg.field
    for n in range(c.low + 1, c.top):
        if not F.is_zero(composite(c, n)).all():
            return DSquaredReport(False, n)
    return DSquaredReport(True)


# --- linear-algebra realisations ---------------------------------------------------

def action_matrix(alg: AlgebraData, D: np.ndarray, rows, cols, s: int) -> np.ndarray:
    """k-linear matrix of left multiplication by ``D`` on the ``e_s``-parts.

    Columns index ``(c, u)`` with ``u`` a basis path of ``e_{cols[c]} A e_s``;
    rows index ``(r, w)`` with ``w`` in ``e_{rows[r]} A e_s``.
    """
    F = alg.field
    col_idx = [(c, u) for c, i in enumerate(cols) for u in alg.peirce[(i, s)]]
    row_idx = [(r, w) for r, j in enumerate(rows) for w in alg.peirce[(j, s)]]
    M = F.zeros((len(row_idx), len(col_idx)))
    if not col_idx or not row_idx:
        return M
    T = contract(F, D, alg.mult, 1)  # [r, c, u, w]
    rr = np.array([r for r, _ in row_idx])
    ww = np.array([w for _, w in row_idx])
    cc = np.array([c for c, _ in col_idx])
    uu = np.array([u for _, u in col_idx])
    M[:, :] = T[rr[:, None], cc[None, :], uu[None, :], ww[:, None]]
    return M


def part_index(alg: AlgebraData, vertices, s: int) -> list[tuple[int, int]]:
    return [(c, u) for c, i in enumerate(vertices) for u in alg.peirce[(i, s)]]


@dataclass
class HomologyReport:
    """``dims[n][s] = dim H_n e_s`` for ``n`` in the window."""

    dims: dict

    def total(self, n: int) -> int:
        return sum(self.dims.get(n, ()))

    def to_json(self) -> dict:
        return {str(n): list(v) for n, v in sorted(self.dims.items())}

    def nonzero(self) -> dict:
        return {n: tuple(v) for n, v in self.dims.items() if any(v)}

    def __eq__(self, other):
        if not isinstance(other, HomologyReport):
            return NotImplemented
        return self.nonzero() == other.nonzero()


def homology(c: ProjComplex) -> HomologyReport:
    alg, F = c.alg, c.alg.field
    dims = {}
    for n in c.degrees:
        row = []
        for s in range(alg.num_vertices):
            here = len(part_index(alg, c.vertices(n), s))
            out = action_matrix(alg, c.d(n), c.vertices(n - 1), c.vertices(n), s)
            inc = action_matrix(alg, c.d(n + 1), c.vertices(n), c.vertices(n + 1), s)
            rk_out = linalg.rank(F, out) if out.size else 0
            rk_in = linalg.rank(F, inc) if inc.size else 0
            row.append(here - rk_out - rk_in)
        dims[n] = tuple(row)
    return HomologyReport(dims)


# --- minimalization ------------------------------------------------------------------

def _unit_entry(c: ProjComplex):
    """First ``(n, r, col)`` whose entry is invertible (nonzero idempotent coefficient)."""
    alg, F = c.alg, c.alg.field
    for n in sorted(c.diffs):
        D = c.diffs[n]
        rows, cols = c.vertices(n - 1), c.vertices(n)
        for r, j in enumerate(rows):
            for col, i in enumerate(cols):
                if i == j and not F.is_zero(D[r, col, alg.idempotent_index(i)]):
                    return n, r, col
    return None


def local_inverse(alg: AlgebraData, u: np.ndarray, i: int) -> np.ndarray:
    """Inverse of a unit ``u`` of the local algebra ``e_i A e_i``."""
    F = alg.field
    idx = alg.peirce[(i, i)]
    # columns: u * b for basis b of e_i A e_i, restricted to e_i A e_i coordinates
    L = F.zeros((len(idx), len(idx)))
    for col, b in enumerate(idx):
        unit = F.zeros(alg.dim)
        unit[b] = F.one
        L[:, col] = alg.product(u, unit)[idx]
    target = F.zeros(len(idx))
    target[idx.index(alg.idempotent_index(i))] = F.one
    y = linalg.solve(F, L, target)
    if y is None:
        raise ComplexError("entry is not invertible")
    out = F.zeros(alg.dim)
    out[idx] = y
    return out


def _drop(ranks, n_index, vertex):
    r = list(map(list, ranks))
    r[n_index][vertex] -= 1
    return tuple(map(tuple, r))


def minimalize(c: ProjComplex) -> ProjComplex:
    """Homotopy-equivalent minimal complex by Gaussian elimination of unit entries."""
    alg, F = c.alg, c.alg.field
    if not alg.arrow_radical:
        raise ComplexError("minimalization needs local corner algebras e_i A e_i")
    if not check_dsquared(c).ok:
        raise ComplexError("d^2 != 0")
    cur = c.copy()
    while True:
        hit = _unit_entry(cur)
        if hit is None:
            return cur
        n, r, col = hit
        i = cur.vertices(n)[col]
        D = cur.diffs[n]
        phi_inv = local_inverse(alg, D[r, col], i)
        keep_rows = [x for x in range(D.shape[0]) if x != r]
        keep_cols = [x for x in range(D.shape[1]) if x != col]
        gamma = D[keep_rows][:, [col]]          # P_n^col -> rest of P_{n-1}
        delta = D[[r]][:, keep_cols]            # rest of P_n -> P_{n-1}^r
        eps = D[np.ix_(keep_rows, keep_cols)]
        corr = alg.block_product(alg.block_product(gamma, phi_inv[None, None, :]), delta)
        new = dict(cur.diffs)
        new[n] = F.sub(eps, corr)
        if n + 1 in new:
            new[n + 1] = new[n + 1][keep_cols]
        if n - 1 in new:
            new[n - 1] = new[n - 1][:, keep_rows]
        ranks = _drop(cur.ranks, n - cur.low, i)
        ranks = _drop(ranks, n - 1 - cur.low, cur.vertices(n - 1)[r])
        cur = ProjComplex(alg, cur.low, ranks, new)


# --- kernels, tops, tilde reduction, extension -----------------------------------------

def kernel_parts(c: ProjComplex, n: int) -> dict:
    """``{s: row basis of Ker d_n e_s}`` in the coordinates of :func:`part_index`."""
    alg, F = c.alg, c.alg.field
    out = {}
    for s in range(alg.num_vertices):
        M = action_matrix(alg, c.d(n), c.vertices(n - 1), c.vertices(n), s)
        ncols = len(part_index(alg, c.vertices(n), s))
        out[s] = linalg.nullspace(F, M) if M.shape[0] else F.eye(ncols)
    return out


def tilde_reduce(c: ProjComplex) -> ProjComplex:
    """Split off the largest projective summand of the top term lying in ``Ker d_top``."""
    alg, F = c.alg, c.alg.field
    t = c.top
    verts = c.vertices(t)
    drop = []
    for s, K in kernel_parts(c, t).items():
        idx = part_index(alg, verts, s)
        top_cols = [pos for pos, (col, u) in enumerate(idx)
                    if verts[col] == s and u == alg.idempotent_index(s)]
        if K.shape[0] == 0 or not top_cols:
            continue
        _, piv = linalg.rref(F, K[:, top_cols])
        drop.extend(idx[top_cols[p]][0] for p in piv)
    if not drop:
        return c
    keep = [x for x in range(len(verts)) if x not in set(drop)]
    ranks = list(map(list, c.ranks))
    for col in drop:
        ranks[t - c.low][verts[col]] -= 1
    new = dict(c.diffs)
    if t in new:
        new[t] = new[t][:, keep]
    ranks = tuple(map(tuple, ranks))
    # a top term that became zero shrinks the window
    while len(ranks) > 1 and sum(ranks[-1]) == 0:
        new.pop(c.low + len(ranks) - 1, None)
        ranks = ranks[:-1]
    return ProjComplex(alg, c.low, ranks, new)


def kernel_generators(c: ProjComplex, n: int) -> list[tuple[int, np.ndarray]]:
    """Minimal generators of ``K = Ker d_n`` as ``(vertex s, column in P_n e_s)``.

    Per vertex, generators are kernel vectors completing a basis of ``(K J) e_s``
    to one of ``K e_s``; their number is the multiplicity of ``e_s A`` in the
    projective cover of ``K``.
    """
    alg, F = c.alg, c.alg.field
    verts = c.vertices(n)
    K = kernel_parts(c, n)
    gens = []
    for s in range(alg.num_vertices):
        idx_s = part_index(alg, verts, s)
        pos_s = {key: p for p, key in enumerate(idx_s)}
        KJ = []
        for l in range(alg.num_vertices):
            Kl = K[l]
            if Kl.shape[0] == 0:
                continue
            idx_l = part_index(alg, verts, l)
            J = alg.rad[(l, s)]
            for kv in Kl:
                # element of P_n e_l as a column (len(verts), 1, dim)
                colvec = F.zeros((len(verts), 1, alg.dim))
                for val, (col, u) in zip(kv, idx_l):
                    colvec[col, 0, u] = val
                for jrow in J:
                    prod = alg.block_product(colvec, jrow[None, None, :])
                    vec = F.zeros(len(idx_s))
                    for col in range(len(verts)):
                        for u in np.nonzero(~F.is_zero(prod[col, 0]))[0]:
                            vec[pos_s[(col, int(u))]] = prod[col, 0, u]
                    KJ.append(vec)
        base = np.vstack(KJ) if KJ else F.zeros((0, len(idx_s)))
        chosen = linalg.extend_basis(F, base, K[s])
        for t in chosen:
            col = F.zeros((len(verts), alg.dim))
            for val, (cc, u) in zip(K[s][t], idx_s):
                col[cc, u] = val
            gens.append((s, col))
    return gens


def extend(c: ProjComplex) -> ProjComplex:
    """Add ``P_{top+1}``, the projective cover of ``Ker d_top``, with the cover map."""
    alg, F = c.alg, c.alg.field
    gens = kernel_generators(c, c.top)
    gens.sort(key=lambda g: g[0])  # stable: vertex order, then discovery order
    rank = [0] * alg.num_vertices
    for s, _ in gens:
        rank[s] += 1
    D = F.zeros((c.size(c.top), len(gens), alg.dim))
    for k, (_, col) in enumerate(gens):
        D[:, k] = col
    new = dict(c.diffs)
    new[c.top + 1] = D
    return ProjComplex(alg, c.low, c.ranks + (tuple(rank),), new)


def truncate(c: ProjComplex) -> ProjComplex:
    """Drop the top term."""
    if len(c.ranks) == 1:
        raise ComplexError("cannot truncate a single-term complex")
    new = {n: D for n, D in c.diffs.items() if n < c.top}
    return ProjComplex(c.alg, c.low, c.ranks[:-1], new)


# --- sums and shifts ----------------------------------------------------------------

def zero_complex(alg: AlgebraData, low: int = 0) -> ProjComplex:
    return ProjComplex(alg, low, ((0,) * alg.num_vertices,))


def stalk(alg: AlgebraData, ranks, degree: int = 0) -> ProjComplex:
    return ProjComplex(alg, degree, (tuple(ranks),))


def _merge_order(ra, rb):
    """Positions of the summands of two rank tuples in their sum (vertex, then copy)."""
    pa, pb = [], []
    pos = 0
    for a, b in zip(ra, rb):
        pa.extend(range(pos, pos + a))
        pos += a
        pb.extend(range(pos, pos + b))
        pos += b
    return pa, pb


def direct_sum(c1: ProjComplex, c2: ProjComplex) -> ProjComplex:
    if c1.alg is not c2.alg:
        raise ComplexError("complexes over different algebras")
    alg, F = c1.alg, c1.alg.field
    low, top = min(c1.low, c2.low), max(c1.top, c2.top)
    ranks = tuple(tuple(a + b for a, b in zip(c1.rank(n), c2.rank(n))) for n in range(low, top + 1))
    diffs = {}
    for n in range(low + 1, top + 1):
        rows_a, rows_b = _merge_order(c1.rank(n - 1), c2.rank(n - 1))
        cols_a, cols_b = _merge_order(c1.rank(n), c2.rank(n))
        D = F.zeros((len(rows_a) + len(rows_b), len(cols_a) + len(cols_b), alg.dim))
        D[np.ix_(rows_a, cols_a)] = c1.d(n)
        D[np.ix_(rows_b, cols_b)] = c2.d(n)
        diffs[n] = D
    return ProjComplex(alg, low, ranks, diffs)


def shift(c: ProjComplex, k: int) -> ProjComplex:
    """Relabel degrees: the term in degree ``n`` moves to degree ``n + k``."""
    return ProjComplex(c.alg, c.low + k, c.ranks, {n + k: D for n, D in c.diffs.items()})


# --- graded maps, chain maps and homotopies -------------------------------------------

class GradedMapSpace:
    """Families of block matrices ``f_n : P_n -> P'_{n+deg}`` with Peirce entries."""

    def __init__(self, src: ProjComplex, dst: ProjComplex, degree: int = 0):
        self.src, self.dst, self.degree = src, dst, degree
        alg = src.alg
        blocks = peirce_blocks(alg)
        self.spaces = {}
        for n in range(min(src.low, dst.low - degree), max(src.top, dst.top - degree) + 1):
            rows, cols = dst.vertices(n + degree), src.vertices(n)
            if rows and cols:
                sp = BlockSpace(alg, rows, cols, blocks)
                if sp.dim:
                    self.spaces[n] = sp
        self.offsets = {}
        pos = 0
        for n in sorted(self.spaces):
            self.offsets[n] = pos
            pos += self.spaces[n].dim
        self.dim = pos

    def unpack(self, x) -> dict:
        out = {}
        for n, sp in self.spaces.items():
            o = self.offsets[n]
            out[n] = sp.combine(x[o:o + sp.dim])
        return out

    def pack(self, maps: dict) -> np.ndarray:
        F = self.src.alg.field
        x = F.zeros(self.dim)
        for n, sp in self.spaces.items():
            if n in maps:
                o = self.offsets[n]
                x[o:o + sp.dim] = sp.coords(maps[n])
        return x

    def component(self, maps: dict, n: int) -> np.ndarray:
        F = self.src.alg.field
        if n in maps:
            return maps[n]
        return F.zeros((self.dst.size(n + self.degree), self.src.size(n), self.src.alg.dim))


def _chain_defect(space: GradedMapSpace, maps: dict) -> np.ndarray:
    """Concatenated blocks of ``d'_n f_n - f_{n-1} d_n`` over all relevant ``n``."""
    c, c2 = space.src, space.dst
    alg, F = c.alg, c.alg.field
    parts = []
    for n in range(min(c.low, c2.low), max(c.top, c2.top) + 2):
        a = alg.block_product(c2.d(n), space.component(maps, n))
        b = alg.block_product(space.component(maps, n - 1), c.d(n))
        diff = F.sub(a, b)
        if diff.size:
            parts.append(diff.ravel())
    return np.concatenate(parts) if parts else F.zeros(0)


def chain_condition_matrix(space: GradedMapSpace) -> np.ndarray:
    F = space.src.alg.field
    return linalg.linear_map_matrix(F, lambda x: _chain_defect(space, space.unpack(x)), space.dim)


def chain_maps(c: ProjComplex, c2: ProjComplex) -> tuple[GradedMapSpace, np.ndarray]:
    """Basis (rows, in the coordinates of the returned space) of all chain maps."""
    if c.alg is not c2.alg:
        raise ComplexError("complexes over different algebras")
    space = GradedMapSpace(c, c2, 0)
    F = c.alg.field
    if space.dim == 0:
        return space, F.zeros((0, 0))
    M = chain_condition_matrix(space)
    basis = linalg.nullspace(F, M) if M.shape[0] else F.eye(space.dim)
    return space, basis


def homotopy_map(space: GradedMapSpace, sigma_space: GradedMapSpace, y) -> np.ndarray:
    """Chain map ``d' s + s d`` for homotopy coordinates ``y``."""
    c, c2 = space.src, space.dst
    alg, F = c.alg, c.alg.field
    sig = sigma_space.unpack(y)
    maps = {}
    for n in space.spaces:
        a = alg.block_product(c2.d(n + 1), sigma_space.component(sig, n))
        b = alg.block_product(sigma_space.component(sig, n - 1), c.d(n))
        maps[n] = F.add(a, b)
    return space.pack(maps)


def homotopies(c: ProjComplex, c2: ProjComplex) -> tuple[GradedMapSpace, np.ndarray]:
    """Basis of null-homotopic chain maps (same coordinates as :func:`chain_maps`)."""
    space = GradedMapSpace(c, c2, 0)
    F = c.alg.field
    sigma = GradedMapSpace(c, c2, 1)
    if space.dim == 0 or sigma.dim == 0:
        return space, F.zeros((0, space.dim))
    M = linalg.linear_map_matrix(F, lambda y: homotopy_map(space, sigma, y), sigma.dim)
    return space, linalg.rowspace(F, M.T)


def compose_maps(alg: AlgebraData, g: dict, f: dict) -> dict:
    """Degreewise composite ``g o f`` of graded maps given as dicts."""
    return {n: alg.block_product(g[n], f[n]) for n in f if n in g}


def identity_map(c: ProjComplex) -> dict:
    alg, F = c.alg, c.alg.field
    out = {}
    for n in c.degrees:
        verts = c.vertices(n)
        M = F.zeros((len(verts), len(verts), alg.dim))
        for k, v in enumerate(verts):
            M[k, k, alg.idempotent_index(v)] = F.one
        if verts:
            out[n] = M
    return out


def is_chain_map(c: ProjComplex, c2: ProjComplex, maps: dict) -> bool:
    space = GradedMapSpace(c, c2, 0)
    return bool(c.alg.field.is_zero(_chain_defect(space, maps)).all())


# --- isomorphism ------------------------------------------------------------------

@dataclass
class IsoVerdict:
    isomorphic: bool
    method: str
    witness: dict | None = None

    def to_json(self) -> dict:
        return {"isomorphic": self.isomorphic, "method": self.method}


def _top_matrices(space: GradedMapSpace, basis: np.ndarray):
    """Linear pencils whose joint invertibility decides invertibility of a chain map.

    For every degree ``n`` and vertex ``s`` the ``e_s``-coefficients of the
    entries between copies of vertex ``s`` form a square matrix; a chain map
    is invertible iff all of these are invertible (the corner algebras are local).
    """
    alg = space.src.alg
    F = alg.field
    pencils = []
    for n in space.src.degrees:
        rv, cv = space.dst.vertices(n), space.src.vertices(n)
        if len(rv) != len(cv):
            return None
        for s in range(alg.num_vertices):
            rows = [k for k, v in enumerate(rv) if v == s]
            cols = [k for k, v in enumerate(cv) if v == s]
            if len(rows) != len(cols):
                return None
            if not rows:
                continue
            e = alg.idempotent_index(s)
            stack = F.zeros((basis.shape[0], len(rows), len(cols)))
            for b in range(basis.shape[0]):
                maps = space.unpack(basis[b])
                if n in maps:
                    stack[b] = maps[n][np.ix_(rows, cols)][:, :, e]
            pencils.append(stack)
    return pencils


def _all_invertible(F: Field, pencils, t) -> bool:
    for stack in pencils:
        M = contract(F, np.asarray(t)[None, :], stack, 1)[0]
        if not linalg.is_invertible(F, M):
            return False
    return True


def iso_test(c: ProjComplex, c2: ProjComplex, seed: int = 0, derived: bool = False,
             exhaustive_cap: int = 10**6, trials: int = 24) -> IsoVerdict:
    """Decide whether two minimal complexes are isomorphic.

    Rank and homology mismatches give a quick negative answer.  Otherwise the
    space of chain maps is searched for one that is invertible in every
    degree: first at seeded random points; then exhaustively when the field
    is finite and the space small; then at random points over an extension
    field (valid by the Noether-Deuring theorem) or, over Q, at random integer
    points (Schwartz-Zippel).  ``method`` records which step decided.
    """
    if not (c.is_minimal() and c2.is_minimal()):
        raise ComplexError("iso_test expects minimal complexes")
    if derived:
        c, c2 = tilde_reduce(c), tilde_reduce(c2)
    F = c.alg.field
    if _norm_ranks(c) != _norm_ranks(c2):
        return IsoVerdict(False, "vector-rank")
    if homology(c) != homology(c2):
        return IsoVerdict(False, "homology")
    if c.total_rank == 0:
        return IsoVerdict(True, "zero-complex")
    space, basis = chain_maps(c, c2)
    if basis.shape[0] == 0:
        return IsoVerdict(False, "no-chain-maps")
    pencils = _top_matrices(space, basis)
    if pencils is None:
        return IsoVerdict(False, "vector-rank")
    k = basis.shape[0]
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        t = F.random(k, rng)
        if _all_invertible(F, pencils, t):
            return IsoVerdict(True, "random-certificate", space.unpack(F.matmul(t[None, :], basis)[0]))
    degree = sum(sum(r) for r in c.ranks)
    if F.order is not None:
        q = F.order
        if q ** k <= exhaustive_cap:
            for tup in itertools.product(F.elements(), repeat=k):
                t = np.array(tup, dtype=F.dtype)
                if _all_invertible(F, pencils, t):
                    return IsoVerdict(True, "exhaustive", space.unpack(F.matmul(t[None, :], basis)[0]))
            return IsoVerdict(False, "exhaustive")
        return _extension_search(F, pencils, k, degree, rng, trials)
    # Q: a nonzero polynomial of degree <= D vanishes at a random point of
    # {-B..B}^k with probability <= D / (2B + 1)
    bound = 10**6
    for _ in range(trials):
        t = F.asarray(rng.integers(-bound, bound + 1, size=k).tolist())
        if _all_invertible(F, pencils, t):
            return IsoVerdict(True, "schwartz-zippel", space.unpack(F.matmul(t[None, :], basis)[0]))
    return IsoVerdict(False, "schwartz-zippel")


def _extension_search(F: Field, pencils, k: int, degree: int, rng, trials: int) -> IsoVerdict:
    p = F.characteristic
    if F.order != p:
        return IsoVerdict(False, "inconclusive-large-space")
    e = 1
    while p ** (e + 1) <= 4096 and p ** e < 8 * max(degree, 1):
        e += 1
    if e == 1:
        return IsoVerdict(False, "inconclusive-large-space")
    E = finite_field(p ** e)
    lifted = [np.asarray(st, dtype=np.int64) for st in pencils]
    for _ in range(trials):
        t = E.random(k, rng)
        if _all_invertible(E, lifted, t):
            return IsoVerdict(True, f"extension-sampling-F{p ** e}")
    return IsoVerdict(False, f"extension-sampling-F{p ** e}")


def _norm_ranks(c: ProjComplex) -> dict:
    return {n: c.rank(n) for n in c.degrees if sum(c.rank(n))}


# --- random complexes ----------------------------------------------------------------

def solutions_after(alg: AlgebraData, D_below: np.ndarray | None, rows, cols, blocks: dict):
    """Space of ``X`` (entries in ``blocks``) with ``D_below @ X = 0``.

    Returns ``(space, basis)``; ``basis`` rows are coordinates in ``space``.
    """
    F = alg.field
    space = BlockSpace(alg, rows, cols, blocks)
    if space.dim == 0:
        return space, F.zeros((0, 0))
    if D_below is None or D_below.shape[0] == 0:
        return space, F.eye(space.dim)
    T = space.basis_tensor()
    prods = [alg.block_product(D_below, T[k]).ravel() for k in range(space.dim)]
    M = np.stack(prods, axis=1)
    return space, linalg.nullspace(F, M)


def random_minimal_complex(alg: AlgebraData, ranks, rng: np.random.Generator, low: int = 0) -> ProjComplex:
    """A random minimal complex with the given ranks (sequential random nullspace elements)."""
    F = alg.field
    ranks = tuple(tuple(r) for r in ranks)
    diffs = {}
    below = None
    for t in range(1, len(ranks)):
        rows, cols = copies(ranks[t - 1]), copies(ranks[t])
        space, basis = solutions_after(alg, below, rows, cols, alg.rad)
        if basis.shape[0]:
            coeffs = F.matmul(F.random(basis.shape[0], rng)[None, :], basis)[0]
            D = space.combine(coeffs)
        else:
            D = F.zeros((len(rows), len(cols), alg.dim))
        diffs[low + t] = D
        below = D
    return ProjComplex(alg, low, ranks, diffs)


def random_ranks(alg: AlgebraData, length: int, max_rank: int, rng: np.random.Generator):
    return tuple(tuple(int(x) for x in rng.integers(0, max_rank + 1, size=alg.num_vertices))
                 for _ in range(length))


# --- file format ----------------------------------------------------------------------

def complex_to_json(c: ProjComplex, algebra_path: str | None = None) -> dict:
    alg, F = c.alg, c.alg.field
    entries = []
    for n in sorted(c.diffs):
        D = c.diffs[n]
        for r, col, u in zip(*np.nonzero(~F.is_zero(D))):
            entries.append([n, int(r), int(col), alg.labels[u], F.to_json(D[r, col, u])])
    out = {"low": c.low, "ranks": [list(r) for r in c.ranks], "entries": entries, "field": F.name}
    if algebra_path is not None:
        out["algebra"] = algebra_path
    return out


def complex_from_json(alg: AlgebraData, data: dict) -> ProjComplex:
    F = alg.field
    try:
        low = int(data.get("low", 0))
        ranks = tuple(tuple(int(x) for x in r) for r in data["ranks"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ComplexError(f"bad complex header: {exc}") from None
    c = ProjComplex(alg, low, ranks)
    label_index = {lab: k for k, lab in enumerate(alg.labels)}
    diffs = {n: D.copy() for n, D in c.diffs.items()}
    for entry in data.get("entries", []):
        if len(entry) != 5:
            raise ComplexError(f"entry {entry} must be [degree, row, col, label, coefficient]")
        n, r, col, lab, coef = entry
        if n not in diffs:
            raise ComplexError(f"degree {n} has no differential")
        if lab not in label_index:
            raise ComplexError(f"unknown basis element {lab!r}")
        D = diffs[n]
        if not (0 <= r < D.shape[0] and 0 <= col < D.shape[1]):
            raise ComplexError(f"entry position ({r}, {col}) outside d_{n}")
        D[r, col, label_index[lab]] = F.add(D[r, col, label_index[lab]], F.convert(Fraction(str(coef))))
    return ProjComplex(alg, low, ranks, diffs)


def load_complex(path: str, field: Field | None = None, alg: AlgebraData | None = None) -> ProjComplex:
    """Read a complex file; with ``alg`` given, reuse it when the file names the same presentation."""
    from .algebra import build_algebra
    from .presentation import load_presentation

    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ComplexError(f"{path}: invalid JSON ({exc})") from None
    if "algebra" not in data:
        raise ComplexError("complex file must name its algebra file")
    apath = os.path.join(os.path.dirname(os.path.abspath(path)), data["algebra"])
    pres = load_presentation(apath)
    if alg is not None:
        if pres.with_field(alg.field) != alg.presentation:
            raise ComplexError("complexes over different algebras")
        return complex_from_json(alg, data)
    if field is not None:
        pres = pres.with_field(field)
    elif "field" in data:
        from .fields import parse_field
        pres = pres.with_field(parse_field(data["field"]))
    return complex_from_json(build_algebra(pres), data)
