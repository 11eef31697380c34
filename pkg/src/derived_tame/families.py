"""Parameter spaces of complexes and parameter numbers.

For a vector rank ``R = (R_low, ..., R_top)`` and an ideal ``I`` inside the
radical, ``H(R, I)`` is the space of tuples ``h = (h_k)`` of block matrices
``h_k : R_k A -> I R_{k-1} A``.  The variety ``D(R, I)`` consists of the
nonzero ``h`` with ``h_k h_{k+1} = 0``, taken projectively.  The group
``G = prod_k Aut(R_k A)`` acts by ``(g . h)_k = g_{k-1} h_k g_k^{-1}``; the
strata ``D_i`` collect points whose orbit has dimension at most ``i`` and
``par = max_i (dim D_i - i)``.

Dimensions over an algebraically closed field are estimated from point
counts over two finite fields ``F_q`` and ``F_{q^2}``: a stratum of dimension
``m`` has about ``c q^m`` points, so ``log(N(q^2) / N(q)) / log q`` recovers
``m``.  This is an estimator; ``mode="tangent"`` gives tangent-space bounds
instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .algebra import AlgebraData, contract
from .complexes import BlockSpace, ProjComplex, copies, peirce_blocks
from .fields import Field, finite_field


class InfeasibleError(RuntimeError):
    """The requested computation exceeds its configured size cap."""


class FamilyError(ValueError):
    """Invalid input for a parameter-space computation."""


# --- ideals -----------------------------------------------------------------------------

def radical_ideal(alg: AlgebraData) -> dict:
    return dict(alg.rad)


def radical_power_ideal(alg: AlgebraData, n: int) -> dict:
    return alg.ideal_blocks(alg.radical_power_basis(n))


def zero_ideal(alg: AlgebraData) -> dict:
    F = alg.field
    return {key: F.zeros((0, alg.dim)) for key in alg.peirce}


def ideal_generated(alg: AlgebraData, generators) -> dict:
    """Blocks of the two-sided ideal generated by elements given as path names or vectors."""
    F = alg.field
    rows = []
    for g in generators:
        rows.append(alg.element(g).vec if isinstance(g, str) else np.asarray(g))
    gens = np.vstack(rows) if rows else F.zeros((0, alg.dim))
    return alg.ideal_blocks(alg.generated_ideal(gens))


def ideal_dim(blocks: dict) -> int:
    return sum(B.shape[0] for B in blocks.values())


def ideal_contained(alg: AlgebraData, small: dict, big: dict) -> bool:
    F = alg.field
    for key, B in small.items():
        if B.shape[0] == 0:
            continue
        if linalg.rank(F, np.vstack([big[key], B])) != big[key].shape[0]:
            return False
    return True


# --- the space H(R, I) ------------------------------------------------------------------

@dataclass
class VectorRank:
    low: int
    ranks: tuple[tuple[int, ...], ...]

    @property
    def top(self) -> int:
        return self.low + len(self.ranks) - 1

    def rank(self, n: int) -> tuple[int, ...]:
        if self.low <= n <= self.top:
            return self.ranks[n - self.low]
        return (0,) * len(self.ranks[0]) if self.ranks else ()

    @property
    def total(self) -> int:
        return sum(sum(r) for r in self.ranks)

    def to_json(self):
        return {"low": self.low, "ranks": [list(r) for r in self.ranks]}


def parse_ranks(text: str, low: int = 0) -> VectorRank:
    """``"1;1,0;2"`` -> degrees separated by ``;``, vertices by ``,``."""
    try:
        ranks = tuple(tuple(int(x) for x in part.split(",")) for part in text.split(";"))
    except ValueError:
        raise FamilyError(f"cannot parse ranks {text!r}") from None
    if any(x < 0 for r in ranks for x in r):
        raise FamilyError("ranks must be nonnegative")
    return VectorRank(low, ranks)


class HomSpace:
    """``H(R, I)`` with bilinear data for the equations ``h_k h_{k+1} = 0``."""

    def __init__(self, alg: AlgebraData, vrank: VectorRank, ideal: dict | None = None):
        self.alg = alg
        self.vrank = vrank
        s = alg.num_vertices
        for r in vrank.ranks:
            if len(r) != s:
                raise FamilyError(f"rank tuple {r} must have {s} entries")
        self.ideal = radical_ideal(alg) if ideal is None else ideal
        if not ideal_contained(alg, self.ideal, alg.rad):
            raise FamilyError("the ideal is not contained in the radical")
        self.spaces = {}
        self.offsets = {}
        pos = 0
        for k in range(vrank.low + 1, vrank.top + 1):
            sp = BlockSpace(alg, copies(vrank.rank(k - 1)), copies(vrank.rank(k)), self.ideal)
            self.spaces[k] = sp
            self.offsets[k] = pos
            pos += sp.dim
        self.dim = pos
        self._quad = {}
        for k in range(vrank.low + 1, vrank.top):
            self._quad[k] = self._bilinear(k)

    def block_dims(self) -> dict:
        return {k: sp.dim for k, sp in self.spaces.items()}

    def slice(self, k: int) -> slice:
        return slice(self.offsets[k], self.offsets[k] + self.spaces[k].dim)

    def _bilinear(self, k: int) -> np.ndarray:
        """``Q[x, y, :]``: flattened ``basis_x(h_k) basis_y(h_{k+1})``."""
        alg, F = self.alg, self.alg.field
        A, B = self.spaces[k], self.spaces[k + 1]
        out_size = A.shape[0] * B.shape[1] * alg.dim
        if A.dim == 0 or B.dim == 0 or out_size == 0:
            return F.zeros((A.dim, B.dim, out_size))
        TA = A.basis_tensor()  # (x, r0, r1, u)
        TB = B.basis_tensor()  # (y, r1, r2, v)
        T = contract(F, TA, alg.mult, 1)  # (x, r0, r1, v, w)
        T = np.transpose(T, (0, 1, 4, 2, 3))  # (x, r0, w, r1, v)
        TBt = np.transpose(TB, (1, 3, 0, 2))  # (r1, v, y, r2)
        Z = contract(F, T, TBt, 2)  # (x, r0, w, y, r2)
        Z = np.transpose(Z, (0, 3, 1, 4, 2))  # (x, y, r0, r2, w)
        return Z.reshape(A.dim, B.dim, out_size)

    def unpack(self, x) -> dict:
        return {k: sp.combine(x[self.slice(k)]) for k, sp in self.spaces.items()}

    def pack(self, h: dict) -> np.ndarray:
        F = self.alg.field
        x = F.zeros(self.dim)
        for k, sp in self.spaces.items():
            if k in h:
                x[self.slice(k)] = sp.coords(h[k])
        return x

    def equations(self, P: np.ndarray) -> np.ndarray:
        """Boolean mask of the rows of ``P`` (points of H) satisfying ``h_k h_{k+1} = 0``."""
        F = self.alg.field
        P = np.asarray(P)
        ok = np.ones(P.shape[0], dtype=bool)
        for k, Q in self._quad.items():
            nx, ny, out = Q.shape
            if nx == 0 or ny == 0 or out == 0:
                continue
            a, b = P[:, self.slice(k)], P[:, self.slice(k + 1)]
            U = F.matmul(a, Q.reshape(nx, ny * out)).reshape(-1, ny, out)
            V = F.sum(F.mul(U, b[:, :, None]), axis=1)
            ok &= ~(~F.is_zero(V)).any(axis=1)
        return ok

    def is_point(self, x) -> bool:
        F = self.alg.field
        return bool(not F.is_zero(x).all() and self.equations(np.asarray(x)[None, :])[0])

    def complex_of(self, x) -> ProjComplex:
        """Member of the canonical family: the complex with differentials ``h``."""
        return ProjComplex(self.alg, self.vrank.low, self.vrank.ranks, self.unpack(x))

    # --- group data ---------------------------------------------------------------------
    def end_spaces(self) -> dict:
        blocks = peirce_blocks(self.alg)
        return {k: BlockSpace(self.alg, copies(self.vrank.rank(k)), copies(self.vrank.rank(k)), blocks)
                for k in range(self.vrank.low, self.vrank.top + 1)}

    def group_dim(self) -> int:
        return sum(sp.dim for sp in self.end_spaces().values())

    def lie_map(self, x) -> np.ndarray:
        """Matrix of ``u -> (u_{k-1} h_k - h_k u_k)_k`` from ``Lie G`` to H-blocks."""
        alg, F = self.alg, self.alg.field
        ends = self.end_spaces()
        h = self.unpack(x)
        order = sorted(ends)
        sizes = [ends[k].dim for k in order]
        total = sum(sizes)

        def fn(u):
            parts = {}
            pos = 0
            for k, n in zip(order, sizes):
                parts[k] = ends[k].combine(u[pos:pos + n])
                pos += n
            out = []
            for k in self.spaces:
                a = alg.block_product(parts[k - 1], h[k])
                b = alg.block_product(h[k], parts[k])
                out.append(F.sub(a, b).ravel())
            return np.concatenate(out) if out else F.zeros(0)

        return linalg.linear_map_matrix(F, fn, total)

    def tangent_matrix(self, x) -> np.ndarray:
        """Matrix of ``u -> (u_k h_{k+1} + h_k u_{k+1})_k`` on H."""
        F = self.alg.field
        parts = []
        for k, Q in self._quad.items():
            nx, ny, out = Q.shape
            a, b = x[self.slice(k)], x[self.slice(k + 1)]
            M = F.zeros((out, self.dim))
            if nx and ny and out:
                Qt = np.transpose(Q, (0, 2, 1)).reshape(nx * out, ny)
                M[:, self.slice(k)] = F.matmul(Qt, b[:, None]).reshape(nx, out).T
                M[:, self.slice(k + 1)] = F.matmul(a[None, :], Q.reshape(nx, ny * out)).reshape(ny, out).T
            parts.append(M)
        return np.vstack(parts) if parts else F.zeros((0, self.dim))


def hom_space_basis(alg: AlgebraData, vrank: VectorRank, ideal: dict | None = None) -> HomSpace:
    return HomSpace(alg, vrank, ideal)


# --- points and orbits ------------------------------------------------------------------

@dataclass
class OrbitInfo:
    group_dim: int
    affine_stabilizer_dim: int
    projective_stabilizer_dim: int
    orbit_dim: int  # in P(H)

    def to_json(self) -> dict:
        return dict(self.__dict__)


def orbit_info(H: HomSpace, x) -> OrbitInfo:
    """Stabilizer and orbit dimensions at a point, from the Lie algebra of G."""
    F = H.alg.field
    gdim = H.group_dim()
    L = H.lie_map(x)
    rk = linalg.rank(F, L) if L.size else 0
    aff = gdim - rk
    # scalar degree-grading u_k = k * id maps h to -h, so the homothety line is always reached
    proj = aff + 1
    return OrbitInfo(gdim, aff, proj, gdim - proj)


def tangent_dim_D(H: HomSpace, x) -> int:
    """Dimension of the projective tangent space of ``D`` at ``x``."""
    F = H.alg.field
    M = H.tangent_matrix(x)
    rk = linalg.rank(F, M) if M.size else 0
    return H.dim - rk - 1


def _normalize(F: Field, P: np.ndarray) -> np.ndarray:
    nz = ~F.is_zero(P)
    first = np.argmax(nz, axis=1)
    lead = P[np.arange(P.shape[0]), first]
    return F.mul(P, F.inv(lead)[:, None])


def _encode(P: np.ndarray, q: int) -> np.ndarray:
    n = P.shape[1]
    if n and q ** n >= 2**62:
        raise InfeasibleError("point encoding overflow")
    weights = np.array([q**i for i in range(n)], dtype=np.int64)
    return np.asarray(P, dtype=np.int64) @ weights


def count_projective(q: int, n: int) -> int:
    return (q**n - 1) // (q - 1) if n else 0


def enumerate_D(H: HomSpace, cap: int = 10**6) -> np.ndarray:
    """All points of ``D(F_q)`` as normalized rows (first nonzero coordinate 1)."""
    F = H.alg.field
    if F.order is None:
        raise FamilyError("enumeration needs a finite field")
    q, n = F.order, H.dim
    total = count_projective(q, n)
    if total > cap:
        raise InfeasibleError(f"P(H) has {total} points over {F.name}, above the cap {cap}")
    chunks = []
    for lead in range(n):
        m = n - lead - 1
        idx = np.arange(q**m, dtype=np.int64)
        P = F.zeros((q**m, n))
        P[:, lead] = F.one
        for t in range(m):
            P[:, lead + 1 + t] = (idx // q**t) % q
        chunks.append(P[H.equations(P)])
    return np.vstack(chunks) if chunks else F.zeros((0, n))


def sample_D(H: HomSpace, rng: np.random.Generator, count: int = 8, retries: int = 50) -> np.ndarray:
    """Random points: choose ``h_k`` degree by degree in the solution space of ``h_{k-1} h_k = 0``."""
    from .complexes import solutions_after

    alg, F = H.alg, H.alg.field
    out = []
    for _ in range(count * retries):
        if len(out) >= count:
            break
        x = F.zeros(H.dim)
        below = None
        for k, sp in H.spaces.items():
            space, basis = solutions_after(alg, below, sp.rows, sp.cols, H.ideal)
            if basis.shape[0]:
                coeffs = F.matmul(F.random(basis.shape[0], rng)[None, :], basis)[0]
            else:
                coeffs = F.zeros(sp.dim)
            x[H.slice(k)] = coeffs
            below = sp.combine(coeffs)
        if not F.is_zero(x).all():
            out.append(x)
    if not out:
        return F.zeros((0, H.dim))
    P = np.vstack(out)
    return _normalize(F, P) if F.order is not None else P


# --- generators of G(F_q) ----------------------------------------------------------------

def _adapted_radical_basis(alg: AlgebraData) -> dict:
    """Per Peirce block, a basis of ``J_ji`` adapted to the powers of J (deepest first)."""
    F = alg.field
    powers = []
    n = 1
    while True:
        blocks = radical_power_ideal(alg, n)
        if ideal_dim(blocks) == 0:
            break
        powers.append(blocks)
        n += 1
    out = {}
    for key in alg.peirce:
        chosen = F.zeros((0, alg.dim))
        for blocks in reversed(powers):
            cand = blocks[key]
            if cand.shape[0] == 0:
                continue
            picks = linalg.extend_basis(F, chosen, cand)
            chosen = np.vstack([chosen, cand[picks]])
        out[key] = chosen
    return out


def group_generators(H: HomSpace) -> list[tuple[int, np.ndarray]]:
    """Generators ``(degree, g)`` of ``prod_k Aut(R_k A)`` over a finite field.

    Per degree: scaling the first copy of each vertex by a primitive element,
    transvections between copies of the same vertex (entries ``w^j e_i`` with
    ``w^j`` running over a prime-field basis), and unipotent elements
    ``1 + c x E_rc`` for ``x`` in a radical basis adapted to the powers of J.
    """
    alg, F = H.alg, H.alg.field
    p = F.characteristic
    k_ext = int(round(math.log(F.order, p)))
    w = F.primitive_element
    scalars = [F.power(w, j) for j in range(k_ext)]
    adapted = _adapted_radical_basis(alg)
    gens = []
    for deg in range(H.vrank.low, H.vrank.top + 1):
        verts = copies(H.vrank.rank(deg))
        n = len(verts)
        if n == 0:
            continue

        def ident():
            I = F.zeros((n, n, alg.dim))
            for c, v in enumerate(verts):
                I[c, c, alg.idempotent_index(v)] = F.one
            return I

        for v in range(alg.num_vertices):
            pos = [c for c, u in enumerate(verts) if u == v]
            if not pos:
                continue
            e = alg.idempotent_index(v)
            if F.order > 2:
                g = ident()
                g[pos[0], pos[0], e] = w
                gens.append((deg, g))
            for a in pos:
                for b in pos:
                    if a != b:
                        for c in scalars:
                            g = ident()
                            g[a, b, e] = c
                            gens.append((deg, g))
        for r, j in enumerate(verts):
            for col, i in enumerate(verts):
                for xrow in adapted[(j, i)]:
                    for c in scalars:
                        g = ident()
                        g[r, col] = F.add(g[r, col], F.mul(c, xrow))
                        gens.append((deg, g))
    return gens


def _block_inverse(alg: AlgebraData, g: np.ndarray) -> np.ndarray:
    F = alg.field
    n = g.shape[0]
    verts = None
    # recover copy vertices from the diagonal idempotents
    verts = [int(np.nonzero(~F.is_zero(g[c, c][[alg.idempotent_index(v) for v in range(alg.num_vertices)]]))[0][0])
             for c in range(n)]
    space = BlockSpace(alg, verts, verts, peirce_blocks(alg))
    M = linalg.linear_map_matrix(F, lambda u: alg.block_product(g, space.combine(u)).ravel(), space.dim)
    I = F.zeros((n, n, alg.dim))
    for c, v in enumerate(verts):
        I[c, c, alg.idempotent_index(v)] = F.one
    sol = linalg.solve(F, M, I.ravel())
    if sol is None:
        raise FamilyError("group generator is not invertible")
    return space.combine(sol)


def generator_matrices(H: HomSpace) -> list[np.ndarray]:
    """Each generator as a matrix acting on H-coordinates (points are rows: ``x -> x @ T``)."""
    alg, F = H.alg, H.alg.field
    mats = []
    for deg, g in group_generators(H):
        ginv = _block_inverse(alg, g)

        def act(x, deg=deg, g=g, ginv=ginv):
            h = H.unpack(x)
            if deg in h:
                h[deg] = alg.block_product(h[deg], ginv)
            if deg + 1 in h:
                h[deg + 1] = alg.block_product(g, h[deg + 1])
            return H.pack(h)

        T = linalg.linear_map_matrix(F, act, H.dim)  # columns are images
        mats.append(T.T)
    return mats


def orbits(H: HomSpace, points: np.ndarray) -> np.ndarray:
    """Orbit label of each point (union-find under the generators)."""
    F = H.alg.field
    npts = points.shape[0]
    if npts == 0:
        return np.zeros(0, dtype=np.int64)
    q = F.order
    codes = _encode(points, q)
    order = np.argsort(codes)
    sorted_codes = codes[order]
    parent = np.arange(npts)

    def find(a):
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    for T in generator_matrices(H):
        img = _normalize(F, F.matmul(points, T))
        ic = _encode(img, q)
        where = np.searchsorted(sorted_codes, ic)
        if (where >= npts).any() or (sorted_codes[np.minimum(where, npts - 1)] != ic).any():
            raise FamilyError("group action left the enumerated point set")
        targets = order[where]
        for a, b in zip(range(npts), targets):
            ra, rb = find(a), find(int(b))
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    return np.array([find(a) for a in range(npts)], dtype=np.int64)


# --- parameter numbers -------------------------------------------------------------------

@dataclass
class ParEstimate:
    mode: str
    lo: int
    hi: int
    strata: dict = field(default_factory=dict)   # i -> estimated dim D_i
    census: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def value(self) -> int | None:
        return self.lo if self.lo == self.hi else None

    def to_json(self) -> dict:
        return {"mode": self.mode, "lo": self.lo, "hi": self.hi,
                "strata": {str(k): v for k, v in sorted(self.strata.items())},
                "census": self.census, "notes": list(self.notes)}


def _field_census(alg: AlgebraData, vrank: VectorRank, ideal_fn, cap: int) -> dict:
    H = HomSpace(alg, vrank, ideal_fn(alg))
    pts = enumerate_D(H, cap)
    labels = orbits(H, pts)
    reps = {}
    for idx, lab in enumerate(labels):
        reps.setdefault(int(lab), idx)
    orbit_rows = []
    for lab, idx in sorted(reps.items()):
        info = orbit_info(H, pts[idx])
        size = int((labels == lab).sum())
        orbit_rows.append({"representative": [alg.field.to_json(v) for v in pts[idx]],
                           "size": size, "orbit_dim": info.orbit_dim,
                           "stabilizer_dim": info.projective_stabilizer_dim})
    return {"field": alg.field.name, "dim_H": H.dim, "points": int(pts.shape[0]),
            "orbits": orbit_rows, "group_dim": H.group_dim(), "_H": H, "_pts": pts, "_labels": labels}


def _stratum_counts(census: dict) -> dict:
    """``N_i``: number of points with orbit dimension at most ``i``."""
    rows = census["orbits"]
    if not rows:
        return {}
    top = max(r["orbit_dim"] for r in rows)
    return {i: sum(r["size"] for r in rows if r["orbit_dim"] <= i) for i in range(top + 1)}


def par_exact(alg: AlgebraData, vrank: VectorRank, ideal_fn=radical_ideal,
              cap: int = 10**6, second_field: bool = True) -> ParEstimate:
    """Orbit census over ``F_q`` (and ``F_{q^2}``) with stratum-dimension estimates."""
    F = alg.field
    if F.order is None:
        raise FamilyError("exact mode needs a finite field")
    q = F.order
    c1 = _field_census(alg, vrank, ideal_fn, cap)
    notes = []
    c2 = None
    if second_field and q * q <= 4096:
        try:
            alg2 = alg.with_field(finite_field(q * q))
            c2 = _field_census(alg2, vrank, ideal_fn, cap)
        except InfeasibleError as exc:
            notes.append(f"second field skipped: {exc}")
    elif second_field:
        notes.append(f"F{q * q} exceeds the extension-field limit; single-field estimate")
    n1 = _stratum_counts(c1)
    strata = {}
    if c2 is not None:
        n2 = _stratum_counts(c2)
        for i in sorted(set(n1) | set(n2)):
            a, b = n1.get(i, 0), n2.get(i, 0)
            if b == 0:
                continue
            if a == 0:
                strata[i] = int(round(math.log(b) / math.log(q * q)))
            else:
                strata[i] = int(round(math.log(b / a) / math.log(q)))
    else:
        for i, a in n1.items():
            if a:
                strata[i] = int(round(math.log(a) / math.log(q)))
    # strata are nested: D_i grows with i
    running = None
    for i in sorted(strata):
        running = strata[i] if running is None else max(running, strata[i])
        strata[i] = running
    par = max((d - i for i, d in strata.items()), default=0)
    if not strata:
        notes.append("D is empty; par = 0 by convention")
    census = {k: v for k, v in c1.items() if not k.startswith("_")}
    census["counts_by_orbit_dim"] = {str(i): n for i, n in n1.items()}
    if c2 is not None:
        census["second_field"] = {"field": c2["field"], "points": c2["points"],
                                  "counts_by_orbit_dim": {str(i): n for i, n in _stratum_counts(c2).items()}}
    return ParEstimate("exact", par, par, strata, census, notes)


def linear_subspace_dim(H: HomSpace, x) -> int:
    """Projective dimension of a linear subspace of D through ``x``.

    The subspace is ``span(x, U)`` with ``U`` grown greedily from tangent
    directions whose pairwise cross terms vanish, so every point of the span
    satisfies ``h_k h_{k+1} = 0``.
    """
    alg, F = H.alg, H.alg.field
    T = H.tangent_matrix(x)
    tangent = linalg.nullspace(F, T) if T.shape[0] else F.eye(H.dim)
    chosen = [np.asarray(x)]
    parts = [H.unpack(np.asarray(x))]
    for u in tangent:
        hu = H.unpack(u)
        ok = True
        for hv in parts + [hu]:
            for k in H._quad:
                s = F.add(alg.block_product(hu[k], hv[k + 1]), alg.block_product(hv[k], hu[k + 1]))
                if not F.is_zero(s).all():
                    ok = False
                    break
            if not ok:
                break
        if ok and linalg.rank(F, np.vstack(chosen + [u])) > len(chosen):
            chosen.append(u)
            parts.append(hu)
    return len(chosen) - 1


def par_tangent(alg: AlgebraData, vrank: VectorRank, ideal_fn=radical_ideal, seed: int = 0,
                samples: int = 8, cap: int = 10**5, mode: str = "tangent") -> ParEstimate:
    """Bounds from tangent spaces (``hi``) and explicit linear families (``lo``)."""
    F = alg.field
    H = HomSpace(alg, vrank, ideal_fn(alg))
    rng = np.random.default_rng(seed)
    pts = None
    source = "sampled"
    if mode == "tangent" and F.order is not None and count_projective(F.order, H.dim) <= cap:
        pts = enumerate_D(H, cap)
        source = "enumerated"
    if pts is None:
        pts = sample_D(H, rng, samples)
    if pts.shape[0] == 0:
        return ParEstimate(mode, 0, 0, {}, {"dim_H": H.dim, "points": 0, "source": source},
                           ["D is empty; par = 0 by convention"])
    hi, lo = None, 0
    rows = []
    for x in pts:
        info = orbit_info(H, x)
        t = tangent_dim_D(H, x)
        hi = t - info.orbit_dim if hi is None else max(hi, t - info.orbit_dim)
        rows.append({"orbit_dim": info.orbit_dim, "tangent_dim": t})
    # the generic orbit dimension is the largest one observed; D contains each linear span found
    top_orbit = max(r["orbit_dim"] for r in rows)
    lin = max(linear_subspace_dim(H, x) for x in pts[: min(len(pts), samples)])
    lo = max(0, min(lin - top_orbit, hi))
    census = {"dim_H": H.dim, "points": int(pts.shape[0]), "source": source,
              "max_tangent_minus_orbit": hi}
    notes = ["hi is the largest tangent-minus-orbit dimension over the examined points",
             "lo is the dimension of a linear subspace of D minus the largest observed orbit dimension"]
    return ParEstimate(mode, lo, hi, {}, census, notes)


def par_estimate(alg: AlgebraData, vrank: VectorRank, mode: str = "exact", ideal_fn=radical_ideal,
                 seed: int = 0, cap: int = 10**6) -> ParEstimate:
    if mode == "exact":
        return par_exact(alg, vrank, ideal_fn, cap)
    if mode in ("tangent", "sample"):
        return par_tangent(alg, vrank, ideal_fn, seed=seed, mode=mode)
    raise FamilyError(f"unknown mode {mode!r}")


# --- heuristics and brackets --------------------------------------------------------------

def tame_heuristic(vrank: VectorRank, est: ParEstimate) -> dict:
    """Compare par with ``|R|`` (the sum of all multiplicities)."""
    size = vrank.total
    if est.hi <= size:
        verdict = "consistent-with-tame"
    elif est.lo > size:
        verdict = "wild-evidence"
    else:
        verdict = "inconclusive"
    return {"verdict": verdict, "par_lo": est.lo, "par_hi": est.hi, "size": size, "mode": est.mode}


def rank_brackets(ranks, a) -> tuple[list[int], list[int]]:
    """Per degree: ``floor = max{b : b a_i <= r_i}`` and ``ceil = min{b : b a_i >= r_i}``."""
    a = list(a)
    if any(x <= 0 for x in a):
        raise FamilyError("regular ranks must be positive")
    floors, ceils = [], []
    for r in ranks:
        floors.append(min(ri // ai for ri, ai in zip(r, a)))
        ceils.append(max(-(-ri // ai) for ri, ai in zip(r, a)))
    return floors, ceils


def regular_ranks(alg: AlgebraData) -> tuple[int, ...]:
    """Multiplicities of the indecomposable projectives in A (all 1 for a basic algebra)."""
    return (1,) * alg.num_vertices


def free_vrank(b, a, low: int = 0) -> VectorRank:
    return VectorRank(low, tuple(tuple(bk * ai for ai in a) for bk in b))


def sandwich(alg: AlgebraData, vrank: VectorRank, ideal_fn=radical_ideal, cap: int = 10**6) -> dict:
    """``par(floor) <= par(R) <= par(ceil)`` for the free bracket ranks (exact mode)."""
    a = regular_ranks(alg)
    floors, ceils = rank_brackets(vrank.ranks, a)
    lower = par_exact(alg, free_vrank(floors, a, vrank.low), ideal_fn, cap)
    mid = par_exact(alg, vrank, ideal_fn, cap)
    upper = par_exact(alg, free_vrank(ceils, a, vrank.low), ideal_fn, cap)
    return {"floor": floors, "ceil": ceils, "par_floor": lower.lo, "par": mid.lo, "par_ceil": upper.lo,
            "holds": lower.lo <= mid.lo <= upper.lo}
