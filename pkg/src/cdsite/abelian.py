"""Finitely generated abelian groups as integer presentations.

A group is ``Z^n / im(R)`` for an ``n x r`` relation matrix ``R``.  Elements
are integer vectors of length ``n``; homomorphisms are integer matrices.
Every question (kernels, images, exactness, isomorphism type) is decided
with the Smith normal form.

Matrices are numpy arrays of dtype ``object`` holding Python ints, so
entries never overflow and empty shapes like ``(0, 3)`` behave.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np


def mat(rows: Sequence[Sequence[int]] | np.ndarray, shape: Optional[tuple[int, int]] = None) -> np.ndarray:
    """Integer matrix as an object array; ``shape`` is required when empty."""
    if isinstance(rows, np.ndarray) and rows.dtype == object and (shape is None or rows.shape == shape):
        return rows
    a = np.array(rows, dtype=object)
    if shape is not None:
        a = a.reshape(shape)
    elif a.ndim != 2:
        raise ValueError("cannot infer the shape of an empty matrix")
    return a


def zeros(m: int, n: int) -> np.ndarray:
    return np.zeros((m, n), dtype=int).astype(object)


def eye(n: int) -> np.ndarray:
    return np.eye(n, dtype=int).astype(object)


def vec(v: Sequence[int] | np.ndarray) -> np.ndarray:
    return np.array(list(v), dtype=object).reshape(-1)


def block_diag(*blocks: np.ndarray) -> np.ndarray:
    m = sum(b.shape[0] for b in blocks)
    n = sum(b.shape[1] for b in blocks)
    out = zeros(m, n)
    i = j = 0
    for b in blocks:
        out[i:i + b.shape[0], j:j + b.shape[1]] = b
        i += b.shape[0]
        j += b.shape[1]
    return out


# -- Smith normal form ---------------------------------------------------------

@dataclass
class SmithForm:
    """``U @ A @ V == D`` with ``U``, ``V`` unimodular and ``D`` diagonal,
    each diagonal entry dividing the next."""

    U: np.ndarray
    D: np.ndarray
    V: np.ndarray
    diagonal: list[int]

    @property
    def rank(self) -> int:
        return len(self.diagonal)


def smith_normal_form(a: np.ndarray) -> SmithForm:
    m, n = a.shape
    d = [[int(x) for x in row] for row in a]
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in d:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        if q:
            d[dst] = [x - q * y for x, y in zip(d[dst], d[src])]
            u[dst] = [x - q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):
        if q:
            for row in d:
                row[dst] -= q * row[src]
            for row in v:
                row[dst] -= q * row[src]

    diag = []
    for t in range(min(m, n)):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if d[i][j] and (best is None or abs(d[i][j]) < abs(d[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            dirty = False
            for i in range(t + 1, m):
                if d[i][t]:
                    add_row(i, t, d[i][t] // d[t][t])
                    if d[i][t]:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, n):
                if d[t][j]:
                    add_col(j, t, d[t][j] // d[t][t])
                    if d[t][j]:
                        swap_cols(t, j)
                        dirty = True
            if dirty:
                continue
            piv = d[t][t]
            bad = next((i for i in range(t + 1, m) if any(d[i][j] % piv for j in range(t + 1, n))), None)
            if bad is None:
                break
            add_row(t, bad, -1)
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
        diag.append(d[t][t])
    return SmithForm(mat(u, (m, m)), mat(d, (m, n)), mat(v, (n, n)), diag)


def int_kernel(a: np.ndarray) -> np.ndarray:
    """Basis, as columns, of ``{x : a x = 0}`` over the integers."""
    m, n = a.shape
    if m == 0:
        return eye(n)
    # unimodular column reduction to echelon form; the columns of the
    # transform that end up zero span the kernel
    cols = [[int(a[i, j]) for i in range(m)] for j in range(n)]
    v = [[int(i == j) for i in range(n)] for j in range(n)]
    live = list(range(n))
    for row in range(m):
        while True:
            nz = [j for j in live if cols[j][row]]
            if len(nz) <= 1:
                break
            piv = min(nz, key=lambda j: abs(cols[j][row]))
            p = cols[piv][row]
            for j in nz:
                if j != piv:
                    q = cols[j][row] // p
                    cols[j] = [x - q * y for x, y in zip(cols[j], cols[piv])]
                    v[j] = [x - q * y for x, y in zip(v[j], v[piv])]
        if nz:
            live.remove(nz[0])
    if not live:
        return zeros(n, 0)
    return mat([v[j] for j in live], (len(live), n)).T.copy()


def int_solve(a: np.ndarray, b: np.ndarray) -> Optional[np.ndarray]:
    """Some integer ``x`` with ``a x = b``, or ``None``."""
    m, n = a.shape
    b = vec(b)
    if n == 0 or m == 0:
        return zeros(n, 1)[:, 0] if not any(b) else None
    s = smith_normal_form(a)
    ub = s.U.dot(b)
    y = [0] * n
    for i, di in enumerate(s.diagonal):
        if ub[i] % di:
            return None
        y[i] = ub[i] // di
    if any(ub[s.rank:]):
        return None
    return s.V.dot(vec(y))


def lattice_basis(gens: np.ndarray) -> np.ndarray:
    """Basis (columns, echelon form) of the lattice spanned by the columns of ``gens``."""
    dim = gens.shape[0]
    active = [[int(x) for x in gens[:, j]] for j in range(gens.shape[1])]
    active = [c for c in active if any(c)]
    basis = []
    for row in range(dim):
        while True:
            nz = [c for c in active if c[row]]
            if not nz:
                break
            piv = min(nz, key=lambda c: abs(c[row]))
            if len(nz) == 1:
                basis.append(piv)
                active = [c for c in active if c is not piv]
                break
            nxt = []
            for c in active:
                if c is piv or not c[row]:
                    nxt.append(c)
                    continue
                q = c[row] // piv[row]
                c2 = [x - q * y for x, y in zip(c, piv)]
                if any(c2):
                    nxt.append(c2)
            active = nxt
    return mat([list(col) for col in zip(*basis)], (dim, len(basis))) if basis else zeros(dim, 0)


# -- groups -------------------------------------------------------------------

@dataclass(frozen=True)
class AbGroup:
    """``Z^ngens / im(relations)``; ``relations`` is a tuple of column vectors."""

    ngens: int
    relations: tuple[tuple[int, ...], ...] = ()

    @classmethod
    def free(cls, n: int) -> "AbGroup":
        return cls(n, ())

    @classmethod
    def from_invariants(cls, rank: int, torsion: Sequence[int] = ()) -> "AbGroup":
        n = rank + len(torsion)
        rels = []
        for k, d in enumerate(torsion):
            col = [0] * n
            col[rank + k] = int(d)
            rels.append(tuple(col))
        return cls(n, tuple(rels))

    @classmethod
    def cyclic(cls, order: int) -> "AbGroup":
        return cls.from_invariants(0, [order]) if order else cls.free(1)

    def relation_matrix(self) -> np.ndarray:
        r = len(self.relations)
        if not r:
            return zeros(self.ngens, 0)
        return mat([list(c) for c in self.relations], (r, self.ngens)).T.copy()

    def invariants(self) -> tuple[int, tuple[int, ...]]:
        """``(free rank, torsion invariant factors > 1)``: the isomorphism type."""
        if not self.relations:
            return (self.ngens, ())
        s = smith_normal_form(self.relation_matrix())
        return (self.ngens - s.rank, tuple(d for d in s.diagonal if d != 1))

    def order(self) -> Optional[int]:
        rank, tors = self.invariants()
        if rank:
            return None
        out = 1
        for d in tors:
            out *= d
        return out

    def is_trivial(self) -> bool:
        return self.invariants() == (0, ())

    def is_zero(self, v) -> bool:
        v = vec(v)
        if not any(v):
            return True
        if not self.relations:
            return False
        return int_solve(self.relation_matrix(), v) is not None

    def equal(self, v, w) -> bool:
        return self.is_zero(vec(v) - vec(w))

    def isomorphic(self, other: "AbGroup") -> bool:
        return self.invariants() == other.invariants()

    def __str__(self) -> str:
        return describe(self.invariants())


def describe(inv: tuple[int, tuple[int, ...]]) -> str:
    rank, tors = inv
    parts = []
    if rank == 1:
        parts.append("Z")
    elif rank > 1:
        parts.append(f"Z^{rank}")
    parts.extend(f"Z/{d}" for d in tors)
    return " + ".join(parts) if parts else "0"


def direct_sum(groups: Sequence[AbGroup]) -> AbGroup:
    n = sum(g.ngens for g in groups)
    rels = []
    off = 0
    for g in groups:
        for r in g.relations:
            col = [0] * n
            col[off:off + g.ngens] = r
            rels.append(tuple(col))
        off += g.ngens
    return AbGroup(n, tuple(rels))


def is_homomorphism(src: AbGroup, dst: AbGroup, m: np.ndarray) -> bool:
    """``m`` sends the relations of ``src`` into the relations of ``dst``."""
    return all(dst.is_zero(m.dot(vec(r))) for r in src.relations)


@dataclass
class Subquotient:
    """A group realized as a lattice inside ``Z^ambient`` (basis columns),
    with relations in basis coordinates."""

    group: AbGroup
    basis: np.ndarray

    @property
    def ambient(self) -> int:
        return self.basis.shape[0]

    def coordinates(self, v) -> np.ndarray:
        v = vec(v)
        if self.basis.shape[1] == 0:
            if any(v):
                raise ValueError("vector not in lattice")
            return vec([])
        x = int_solve(self.basis, v)
        if x is None:
            raise ValueError("vector not in lattice")
        return x


def kernel(src: AbGroup, dst: AbGroup, m: np.ndarray) -> Subquotient:
    """``ker(m: src -> dst)`` presented on a basis of its preimage lattice."""
    n = src.ngens
    rd = dst.relation_matrix()
    big = np.hstack([m, -rd]) if dst.ngens else zeros(0, n + rd.shape[1])
    ker = int_kernel(big)[:n, :]
    basis = lattice_basis(ker)
    sq = Subquotient(AbGroup(basis.shape[1]), basis)
    rels = tuple(tuple(int(x) for x in sq.coordinates(r)) for r in src.relations)
    sq.group = AbGroup(basis.shape[1], rels)
    return sq


def image_contains(m: np.ndarray, dst: AbGroup, v) -> bool:
    """Is ``v`` in ``im(m) + relations(dst)``?"""
    gens = np.hstack([m, dst.relation_matrix()])
    if gens.shape[1] == 0:
        return not any(vec(v))
    return int_solve(gens, vec(v)) is not None


def is_zero_map(m: np.ndarray, dst: AbGroup) -> bool:
    return all(dst.is_zero(m[:, j]) for j in range(m.shape[1]))


def is_injective(src: AbGroup, dst: AbGroup, m: np.ndarray) -> bool:
    return kernel(src, dst, m).group.is_trivial()


def is_surjective(m: np.ndarray, dst: AbGroup) -> bool:
    return all(image_contains(m, dst, eye(dst.ngens)[:, i]) for i in range(dst.ngens))


def is_isomorphism(src: AbGroup, dst: AbGroup, m: np.ndarray) -> bool:
    return is_injective(src, dst, m) and is_surjective(m, dst)


def exact_at(g1: AbGroup, g2: AbGroup, g3: AbGroup, alpha: np.ndarray, beta: np.ndarray) -> bool:
    """Exactness of ``g1 --alpha--> g2 --beta--> g3`` at ``g2``."""
    if not is_zero_map(beta.dot(alpha), g3):
        return False
    ker = kernel(g2, g3, beta)
    return all(image_contains(alpha, g2, ker.basis[:, j]) for j in range(ker.basis.shape[1]))


@dataclass
class CochainComplex:
    """Groups ``C^0 .. C^N`` with coboundaries ``d[n]: C^n -> C^{n+1}``."""

    groups: list[AbGroup]
    d: list[np.ndarray] = field(default_factory=list)

    def is_complex(self) -> bool:
        return all(
            is_zero_map(self.d[n + 1].dot(self.d[n]), self.groups[n + 2])
            for n in range(len(self.d) - 1)
        )

    def cocycles(self, n: int) -> Subquotient:
        cn = self.groups[n]
        if n < len(self.d):
            return kernel(cn, self.groups[n + 1], self.d[n])
        return kernel(cn, AbGroup(0), zeros(0, cn.ngens))

    def cohomology(self, n: int) -> Subquotient:
        """``H^n`` on a basis of the cocycle lattice inside ``C^n``."""
        z = self.cocycles(n)
        extra = ()
        if n > 0:
            dm = self.d[n - 1]
            extra = tuple(tuple(int(x) for x in z.coordinates(dm[:, j])) for j in range(dm.shape[1]))
        z.group = AbGroup(z.group.ngens, z.group.relations + extra)
        return z


def induced_map(src: Subquotient, dst: Subquotient, m: np.ndarray) -> np.ndarray:
    """Matrix, in subquotient coordinates, of the map induced by ``m``."""
    cols = [dst.coordinates(m.dot(src.basis[:, j])) for j in range(src.basis.shape[1])]
    if not cols:
        return zeros(dst.group.ngens, 0)
    return mat([list(c) for c in cols], (len(cols), dst.group.ngens)).T.copy()
