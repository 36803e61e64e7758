"""Truncated simplicial objects in the free coproduct completion ``C^⊔``.

A level is a tuple of summands (objects of ``C``).  A map between levels
sends each source summand to one target summand along a morphism of
``C``: ``parts[k] = (target index, morphism)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .cohomology import Inapplicable
from .fincat import CategoryError, FiniteCategory, Square, inverse, mediating, wide_pullback
from .presheaves import SetMorphism, SetPresheaf, coproduct_presheaf, quotient_presheaf, representable
from .topology import CdStructure, Verdict


@dataclass(frozen=True)
class FormalMap:
    src: tuple[str, ...]
    dst: tuple[str, ...]
    parts: tuple[tuple[int, str], ...]

    def then(self, other: "FormalMap", cat: FiniteCategory) -> "FormalMap":
        """``other ∘ self``."""
        parts = tuple(
            (other.parts[i][0], cat.compose(other.parts[i][1], m)) for i, m in self.parts
        )
        return FormalMap(self.src, other.dst, parts)

    def check(self, cat: FiniteCategory) -> list[str]:
        out = []
        if len(self.parts) != len(self.src):
            return [f"map has {len(self.parts)} parts for {len(self.src)} summands"]
        for k, (i, m) in enumerate(self.parts):
            if not 0 <= i < len(self.dst):
                out.append(f"summand {k} sent to missing index {i}")
            elif (cat.source(m), cat.target(m)) != (self.src[k], self.dst[i]):
                out.append(f"summand {k}: {m} is not {self.src[k]} -> {self.dst[i]}")
        return out


def identity_map(cat: FiniteCategory, level: Sequence[str]) -> FormalMap:
    level = tuple(level)
    return FormalMap(level, level, tuple((k, cat.identity(x)) for k, x in enumerate(level)))


@dataclass
class TruncatedSimplicialObject:
    """Levels ``0..N``; ``faces[(n, i)]: level n -> level n-1`` for
    ``1 ≤ n``, ``0 ≤ i ≤ n``; ``degens[(n, i)]: level n -> level n+1`` for
    ``n < N``, ``0 ≤ i ≤ n``."""

    cat: FiniteCategory
    levels: list[tuple[str, ...]]
    faces: dict[tuple[int, int], FormalMap]
    degens: dict[tuple[int, int], FormalMap]
    name: str = ""

    @property
    def N(self) -> int:
        return len(self.levels) - 1

    def d(self, n: int, i: int) -> FormalMap:
        return self.faces[(n, i)]

    def s(self, n: int, i: int) -> FormalMap:
        return self.degens[(n, i)]


def check_simplicial_identities(S: TruncatedSimplicialObject) -> list[str]:
    """Every failing instance of the simplicial identities up to the truncation."""
    cat, N = S.cat, S.N
    out = []
    for (n, i), m in list(S.faces.items()) + list(S.degens.items()):
        out.extend(f"structure map at ({n},{i}): {p}" for p in m.check(cat))
    if out:
        return out
    eq = lambda a, b: a.parts == b.parts
    for n in range(2, N + 1):
        for j in range(n + 1):
            for i in range(j):
                if not eq(S.d(n, j).then(S.d(n - 1, i), cat), S.d(n, i).then(S.d(n - 1, j - 1), cat)):
                    out.append(f"d_{i} d_{j} ≠ d_{j - 1} d_{i} on level {n}")
    for n in range(0, N):
        ident = identity_map(cat, S.levels[n])
        for j in range(n + 1):
            sj = S.s(n, j)
            for i in range(n + 2):
                lhs = sj.then(S.d(n + 1, i), cat)
                if i < j:
                    rhs = S.d(n, i).then(S.s(n - 1, j - 1), cat)
                elif i in (j, j + 1):
                    rhs = ident
                else:
                    rhs = S.d(n, i - 1).then(S.s(n - 1, j), cat)
                if not eq(lhs, rhs):
                    out.append(f"d_{i} s_{j} identity fails on level {n}")
    for n in range(0, N - 1):
        for j in range(n + 1):
            for i in range(j + 1):
                lhs = S.s(n, j).then(S.s(n + 1, i), cat)
                rhs = S.s(n, i).then(S.s(n + 1, j + 1), cat)
                if not eq(lhs, rhs):
                    out.append(f"s_{i} s_{j} ≠ s_{j + 1} s_{i} on level {n}")
    return out


def constant_object(cat: FiniteCategory, x: str, N: int) -> TruncatedSimplicialObject:
    lv = [(x,)] * (N + 1)
    idm = identity_map(cat, (x,))
    faces = {(n, i): idm for n in range(1, N + 1) for i in range(n + 1)}
    degens = {(n, i): idm for n in range(N) for i in range(n + 1)}
    return TruncatedSimplicialObject(cat, lv, faces, degens, name=f"const({x})")


@dataclass
class SimplicialMap:
    src: TruncatedSimplicialObject
    dst: TruncatedSimplicialObject
    comp: list[FormalMap]

    def then(self, other: "SimplicialMap") -> "SimplicialMap":
        cat = self.src.cat
        return SimplicialMap(self.src, other.dst, [a.then(b, cat) for a, b in zip(self.comp, other.comp)])

    def check(self) -> list[str]:
        cat, S, T = self.src.cat, self.src, self.dst
        out = []
        for n, m in enumerate(self.comp):
            out.extend(f"level {n}: {p}" for p in m.check(cat))
        if out:
            return out
        for (n, i), d in S.faces.items():
            if d.then(self.comp[n - 1], cat).parts != self.comp[n].then(T.d(n, i), cat).parts:
                out.append(f"does not commute with d_{i} on level {n}")
        for (n, i), s in S.degens.items():
            if s.then(self.comp[n + 1], cat).parts != self.comp[n].then(T.s(n, i), cat).parts:
                out.append(f"does not commute with s_{i} on level {n}")
        return out


def identity_simplicial_map(S: TruncatedSimplicialObject) -> SimplicialMap:
    return SimplicialMap(S, S, [identity_map(S.cat, lv) for lv in S.levels])


@dataclass
class SimplicialHomotopy:
    """Maps ``h[(n, j)]: S_n -> T_{n+1}`` for ``0 ≤ j ≤ n < N`` with
    ``d_0 h_0 = f`` and ``d_{n+1} h_n = g``."""

    f: SimplicialMap
    g: SimplicialMap
    h: dict[tuple[int, int], FormalMap]


def check_homotopy(H: SimplicialHomotopy) -> list[str]:
    """Every failing instance of the homotopy identities up to the truncation."""
    S, T = H.f.src, H.f.dst
    cat, N = S.cat, S.N
    out = []
    eq = lambda a, b: a.parts == b.parts
    for n in range(N):
        for j in range(n + 1):
            hj = H.h[(n, j)]
            out.extend(f"h_{j} on level {n}: {p}" for p in hj.check(cat))
    if out:
        return out
    for n in range(N):
        if not eq(H.h[(n, 0)].then(T.d(n + 1, 0), cat), H.f.comp[n]):
            out.append(f"d_0 h_0 ≠ f on level {n}")
        if not eq(H.h[(n, n)].then(T.d(n + 1, n + 1), cat), H.g.comp[n]):
            out.append(f"d_{n + 1} h_{n} ≠ g on level {n}")
        for j in range(n + 1):
            hj = H.h[(n, j)]
            for i in range(n + 2):
                lhs = hj.then(T.d(n + 1, i), cat)
                if i < j:
                    rhs = S.d(n, i).then(H.h[(n - 1, j - 1)], cat)
                elif i == j and j > 0:
                    rhs = H.h[(n, j - 1)].then(T.d(n + 1, i), cat)
                elif i > j + 1:
                    rhs = S.d(n, i - 1).then(H.h[(n - 1, j)], cat)
                else:
                    continue
                if not eq(lhs, rhs):
                    out.append(f"d_{i} h_{j} identity fails on level {n}")
            if n + 1 < N:
                for i in range(n + 2):
                    lhs = hj.then(T.s(n + 1, i), cat)
                    if i <= j:
                        rhs = S.s(n, i).then(H.h[(n + 1, j + 1)], cat)
                    else:
                        rhs = S.s(n, i - 1).then(H.h[(n + 1, j)], cat)
                    if not eq(lhs, rhs):
                        out.append(f"s_{i} h_{j} identity fails on level {n}")
    return out


# -- K_Q ----------------------------------------------------------------------------

@dataclass
class KQ:
    """``K_Q`` and its augmentation ``p_Q`` to ``X`` (level-0 map)."""

    obj: TruncatedSimplicialObject
    square: Square
    augmentation: FormalMap

    def to_constant(self) -> SimplicialMap:
        cat = self.obj.cat
        X = constant_object(cat, self.square.x, self.obj.N)
        comp = []
        for n, lv in enumerate(self.obj.levels):
            parts = []
            for k, c in enumerate(lv):
                parts.append((0, self._leg(n, k)))
            comp.append(FormalMap(lv, (self.square.x,), tuple(parts)))
        return SimplicialMap(self.obj, X, comp)

    def _leg(self, n: int, k: int) -> str:
        q, cat = self.square, self.obj.cat
        if k == 0:
            return q.e
        if k == 1:
            return q.p
        return cat.compose(q.e, q.b_to_a)


def _kq_index(q: Square, level: int, zeros: int) -> tuple[int, str]:
    """Summand of level ``level`` for the Δ¹-simplex with ``zeros`` leading
    zeros, and the morphism from ``B`` to it."""
    if zeros == level + 1:
        return 0, q.b_to_a
    if zeros == 0:
        return 1, q.b_to_y
    return 1 + zeros, None


def build_KQ(q: Square, cat: FiniteCategory, N: int = 3) -> KQ:
    """Level ``n`` is ``A ⊔ Y ⊔ B_1 ⊔ … ⊔ B_n``: the non-constant ``n``-simplices
    ``0^k 1^{n+1-k}`` of ``Δ¹`` times ``B``, glued to ``A`` (all zeros) and
    ``Y`` (all ones)."""
    levels = [(q.a, q.y) + (q.b,) * n for n in range(N + 1)]
    faces, degens = {}, {}

    def route(level: int, zeros: int) -> tuple[int, str]:
        idx, m = _kq_index(q, level, zeros)
        return idx, (m or cat.identity(q.b))

    for n in range(1, N + 1):
        for i in range(n + 1):
            parts = [(0, cat.identity(q.a)), (1, cat.identity(q.y))]
            for k in range(1, n + 1):
                parts.append(route(n - 1, k - 1 if i < k else k))
            faces[(n, i)] = FormalMap(levels[n], levels[n - 1], tuple(parts))
    for n in range(N):
        for i in range(n + 1):
            parts = [(0, cat.identity(q.a)), (1, cat.identity(q.y))]
            for k in range(1, n + 1):
                parts.append(route(n + 1, k + 1 if i < k else k))
            degens[(n, i)] = FormalMap(levels[n], levels[n + 1], tuple(parts))
    obj = TruncatedSimplicialObject(cat, levels, faces, degens, name=f"K({q.label()})")
    aug = FormalMap(levels[0], (q.x,), ((0, q.e), (0, q.p)))
    return KQ(obj, q, aug)


def kq_homotopy_inverse(K: KQ) -> tuple[SimplicialMap, SimplicialHomotopy]:
    """For ``e`` and ``b_to_y`` invertible: ``g: X -> K_Q`` with ``p_Q g = id``
    and a homotopy from ``id`` to ``g p_Q``.

    The homotopy is ``h_j(σ) = s_j σ ∧ 0^{j+1}1^{n+1-j}`` on the ``Δ¹``
    coordinate, with ``Y`` read as the ``1`` end of ``B × Δ¹``.
    """
    q, S = K.square, K.obj
    cat, N = S.cat, S.N
    e_inv, by_inv = inverse(cat, q.e), inverse(cat, q.b_to_y)
    if e_inv is None or by_inv is None:
        raise CategoryError("homotopy inverse needs e and b_to_y invertible")
    X = constant_object(cat, q.x, N)
    g = SimplicialMap(X, S, [FormalMap((q.x,), lv, ((0, e_inv),)) for lv in S.levels])
    p = K.to_constant()
    gp = p.then(g)
    h = {}
    for n in range(N):
        src, dst = S.levels[n], S.levels[n + 1]
        for j in range(n + 1):
            row = [(0, cat.identity(q.a))]
            # Y-points sit at the 1 end, so they land on τ_j itself
            row.append(_to_b(cat, q, n + 1, j + 1, by_inv))
            for k in range(1, n + 1):
                zs = k + 1 if j < k else k
                row.append(_to_b(cat, q, n + 1, max(zs, j + 1), cat.identity(q.b)))
            h[(n, j)] = FormalMap(src, dst, tuple(row))
    return g, SimplicialHomotopy(identity_simplicial_map(S), gp, h)


def _to_b(cat: FiniteCategory, q: Square, level: int, zeros: int, m: str) -> tuple[int, str]:
    """Send a ``B``-point (through ``m`` into ``B``) to the simplex with ``zeros`` zeros."""
    idx, via = _kq_index(q, level, zeros)
    return idx, (cat.compose(via, m) if via else m)


# -- Čech nerves ------------------------------------------------------------------------

@dataclass
class CechNerve:
    obj: TruncatedSimplicialObject
    morphism: str
    cones: list  # the fiber power cone at each level

    def augmentation(self) -> SimplicialMap:
        cat = self.obj.cat
        y = cat.target(self.morphism)
        Y = constant_object(cat, y, self.obj.N)
        comp = [
            FormalMap(lv, (y,), ((0, cat.compose(self.morphism, self.cones[n].legs[0])),))
            for n, lv in enumerate(self.obj.levels)
        ]
        return SimplicialMap(self.obj, Y, comp)


def cech_nerve(cat: FiniteCategory, f: str, N: int = 3) -> CechNerve:
    """Level ``n`` is the ``(n+1)``-fold fiber power of ``f``; faces drop a
    factor and degeneracies repeat one."""
    cones = []
    for n in range(N + 1):
        c = wide_pullback(cat, [f] * (n + 1))
        if c is None:
            raise Inapplicable(f"the {n + 1}-fold fiber power of {f} does not exist")
        cones.append(c)
    levels = [(c.apex,) for c in cones]
    faces, degens = {}, {}
    for n in range(1, N + 1):
        legs = cones[n].legs
        for i in range(n + 1):
            m = mediating(cat, cones[n - 1], legs[:i] + legs[i + 1:])
            faces[(n, i)] = FormalMap(levels[n], levels[n - 1], ((0, m),))
    for n in range(N):
        legs = cones[n].legs
        for i in range(n + 1):
            m = mediating(cat, cones[n + 1], legs[:i + 1] + legs[i:])
            degens[(n, i)] = FormalMap(levels[n], levels[n + 1], ((0, m),))
    obj = TruncatedSimplicialObject(cat, levels, faces, degens, name=f"Č({f})")
    return CechNerve(obj, f, cones)


def section_homotopy_witness(cat: FiniteCategory, f: str, s: str, N: int = 3) -> tuple[SimplicialMap, SimplicialHomotopy, CechNerve]:
    """From a section ``s`` of ``f``: the map ``σ: Y -> Č(f)`` and a homotopy
    ``h_j(x_0..x_n) = (x_0..x_j, s f x_0, …, s f x_0)`` from ``σ η`` to the
    identity of ``Č(f)``."""
    if cat.compose(f, s) != cat.identity(cat.target(f)):
        raise CategoryError(f"{s} is not a section of {f}")
    C = cech_nerve(cat, f, N)
    y = cat.target(f)
    Y = constant_object(cat, y, N)
    sigma = SimplicialMap(Y, C.obj, [
        FormalMap((y,), C.obj.levels[n], ((0, mediating(cat, C.cones[n], [s] * (n + 1))),))
        for n in range(N + 1)
    ])
    eta = C.augmentation()
    h = {}
    for n in range(N):
        legs = C.cones[n].legs
        back = cat.compose(s, cat.compose(f, legs[0]))
        for j in range(n + 1):
            m = mediating(cat, C.cones[n + 1], list(legs[:j + 1]) + [back] * (n + 1 - j))
            h[(n, j)] = FormalMap(C.obj.levels[n], C.obj.levels[n + 1], ((0, m),))
    H = SimplicialHomotopy(eta.then(sigma), identity_simplicial_map(C.obj), h)
    return sigma, H, C


# -- π0 -------------------------------------------------------------------------------------

def level_presheaf(S: TruncatedSimplicialObject, n: int) -> SetPresheaf:
    """The coproduct of representables of the summands of level ``n``."""
    return coproduct_presheaf([representable(S.cat, x) for x in S.levels[n]], name=f"{S.name}_{n}")


def formal_map_presheaf(S: TruncatedSimplicialObject, m: FormalMap, src: SetPresheaf, dst: SetPresheaf) -> SetMorphism:
    cat = S.cat
    comp = {
        u: {(k, g): (m.parts[k][0], cat.compose(m.parts[k][1], g)) for k, g in src(u)}
        for u in cat.objects
    }
    return SetMorphism(src, dst, comp)


def pi0(S: TruncatedSimplicialObject) -> tuple[SetPresheaf, SetMorphism]:
    """Objectwise coequalizer of ``d_0, d_1: S_1 ⇉ S_0`` and the quotient map."""
    if S.N < 1:
        raise ValueError("π0 needs truncation at least 1")
    L0, L1 = level_presheaf(S, 0), level_presheaf(S, 1)
    d0 = formal_map_presheaf(S, S.d(1, 0), L1, L0)
    d1 = formal_map_presheaf(S, S.d(1, 1), L1, L0)
    pairs = {u: [(d0(u, t), d1(u, t)) for t in L1(u)] for u in S.cat.objects}
    return quotient_presheaf(L0, pairs, name=f"π0({S.name})")


def wp_pi0_check(q: Square, P: CdStructure, N: int = 1) -> Verdict:
    """``a π0(K_Q) -> ρ(X)`` is an isomorphism of sheaves."""
    from .sheaves import rho, sheafify_morphism
    from .topology import cd_topology

    cat = P.cat
    K = build_KQ(q, cat, max(N, 1))
    pz, quot = pi0(K.obj)
    hx = representable(cat, q.x)
    comp = {}
    for u in cat.objects:
        comp[u] = {}
        for t, r in quot.comp[u].items():
            k, g = t
            comp[u][r] = cat.compose(K.augmentation.parts[k][1], g)
    can = SetMorphism(pz, hx, comp)
    bad = can.validate()
    if bad:
        return Verdict(False, f"{q.label()}: augmentation does not factor through π0: {bad[0]}")
    a = sheafify_morphism(can, cd_topology(P))
    if not a.is_iso():
        return Verdict(False, f"{q.label()}: a π0(K_Q) -> ρX is not an isomorphism")
    return Verdict(True, f"{q.label()}: a π0(K_Q) ≅ ρX")


@dataclass
class WP:
    """The generating maps: each ``p_Q: K_Q -> X`` and ``0' -> 0``."""

    maps: list[KQ]
    empty_to_initial: Optional[str]


def build_WP(P: CdStructure, N: int = 3) -> WP:
    from .fincat import initial_object

    return WP([build_KQ(q, P.cat, N) for q in P.squares], initial_object(P.cat))
