"""Sheaf conditions and sheafification on a finite site.

On a finite site every object ``X`` has a smallest covering sieve ``M_X``
(the intersection of all of them).  The plus construction's colimit over
covering sieves therefore stops at ``M_X``: ``F+(X)`` is the set of
matching families on ``M_X``, and two rounds give the associated sheaf.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional, Sequence

import numpy as np

from .abelian import (
    AbGroup,
    Subquotient,
    block_diag,
    direct_sum,
    image_contains,
    is_injective,
    is_isomorphism as ab_is_iso,
    is_zero_map,
    kernel,
    mat,
    zeros,
)
from .fincat import FiniteCategory, Square, initial_objects
from .presheaves import (
    AbMorphism,
    AbPresheaf,
    SetMorphism,
    SetPresheaf,
    _key,
    coproduct_presheaf,
    fiber_product_presheaf,
    free_morphism,
    free_presheaf,
    natural_transformations,
    pushout_presheaf,
    representable,
    representable_map,
)
from .topology import CdStructure, Sieve, Topology, Verdict, cd_topology, square_morphisms


# -- matching families ------------------------------------------------------------

def _children(cat: FiniteCategory, members: Sequence[str]) -> dict[str, list[tuple[str, str]]]:
    return {
        f: [(g, cat.compose(f, g)) for g in cat.morphisms_into(cat.source(f)) if not cat.is_identity(g)]
        for f in members
    }


def matching_families(F: SetPresheaf, sieve: Sieve) -> Iterator[dict]:
    """Every compatible family ``{f: s_f}`` on the sieve.

    Branches on one undetermined member at a time and propagates the
    forced values ``s_{f∘g} = F(g)(s_f)``.
    """
    cat = F.cat
    members = sieve.sorted_members()
    kids = _children(cat, members)
    order = sorted(members, key=lambda f: (-len(kids[f]), f))

    def assign(val: dict, f: str, s) -> bool:
        stack = [(f, s)]
        while stack:
            f, s = stack.pop()
            if f in val:
                if val[f] != s:
                    return False
                continue
            val[f] = s
            for g, h in kids[f]:
                stack.append((h, F.res(g, s)))
        return True

    def go(i: int, val: dict):
        while i < len(order) and order[i] in val:
            i += 1
        if i == len(order):
            yield dict(val)
            return
        f = order[i]
        for s in F(cat.source(f)):
            nxt = dict(val)
            if assign(nxt, f, s):
                yield from go(i + 1, nxt)

    yield from go(0, {})


def family_of(F: SetPresheaf, sieve: Sieve, s) -> dict:
    return {f: F.res(f, s) for f in sieve.members}


def is_sheaf(F: SetPresheaf, top: Topology) -> Verdict:
    """Unique amalgamation for every matching family on each minimal covering sieve.

    This suffices: a covering sieve contains the minimal one, whose pullbacks
    contain the minimal sieves of their sources, so amalgamations on the
    minimal sieves are amalgamations on every covering sieve.
    """
    cat = F.cat
    for x in cat.objects:
        S = top.minimal_sieve(x)
        members = S.sorted_members()
        seen = {}
        for s in F(x):
            key = tuple(F.res(f, s) for f in members)
            if key in seen:
                return Verdict(False, f"sections {seen[key]!r} and {s!r} of F({x}) agree on a covering sieve",
                               (x, S))
            seen[key] = s
        n = sum(1 for _ in matching_families(F, S))
        if n != len(seen):
            return Verdict(False, f"a matching family on a covering sieve of {x} has no amalgamation", (x, S))
    return Verdict(True, "every matching family on every covering sieve amalgamates uniquely")


def is_separated(F: SetPresheaf, top: Topology) -> bool:
    cat = F.cat
    for x in cat.objects:
        members = top.minimal_sieve(x).sorted_members()
        keys = {tuple(F.res(f, s) for f in members) for s in F(x)}
        if len(keys) != len(F(x)):
            return False
    return True


# -- plus construction (sets) -------------------------------------------------------

def plus(F: SetPresheaf, top: Topology) -> tuple[SetPresheaf, SetMorphism]:
    """``F+`` with sections the matching families on ``M_X`` (as tuples
    ordered by the sorted sieve members) and the canonical map ``F -> F+``."""
    cat = F.cat
    M = {x: top.minimal_sieve(x).sorted_members() for x in cat.objects}
    pos = {x: {f: i for i, f in enumerate(M[x])} for x in cat.objects}
    at = {}
    for x in cat.objects:
        fams = [tuple(fam[f] for f in M[x]) for fam in matching_families(F, top.minimal_sieve(x))]
        at[x] = sorted(fams, key=_key)

    def restrict(h: str, fam: tuple) -> tuple:
        w, x = cat.source(h), cat.target(h)
        return tuple(fam[pos[x][cat.compose(h, g)]] for g in M[w])

    Fp = SetPresheaf(cat, at, restrict, name=f"{F.name}+")
    unit = SetMorphism(F, Fp, {x: {s: tuple(F.res(f, s) for f in M[x]) for s in F(x)} for x in cat.objects})
    return Fp, unit


def plus_morphism(phi: SetMorphism, Fp: SetPresheaf, Gp: SetPresheaf, top: Topology) -> SetMorphism:
    cat = phi.src.cat
    comp = {}
    for x in cat.objects:
        M = top.minimal_sieve(x).sorted_members()
        comp[x] = {fam: tuple(phi(cat.source(f), a) for f, a in zip(M, fam)) for fam in Fp(x)}
    return SetMorphism(Fp, Gp, comp)


def sheafify(F: SetPresheaf, top: Topology) -> tuple[SetPresheaf, SetMorphism]:
    """The associated sheaf ``aF = F++`` and the unit ``F -> aF``."""
    Fp, u1 = plus(F, top)
    Fpp, u2 = plus(Fp, top)
    Fpp.name = f"a({F.name})"
    return Fpp, u1.then(u2)


def sheafify_morphism(phi: SetMorphism, top: Topology) -> SetMorphism:
    Fp, _ = plus(phi.src, top)
    Gp, _ = plus(phi.dst, top)
    p1 = plus_morphism(phi, Fp, Gp, top)
    Fpp, _ = plus(Fp, top)
    Gpp, _ = plus(Gp, top)
    return plus_morphism(p1, Fpp, Gpp, top)


def is_locally_surjective(phi: SetMorphism, top: Topology) -> Verdict:
    cat = phi.src.cat
    for w in cat.objects:
        members = top.minimal_sieve(w).sorted_members()
        for t in phi.dst(w):
            for f in members:
                u = cat.source(f)
                if phi.dst.res(f, t) not in set(phi.comp[u].values()):
                    return Verdict(False, f"section {t!r} over {w} is not locally in the image", (w, t))
    return Verdict(True, "locally surjective")


def factor_through_unit(unit: SetMorphism, phi: SetMorphism) -> Optional[SetMorphism]:
    """The unique ``psi: aF -> G`` with ``psi ∘ unit = phi`` for a sheaf ``G``,
    obtained by enumerating maps ``aF -> G``; ``None`` if none or several."""
    hits = [psi for psi in natural_transformations(unit.dst, phi.dst) if unit.then(psi) == phi]
    return hits[0] if len(hits) == 1 else None


# -- representables, rho -----------------------------------------------------------

def rho(P: CdStructure, x: str) -> tuple[SetPresheaf, SetMorphism]:
    """The sheaf associated to ``Hom(-, x)`` with its unit."""
    cache = P._cache.setdefault("rho", {})
    if x not in cache:
        cache[x] = sheafify(representable(P.cat, x), cd_topology(P))
    return cache[x]


def rho_map(P: CdStructure, f: str) -> SetMorphism:
    cache = P._cache.setdefault("rho_map", {})
    if f not in cache:
        top = cd_topology(P)
        m = sheafify_morphism(representable_map(P.cat, f), top)
        src, _ = rho(P, P.cat.source(f))
        dst, _ = rho(P, P.cat.target(f))
        cache[f] = SetMorphism(src, dst, m.comp)
    return cache[f]


def regularity_epi_check(P: CdStructure, q: Square) -> Verdict:
    """Surjectivity of ``ρY ⊔ ρB×_ρA ρB -> ρY×_ρX ρY`` as a map of sheaves."""
    top = cd_topology(P)
    rY, _ = rho(P, q.y)
    rB, _ = rho(P, q.b)
    rp, rba, rby = rho_map(P, q.p), rho_map(P, q.b_to_a), rho_map(P, q.b_to_y)
    target = fiber_product_presheaf(rp, rp)
    bb = fiber_product_presheaf(rba, rba)
    source = coproduct_presheaf([rY, bb])
    comp = {}
    for w in P.cat.objects:
        m = {}
        for i, s in source(w):
            if i == 0:
                m[(i, s)] = (s, s)
            else:
                m[(i, s)] = (rby(w, s[0]), rby(w, s[1]))
        comp[w] = m
    phi = SetMorphism(source, target, comp)
    v = is_locally_surjective(phi, top)
    if not v:
        return Verdict(False, f"{q.label()}: diagonal map is not surjective as a map of sheaves ({v.reason})", v.witness)
    return Verdict(True, f"{q.label()}: diagonal map is surjective as a map of sheaves")


# -- square-wise criteria ---------------------------------------------------------

def square_is_pullback_of_sets(F: SetPresheaf, q: Square) -> bool:
    """``F(X) -> F(A) ×_{F(B)} F(Y)`` is a bijection."""
    fib = {
        (a, y) for a in F(q.a) for y in F(q.y) if F.res(q.b_to_a, a) == F.res(q.b_to_y, y)
    }
    img = [(F.res(q.e, s), F.res(q.p, s)) for s in F(q.x)]
    return len(set(img)) == len(img) and set(img) == fib


def cd_sheaf_criterion(F: SetPresheaf, P: CdStructure) -> Verdict:
    for i in initial_objects(P.cat):
        if F.size(i) != 1:
            return Verdict(False, f"F({i}) has {F.size(i)} elements, not one", i)
    for q in P.squares:
        if not square_is_pullback_of_sets(F, q):
            return Verdict(False, f"F({q.label()}) is not a pull-back of sets", q)
    return Verdict(True, "F(initial) is a point and every F(Q) is a pull-back")


def pushout_check(P: CdStructure, q: Square) -> Verdict:
    """The sheafified presheaf push-out of ``ρA <- ρB -> ρY`` maps
    isomorphically onto ``ρX``."""
    top = cd_topology(P)
    po, ia, iy = pushout_presheaf(rho_map(P, q.b_to_a), rho_map(P, q.b_to_y))
    re, rp = rho_map(P, q.e), rho_map(P, q.p)
    comp = {}
    for w in P.cat.objects:
        m = {}
        for a, r in ia.comp[w].items():
            m[r] = re(w, a)
        for y, r in iy.comp[w].items():
            m[r] = rp(w, y)
        comp[w] = m
    can = SetMorphism(po, rho(P, q.x)[0], comp)
    bad = can.validate()
    if bad:
        return Verdict(False, f"{q.label()}: canonical map is ill-defined: {bad[0]}")
    # ρX is already a sheaf, so its own sheafification is a relabelled copy
    if not sheafify_morphism(can, top).is_iso():
        return Verdict(False, f"{q.label()}: a(ρA ⊔_ρB ρY) -> ρX is not an isomorphism")
    return Verdict(True, f"{q.label()}: ρ of the square is a push-out of sheaves")


def compactness_check(P: CdStructure, u: str, chain: Sequence[SetMorphism]) -> Verdict:
    """``Hom(ρU, -)`` commutes with the colimit of a finite chain of sheaf
    inclusions ``F_0 -> F_1 -> ... -> F_n``.

    The colimit is computed as the sheafified presheaf colimit and compared
    with the union of the images of ``Hom(ρU, F_i)``.
    """
    top = cd_topology(P)
    rU, _ = rho(P, u)
    last = chain[-1].dst if chain else None
    if last is None:
        return Verdict(True, "empty chain")
    colim, unit = sheafify(last, top)
    into_colim = {
        tuple(sorted((w, repr(sorted(c.items(), key=_key))) for w, c in m.comp.items()))
        for m in natural_transformations(rU, colim)
    }
    stages = [chain[0].src] + [m.dst for m in chain]
    to_last = []
    acc = None
    for m in reversed(chain):
        acc = m if acc is None else m.then(acc)
        to_last.append(acc)
    to_last = list(reversed(to_last)) + [None]
    reached = set()
    for F, inc in zip(stages, to_last):
        for m in natural_transformations(rU, F):
            full = m if inc is None else m.then(inc)
            full = full.then(unit)
            reached.add(tuple(sorted((w, repr(sorted(c.items(), key=_key))) for w, c in full.comp.items())))
    if reached != into_colim:
        return Verdict(False, f"Hom(ρ{u}, colim) differs from colim Hom(ρ{u}, -)")
    return Verdict(True, f"Hom(ρ{u}, -) preserves the chain colimit ({len(reached)} maps)")


# -- abelian plus construction ---------------------------------------------------------

@dataclass
class AbPlus:
    """``F+`` together with the lattice data each group was cut out of."""

    sheaf: AbPresheaf
    unit: AbMorphism
    members: dict[str, list[str]]
    offsets: dict[str, list[int]]
    matched: dict[str, Subquotient]


def _stack(blocks: Sequence[np.ndarray], cols: int) -> np.ndarray:
    if not blocks:
        return zeros(0, cols)
    return np.vstack(blocks)


def ab_matching(F: AbPresheaf, sieve: Sieve) -> tuple[Subquotient, list[str], list[int]]:
    """Matching families on a sieve as a subquotient of ``⊕_{f∈S} F(dom f)``."""
    cat = F.cat
    members = sieve.sorted_members()
    offs, n = [], 0
    for f in members:
        offs.append(n)
        n += F(cat.source(f)).ngens
    amb = direct_sum([F(cat.source(f)) for f in members])
    pos = {f: i for i, f in enumerate(members)}
    rows, tgt = [], []
    for f in members:
        u = cat.source(f)
        for g in cat.morphisms_into(u):
            if cat.is_identity(g):
                continue
            h = cat.compose(f, g)
            d = F(cat.source(g))
            blk = zeros(d.ngens, n)
            i, j = pos[f], pos[h]
            blk[:, offs[i]:offs[i] + F(u).ngens] = F.res(g)
            blk[:, offs[j]:offs[j] + d.ngens] -= np.eye(d.ngens, dtype=int).astype(object)
            rows.append(blk)
            tgt.append(d)
    sq = kernel(amb, direct_sum(tgt), _stack(rows, n))
    return sq, members, offs


def _restriction_stack(F: AbPresheaf, members: Sequence[str], cols: int) -> np.ndarray:
    return _stack([F.res(f) for f in members], cols)


def is_ab_sheaf(F: AbPresheaf, top: Topology) -> Verdict:
    cat = F.cat
    for x in cat.objects:
        for S in top.sieves(x):
            sq, members, _ = ab_matching(F, S)
            m = _restriction_stack(F, members, F(x).ngens)
            coords = _coords_matrix(sq, m)
            if not ab_is_iso(F(x), sq.group, coords):
                return Verdict(False, f"F({x}) -> Match(S, F) is not an isomorphism for a covering sieve", (x, S))
    return Verdict(True, "abelian sheaf condition holds on every covering sieve")


def _coords_matrix(sq: Subquotient, m: np.ndarray) -> np.ndarray:
    cols = [sq.coordinates(m[:, j]) for j in range(m.shape[1])]
    if not cols:
        return zeros(sq.group.ngens, 0)
    return mat([list(c) for c in cols], (len(cols), sq.group.ngens)).T.copy()


def ab_plus(F: AbPresheaf, top: Topology) -> AbPlus:
    cat = F.cat
    matched, members, offsets = {}, {}, {}
    for x in cat.objects:
        matched[x], members[x], offsets[x] = ab_matching(F, top.minimal_sieve(x))
    groups = {x: matched[x].group for x in cat.objects}

    def restrict(h: str) -> np.ndarray:
        w, x = cat.source(h), cat.target(h)
        big = matched[x].ambient
        pos = {f: i for i, f in enumerate(members[x])}
        blocks = []
        for g in members[w]:
            blk = zeros(F(cat.source(g)).ngens, big)
            i = pos[cat.compose(h, g)]
            o = offsets[x][i]
            blk[:, o:o + blk.shape[0]] = np.eye(blk.shape[0], dtype=int).astype(object)
            blocks.append(blk)
        r = _stack(blocks, big)
        return _coords_matrix(matched[w], r.dot(matched[x].basis))

    Fp = AbPresheaf(cat, groups, restrict, name=f"{F.name}+")
    unit = AbMorphism(F, Fp, {
        x: _coords_matrix(matched[x], _restriction_stack(F, members[x], F(x).ngens)) for x in cat.objects
    })
    return AbPlus(Fp, unit, members, offsets, matched)


def ab_plus_morphism(phi: AbMorphism, src: AbPlus, dst: AbPlus) -> AbMorphism:
    cat = phi.src.cat
    comp = {}
    for x in cat.objects:
        big = block_diag(*[phi(cat.source(f)) for f in src.members[x]]) if src.members[x] else zeros(0, 0)
        comp[x] = _coords_matrix(dst.matched[x], big.dot(src.matched[x].basis))
    return AbMorphism(src.sheaf, dst.sheaf, comp)


@dataclass
class AbSheafification:
    sheaf: AbPresheaf
    unit: AbMorphism
    stages: tuple[AbPlus, AbPlus] = field(repr=False)


def ab_sheafify(F: AbPresheaf, top: Topology) -> AbSheafification:
    s1 = ab_plus(F, top)
    s2 = ab_plus(s1.sheaf, top)
    s2.sheaf.name = f"a({F.name})"
    return AbSheafification(s2.sheaf, s1.unit.then(s2.unit), (s1, s2))


def ab_sheafify_morphism(phi: AbMorphism, src: AbSheafification, dst: AbSheafification) -> AbMorphism:
    m1 = ab_plus_morphism(phi, src.stages[0], dst.stages[0])
    return ab_plus_morphism(m1, src.stages[1], dst.stages[1])


def free_abelian(F: SetPresheaf, top: Topology) -> AbSheafification:
    """The abelian sheaf freely generated by ``F``."""
    Z, _ = free_presheaf(F)
    out = ab_sheafify(Z, top)
    out.sheaf.name = f"Z({F.name})"
    return out


def free_abelian_morphism(phi: SetMorphism, src: AbSheafification, dst: AbSheafification) -> AbMorphism:
    m = free_morphism(phi, free_presheaf(phi.src), free_presheaf(phi.dst))
    return ab_sheafify_morphism(m, src, dst)


def z_rho(P: CdStructure, x: str) -> AbSheafification:
    cache = P._cache.setdefault("z_rho", {})
    if x not in cache:
        cache[x] = free_abelian(rho(P, x)[0], cd_topology(P))
        cache[x].sheaf.name = f"Z(ρ{x})"
    return cache[x]


def z_rho_map(P: CdStructure, f: str) -> AbMorphism:
    cache = P._cache.setdefault("z_rho_map", {})
    if f not in cache:
        cache[f] = free_abelian_morphism(rho_map(P, f), z_rho(P, P.cat.source(f)), z_rho(P, P.cat.target(f)))
    return cache[f]


# -- Mayer–Vietoris short exact sequence ---------------------------------------------

def locally_in_image(F: AbPresheaf, phi: AbMorphism, w: str, v, top: Topology) -> bool:
    """Every restriction of ``v ∈ F(w)`` along ``M_w`` lies in the image of ``phi``."""
    cat = F.cat
    for f in top.minimal_sieve(w).members:
        u = cat.source(f)
        if not image_contains(phi(u), F(u), F.res(f).dot(v)):
            return False
    return True


@dataclass
class MVSequence:
    """``0 -> Z(ρB) --α--> Z(ρA) ⊕ Z(ρY) --β--> Z(ρX) -> 0`` with
    ``α = (Z(b_to_a), -Z(b_to_y))`` and ``β = (Z(e), Z(p))``."""

    zb: AbPresheaf
    mid: AbPresheaf
    zx: AbPresheaf
    alpha: AbMorphism
    beta: AbMorphism


def mv_sequence(P: CdStructure, q: Square) -> MVSequence:
    cat = P.cat
    zb, za, zy, zx = (z_rho(P, c).sheaf for c in (q.b, q.a, q.y, q.x))
    from .presheaves import direct_sum_ab

    mid = direct_sum_ab([za, zy], name="Z(ρA)+Z(ρY)")
    fa, fy, fe, fp = (z_rho_map(P, m) for m in (q.b_to_a, q.b_to_y, q.e, q.p))
    alpha = AbMorphism(zb, mid, {w: np.vstack([fa(w), -fy(w)]) for w in cat.objects})
    beta = AbMorphism(mid, zx, {w: np.hstack([fe(w), fp(w)]) for w in cat.objects})
    return MVSequence(zb, mid, zx, alpha, beta)


def verify_mv_short_exact(q: Square, P: CdStructure, require_regular: bool = True) -> Verdict:
    from .topology import is_regular

    if require_regular:
        reg = P._cache.get("regular")
        if reg is None:
            reg = P._cache["regular"] = is_regular(P)
        if not reg:
            return Verdict(False, f"precondition violated: cd-structure is not regular ({reg.reason})")
    top = cd_topology(P)
    s = mv_sequence(P, q)
    for w in P.cat.objects:
        if not is_injective(s.zb(w), s.mid(w), s.alpha(w)):
            return Verdict(False, f"{q.label()}: Z(ρB)({w}) -> middle is not injective", w)
        if not is_zero_map(s.beta(w).dot(s.alpha(w)), s.zx(w)):
            return Verdict(False, f"{q.label()}: β∘α ≠ 0 at {w}", w)
        ker = kernel(s.mid(w), s.zx(w), s.beta(w))
        for j in range(ker.basis.shape[1]):
            if not locally_in_image(s.mid, s.alpha, w, ker.basis[:, j], top):
                return Verdict(False, f"{q.label()}: kernel of β at {w} not locally in the image of α", w)
        n = s.zx(w).ngens
        for j in range(n):
            v = np.eye(n, dtype=int).astype(object)[:, j]
            if not locally_in_image(s.zx, s.beta, w, v, top):
                return Verdict(False, f"{q.label()}: β is not locally surjective at {w}", w)
    return Verdict(True, f"{q.label()}: 0 -> Z(ρB) -> Z(ρA)+Z(ρY) -> Z(ρX) -> 0 is exact")


# -- B.G.-functors ------------------------------------------------------------------

@dataclass
class PointedPresheaf:
    presheaf: SetPresheaf
    base: dict[str, object]

    def validate(self) -> list[str]:
        F, out = self.presheaf, self.presheaf.validate()
        for f in F.cat.morphisms:
            if F.res(f, self.base[F.cat.target(f)]) != self.base[F.cat.source(f)]:
                out.append(f"restriction along {f} does not preserve base points")
        return out


@dataclass
class BGFunctor:
    """Pointed presheaves ``T_0..T_N`` and, per distinguished square and
    ``q < N``, a boundary ``T_{q+1}(B) -> T_q(X)``."""

    levels: list[PointedPresheaf]
    boundaries: dict[str, dict[int, dict]]

    @property
    def top(self) -> int:
        return len(self.levels) - 1

    def validate(self, P: CdStructure) -> list[str]:
        out = []
        for q_, T in enumerate(self.levels):
            out.extend(f"T_{q_}: {m}" for m in T.validate())
        if out:
            return out
        for sq in P.squares:
            bd = self.boundaries.get(sq.label())
            if bd is None:
                out.append(f"no boundary for square {sq.label()}")
                continue
            for q_ in range(self.top):
                d = bd.get(q_)
                T1, T0 = self.levels[q_ + 1], self.levels[q_]
                if d is None or set(d) != set(T1.presheaf(sq.b)):
                    out.append(f"∂ for {sq.label()} at level {q_} is not defined on T_{q_ + 1}(B)")
                    continue
                if d[T1.base[sq.b]] != T0.base[sq.x]:
                    out.append(f"∂ for {sq.label()} at level {q_} is not pointed")
                F = T0.presheaf
                pre = {
                    s for s in F(sq.x)
                    if F.res(sq.e, s) == T0.base[sq.a] and F.res(sq.p, s) == T0.base[sq.y]
                }
                if set(d.values()) != pre:
                    out.append(f"exactness fails at T_{q_}({sq.x}) for {sq.label()}")
        if out:
            return out
        for q1 in P.squares:
            for q2 in P.squares:
                for mor in square_morphisms(P.cat, q1, q2):
                    fb, fx = mor[0], mor[3]
                    for q_ in range(self.top):
                        T1, T0 = self.levels[q_ + 1].presheaf, self.levels[q_].presheaf
                        d1, d2 = self.boundaries[q1.label()][q_], self.boundaries[q2.label()][q_]
                        for s in T1(q2.b):
                            if T0.res(fx, d2[s]) != d1[T1.res(fb, s)]:
                                out.append(f"∂ not natural for a map {q1.label()} -> {q2.label()} at level {q_}")
                                break
        return out


def locally_trivial(T: PointedPresheaf, top: Topology) -> bool:
    """The associated sheaf is the point: each section is locally the base point."""
    F = T.presheaf
    cat = F.cat
    for w in cat.objects:
        for s in F(w):
            for f in top.minimal_sieve(w).members:
                if F.res(f, s) != T.base[cat.source(f)]:
                    return False
    return True


def bg_check(T: BGFunctor, P: CdStructure, D=None) -> Verdict:
    """Trivial associated sheaves and ``T_q(∅) = pt`` force ``T_q = pt``
    for ``q < N`` on a complete bounded site."""
    from .topology import is_complete

    bad = T.validate(P)
    if bad:
        return Verdict(False, f"invalid B.G.-functor: {bad[0]}", details={"violations": bad})
    if not is_complete(P):
        return Verdict(False, "hypothesis not met: cd-structure is not complete")
    if D is not None:
        from .density import is_bounded

        if not is_bounded(P, D):
            return Verdict(False, "hypothesis not met: cd-structure is not bounded by the density structure")
    top = cd_topology(P)
    for q_, L in enumerate(T.levels):
        if any(L.presheaf.size(i) != 1 for i in initial_objects(P.cat)):
            return Verdict(False, f"hypothesis not met: T_{q_}(initial) is not a point")
        if not locally_trivial(L, top):
            return Verdict(False, f"hypothesis not met: a(T_{q_}) is not trivial")
    for q_ in range(T.top):
        F = T.levels[q_].presheaf
        for x in P.cat.objects:
            if F.size(x) != 1:
                return Verdict(False, f"conclusion fails: T_{q_}({x}) has {F.size(x)} elements", (q_, x))
    return Verdict(True, f"T_q = pt for all q < {T.top}")
