"""Presheaves of finite sets and of finitely generated abelian groups.

``F.res(f, s)`` is the restriction of a section ``s`` of ``F`` over the
target of ``f`` to its source (presheaves are contravariant).  Sections
may be any hashable, orderable-by-``repr`` values.
"""

from __future__ import annotations

import random
from itertools import product
from typing import Callable, Hashable, Iterable, Mapping, Optional, Sequence

import numpy as np

from .abelian import AbGroup, eye, is_homomorphism, is_zero_map, mat, zeros
from .fincat import CategoryError, FiniteCategory


def _key(s) -> str:
    return repr(s)


class SetPresheaf:
    """A contravariant functor from a finite category to finite sets."""

    def __init__(
        self,
        cat: FiniteCategory,
        at: Mapping[str, Iterable[Hashable]],
        restrict: Mapping[str, Mapping] | Callable[[str, Hashable], Hashable],
        name: str = "",
    ):
        self.cat = cat
        self.name = name
        self.at: dict[str, tuple] = {x: tuple(at.get(x, ())) for x in cat.objects}
        self.maps: dict[str, dict] = {}
        for f in cat.morphisms:
            u, v = cat.source(f), cat.target(f)
            if cat.is_identity(f) and (callable(restrict) or f not in restrict):
                self.maps[f] = {s: s for s in self.at[v]}
            elif callable(restrict):
                self.maps[f] = {s: restrict(f, s) for s in self.at[v]}
            else:
                if f not in restrict:
                    raise CategoryError(f"presheaf {name!r}: no restriction along {f}")
                self.maps[f] = dict(restrict[f])

    def __call__(self, x: str) -> tuple:
        return self.at[x]

    def res(self, f: str, s):
        return self.maps[f][s]

    def size(self, x: str) -> int:
        return len(self.at[x])

    def validate(self) -> list[str]:
        cat = self.cat
        out = []
        for f in cat.morphisms:
            u, v = cat.source(f), cat.target(f)
            m = self.maps[f]
            if set(m) != set(self.at[v]):
                out.append(f"restriction along {f} is not defined on all of F({v})")
                continue
            bad = [s for s in m.values() if s not in set(self.at[u])]
            if bad:
                out.append(f"restriction along {f} leaves F({u}): {bad[0]!r}")
        if out:
            return out
        for x in cat.objects:
            if any(self.res(cat.identity(x), s) != s for s in self.at[x]):
                out.append(f"restriction along id_{x} is not the identity")
        for f in cat.morphisms:
            for g in cat.morphisms_from(cat.target(f)):
                gf = cat.compose(g, f)
                for s in self.at[cat.target(g)]:
                    if self.res(gf, s) != self.res(f, self.res(g, s)):
                        out.append(f"functoriality fails for {g}∘{f} at {s!r}")
                        break
        return out

    def sizes(self) -> dict[str, int]:
        return {x: len(v) for x, v in self.at.items()}

    def __repr__(self) -> str:
        return f"<SetPresheaf {self.name!r} {self.sizes()}>"


class SetMorphism:
    """A natural transformation between set-valued presheaves."""

    def __init__(self, src: SetPresheaf, dst: SetPresheaf, comp: Mapping[str, Mapping]):
        self.src = src
        self.dst = dst
        self.comp: dict[str, dict] = {x: dict(comp[x]) for x in src.cat.objects}

    def __call__(self, x: str, s):
        return self.comp[x][s]

    def validate(self) -> list[str]:
        cat = self.src.cat
        out = []
        for x in cat.objects:
            if set(self.comp[x]) != set(self.src(x)):
                out.append(f"component at {x} has the wrong domain")
            elif any(t not in set(self.dst(x)) for t in self.comp[x].values()):
                out.append(f"component at {x} leaves the codomain")
        if out:
            return out
        for f in cat.morphisms:
            u, v = cat.source(f), cat.target(f)
            for s in self.src(v):
                if self.dst.res(f, self.comp[v][s]) != self.comp[u][self.src.res(f, s)]:
                    out.append(f"naturality fails along {f} at {s!r}")
                    break
        return out

    def is_iso(self) -> bool:
        return all(
            len(set(c.values())) == len(c) == self.dst.size(x) for x, c in self.comp.items()
        )

    def is_objectwise_surjective(self) -> bool:
        return all(set(c.values()) == set(self.dst(x)) for x, c in self.comp.items())

    def then(self, other: "SetMorphism") -> "SetMorphism":
        """``other ∘ self``."""
        return SetMorphism(
            self.src, other.dst,
            {x: {s: other.comp[x][t] for s, t in c.items()} for x, c in self.comp.items()},
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, SetMorphism) and self.comp == other.comp


def identity_morphism(F: SetPresheaf) -> SetMorphism:
    return SetMorphism(F, F, {x: {s: s for s in F(x)} for x in F.cat.objects})


# -- constructions --------------------------------------------------------------

def representable(cat: FiniteCategory, x: str) -> SetPresheaf:
    """``Hom(-, x)``; sections are morphism ids."""
    return SetPresheaf(
        cat,
        {u: cat.hom(u, x) for u in cat.objects},
        lambda f, g: cat.compose(g, f),
        name=f"h({x})",
    )


def representable_map(cat: FiniteCategory, f: str) -> SetMorphism:
    """``Hom(-, a) -> Hom(-, b)`` induced by ``f: a -> b``."""
    ha, hb = representable(cat, cat.source(f)), representable(cat, cat.target(f))
    return SetMorphism(ha, hb, {u: {g: cat.compose(f, g) for g in ha(u)} for u in cat.objects})


def constant_presheaf(cat: FiniteCategory, values: Sequence[Hashable], name: str = "") -> SetPresheaf:
    return SetPresheaf(cat, {x: list(values) for x in cat.objects}, lambda f, s: s, name=name)


def terminal_presheaf(cat: FiniteCategory) -> SetPresheaf:
    return constant_presheaf(cat, ["*"], name="pt")


def coproduct_presheaf(parts: Sequence[SetPresheaf], name: str = "") -> SetPresheaf:
    """Sections are pairs ``(i, s)``."""
    cat = parts[0].cat
    return SetPresheaf(
        cat,
        {x: [(i, s) for i, F in enumerate(parts) for s in F(x)] for x in cat.objects},
        lambda f, t: (t[0], parts[t[0]].res(f, t[1])),
        name=name,
    )


def coproduct_injection(parts: Sequence[SetPresheaf], total: SetPresheaf, i: int) -> SetMorphism:
    return SetMorphism(parts[i], total, {x: {s: (i, s) for s in parts[i](x)} for x in total.cat.objects})


def fiber_product_presheaf(phi: SetMorphism, psi: SetMorphism, name: str = "") -> SetPresheaf:
    """``F ×_H G`` for ``phi: F -> H``, ``psi: G -> H``; sections are pairs."""
    F, G = phi.src, psi.src
    cat = F.cat
    at = {
        x: [(a, b) for a in F(x) for b in G(x) if phi(x, a) == psi(x, b)]
        for x in cat.objects
    }
    return SetPresheaf(cat, at, lambda f, t: (F.res(f, t[0]), G.res(f, t[1])), name=name)


def product_presheaf(F: SetPresheaf, G: SetPresheaf, name: str = "") -> SetPresheaf:
    cat = F.cat
    return SetPresheaf(
        cat,
        {x: [(a, b) for a in F(x) for b in G(x)] for x in cat.objects},
        lambda f, t: (F.res(f, t[0]), G.res(f, t[1])),
        name=name,
    )


class _UnionFind:
    def __init__(self, items: Iterable):
        self.parent = {s: s for s in items}

    def find(self, s):
        root = s
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[s] != root:
            self.parent[s], s = root, self.parent[s]
        return root

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if _key(rb) < _key(ra):
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


def quotient_presheaf(F: SetPresheaf, pairs: Mapping[str, Iterable[tuple]], name: str = "") -> tuple[SetPresheaf, SetMorphism]:
    """Smallest quotient of ``F`` identifying the given pairs; sections are
    the chosen class representatives."""
    cat = F.cat
    uf = {x: _UnionFind(F(x)) for x in cat.objects}
    todo = [(x, a, b) for x, ps in pairs.items() for a, b in ps]
    while todo:
        x, a, b = todo.pop()
        if uf[x].union(a, b):
            for f in cat.morphisms_into(x):
                if not cat.is_identity(f):
                    todo.append((cat.source(f), F.res(f, a), F.res(f, b)))
    # re-root each class at its smallest member so representatives are canonical
    classes: dict[str, dict] = {}
    for x in cat.objects:
        groups: dict = {}
        for s in F(x):
            groups.setdefault(uf[x].find(s), []).append(s)
        rep = {}
        for members in groups.values():
            r = min(members, key=_key)
            for s in members:
                rep[s] = r
        classes[x] = rep
    at = {x: sorted(set(classes[x].values()), key=_key) for x in cat.objects}
    Q = SetPresheaf(cat, at, lambda f, r: classes[cat.source(f)][F.res(f, r)], name=name)
    return Q, SetMorphism(F, Q, classes)


def pushout_presheaf(phi: SetMorphism, psi: SetMorphism, name: str = "") -> tuple[SetPresheaf, SetMorphism, SetMorphism]:
    """``A ⊔_B Y`` for ``phi: B -> A``, ``psi: B -> Y`` with its two maps."""
    B, A, Y = phi.src, phi.dst, psi.dst
    co = coproduct_presheaf([A, Y])
    rel = {x: [((0, phi(x, b)), (1, psi(x, b))) for b in B(x)] for x in B.cat.objects}
    Q, q = quotient_presheaf(co, rel, name=name)
    ia = coproduct_injection([A, Y], co, 0).then(q)
    iy = coproduct_injection([A, Y], co, 1).then(q)
    return Q, ia, iy


def subpresheaf(F: SetPresheaf, generators: Mapping[str, Iterable], name: str = "") -> tuple[SetPresheaf, SetMorphism]:
    """Smallest subpresheaf containing the generators, with its inclusion."""
    cat = F.cat
    keep = {x: set() for x in cat.objects}
    for x, gens in generators.items():
        for s in gens:
            for f in cat.morphisms_into(x):
                keep[cat.source(f)].add(F.res(f, s))
    at = {x: [s for s in F(x) if s in keep[x]] for x in cat.objects}
    G = SetPresheaf(cat, at, lambda f, s: F.res(f, s), name=name)
    return G, SetMorphism(G, F, {x: {s: s for s in at[x]} for x in cat.objects})


def image_presheaf(phi: SetMorphism) -> SetPresheaf:
    return subpresheaf(phi.dst, {x: set(c.values()) for x, c in phi.comp.items()})[0]


def relabel(F: SetPresheaf, name: str = "") -> tuple[SetPresheaf, SetMorphism]:
    """Isomorphic copy with sections ``0..n-1`` per object (sorted by repr)."""
    cat = F.cat
    idx = {x: {s: i for i, s in enumerate(sorted(F(x), key=_key))} for x in cat.objects}
    inv = {x: {i: s for s, i in m.items()} for x, m in idx.items()}
    G = SetPresheaf(
        cat, {x: range(len(m)) for x, m in idx.items()},
        lambda f, i: idx[cat.source(f)][F.res(f, inv[cat.target(f)][i])],
        name=name or F.name,
    )
    return G, SetMorphism(F, G, idx)


def natural_transformations(F: SetPresheaf, G: SetPresheaf, limit: Optional[int] = None) -> list[SetMorphism]:
    """All morphisms ``F -> G`` by backtracking over sections."""
    cat = F.cat
    slots = [(x, s) for x in cat.objects for s in F(x)]
    # constraints: G(f)(m[v][s]) == m[u][F(f)(s)]
    constraints: dict[tuple, list] = {slot: [] for slot in slots}
    for f in cat.morphisms:
        if cat.is_identity(f):
            continue
        u, v = cat.source(f), cat.target(f)
        for s in F(v):
            c = (f, (v, s), (u, F.res(f, s)))
            constraints[(v, s)].append(c)
            constraints[(u, F.res(f, s))].append(c)
    found = []
    assign: dict = {}

    def ok(slot) -> bool:
        for f, a, b in constraints[slot]:
            if a in assign and b in assign and G.res(f, assign[a]) != assign[b]:
                return False
        return True

    def go(i: int) -> bool:
        if i == len(slots):
            comp = {x: {} for x in cat.objects}
            for (x, s), t in assign.items():
                comp[x][s] = t
            found.append(SetMorphism(F, G, comp))
            return limit is not None and len(found) >= limit
        slot = slots[i]
        for t in G(slot[0]):
            assign[slot] = t
            if ok(slot) and go(i + 1):
                return True
            del assign[slot]
        return False

    go(0)
    return found


def random_presheaf(cat: FiniteCategory, rng: random.Random, max_gens: int = 3, max_quot: int = 3) -> SetPresheaf:
    """A quotient of a subpresheaf of a coproduct of representables."""
    objs = list(cat.objects)
    picks = [rng.choice(objs) for _ in range(rng.randint(1, max_gens))]
    co = coproduct_presheaf([representable(cat, x) for x in picks])
    if rng.random() < 0.4:
        gens = {}
        for _ in range(rng.randint(1, 3)):
            x = rng.choice(objs)
            if co(x):
                gens.setdefault(x, []).append(rng.choice(co(x)))
        if gens:
            co = subpresheaf(co, gens)[0]
    pairs: dict[str, list] = {}
    for _ in range(rng.randint(0, max_quot)):
        x = rng.choice(objs)
        if len(co(x)) >= 2:
            a, b = rng.sample(list(co(x)), 2)
            pairs.setdefault(x, []).append((a, b))
    return relabel(quotient_presheaf(co, pairs)[0], name="random")[0]


# -- abelian presheaves -----------------------------------------------------------

class AbPresheaf:
    """A contravariant functor to finitely generated abelian groups.

    ``restrict[f]`` for ``f: u -> v`` is a ``ngens(F(u)) x ngens(F(v))``
    integer matrix.
    """

    def __init__(self, cat: FiniteCategory, at: Mapping[str, AbGroup], restrict: Mapping[str, np.ndarray] | Callable[[str], np.ndarray], name: str = ""):
        self.cat = cat
        self.name = name
        self.at: dict[str, AbGroup] = {x: at[x] for x in cat.objects}
        self.maps: dict[str, np.ndarray] = {}
        for f in cat.morphisms:
            u, v = cat.source(f), cat.target(f)
            shape = (self.at[u].ngens, self.at[v].ngens)
            if cat.is_identity(f) and (callable(restrict) or f not in restrict):
                self.maps[f] = eye(shape[0])
            else:
                m = restrict(f) if callable(restrict) else restrict[f]
                self.maps[f] = mat(m, shape)

    def __call__(self, x: str) -> AbGroup:
        return self.at[x]

    def res(self, f: str) -> np.ndarray:
        return self.maps[f]

    def validate(self) -> list[str]:
        cat = self.cat
        out = []
        for f in cat.morphisms:
            u, v = cat.source(f), cat.target(f)
            m = self.maps[f]
            if m.shape != (self.at[u].ngens, self.at[v].ngens):
                out.append(f"restriction along {f} has shape {m.shape}")
            elif not is_homomorphism(self.at[v], self.at[u], m):
                out.append(f"restriction along {f} does not respect relations")
        if out:
            return out
        for x in cat.objects:
            if not is_zero_map(self.maps[cat.identity(x)] - eye(self.at[x].ngens), self.at[x]):
                out.append(f"restriction along id_{x} is not the identity")
        for f in cat.morphisms:
            for g in cat.morphisms_from(cat.target(f)):
                lhs = self.maps[cat.compose(g, f)]
                rhs = self.maps[f].dot(self.maps[g])
                if not is_zero_map(lhs - rhs, self.at[cat.source(f)]):
                    out.append(f"functoriality fails for {g}∘{f}")
        return out

    def invariants(self) -> dict[str, tuple]:
        return {x: g.invariants() for x, g in self.at.items()}

    def __repr__(self) -> str:
        return f"<AbPresheaf {self.name!r} {({x: str(g) for x, g in self.at.items()})}>"


class AbMorphism:
    """A natural transformation of abelian presheaves, one matrix per object."""

    def __init__(self, src: AbPresheaf, dst: AbPresheaf, comp: Mapping[str, np.ndarray]):
        self.src = src
        self.dst = dst
        self.comp = {
            x: mat(comp[x], (dst(x).ngens, src(x).ngens)) for x in src.cat.objects
        }

    def __call__(self, x: str) -> np.ndarray:
        return self.comp[x]

    def validate(self) -> list[str]:
        cat = self.src.cat
        out = []
        for x in cat.objects:
            if not is_homomorphism(self.src(x), self.dst(x), self.comp[x]):
                out.append(f"component at {x} is not a homomorphism")
        for f in cat.morphisms:
            u, v = cat.source(f), cat.target(f)
            lhs = self.dst.res(f).dot(self.comp[v])
            rhs = self.comp[u].dot(self.src.res(f))
            if not is_zero_map(lhs - rhs, self.dst(u)):
                out.append(f"naturality fails along {f}")
        return out

    def then(self, other: "AbMorphism") -> "AbMorphism":
        return AbMorphism(self.src, other.dst, {x: other.comp[x].dot(c) for x, c in self.comp.items()})


def free_presheaf(F: SetPresheaf) -> tuple[AbPresheaf, dict[str, dict]]:
    """Objectwise free abelian group on ``F`` and the basis index of each section."""
    cat = F.cat
    idx = {x: {s: i for i, s in enumerate(F(x))} for x in cat.objects}

    def restrict(f):
        u, v = cat.source(f), cat.target(f)
        m = zeros(len(idx[u]), len(idx[v]))
        for s, j in idx[v].items():
            m[idx[u][F.res(f, s)], j] = 1
        return m

    return AbPresheaf(cat, {x: AbGroup.free(len(idx[x])) for x in cat.objects}, restrict, name=f"Z[{F.name}]"), idx


def free_morphism(phi: SetMorphism, src: tuple[AbPresheaf, dict], dst: tuple[AbPresheaf, dict]) -> AbMorphism:
    (A, ia), (B, ib) = src, dst
    comp = {}
    for x in A.cat.objects:
        m = zeros(B(x).ngens, A(x).ngens)
        for s, j in ia[x].items():
            m[ib[x][phi(x, s)], j] = 1
        comp[x] = m
    return AbMorphism(A, B, comp)


def constant_ab(cat: FiniteCategory, group: AbGroup, name: str = "") -> AbPresheaf:
    return AbPresheaf(cat, {x: group for x in cat.objects}, lambda f: eye(group.ngens), name=name)


def direct_sum_ab(parts: Sequence[AbPresheaf], name: str = "") -> AbPresheaf:
    from .abelian import block_diag, direct_sum

    cat = parts[0].cat
    return AbPresheaf(
        cat,
        {x: direct_sum([F(x) for F in parts]) for x in cat.objects},
        lambda f: block_diag(*[F.res(f) for F in parts]),
        name=name,
    )
