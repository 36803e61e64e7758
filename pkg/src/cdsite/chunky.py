"""Chunky categories, the additive cd-structure and radditive functors.

Finite chunky categories are truncations: sums exist only up to a size
cap.  The size of an object is the length of a finest decomposition into
non-initial summands, read off from the coproducts the category has.  All
three chunky conditions are checked on every sum that exists, and a sum
must exist whenever the sizes of its summands add up to at most the cap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Mapping, Optional, Sequence

from .fincat import (
    Cone, FiniteCategory, Square, coproduct, factors_through, initial_object, is_coproduct_cocone,
    is_isomorphism, is_monomorphism, is_pullback_square, pullback,
)
from .presheaves import SetMorphism, SetPresheaf, _UnionFind
from .topology import CdStructure, Topology, Verdict, cd_topology


@dataclass
class ChunkyWitness:
    """The data certifying that a finite category is chunky up to its cap.

    ``sums[(x, y)]`` is the chosen coproduct with coprojections
    ``(x -> x⊔y, y -> x⊔y)``.  ``splittings[(f, x, y)]`` records, for
    ``f: z -> x⊔y``, the two pullbacks, whose legs to ``z`` form a coproduct.
    """

    cat: FiniteCategory
    initial: str
    sums: dict[tuple[str, str], Cone]
    splittings: dict[tuple[str, str, str], tuple[Cone, Cone]]
    sizes: dict[str, int]
    cap: int
    _cache: dict = field(default_factory=dict, repr=False)

    def sum(self, x: str, y: str) -> Optional[Cone]:
        return self.sums.get((x, y))


def _sizes(cat: FiniteCategory, initial: str, sums: Mapping) -> Optional[dict[str, int]]:
    """Length of a finest decomposition of each object, or ``None`` if the
    recursion loops (a summand isomorphic to the whole)."""
    splits: dict[str, list] = {x: [] for x in cat.objects}
    for (x, y), c in sums.items():
        if x == initial or y == initial:
            continue
        if is_isomorphism(cat, c.legs[0]) or is_isomorphism(cat, c.legs[1]):
            return None
        splits[c.apex].append((x, y))
    sizes: dict[str, int] = {}
    busy: set = set()

    def size(u: str) -> Optional[int]:
        if u in sizes:
            return sizes[u]
        if u in busy:
            return None
        busy.add(u)
        best = 0 if u == initial else 1
        for x, y in splits[u]:
            sx, sy = size(x), size(y)
            if sx is None or sy is None:
                return None
            best = max(best, sx + sy)
        busy.discard(u)
        sizes[u] = best
        return best

    # objects isomorphic to a sum also split
    for u in cat.objects:
        for (x, y), c in sums.items():
            if c.apex != u and x != initial and y != initial and any(
                    is_isomorphism(cat, m) for m in cat.hom(c.apex, u)):
                splits[u].append((x, y))
    for u in cat.objects:
        if size(u) is None:
            return None
    return sizes


def chunky_verdict(cat: FiniteCategory, designated: Optional[Mapping[tuple[str, str], Sequence[str]]] = None
                   ) -> tuple[Optional[ChunkyWitness], str]:
    """Exhaustive search for a chunky witness; the reason when none exists.

    ``designated`` maps ``(x, y)`` to coprojections ``(x -> s, y -> s)``.
    Truncated fixtures pass their sums here, since near the cap a
    truncation can have coproducts that are artefacts of the cut.  Without
    it every binary coproduct the category has is used.
    """
    initial = initial_object(cat)
    if initial is None:
        return None, "no initial object"
    for f in cat.morphisms_into(initial):
        if not is_isomorphism(cat, f):
            return None, f"condition (1): {f} ends at the initial object but is not invertible"
    objs = cat.objects
    sums = {}
    if designated is None:
        for x in objs:
            for y in objs:
                c = coproduct(cat, [x, y])
                if c is not None:
                    sums[(x, y)] = c
    else:
        for (x, y), legs in designated.items():
            legs = tuple(legs)
            if (cat.source(legs[0]), cat.source(legs[1])) != (x, y) or not is_coproduct_cocone(cat, legs):
                return None, f"designated {x} ⊔ {y} is not a coproduct"
            sums[(x, y)] = Cone(cat.target(legs[0]), legs)
    for (x, y), c in sums.items():
        sq = Square(initial, y, x, c.apex, cat.hom(initial, y)[0], cat.hom(initial, x)[0], c.legs[1], c.legs[0])
        if not is_pullback_square(cat, sq):
            return None, f"condition (2): the square 0 -> {x}, {y} -> {x}⊔{y} is not a pullback"
    sizes = _sizes(cat, initial, sums)
    if sizes is None:
        return None, "some object is a sum with a summand isomorphic to itself"
    cap = max(sizes.values(), default=0)
    for x in objs:
        for y in objs:
            if sizes[x] + sizes[y] <= cap and (x, y) not in sums:
                return None, f"{x} ⊔ {y} does not exist"
    splittings = {}
    for (x, y), c in sums.items():
        for f in cat.morphisms_into(c.apex):
            px, py = pullback(cat, f, c.legs[0]), pullback(cat, f, c.legs[1])
            if px is None or py is None:
                return None, f"condition (3): a pullback of {f} along a coprojection is missing"
            if not is_coproduct_cocone(cat, [px.legs[0], py.legs[0]]):
                return None, f"condition (3): the splitting of {f} is not an isomorphism"
            splittings[(f, x, y)] = (px, py)
    return ChunkyWitness(cat, initial, sums, splittings, sizes, cap), "chunky"


def is_chunky(cat: FiniteCategory, designated=None) -> Optional[ChunkyWitness]:
    return chunky_verdict(cat, designated)[0]


# -- the additive cd-structure -----------------------------------------------------

def p_add(w: ChunkyWitness) -> CdStructure:
    """The squares ``0 -> x, 0 -> y, x -> x⊔y, y -> x⊔y`` over the chosen sums."""
    if "p_add" not in w._cache:
        cat, z = w.cat, w.initial
        squares = []
        for (x, y), c in sorted(w.sums.items()):
            squares.append(Square(z, y, x, c.apex, cat.hom(z, y)[0], cat.hom(z, x)[0],
                                  c.legs[1], c.legs[0], name=f"add[{x};{y}]"))
        w._cache["p_add"] = CdStructure(cat, squares, name=f"add({cat.name})")
    return w._cache["p_add"]


def t_add(w: ChunkyWitness) -> Topology:
    return cd_topology(p_add(w))


def coprojections_are_monic(w: ChunkyWitness) -> Verdict:
    for (x, y), c in w.sums.items():
        for leg in c.legs:
            if not is_monomorphism(w.cat, leg):
                return Verdict(False, f"coprojection {leg} of {x}⊔{y} is not a monomorphism", leg)
    return Verdict(True, "every coprojection is a monomorphism")


# -- radditive functors ----------------------------------------------------------------

def is_radditive(F: SetPresheaf, w: ChunkyWitness) -> bool:
    """``F(0)`` is a point and ``F(x⊔y) -> F(x) × F(y)`` is bijective."""
    if F.size(w.initial) != 1:
        return False
    for (x, y), c in w.sums.items():
        pairs = {(F.res(c.legs[0], s), F.res(c.legs[1], s)) for s in F(c.apex)}
        if len(pairs) != F.size(c.apex) or len(pairs) != F.size(x) * F.size(y):
            return False
    return True


@dataclass
class Decompositions:
    """The poset ``D/U``: sequences of non-initial summands whose sum is ``U``.

    ``arrows`` lists ``(c, a, alpha, maps)`` for each refinement ``c -> a``:
    ``alpha[i]`` is the part of ``a`` containing part ``i`` of ``c`` and
    ``maps[i]`` the morphism between them over ``U``.
    """

    target: str
    seqs: list[tuple[str, ...]]
    arrows: list[tuple[int, int, tuple[int, ...], tuple[str, ...]]]
    finest: int

    def index(self, seq: Sequence[str]) -> int:
        return self.seqs.index(tuple(seq))


def _is_sum_onto(cat: FiniteCategory, legs: Sequence[str]) -> bool:
    if not legs:
        return False
    return is_coproduct_cocone(cat, legs)


def _disjoint(cat: FiniteCategory, w: ChunkyWitness, u: str, v: str) -> bool:
    c = pullback(cat, u, v)
    return c is not None and w.sizes[c.apex] == 0


def decompositions(w: ChunkyWitness, u: str) -> Decompositions:
    cache = w._cache.setdefault("D/U", {})
    if u in cache:
        return cache[u]
    cat = w.cat
    if w.sizes[u] == 0:
        cache[u] = out = Decompositions(u, [()], [(0, 0, (), ())], 0)
        return out
    cands = [m for m in cat.morphisms_into(u)
             if w.sizes[cat.source(m)] > 0 and is_monomorphism(cat, m)]
    disjoint = {}
    seqs = []

    def grow(prefix: tuple, used: int):
        if used == w.sizes[u]:
            if _is_sum_onto(cat, prefix):
                seqs.append(prefix)
            return
        for m in cands:
            n = w.sizes[cat.source(m)]
            if used + n > w.sizes[u] or m in prefix:
                continue
            ok = True
            for p in prefix:
                key = (p, m)
                if key not in disjoint:
                    disjoint[key] = _disjoint(cat, w, p, m)
                if not disjoint[key]:
                    ok = False
                    break
            if ok:
                grow(prefix + (m,), used + n)

    grow((), 0)
    arrows = []
    for ci, c in enumerate(seqs):
        for ai, a in enumerate(seqs):
            alpha, maps = [], []
            for m in c:
                hits = [(j, h) for j, v in enumerate(a) for h in factors_through(cat, m, v)]
                if len(hits) != 1:
                    break
                alpha.append(hits[0][0])
                maps.append(hits[0][1])
            else:
                if set(alpha) != set(range(len(a))):
                    continue
                if all(_is_sum_onto(cat, [maps[i] for i in range(len(c)) if alpha[i] == j]) for j in range(len(a))):
                    arrows.append((ci, ai, tuple(alpha), tuple(maps)))
    finest = min(i for i, s in enumerate(seqs) if len(s) == max(len(t) for t in seqs))
    cache[u] = out = Decompositions(u, seqs, arrows, finest)
    return out


def is_filtered(D: Decompositions) -> bool:
    """Every two decompositions have a common refinement."""
    below = {a: {c for c, a2, _, _ in D.arrows if a2 == a} for a in range(len(D.seqs))}
    n = len(D.seqs)
    return n > 0 and all(below[a] & below[b] for a in range(n) for b in range(n))


def radditivize(F: SetPresheaf, w: ChunkyWitness) -> tuple[SetPresheaf, SetMorphism]:
    """``r(F)(U) = colim_{D/U} F(U_1) × … × F(U_n)`` and the unit ``F -> r(F)``.

    The colimit is taken by identifying each element with its images along
    every refinement; each class is named by its member over the finest
    chosen decomposition.
    """
    cat = w.cat
    classes, at = {}, {}
    for u in cat.objects:
        D = decompositions(w, u)
        if not is_filtered(D):
            raise ValueError(f"D/{u} is not filtered")
        elems = [(i, vals) for i, seq in enumerate(D.seqs)
                 for vals in product(*(F(cat.source(m)) for m in seq))]
        uf = _UnionFind(elems)
        for c, a, alpha, maps in D.arrows:
            for vals in product(*(F(cat.source(m)) for m in D.seqs[a])):
                uf.union((a, vals), (c, tuple(F.res(h, vals[j]) for j, h in zip(alpha, maps))))
        rep = {}
        for vals in product(*(F(cat.source(m)) for m in D.seqs[D.finest])):
            r = uf.find((D.finest, vals))
            if r in rep:
                raise ValueError(f"colimit over D/{u} identifies two finest elements")
            rep[r] = vals
        if len(rep) != len({uf.find(e) for e in elems}):
            raise ValueError(f"colimit over D/{u} has a class missing the finest decomposition")
        classes[u] = (D, uf, rep)
        at[u] = tuple(rep.values())

    def name(u: str, seq: tuple, vals: tuple) -> tuple:
        D, uf, rep = classes[u]
        return rep[uf.find((D.index(seq), vals))]

    def restrict(g: str, s: tuple) -> tuple:
        # pull the finest decomposition of the target back along g
        v, u = cat.source(g), cat.target(g)
        D = classes[u][0]
        legs, vals = [], []
        for m, x in zip(D.seqs[D.finest], s):
            pb = pullback(cat, g, m)
            if pb is None:
                raise ValueError(f"no pullback of {g} along {m}")
            if w.sizes[pb.apex] == 0:
                continue
            legs.append(pb.legs[0])
            vals.append(F.res(pb.legs[1], x))
        return name(v, tuple(legs), tuple(vals))

    R = SetPresheaf(cat, at, restrict, name=f"r({F.name})")
    unit = {}
    for u in cat.objects:
        D = classes[u][0]
        if w.sizes[u] == 0:
            unit[u] = {s: () for s in F(u)}
        else:
            one = (cat.identity(u),)
            unit[u] = {s: name(u, one, (s,)) for s in F(u)}
    return R, SetMorphism(F, R, unit)


def compare_with_sheafification(F: SetPresheaf, w: ChunkyWitness) -> Verdict:
    """``r(F)`` is a ``t_add``-sheaf and ``a(F -> r(F))`` is an isomorphism."""
    from .sheaves import is_sheaf, sheafify, sheafify_morphism

    top = t_add(w)
    R, unit = radditivize(F, w)
    if unit.validate():
        return Verdict(False, "the unit F -> r(F) is not natural")
    if not is_radditive(R, w):
        return Verdict(False, "r(F) is not radditive")
    if not is_sheaf(R, top):
        return Verdict(False, "r(F) is not a sheaf for t_add")
    aF, _ = sheafify(F, top)
    if aF.sizes() != R.sizes():
        return Verdict(False, "a(F) and r(F) differ in size", details={"a": aF.sizes(), "r": R.sizes()})
    if not sheafify_morphism(unit, top).is_iso():
        return Verdict(False, "a(F) -> a(r(F)) is not an isomorphism")
    return Verdict(True, "r(F) ≅ a(F)", details={"sizes": R.sizes()})
