"""Finite categories given by an explicit (total) composition table.

Objects and morphisms are opaque string identifiers.  Every universal
property is decided by exhaustive enumeration, which is fine for the
desk-scale categories this package targets (tens of objects, a few
hundred morphisms).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable, Mapping, Optional, Sequence


class CategoryError(ValueError):
    """Raised for malformed category data or ill-typed compositions."""


class FiniteCategory:
    """A small category with finitely many objects and morphisms.

    ``morphisms`` maps a morphism id to its ``(source, target)``.
    ``identities`` maps each object to its identity morphism.
    ``compose`` is either a mapping ``(g, f) -> g∘f`` over composable pairs
    of non-identity morphisms (identity composites are implicit), or a
    callable ``compose(g, f)`` returning the composite id.  A callable is
    evaluated lazily and memoized; it must still define a total table.
    """

    def __init__(
        self,
        objects: Iterable[str],
        morphisms: Mapping[str, tuple[str, str]],
        identities: Mapping[str, str],
        compose: Mapping[tuple[str, str], str] | Callable[[str, str], str],
        name: str = "",
    ):
        self.name = name
        self.objects: tuple[str, ...] = tuple(sorted(set(objects)))
        self._src: dict[str, str] = {}
        self._tgt: dict[str, str] = {}
        for m, (s, t) in morphisms.items():
            self._src[m] = s
            self._tgt[m] = t
        self.identities: dict[str, str] = dict(identities)
        for x, i in self.identities.items():
            self._src.setdefault(i, x)
            self._tgt.setdefault(i, x)
        self.morphisms: tuple[str, ...] = tuple(sorted(self._src))
        self._identity_set = frozenset(self.identities.values())
        if callable(compose):
            self._table: dict[tuple[str, str], str] = {}
            self._compose_fn: Optional[Callable[[str, str], str]] = compose
        else:
            self._table = dict(compose)
            self._compose_fn = None

        homs: dict[tuple[str, str], list[str]] = {}
        into: dict[str, list[str]] = {x: [] for x in self.objects}
        out: dict[str, list[str]] = {x: [] for x in self.objects}
        for m in self.morphisms:
            s, t = self._src[m], self._tgt[m]
            if s not in into or t not in into:
                raise CategoryError(f"morphism {m!r} has unknown endpoint")
            homs.setdefault((s, t), []).append(m)
            into[t].append(m)
            out[s].append(m)
        self._homs = {k: tuple(v) for k, v in homs.items()}
        self._into = {k: tuple(v) for k, v in into.items()}
        self._out = {k: tuple(v) for k, v in out.items()}
        self._cache: dict = {}

    # -- basic structure -------------------------------------------------
    def source(self, f: str) -> str:
        return self._src[f]

    def target(self, f: str) -> str:
        return self._tgt[f]

    def identity(self, x: str) -> str:
        return self.identities[x]

    def is_identity(self, f: str) -> bool:
        return f in self._identity_set

    def hom(self, a: str, b: str) -> tuple[str, ...]:
        return self._homs.get((a, b), ())

    def morphisms_into(self, x: str) -> tuple[str, ...]:
        return self._into[x]

    def morphisms_from(self, x: str) -> tuple[str, ...]:
        return self._out[x]

    def compose(self, g: str, f: str) -> str:
        """Return ``g∘f`` (first ``f``, then ``g``)."""
        if self._tgt[f] != self._src[g]:
            raise CategoryError(f"cannot compose {g!r} after {f!r}")
        if f in self._identity_set:
            return g
        if g in self._identity_set:
            return f
        key = (g, f)
        try:
            return self._table[key]
        except KeyError:
            if self._compose_fn is None:
                raise CategoryError(f"composition table has no entry for {g} * {f}") from None
        h = self._compose_fn(g, f)
        self._table[key] = h
        return h

    def compose_chain(self, *fs: str) -> str:
        """``compose_chain(h, g, f) == h∘g∘f``."""
        out = fs[-1]
        for g in reversed(fs[:-1]):
            out = self.compose(g, out)
        return out

    def composition_entries(self) -> dict[tuple[str, str], str]:
        """Materialize the full table over non-identity composable pairs."""
        entries = {}
        for f in self.morphisms:
            if self.is_identity(f):
                continue
            for g in self._out[self._tgt[f]]:
                if not self.is_identity(g):
                    entries[(g, f)] = self.compose(g, f)
        return entries

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"<FiniteCategory{label}: {len(self.objects)} objects, {len(self.morphisms)} morphisms>"


@dataclass(frozen=True)
class Square:
    """A commutative square ``e∘b_to_a = p∘b_to_y``::

        b --b_to_y--> y
        |             |
      b_to_a          p
        v             v
        a -----e----> x
    """

    b: str
    a: str
    y: str
    x: str
    b_to_a: str
    b_to_y: str
    e: str
    p: str
    name: str = field(default="", compare=False)

    @classmethod
    def from_morphisms(cls, cat: FiniteCategory, b_to_a: str, b_to_y: str, e: str, p: str, name: str = "") -> "Square":
        return cls(
            cat.source(b_to_a), cat.source(e), cat.source(p), cat.target(e),
            b_to_a, b_to_y, e, p, name,
        )

    @property
    def corners(self) -> tuple[str, str, str, str]:
        return (self.b, self.a, self.y, self.x)

    def label(self) -> str:
        return self.name or f"({self.b},{self.a},{self.y},{self.x})"

    def check(self, cat: FiniteCategory) -> list[str]:
        """Typing and commutativity problems, empty if the square is fine."""
        problems = []
        want = {
            "b_to_a": (self.b_to_a, self.b, self.a),
            "b_to_y": (self.b_to_y, self.b, self.y),
            "e": (self.e, self.a, self.x),
            "p": (self.p, self.y, self.x),
        }
        for role, (m, s, t) in want.items():
            if m not in cat._src:
                problems.append(f"{role}: unknown morphism {m!r}")
            elif (cat.source(m), cat.target(m)) != (s, t):
                problems.append(f"{role}: {m} is not {s} -> {t}")
        if not problems and cat.compose(self.e, self.b_to_a) != cat.compose(self.p, self.b_to_y):
            problems.append(f"square {self.label()} does not commute")
        return problems


@dataclass(frozen=True)
class FormalCoproduct:
    """An object of the free coproduct completion: a multiset of objects.

    Summands are kept in the order given so that structure maps can refer
    to them by index; ``canonical`` gives the sorted form for equality up
    to reindexing.  ``FormalCoproduct(())`` is the formal initial object.
    """

    summands: tuple[str, ...]

    def canonical(self) -> tuple[str, ...]:
        return tuple(sorted(self.summands))

    def __len__(self) -> int:
        return len(self.summands)


# -- validation ----------------------------------------------------------

def validate_category(cat: FiniteCategory) -> list[str]:
    """Every violated consistency/identity/associativity instance."""
    report: list[str] = []
    for x in cat.objects:
        i = cat.identities.get(x)
        if i is None:
            report.append(f"object {x} has no identity")
        elif (cat.source(i), cat.target(i)) != (x, x):
            report.append(f"identity {i} is not an endomorphism of {x}")
    if report:
        return report
    composable: list[tuple[str, str]] = []
    for f in cat.morphisms:
        for g in cat.morphisms_from(cat.target(f)):
            composable.append((g, f))
    for g, f in composable:
        try:
            h = cat.compose(g, f)
        except CategoryError as exc:
            report.append(str(exc))
            continue
        if h not in cat._src:
            report.append(f"{g} * {f} = {h} is not a morphism")
        elif (cat.source(h), cat.target(h)) != (cat.source(f), cat.target(g)):
            report.append(f"{g} * {f} = {h} has wrong source/target")
    if report:
        return report
    for f in cat.morphisms:
        for g in cat.morphisms_from(cat.target(f)):
            gf = cat.compose(g, f)
            for h in cat.morphisms_from(cat.target(g)):
                if cat.compose(h, gf) != cat.compose(cat.compose(h, g), f):
                    report.append(f"associativity fails for ({h}, {g}, {f})")
    return report


# -- elementary properties -----------------------------------------------

def is_initial(cat: FiniteCategory, x: str) -> bool:
    return all(len(cat.hom(x, u)) == 1 for u in cat.objects)


def is_terminal(cat: FiniteCategory, x: str) -> bool:
    return all(len(cat.hom(u, x)) == 1 for u in cat.objects)


def initial_objects(cat: FiniteCategory) -> list[str]:
    return [x for x in cat.objects if is_initial(cat, x)]


def initial_object(cat: FiniteCategory) -> Optional[str]:
    found = initial_objects(cat)
    return found[0] if found else None


def is_monomorphism(cat: FiniteCategory, f: str) -> bool:
    s = cat.source(f)
    for w in cat.objects:
        seen = set()
        for g in cat.hom(w, s):
            fg = cat.compose(f, g)
            if fg in seen:
                return False
            seen.add(fg)
    return True


def inverse(cat: FiniteCategory, f: str) -> Optional[str]:
    s, t = cat.source(f), cat.target(f)
    for g in cat.hom(t, s):
        if cat.compose(g, f) == cat.identity(s) and cat.compose(f, g) == cat.identity(t):
            return g
    return None


def is_isomorphism(cat: FiniteCategory, f: str) -> bool:
    key = ("iso", f)
    if key not in cat._cache:
        cat._cache[key] = inverse(cat, f) is not None
    return cat._cache[key]


def isomorphisms(cat: FiniteCategory, a: str, b: str) -> list[str]:
    return [f for f in cat.hom(a, b) if is_isomorphism(cat, f)]


def factors_through(cat: FiniteCategory, f: str, g: str) -> list[str]:
    """All ``h`` with ``g∘h = f``."""
    if cat.target(f) != cat.target(g):
        return []
    return [h for h in cat.hom(cat.source(f), cat.source(g)) if cat.compose(g, h) == f]


# -- limits and colimits ---------------------------------------------------

@dataclass(frozen=True)
class Cone:
    apex: str
    legs: tuple[str, ...]


def _cones(cat: FiniteCategory, w: str, maps: Sequence[str]) -> list[tuple[str, ...]]:
    """Tuples of legs ``w -> source(maps[i])`` with all composites equal."""
    out = []
    for legs in product(*(cat.hom(w, cat.source(m)) for m in maps)):
        composites = {cat.compose(m, leg) for m, leg in zip(maps, legs)}
        if len(composites) <= 1:
            out.append(tuple(legs))
    return out


def _is_limit(cat: FiniteCategory, apex: str, legs: Sequence[str], maps: Sequence[str], cones_at) -> bool:
    for w in cat.objects:
        wanted = cones_at(w)
        homs = cat.hom(w, apex)
        if len(homs) != len(wanted):
            return False
        images = {tuple(cat.compose(leg, m) for leg in legs) for m in homs}
        if len(images) != len(homs):
            return False
    return True


def wide_pullback(cat: FiniteCategory, maps: Sequence[str]) -> Optional[Cone]:
    """Limit of a family of morphisms with a common target, if it exists."""
    maps = tuple(maps)
    if len({cat.target(m) for m in maps}) > 1:
        raise CategoryError("wide pullback needs a common target")
    key = ("wpb", maps)
    if key in cat._cache:
        return cat._cache[key]
    cone_cache: dict[str, set] = {}

    def cones_at(w):
        if w not in cone_cache:
            cone_cache[w] = set(_cones(cat, w, maps))
        return cone_cache[w]

    result = None
    for apex in cat.objects:
        if any(len(cat.hom(w, apex)) != len(cones_at(w)) for w in cat.objects):
            continue
        for legs in sorted(cones_at(apex)):
            if _is_limit(cat, apex, legs, maps, cones_at):
                result = Cone(apex, legs)
                break
        if result:
            break
    cat._cache[key] = result
    return result


def pullback(cat: FiniteCategory, f: str, g: str) -> Optional[Cone]:
    """Pullback of the cospan ``f: A -> X <- Y: g``; legs are ``(to A, to Y)``."""
    return wide_pullback(cat, (f, g))


def is_pullback_square(cat: FiniteCategory, sq: Square) -> bool:
    maps = (sq.e, sq.p)
    cone_cache: dict[str, set] = {}

    def cones_at(w):
        if w not in cone_cache:
            cone_cache[w] = set(_cones(cat, w, maps))
        return cone_cache[w]

    return _is_limit(cat, sq.b, (sq.b_to_a, sq.b_to_y), maps, cones_at)


def mediating(cat: FiniteCategory, limit: Cone, legs: Sequence[str]) -> Optional[str]:
    """The unique ``m`` with ``limit.legs[i]∘m = legs[i]``, if any."""
    w = cat.source(legs[0]) if legs else None
    if w is None:
        raise CategoryError("mediating morphism needs at least one leg")
    found = [
        m for m in cat.hom(w, limit.apex)
        if all(cat.compose(pl, m) == leg for pl, leg in zip(limit.legs, legs))
    ]
    return found[0] if len(found) == 1 else None


def coproduct(cat: FiniteCategory, objs: Sequence[str]) -> Optional[Cone]:
    """Coproduct with coprojections ``legs[i]: objs[i] -> apex``, if it exists.

    The empty list returns an initial object (with no legs).
    """
    objs = tuple(objs)
    key = ("coprod", objs)
    if key in cat._cache:
        return cat._cache[key]
    cocone_cache: dict[str, list] = {}

    def cocones_at(z):
        if z not in cocone_cache:
            cocone_cache[z] = list(product(*(cat.hom(o, z) for o in objs)))
        return cocone_cache[z]

    result = None
    for apex in cat.objects:
        if any(len(cat.hom(apex, z)) != len(cocones_at(z)) for z in cat.objects):
            continue
        for legs in cocones_at(apex):
            ok = True
            for z in cat.objects:
                images = {tuple(cat.compose(m, leg) for leg in legs) for m in cat.hom(apex, z)}
                if len(images) != len(cocones_at(z)):
                    ok = False
                    break
            if ok:
                result = Cone(apex, tuple(legs))
                break
        if result:
            break
    cat._cache[key] = result
    return result


def is_coproduct_cocone(cat: FiniteCategory, legs: Sequence[str]) -> bool:
    """Whether ``legs`` (with a common target) exhibit it as a coproduct."""
    legs = tuple(legs)
    if not legs:
        raise CategoryError("use is_initial for the empty coproduct")
    apex = cat.target(legs[0])
    for z in cat.objects:
        cocones = 1
        for leg in legs:
            cocones *= len(cat.hom(cat.source(leg), z))
        homs = cat.hom(apex, z)
        if len(homs) != cocones:
            return False
        if len({tuple(cat.compose(m, leg) for leg in legs) for m in homs}) != cocones:
            return False
    return True


def comediating(cat: FiniteCategory, colimit: Cone, legs: Sequence[str]) -> Optional[str]:
    """The unique ``m`` with ``m∘colimit.legs[i] = legs[i]``."""
    if not legs:
        raise CategoryError("comediating morphism needs at least one leg")
    z = cat.target(legs[0])
    found = [
        m for m in cat.hom(colimit.apex, z)
        if all(cat.compose(m, cl) == leg for cl, leg in zip(colimit.legs, legs))
    ]
    return found[0] if len(found) == 1 else None


# -- builders --------------------------------------------------------------

def thin_category(
    objects: Iterable[str],
    relations: Iterable[tuple[str, str]],
    names: Optional[Mapping[tuple[str, str], str]] = None,
    name: str = "",
) -> FiniteCategory:
    """The preorder category generated by arrows ``a -> b``.

    Morphism ids default to ``"a->b"`` and identities to ``"id_a"``;
    ``names`` overrides individual ids.
    """
    objects = sorted(set(objects))
    reach = {a: {a} for a in objects}
    for a, b in relations:
        reach[a].add(b)
    changed = True
    while changed:
        changed = False
        for a in objects:
            new = set().union(*(reach[b] for b in reach[a]))
            if new != reach[a]:
                reach[a] = new
                changed = True
    names = dict(names or {})

    def mid(a, b):
        if (a, b) in names:
            return names[(a, b)]
        return f"id_{a}" if a == b else f"{a}->{b}"

    morphisms = {mid(a, b): (a, b) for a in objects for b in reach[a]}
    identities = {a: mid(a, a) for a in objects}
    table = {}
    for a in objects:
        for b in reach[a]:
            for c in reach[b]:
                if a != b and b != c:
                    table[(mid(b, c), mid(a, b))] = mid(a, c)
    return FiniteCategory(objects, morphisms, identities, table, name=name)


def terminal_category(obj: str = "*") -> FiniteCategory:
    return FiniteCategory([obj], {}, {obj: f"id_{obj}"}, {}, name="terminal")
