"""Sieves, Grothendieck topologies generated by cd-structures, simple
coverings and the completeness / regularity deciders."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Any, Iterable, Mapping, Optional

from .fincat import (
    CategoryError,
    FiniteCategory,
    Square,
    initial_objects,
    inverse,
    is_initial,
    is_isomorphism,
    is_monomorphism,
    is_pullback_square,
    isomorphisms,
    mediating,
    pullback,
)


@dataclass
class Verdict:
    """Boolean outcome of a decider plus whatever certifies it."""

    ok: bool
    reason: str = ""
    witness: Any = None
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok


# -- sieves ------------------------------------------------------------------

@dataclass(frozen=True)
class Sieve:
    target: str
    members: frozenset

    def __contains__(self, f: str) -> bool:
        return f in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __le__(self, other: "Sieve") -> bool:
        return self.target == other.target and self.members <= other.members

    def sorted_members(self) -> list[str]:
        return sorted(self.members)


def sieve_generated_by(cat: FiniteCategory, target: str, legs: Iterable[str]) -> Sieve:
    members = set()
    for f in legs:
        if cat.target(f) != target:
            raise CategoryError(f"leg {f} does not have target {target}")
        for g in cat.morphisms_into(cat.source(f)):
            members.add(cat.compose(f, g))
    return Sieve(target, frozenset(members))


def maximal_sieve(cat: FiniteCategory, x: str) -> Sieve:
    return Sieve(x, frozenset(cat.morphisms_into(x)))


def empty_sieve(x: str) -> Sieve:
    return Sieve(x, frozenset())


def is_sieve(cat: FiniteCategory, s: Sieve) -> bool:
    for f in s.members:
        if cat.target(f) != s.target:
            return False
        for g in cat.morphisms_into(cat.source(f)):
            if cat.compose(f, g) not in s.members:
                return False
    return True


def pullback_sieve(cat: FiniteCategory, f: str, s: Sieve) -> Sieve:
    """``f*(S) = {g : f∘g ∈ S}`` for ``f: W -> target(S)``."""
    if cat.target(f) != s.target:
        raise CategoryError(f"{f} does not land in {s.target}")
    w = cat.source(f)
    return Sieve(w, frozenset(g for g in cat.morphisms_into(w) if cat.compose(f, g) in s.members))


def all_sieves(cat: FiniteCategory, x: str) -> list[Sieve]:
    """Every sieve on ``x``, sorted by size then members."""
    key = ("sieves", x)
    if key in cat._cache:
        return cat._cache[key]
    principal = {f: sieve_generated_by(cat, x, [f]).members for f in cat.morphisms_into(x)}
    seen = {frozenset()}
    frontier = [frozenset()]
    while frontier:
        nxt = []
        for s in frontier:
            for f, pf in principal.items():
                if f in s:
                    continue
                t = s | pf
                if t not in seen:
                    seen.add(t)
                    nxt.append(t)
        frontier = nxt
    out = sorted((Sieve(x, m) for m in seen), key=lambda s: (len(s), sorted(s.members)))
    cat._cache[key] = out
    return out


# -- topologies ----------------------------------------------------------------

class Topology:
    """Covering sieves for every object of a finite category."""

    def __init__(self, cat: FiniteCategory, covering: Mapping[str, Iterable[Sieve]]):
        self.cat = cat
        self.covering: dict[str, frozenset] = {x: frozenset(covering.get(x, ())) for x in cat.objects}
        self._minimal: dict[str, Sieve] = {}

    def is_covering(self, s: Sieve) -> bool:
        return s in self.covering[s.target]

    def sieves(self, x: str) -> list[Sieve]:
        return sorted(self.covering[x], key=lambda s: (len(s), sorted(s.members)))

    def minimal_sieve(self, x: str) -> Sieve:
        """Intersection of all covering sieves of ``x`` (itself covering)."""
        if x not in self._minimal:
            members = frozenset(self.cat.morphisms_into(x))
            for s in self.covering[x]:
                members &= s.members
            self._minimal[x] = Sieve(x, members)
        return self._minimal[x]

    def count(self) -> int:
        return sum(len(v) for v in self.covering.values())

    def __eq__(self, other) -> bool:
        return isinstance(other, Topology) and self.covering == other.covering

    def __repr__(self) -> str:
        return f"<Topology: {self.count()} covering sieves>"


def smallest_topology(cat: FiniteCategory, generators: Iterable[tuple[str, Sieve]]) -> Topology:
    """Least family of sieves containing ``generators`` that satisfies the
    Grothendieck axioms (maximal sieves, stability, transitivity)."""
    cover: dict[str, set] = {x: {maximal_sieve(cat, x)} for x in cat.objects}
    for x, s in generators:
        if s.target != x:
            raise CategoryError(f"generator sieve on {s.target} listed for {x}")
        cover[x].add(s)
    pulled: dict[tuple[str, Sieve], Sieve] = {}

    def pull(f: str, s: Sieve) -> Sieve:
        key = (f, s)
        if key not in pulled:
            pulled[key] = pullback_sieve(cat, f, s)
        return pulled[key]

    changed = True
    while changed:
        changed = False
        # stability
        for x in cat.objects:
            for s in list(cover[x]):
                for f in cat.morphisms_into(x):
                    t = pull(f, s)
                    if t not in cover[t.target]:
                        cover[t.target].add(t)
                        changed = True
        # transitivity (subsumes upward closure)
        for x in cat.objects:
            for s in all_sieves(cat, x):
                if s in cover[x]:
                    continue
                for r in list(cover[x]):
                    if all(pull(f, s) in cover[cat.source(f)] for f in r.members):
                        cover[x].add(s)
                        changed = True
                        break
    return Topology(cat, cover)


def check_topology_axioms(top: Topology) -> list[str]:
    """Independent re-check of the three axioms; returns violations."""
    cat = top.cat
    problems = []
    for x in cat.objects:
        if not top.is_covering(maximal_sieve(cat, x)):
            problems.append(f"maximal sieve on {x} is not covering")
        for s in top.covering[x]:
            if not is_sieve(cat, s):
                problems.append(f"covering family on {x} is not a sieve")
            for f in cat.morphisms_into(x):
                if not top.is_covering(pullback_sieve(cat, f, s)):
                    problems.append(f"pullback of a covering sieve of {x} along {f} is not covering")
        for s in all_sieves(cat, x):
            if top.is_covering(s):
                continue
            for r in top.covering[x]:
                if all(top.is_covering(pullback_sieve(cat, f, s)) for f in r.members):
                    problems.append(f"transitivity: sieve {sorted(s.members)} on {x} should cover")
                    break
    return problems


# -- cd-structures ---------------------------------------------------------------

def squares_isomorphic(cat: FiniteCategory, q1: Square, q2: Square) -> bool:
    """Four corner isomorphisms commuting with all structure maps."""
    for fb in isomorphisms(cat, q1.b, q2.b):
        for fa in isomorphisms(cat, q1.a, q2.a):
            if cat.compose(fa, q1.b_to_a) != cat.compose(q2.b_to_a, fb):
                continue
            for fy in isomorphisms(cat, q1.y, q2.y):
                if cat.compose(fy, q1.b_to_y) != cat.compose(q2.b_to_y, fb):
                    continue
                for fx in isomorphisms(cat, q1.x, q2.x):
                    if (cat.compose(fx, q1.e) == cat.compose(q2.e, fa)
                            and cat.compose(fx, q1.p) == cat.compose(q2.p, fy)):
                        return True
    return False


def square_morphisms(cat: FiniteCategory, q1: Square, q2: Square) -> list[tuple[str, str, str, str]]:
    """All ``(f_b, f_a, f_y, f_x)`` forming a map of squares ``q1 -> q2``."""
    out = []
    for fx in cat.hom(q1.x, q2.x):
        for fa in cat.hom(q1.a, q2.a):
            if cat.compose(q2.e, fa) != cat.compose(fx, q1.e):
                continue
            for fy in cat.hom(q1.y, q2.y):
                if cat.compose(q2.p, fy) != cat.compose(fx, q1.p):
                    continue
                for fb in cat.hom(q1.b, q2.b):
                    if (cat.compose(q2.b_to_a, fb) == cat.compose(fa, q1.b_to_a)
                            and cat.compose(q2.b_to_y, fb) == cat.compose(fy, q1.b_to_y)):
                        out.append((fb, fa, fy, fx))
    return out


class CdStructure:
    """A finite set of commutative squares; membership is up to isomorphism."""

    def __init__(self, cat: FiniteCategory, squares: Iterable[Square], name: str = ""):
        self.cat = cat
        self.name = name
        uniq: dict[tuple, Square] = {}
        for q in squares:
            key = (q.b_to_a, q.b_to_y, q.e, q.p)
            uniq.setdefault(key, q)
        self.squares: tuple[Square, ...] = tuple(uniq.values())
        self._cache: dict = {}

    def validate(self) -> list[str]:
        out = []
        for q in self.squares:
            out.extend(q.check(self.cat))
        return out

    def contains(self, sq: Square) -> bool:
        return any(squares_isomorphic(self.cat, sq, q) for q in self.squares)

    def orbit(self) -> tuple[Square, ...]:
        """The stored squares together with every square isomorphic to one,
        obtained by transporting along corner isomorphisms."""
        if "orbit" not in self._cache:
            cat = self.cat
            seen = {(q.b_to_a, q.b_to_y, q.e, q.p) for q in self.squares}
            out = list(self.squares)
            isos = {x: [(f, inverse(cat, f)) for f in cat.morphisms_from(x) if is_isomorphism(cat, f)]
                    for x in cat.objects}
            for q in self.squares:
                k = 0
                for (pb, ib), (pa, ia), (py, iy), (px, _) in product(isos[q.b], isos[q.a], isos[q.y], isos[q.x]):
                    key = (cat.compose_chain(pa, q.b_to_a, ib), cat.compose_chain(py, q.b_to_y, ib),
                           cat.compose_chain(px, q.e, ia), cat.compose_chain(px, q.p, iy))
                    if key in seen:
                        continue
                    seen.add(key)
                    k += 1
                    out.append(Square(cat.target(pb), cat.target(pa), cat.target(py), cat.target(px), *key,
                                      name=f"{q.label()}~{k}"))
            self._cache["orbit"] = tuple(out)
        return self._cache["orbit"]

    def square(self, name: str) -> Square:
        for q in self.squares:
            if q.name == name:
                return q
        raise KeyError(name)

    def __iter__(self):
        return iter(self.squares)

    def __len__(self) -> int:
        return len(self.squares)

    def __repr__(self) -> str:
        return f"<CdStructure {self.name!r}: {len(self.squares)} squares>"


def union_cd(p1: CdStructure, p2: CdStructure) -> CdStructure:
    if p1.cat is not p2.cat:
        raise CategoryError("cd-structures live on different categories")
    return CdStructure(p1.cat, list(p1.squares) + list(p2.squares), name=f"{p1.name}+{p2.name}")


def cd_topology(P: CdStructure) -> Topology:
    if "topology" in P._cache:
        return P._cache["topology"]
    cat = P.cat
    inits = initial_objects(cat)
    if not inits:
        raise CategoryError("cd-topology needs an initial object")
    gens = [(q.x, sieve_generated_by(cat, q.x, [q.e, q.p])) for q in P.squares]
    gens += [(i, empty_sieve(i)) for i in inits]
    top = smallest_topology(cat, gens)
    P._cache["topology"] = top
    return top


@dataclass(frozen=True)
class CoveringFamily:
    target: str
    legs: frozenset

    def sieve(self, cat: FiniteCategory) -> Sieve:
        return sieve_generated_by(cat, self.target, self.legs)

    def sorted_legs(self) -> list[str]:
        return sorted(self.legs)


def simple_coverings(P: CdStructure) -> dict[str, frozenset]:
    """Least class containing isomorphisms and closed under splicing a
    distinguished square with simple families on its ``y`` and ``a`` corners."""
    if "simple" in P._cache:
        return P._cache["simple"]
    cat = P.cat
    fams: dict[str, set] = {x: set() for x in cat.objects}
    for x in cat.objects:
        for f in cat.morphisms_into(x):
            if is_isomorphism(cat, f):
                fams[x].add(CoveringFamily(x, frozenset([f])))
    # splicing is symmetric in the two sides, so squares equal up to swapping them act alike
    spliced, seen = [], set()
    for q in P.orbit():
        key = frozenset([(q.p, q.y), (q.e, q.a)])
        if key not in seen:
            seen.add(key)
            spliced.append(q)
    pushed: dict[tuple[str, CoveringFamily], frozenset] = {}

    def push(m: str, fam: CoveringFamily) -> frozenset:
        if (m, fam) not in pushed:
            pushed[(m, fam)] = frozenset(cat.compose(m, l) for l in fam.legs)
        return pushed[(m, fam)]

    # semi-naive iteration: each round only splices pairs involving a new family
    new = {x: set(v) for x, v in fams.items()}
    while any(new.values()):
        fresh: dict[str, set] = {x: set() for x in cat.objects}
        for q in spliced:
            old_y = fams[q.y] - new[q.y]
            pairs = [(fy, fa) for fy in new[q.y] for fa in fams[q.a]]
            pairs += [(fy, fa) for fy in old_y for fa in new[q.a]]
            for fy, fa in pairs:
                fam = CoveringFamily(q.x, push(q.p, fy) | push(q.e, fa))
                if fam not in fams[q.x]:
                    fresh[q.x].add(fam)
        for x in cat.objects:
            fams[x] |= fresh[x]
        new = fresh
    out = {x: frozenset(v) for x, v in fams.items()}
    P._cache["simple"] = out
    return out


def simple_sieves(P: CdStructure) -> dict[str, set]:
    if "simple_sieves" not in P._cache:
        P._cache["simple_sieves"] = {
            x: {f.sieve(P.cat) for f in fams} for x, fams in simple_coverings(P).items()
        }
    return P._cache["simple_sieves"]


def minimal_simple_sieves(P: CdStructure) -> dict[str, list[frozenset]]:
    """Inclusion-minimal sieves generated by simple coverings.

    Splicing is monotone in both inputs, so running the fixed point on
    minimal sieves only produces every simple sieve up to enlargement.
    This stays small where the full class of simple families explodes.
    """
    if "min_simple" in P._cache:
        return P._cache["min_simple"]
    cat = P.cat
    mins: dict[str, list[frozenset]] = {x: [frozenset(cat.morphisms_into(x))] for x in cat.objects}

    def add(x: str, s: frozenset) -> bool:
        if any(t <= s for t in mins[x]):
            return False
        mins[x] = [t for t in mins[x] if not s <= t] + [s]
        return True

    changed = True
    while changed:
        changed = False
        for q in P.orbit():
            for sy in list(mins[q.y]):
                for sa in list(mins[q.a]):
                    s = frozenset(cat.compose(q.p, g) for g in sy) | frozenset(cat.compose(q.e, g) for g in sa)
                    if add(q.x, s):
                        changed = True
    P._cache["min_simple"] = mins
    return mins


def _contains_simple(P: CdStructure, s: Sieve) -> bool:
    return any(t <= s.members for t in minimal_simple_sieves(P)[s.target])


def is_complete(P: CdStructure) -> Verdict:
    cat = P.cat
    top = cd_topology(P)
    for x in cat.objects:
        if is_initial(cat, x):
            continue
        for s in top.sieves(x):
            if not _contains_simple(P, s):
                return Verdict(False, f"covering sieve on {x} contains no simple covering", s)
    return Verdict(True, "every covering sieve of a non-initial object contains a simple covering")


def complete_criterion(P: CdStructure) -> Verdict:
    cat = P.cat
    for i in initial_objects(cat):
        for f in cat.morphisms_into(i):
            if not is_isomorphism(cat, f):
                return Verdict(False, f"morphism {f} into the initial object {i} is not an isomorphism", f)
    for q in P.squares:
        ep = sieve_generated_by(cat, q.x, [q.e, q.p])
        for f in cat.morphisms_into(q.x):
            if not _contains_simple(P, pullback_sieve(cat, f, ep)):
                return Verdict(False, f"pullback of the sieve of {q.label()} along {f} contains no simple covering",
                               (q, f))
    return Verdict(True, "initial object strict and every pulled-back square sieve contains a simple covering")


def is_regular(P: CdStructure) -> Verdict:
    from .sheaves import regularity_epi_check

    cat = P.cat
    for q in P.squares:
        if not is_pullback_square(cat, q):
            return Verdict(False, f"condition 1: {q.label()} is not a pull-back square", q)
        if not is_monomorphism(cat, q.e):
            return Verdict(False, f"condition 2: {q.e} is not a monomorphism", q)
    for q in P.squares:
        v = regularity_epi_check(P, q)
        if not v:
            return Verdict(False, f"condition 3: {v.reason}", q)
    return Verdict(True, "pull-back squares, e mono, and the diagonal map of sheaves is epi")


def derived_square(cat: FiniteCategory, q: Square) -> Optional[Square]:
    """The square with corners B, B×_A B, Y, Y×_X Y and diagonal verticals."""
    yy = pullback(cat, q.p, q.p)
    bb = pullback(cat, q.b_to_a, q.b_to_a)
    if yy is None or bb is None:
        return None
    diag_y = mediating(cat, yy, (cat.identity(q.y), cat.identity(q.y)))
    diag_b = mediating(cat, bb, (cat.identity(q.b), cat.identity(q.b)))
    bottom = mediating(cat, yy, (cat.compose(q.b_to_y, bb.legs[0]), cat.compose(q.b_to_y, bb.legs[1])))
    if None in (diag_y, diag_b, bottom):
        return None
    return Square(q.b, bb.apex, q.y, yy.apex, diag_b, q.b_to_y, bottom, diag_y, name=f"d({q.label()})")


def regular_criterion_derived_square(P: CdStructure) -> Verdict:
    cat = P.cat
    for q in P.squares:
        if not is_pullback_square(cat, q):
            return Verdict(False, f"{q.label()} is not a pull-back square", q)
        if not is_monomorphism(cat, q.e):
            return Verdict(False, f"{q.e} is not a monomorphism", q)
        d = derived_square(cat, q)
        if d is None:
            return Verdict(False, f"fiber products for d({q.label()}) do not exist", q)
        if not P.contains(d):
            return Verdict(False, f"d({q.label()}) is not distinguished", d)
    return Verdict(True, "every derived square is distinguished")


# -- slices --------------------------------------------------------------------

def slice_category(cat: FiniteCategory, u: str) -> FiniteCategory:
    """``C/U``: objects are morphisms into ``u``; a morphism ``h/g`` goes from
    ``g∘h`` to ``g``."""
    objects = list(cat.morphisms_into(u))
    morphisms = {}
    identities = {}
    split = {}
    for g in objects:
        for h in cat.morphisms_into(cat.source(g)):
            morphisms[f"{h}/{g}"] = (cat.compose(g, h), g)
            split[f"{h}/{g}"] = (h, g)
        identities[g] = f"{cat.identity(cat.source(g))}/{g}"

    def compose(m2: str, m1: str) -> str:
        h2, g2 = split[m2]
        h1, _ = split[m1]
        return f"{cat.compose(h2, h1)}/{g2}"

    return FiniteCategory(objects, morphisms, identities, compose, name=f"{cat.name}/{u}")


def slice_cd(P: CdStructure, u: str) -> CdStructure:
    cat = P.cat
    sl = slice_category(cat, u)
    squares = []
    for q in P.squares:
        for x in cat.hom(q.x, u):
            xa = cat.compose(x, q.e)
            xy = cat.compose(x, q.p)
            xb = cat.compose(xa, q.b_to_a)
            squares.append(Square(
                xb, xa, xy, x,
                f"{q.b_to_a}/{xa}", f"{q.b_to_y}/{xy}", f"{q.e}/{x}", f"{q.p}/{x}",
                name=f"{q.label()}@{x}",
            ))
    return CdStructure(sl, squares, name=f"{P.name}/{u}")
