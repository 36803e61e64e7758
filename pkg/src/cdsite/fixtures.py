"""Small sites used by the tests, the acceptance suite and the CLI."""

from __future__ import annotations

from dataclasses import dataclass

from .fincat import FiniteCategory, Square, thin_category
from .topology import CdStructure

TOY_ARROWS = {
    ("0", "A"): "0A", ("0", "B"): "0B", ("0", "X"): "0X", ("0", "Y"): "0Y",
    ("B", "A"): "a", ("B", "Y"): "b", ("A", "X"): "e", ("Y", "X"): "p", ("B", "X"): "d",
}


def toy_category() -> FiniteCategory:
    """The commutative square ``B -> A, Y -> X`` plus a strict initial object ``0``."""
    return thin_category("0ABXY", TOY_ARROWS.keys(), names=TOY_ARROWS, name="toy")


def toy_cd(cat: FiniteCategory | None = None) -> CdStructure:
    cat = cat or toy_category()
    squares = [
        Square("B", "A", "Y", "X", "a", "b", "e", "p", name="main"),
        Square("0", "A", "0", "A", "0A", "id_0", "id_A", "0A", name="side"),
        Square("0", "0", "0", "0", "id_0", "id_0", "id_0", "id_0", name="empty"),
    ]
    return CdStructure(cat, squares, name="toy")


def toy_disjoint_cd(cat: FiniteCategory | None = None) -> CdStructure:
    """The toy squares with ``main`` replaced by ``0 -> A, 0 -> Y, e, p``:
    complete (same topology) but not regular, since that square is not a
    pull-back."""
    cat = cat or toy_category()
    base = toy_cd(cat).squares
    disjoint = Square("0", "A", "Y", "X", "0A", "0Y", "e", "p", name="disjoint")
    return CdStructure(cat, [disjoint, *base[1:]], name="toy-disjoint")


def toy_density(cat: FiniteCategory | None = None):
    """``D_0`` = identities and maps from ``0``, plus ``e`` on ``X``;
    ``D_1(X) = {id, e}``; identities only from level 2 on."""
    from .density import DensityStructure

    cat = cat or toy_category()
    levels = {("0", 0): {"id_0"}, ("0", 1): {"id_0"}}
    for x in "ABY":
        levels[(x, 0)] = {f"id_{x}", f"0{x}"}
        levels[(x, 1)] = {f"id_{x}"}
    levels[("X", 0)] = {"id_X", "e", "0X"}
    levels[("X", 1)] = {"id_X", "e"}
    return DensityStructure(cat, levels, stabilization=2, name="toy")


def toy_space():
    """The three-point space ``b < a``, ``b < y`` whose opens form the toy category."""
    from .spaces import FiniteSpace

    return FiniteSpace(("a", "b", "y"), frozenset({("b", "a"), ("b", "y")}), name="toy-space")


def circle_space():
    """Four points ``a, b < c, d``: a finite model of the circle."""
    from .spaces import FiniteSpace

    less = frozenset((x, y) for x in "ab" for y in "cd")
    return FiniteSpace(tuple("abcd"), less, name="circle")


def sphere_space():
    """Six points in three layers of two: a finite model of the 2-sphere."""
    from .spaces import FiniteSpace

    layers = ["ab", "cd", "ef"]
    less = frozenset((x, y) for lo, hi in zip(layers, layers[1:]) for x in lo for y in hi)
    return FiniteSpace(tuple("abcdef"), less, name="sphere")


def point_space():
    from .spaces import FiniteSpace

    return FiniteSpace(("p",), frozenset(), name="point")


def two_points_space():
    from .spaces import FiniteSpace

    return FiniteSpace(("p", "q"), frozenset(), name="two-points")


def term_category(arity: int = 4, constants: int = 1) -> FiniteCategory:
    """Finite products ``X^0 = Y, X, …, X^arity`` of a set with ``constants``
    named points: a map ``X^m -> X^n`` is ``n`` terms, each a variable
    ``0..m-1`` or a constant ``c0, c1, …``.  Composition is substitution,
    evaluated lazily.  ``X^k`` is the ``k``-fold fiber power of ``X -> Y``.
    """
    from itertools import product

    obj = lambda k: "Y" if k == 0 else ("X" if k == 1 else f"X{k}")
    consts = [f"c{i}" for i in range(constants)]
    mid = lambda m, n, terms: f"{obj(m)}>{obj(n)}({','.join(map(str, terms))})"
    morphisms, parse, identities = {}, {}, {}
    for m in range(arity + 1):
        for n in range(arity + 1):
            for terms in product(list(range(m)) + consts, repeat=n):
                i = mid(m, n, terms)
                morphisms[i] = (obj(m), obj(n))
                parse[i] = (m, n, terms)
        identities[obj(m)] = mid(m, m, tuple(range(m)))

    def compose(g: str, f: str) -> str:
        m, _, ft = parse[f]
        _, p, gt = parse[g]
        return mid(m, p, tuple(ft[u] if isinstance(u, int) else u for u in gt))

    return FiniteCategory([obj(k) for k in range(arity + 1)], morphisms, identities, compose,
                          name=f"T({arity},{constants})")


def term_projection(cat: FiniteCategory) -> str:
    """The unique map ``X -> Y``."""
    return cat.hom("X", "Y")[0]


@dataclass
class ChunkyFixture:
    """A truncated chunky category with its designated binary sums."""

    cat: FiniteCategory
    sums: dict[tuple[str, str], tuple[str, str]]
    cap: int


def fam_fixture(base: FiniteCategory, cap: int, name: str = "") -> ChunkyFixture:
    """Finite families of objects of ``base`` with at most ``cap`` members.

    An object is a sorted tuple of base objects written ``x+y+…`` (``0`` for
    the empty family).  A morphism ``(x_i) -> (y_j)`` is a function ``α`` on
    indices with base morphisms ``x_i -> y_{α(i)}``; composition is evaluated
    lazily.  The designated sum of two families is their sorted
    concatenation, whenever it fits under ``cap``.
    """
    from itertools import combinations_with_replacement, product

    label = lambda fam: "+".join(fam) if fam else "0"
    mid = lambda src, dst, parts: f"{label(src)}>{label(dst)}[{','.join(f'{j}:{m}' for j, m in parts)}]"
    families = [fam for n in range(cap + 1) for fam in combinations_with_replacement(base.objects, n)]
    morphisms, parse, identities = {}, {}, {}
    for src in families:
        for dst in families:
            choices = [[(j, m) for j, y in enumerate(dst) for m in base.hom(x, y)] for x in src]
            for parts in product(*choices):
                i = mid(src, dst, parts)
                morphisms[i] = (label(src), label(dst))
                parse[i] = (src, dst, parts)
        identities[label(src)] = mid(src, src, [(i, base.identity(x)) for i, x in enumerate(src)])

    def compose(g: str, f: str) -> str:
        src, _, fp = parse[f]
        _, dst, gp = parse[g]
        return mid(src, dst, [(gp[j][0], base.compose(gp[j][1], m)) for j, m in fp])

    cat = FiniteCategory([label(f) for f in families], morphisms, identities, compose,
                         name=name or f"Fam({base.name},{cap})")
    sums = {}
    for fx in families:
        for fy in families:
            if len(fx) + len(fy) > cap:
                continue
            tagged = sorted([(x, 0, i) for i, x in enumerate(fx)] + [(y, 1, j) for j, y in enumerate(fy)])
            total = tuple(t[0] for t in tagged)
            pos = {(t[1], t[2]): k for k, t in enumerate(tagged)}
            legs = []
            for side, fam in ((0, fx), (1, fy)):
                legs.append(mid(fam, total, [(pos[(side, i)], base.identity(x)) for i, x in enumerate(fam)]))
            sums[(label(fx), label(fy))] = tuple(legs)
    return ChunkyFixture(cat, sums, cap)


def fam_category(base: FiniteCategory, cap: int, name: str = "") -> FiniteCategory:
    return fam_fixture(base, cap, name).cat


def chunky_fixtures() -> dict[str, ChunkyFixture]:
    """The truncated chunky categories used throughout the tests."""
    from .fincat import terminal_category

    point = terminal_category("1")
    z2 = FiniteCategory(["g"], {"t": ("g", "g")}, {"g": "1g"}, {("t", "t"): "1g"}, name="BZ/2")
    discrete = FiniteCategory(["p", "q"], {}, {"p": "1p", "q": "1q"}, {}, name="two points")
    arrow = thin_category("pq", [("p", "q")], name="arrow")
    subsets = thin_category(["n", "u", "v", "uv"], [("n", "u"), ("n", "v"), ("u", "uv"), ("v", "uv"), ("n", "uv")],
                            name="subsets of two")
    empty = FiniteCategory([], {}, {}, {}, name="empty")
    return {
        "finset3": fam_fixture(point, 3, name="FinSet≤3"),
        "fam-z2": fam_fixture(z2, 2),
        "fam-two-points": fam_fixture(discrete, 2),
        "fam-arrow": fam_fixture(arrow, 2),
        "fam-subsets": fam_fixture(subsets, 2),
        "degenerate": fam_fixture(empty, 2, name="degenerate"),
    }


def toy_with_nonstrict_initial() -> FiniteCategory:
    """The toy category plus an object ``U`` with a map ``z: U -> 0``, so the
    initial object is no longer strict.  ``End(U) = {id, k∘z}`` with
    ``k: 0 -> U``; every other hom-set has at most one element."""
    base = toy_category()
    objs = list(base.objects) + ["U"]
    morphisms = {m: (base.source(m), base.target(m)) for m in base.morphisms}
    identities = dict(base.identities)
    identities["U"] = "id_U"
    morphisms.update({"z": ("U", "0"), "0U": ("0", "U"), "kz": ("U", "U")})
    for x in "ABXY":
        morphisms[f"U{x}"] = ("U", x)
    by_ends: dict[tuple[str, str], set] = {}
    for m, ends in morphisms.items():
        by_ends.setdefault(ends, set()).add(m)

    def compose(g: str, f: str) -> str:
        ends = (morphisms[f][0], morphisms[g][1])
        if ends == ("U", "U"):
            return "kz"
        (h,) = by_ends[ends]
        return h

    return FiniteCategory(objs, morphisms, identities, compose, name="toy+U")


def parallel_pair_category() -> tuple[FiniteCategory, Square]:
    """``u, v: W -> A`` merged by ``f: A -> X``, and the pullback square
    ``(A, A, X, X; id, f, f, id)`` whose ``e = f`` is not a monomorphism."""
    cat = FiniteCategory(
        ["W", "A", "X"],
        {"u": ("W", "A"), "v": ("W", "A"), "f": ("A", "X"), "w": ("W", "X")},
        {"W": "id_W", "A": "id_A", "X": "id_X"},
        {("f", "u"): "w", ("f", "v"): "w"},
        name="parallel pair",
    )
    return cat, Square("A", "A", "X", "X", "id_A", "f", "f", "id_X", name="nonmono")


def random_point_functor(space, rng, groups=None):
    """Random stalk groups and homomorphisms along covering relations."""
    import numpy as np

    from .abelian import AbGroup, is_homomorphism, mat
    from .spaces import extend_from_covers

    groups = groups or [AbGroup.free(0), AbGroup.free(1), AbGroup.free(2), AbGroup.cyclic(2), AbGroup.cyclic(3)]
    stalks = {x: rng.choice(groups) for x in space.points}
    covers = {}
    for x, y in sorted(space.less):
        if any((x, z) in space.less and (z, y) in space.less for z in space.points):
            continue
        src, dst = stalks[y], stalks[x]
        for _ in range(50):
            m = mat([[rng.randint(-2, 2) for _ in range(src.ngens)] for _ in range(dst.ngens)],
                    (dst.ngens, src.ngens))
            if is_homomorphism(src, dst, m):
                break
        else:
            m = mat([[0] * src.ngens for _ in range(dst.ngens)], (dst.ngens, src.ngens))
        covers[(x, y)] = m
    return extend_from_covers(space, stalks, covers)


_TOY_SHEAVES: dict = {}


def toy_sheaf_family(P: CdStructure | None = None, n_random: int = 8, seed: int = 7) -> list:
    """Abelian sheaves on the toy site: ``Z(ρ(x))`` for every object and
    limits of random stalk data on the realizing space."""
    import random

    from .sheaves import z_rho
    from .spaces import realize_as_space, sheaf_from_points

    P = P or toy_cd()
    out = []
    for x in P.cat.objects:
        a = z_rho(P, x).sheaf
        a.name = f"Z(rho({x}))"
        out.append(a)
    real = realize_as_space(P)
    rng = random.Random(seed)
    for i in range(n_random):
        pf = random_point_functor(real.space, rng)
        F = sheaf_from_points(pf, real)
        F.name = f"stalks#{i}"
        out.append(F)
    return out


_POOL: list = []


def _random_pool() -> list:
    if not _POOL:
        fx = chunky_fixtures()
        _POOL.extend([toy_category(), toy_with_nonstrict_initial(), fx["fam-z2"].cat,
                      fx["fam-arrow"].cat, fx["finset3"].cat])
    return _POOL


def random_cd_structure(rng, max_objects: int = 6) -> CdStructure:
    """A random poset with a bottom element and a random set of its
    commutative squares, or a random set of squares on a small fixture."""
    from itertools import product

    if rng.random() < 0.25:
        cat = rng.choice(_random_pool())
    else:
        n = rng.randint(1, max_objects)
        names = [chr(ord("a") + i) for i in range(n)]
        rel = [(names[i], names[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.45]
        rel += [(names[0], y) for y in names[1:]]
        cat = thin_category(names, rel, name="random poset")
    objs = cat.objects
    pool = []
    for b, a, y, x in product(objs, repeat=4):
        for ba in cat.hom(b, a):
            for by in cat.hom(b, y):
                for e in cat.hom(a, x):
                    for p in cat.hom(y, x):
                        if cat.compose(e, ba) == cat.compose(p, by):
                            pool.append((b, a, y, x, ba, by, e, p))
                            if len(pool) > 4000:
                                break
    rng.shuffle(pool)
    k = rng.randint(0, min(len(pool), 6))
    squares = [Square(*t, name=f"q{i}") for i, t in enumerate(pool[:k])]
    return CdStructure(cat, squares, name="random")


def bundled_documents() -> dict:
    """The site documents shipped as ``cdsite/data/*.site``."""
    import random

    from .chunky import chunky_verdict, p_add
    from .presheaves import SetPresheaf, constant_presheaf, random_presheaf, representable
    from .siteformat import document_from
    from .spaces import constant_point_functor, realize_as_space, sheaf_from_points
    from .abelian import AbGroup

    docs = {}
    cat = toy_category()
    P = toy_cd(cat)
    two = constant_presheaf(cat, ["s", "t"], name="two-points")
    docs["toy"] = document_from("toy", cat, P, toy_density(cat),
                                presheaves=[_named(representable(cat, "X"), "h(X)"), two],
                                abelian=toy_sheaf_family(P))

    space = circle_space()
    P, _ = space.site()
    real = realize_as_space(P)
    rng = random.Random(11)
    const = sheaf_from_points(constant_point_functor(real.space, AbGroup.free(1)), real)
    const.name = "Z"
    extra = []
    for i in range(2):
        F = sheaf_from_points(random_point_functor(real.space, rng), real)
        F.name = f"stalks#{i}"
        extra.append(F)
    top = max(P.cat.objects, key=lambda x: len(P.cat.morphisms_into(x)))
    docs["circle"] = document_from("circle", P.cat, P, space.height_density(),
                                   presheaves=[_named(representable(P.cat, top), f"h({top})")],
                                   abelian=[const] + extra)

    fams = chunky_fixtures()
    for key in ("finset3", "fam-z2"):
        fx = fams[key]
        w, _ = chunky_verdict(fx.cat, fx.sums)
        rng = random.Random(5)
        pres = [_named(random_presheaf(fx.cat, rng, max_gens=2, max_quot=2), f"R{i}") for i in range(2)]
        docs[key] = document_from(key, fx.cat, p_add(w), presheaves=pres, chunky=fx.sums)

    cat = toy_with_nonstrict_initial()
    P = CdStructure(cat, toy_cd(cat).squares, name="toy-nonstrict")
    docs["toy-nonstrict"] = document_from("toy-nonstrict", cat, P)
    return docs


def _named(F, name: str):
    F.name = name
    return F
