"""Finite T0 spaces, their sites of open subsets, and functors on points.

Points form a poset; the open sets are the down-sets, so the smallest
open neighbourhood of ``x`` is ``↓x``.  A sheaf on the site of opens is
determined by its stalks ``F(↓x)`` and the restrictions between them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Optional

import numpy as np

from .abelian import AbGroup, direct_sum, eye, is_zero_map, kernel, mat, zeros
from .fincat import FiniteCategory, Square, thin_category
from .presheaves import AbPresheaf
from .topology import CdStructure, Topology, cd_topology


def open_name(points: Iterable[str]) -> str:
    return "{" + ",".join(sorted(points)) + "}"


@dataclass
class FiniteSpace:
    """A finite poset of points; ``less`` lists pairs ``x < y`` (any
    generating set, closed transitively)."""

    points: tuple[str, ...]
    less: frozenset = frozenset()
    name: str = ""
    _below: dict = field(default_factory=dict, repr=False, compare=False)
    _site: Optional[tuple] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.points = tuple(sorted(self.points))
        below = {x: {x} for x in self.points}
        for x, y in self.less:
            below[y].add(x)
        changed = True
        while changed:
            changed = False
            for y in self.points:
                new = set().union(*(below[x] for x in below[y]))
                if new != below[y]:
                    below[y] = new
                    changed = True
        for y in self.points:
            for x in below[y]:
                if x != y and y in below[x]:
                    raise ValueError(f"order is not antisymmetric at {x}, {y}")
        self._below = {y: frozenset(v) for y, v in below.items()}
        self.less = frozenset((x, y) for y in self.points for x in self._below[y] if x != y)

    def leq(self, x: str, y: str) -> bool:
        return x in self._below[y]

    def down(self, x: str) -> frozenset:
        return self._below[x]

    def height(self, x: str) -> int:
        """Length of the longest chain ending at ``x``."""
        below = [y for y in self._below[x] if y != x]
        return 1 + max(self.height(y) for y in below) if below else 0

    def opens(self) -> list[frozenset]:
        out = []
        pts = self.points
        for r in range(len(pts) + 1):
            for sub in combinations(pts, r):
                s = frozenset(sub)
                if all(self._below[x] <= s for x in s):
                    out.append(s)
        return out

    def chains(self, subset: Iterable[str], length: int) -> list[tuple[str, ...]]:
        """Strictly increasing chains ``x_0 < ... < x_{length-1}`` inside ``subset``."""
        sub = sorted(subset)
        out = [(x,) for x in sub]
        for _ in range(length - 1):
            out = [c + (y,) for c in out for y in sub if c[-1] != y and self.leq(c[-1], y)]
        return out if length > 0 else [()]

    # -- the site of opens ---------------------------------------------------

    def site(self) -> tuple[CdStructure, dict[frozenset, str]]:
        """Category of opens with all Mayer–Vietoris squares
        ``(U∩V, U, V, U∪V)``, and the object of each open set."""
        if self._site is None:
            opens = self.opens()
            names = {u: open_name(u) for u in opens}
            rel = [(names[u], names[v]) for u in opens for v in opens if u < v]
            cat = thin_category(names.values(), rel, name=f"Open({self.name})")
            mor = lambda u, v: cat.hom(names[u], names[v])[0]
            squares = []
            for u in opens:
                for v in opens:
                    b, x = u & v, u | v
                    squares.append(Square(
                        names[b], names[u], names[v], names[x],
                        mor(b, u), mor(b, v), mor(u, x), mor(v, x),
                        name=f"MV[{names[u]};{names[v]}]",
                    ))
            self._site = (CdStructure(cat, squares, name=f"MV({self.name})"), names)
        return self._site

    def height_density(self):
        """``D_n(U)`` = inclusions ``V ⊆ U`` whose complement has only points of height ≥ n."""
        from .density import DensityStructure

        P, names = self.site()
        cat = P.cat
        opens = self.opens()
        top = max((self.height(x) for x in self.points), default=0)
        levels = {}
        for u in opens:
            for n in range(top + 2):
                levels[(names[u], n)] = frozenset(
                    cat.hom(names[v], names[u])[0] for v in opens
                    if v <= u and all(self.height(x) >= n for x in u - v)
                )
        return DensityStructure(cat, levels, stabilization=top + 1, name=f"height({self.name})")


# -- functors on points --------------------------------------------------------

@dataclass
class PointFunctor:
    """Stalk data: ``groups[x]`` and, for ``x < y``, ``maps[(x, y)]: F(y) -> F(x)``."""

    space: FiniteSpace
    groups: dict[str, AbGroup]
    maps: dict[tuple[str, str], np.ndarray]

    def res(self, x: str, y: str) -> np.ndarray:
        if x == y:
            return eye(self.groups[x].ngens)
        return self.maps[(x, y)]

    def validate(self) -> list[str]:
        out = []
        sp = self.space
        for x, y in sp.less:
            if (x, y) not in self.maps:
                out.append(f"missing map F({y}) -> F({x})")
        if out:
            return out
        for x, y in sp.less:
            for z in sp.points:
                if (y, z) in sp.less:
                    lhs = self.res(x, z)
                    rhs = self.res(x, y).dot(self.res(y, z))
                    if not is_zero_map(lhs - rhs, self.groups[x]):
                        out.append(f"functoriality fails on {x} < {y} < {z}")
        return out


def constant_point_functor(space: FiniteSpace, group: AbGroup) -> PointFunctor:
    return PointFunctor(
        space, {x: group for x in space.points},
        {(x, y): eye(group.ngens) for x, y in space.less},
    )


def extend_from_covers(space: FiniteSpace, groups: Mapping[str, AbGroup],
                       covers: Mapping[tuple[str, str], np.ndarray]) -> PointFunctor:
    """Compose maps along covering relations to get every ``F(y) -> F(x)``."""
    maps: dict = dict(covers)
    for _ in space.points:
        for (x, y), m in list(maps.items()):
            for (y2, z), m2 in list(maps.items()):
                if y2 == y and (x, z) not in maps:
                    maps[(x, z)] = m.dot(m2)
    return PointFunctor(space, dict(groups), {k: v for k, v in maps.items() if k in space.less})


def sheaf_from_points(pf: PointFunctor, realization: Optional["SpaceRealization"] = None) -> AbPresheaf:
    """The sheaf on opens ``U ↦ lim_{x∈U} F(x)`` (compatible stalk families).

    With a realization the sheaf lives on the realized site instead of the
    space's own site of opens.
    """
    sp = pf.space
    if realization is None:
        P, names = sp.site()
        cat = P.cat
    else:
        cat = realization.cat
        names = {u: x for x, u in realization.open_of.items()}
    opens = list(names)
    data = {}
    for u in opens:
        pts = sorted(u)
        offs, n = {}, 0
        for x in pts:
            offs[x] = n
            n += pf.groups[x].ngens
        amb = direct_sum([pf.groups[x] for x in pts])
        rows, tgts = [], []
        for x in pts:
            for y in pts:
                if (x, y) in sp.less:
                    blk = zeros(pf.groups[x].ngens, n)
                    blk[:, offs[y]:offs[y] + pf.groups[y].ngens] = pf.res(x, y)
                    blk[:, offs[x]:offs[x] + pf.groups[x].ngens] -= eye(pf.groups[x].ngens)
                    rows.append(blk)
                    tgts.append(pf.groups[x])
        m = np.vstack(rows) if rows else zeros(0, n)
        data[u] = (kernel(amb, direct_sum(tgts), m), offs, n)
    by_name = {names[u]: u for u in opens}

    def restrict(f: str) -> np.ndarray:
        v, u = by_name[cat.source(f)], by_name[cat.target(f)]
        sv, offv, nv = data[v]
        su, offu, nu = data[u]
        proj = zeros(nv, nu)
        for x in v:
            k = pf.groups[x].ngens
            proj[offv[x]:offv[x] + k, offu[x]:offu[x] + k] = eye(k)
        img = proj.dot(su.basis)
        cols = [sv.coordinates(img[:, j]) for j in range(img.shape[1])]
        if not cols:
            return zeros(sv.group.ngens, 0)
        return mat([list(c) for c in cols], (len(cols), sv.group.ngens)).T.copy()

    return AbPresheaf(cat, {names[u]: data[u][0].group for u in opens}, restrict, name="lim F")


# -- recognising sites of opens ----------------------------------------------------

@dataclass
class SpaceRealization:
    """An isomorphism between a site and the opens of a finite space."""

    space: FiniteSpace
    point_object: dict[str, str]
    open_of: dict[str, frozenset]
    cat: FiniteCategory

    def point_functor(self, F: AbPresheaf) -> PointFunctor:
        cat = F.cat
        groups = {x: F(self.point_object[x]) for x in self.space.points}
        maps = {}
        for x, y in self.space.less:
            f = cat.hom(self.point_object[x], self.point_object[y])[0]
            maps[(x, y)] = F.res(f)
        return PointFunctor(self.space, groups, maps)


def realize_as_space(P: CdStructure) -> Optional[SpaceRealization]:
    """If the site of ``P`` is the site of opens of a finite space with its
    canonical topology, return that space; otherwise ``None``."""
    if "space" in P._cache:
        return P._cache["space"]
    P._cache["space"] = out = _realize(P)
    return out


def _realize(P: CdStructure) -> Optional[SpaceRealization]:
    cat = P.cat
    objs = cat.objects
    if any(len(cat.hom(a, b)) > 1 for a in objs for b in objs):
        return None
    if any(a != b and cat.hom(a, b) and cat.hom(b, a) for a in objs for b in objs):
        return None
    top = cd_topology(P)
    from .fincat import is_initial

    pts = [x for x in objs if not is_initial(cat, x) and len(top.covering[x]) == 1]
    open_of = {u: frozenset(x for x in pts if cat.hom(x, u)) for u in objs}
    less = frozenset((x, y) for x in pts for y in pts if x != y and cat.hom(x, y))
    space = FiniteSpace(tuple(pts), less, name=cat.name)
    opens = space.opens()
    if sorted(map(sorted, open_of.values())) != sorted(map(sorted, opens)):
        return None
    if len(set(open_of.values())) != len(objs):
        return None
    for a in objs:
        for b in objs:
            if bool(cat.hom(a, b)) != (open_of[a] <= open_of[b]):
                return None
    # the topology must be the canonical one: a sieve covers iff its members' points exhaust U
    from .topology import all_sieves

    for u in objs:
        for s in all_sieves(cat, u):
            union = frozenset().union(*(open_of[cat.source(f)] for f in s.members)) if s.members else frozenset()
            if top.is_covering(s) != (union == open_of[u]):
                return None
    return SpaceRealization(space, {x: x for x in pts}, open_of, cat)
